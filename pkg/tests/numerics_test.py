import numpy as np
import pytest

from hybeam.errors import (
    DimensionError,
    IndefiniteMatrixError,
    NotHermitianError,
    NumericalError,
    SingularChannelError,
    SpectralAliasingError,
)
from hybeam.numerics import (
    SINGULAR_TOL,
    TapSequence,
    circular_convolve,
    dft_of_taps,
    hermitian,
    logdet_psd,
    pinv_tall,
)


def _random_taps(rng, offset, span, rows, cols):
    """
    Random complex tap sequence

    Args:
        rng (Generator): source of randomness
        offset (int): delay of the first tap
        span (int): number of taps
        rows, cols (int): tap matrix shape
    Returns:
        (TapSequence): the sequence
    """
    values = rng.standard_normal((span, rows, cols)) + 1j * rng.standard_normal((span, rows, cols))
    return TapSequence(offset, values)


class TestTapSequence(object):

    def test_support(self):
        seq = TapSequence(-2, np.ones((3, 2, 2)))
        assert seq.span == 3
        assert seq.shape == (2, 2)
        assert list(seq.delays) == [-2, -1, 0]
        assert seq.last == 0
        assert np.all(seq.tap(1) == 0)
        assert np.all(seq.tap(-2) == 1)

    def test_immutable(self):
        seq = TapSequence(0, np.eye(2))
        with pytest.raises(ValueError):
            seq.taps[0, 0, 0] = 5

    def test_add(self):
        a = TapSequence(-1, np.ones((2, 1, 1)))
        b = TapSequence(0, 2 * np.ones((2, 1, 1)))
        total = a + b
        assert total.offset == -1
        assert np.allclose(total.taps[:, 0, 0], [1, 3, 2])

    def test_invalid(self):
        with pytest.raises(NumericalError):
            TapSequence(0, np.array([[np.nan]]))
        with pytest.raises(DimensionError):
            TapSequence(0, np.ones(3))
        with pytest.raises(DimensionError):
            TapSequence(0, np.ones((1, 2, 2))) + TapSequence(0, np.ones((1, 2, 3)))


class TestDft(object):

    def test_single_tap(self):
        tap = np.array([[1 + 2j, 3], [0, -1j]])
        grid = dft_of_taps(TapSequence(0, tap), 5)
        assert grid.K == 5
        for k in range(5):
            assert np.allclose(grid[k], tap)

    def test_delayed_tap(self):
        grid = dft_of_taps(TapSequence(1, np.ones((1, 1, 1))), 4)
        assert np.allclose(grid.mats[:, 0, 0], [1, -1j, -1, 1j])

    def test_negative_delay(self):
        grid = dft_of_taps(TapSequence(-1, np.ones((1, 1, 1))), 4)
        assert np.allclose(grid.mats[:, 0, 0], [1, 1j, -1, -1j])

    def test_aliasing(self):
        with pytest.raises(SpectralAliasingError):
            dft_of_taps(TapSequence(0, np.ones((5, 1, 1))), 4)


class TestCircularConvolve(object):

    def test_convolution_theorem(self):
        rng = np.random.default_rng(11)
        a = _random_taps(rng, -3, 4, 2, 3)
        b = _random_taps(rng, 0, 4, 3, 2)
        out = circular_convolve(a, b, 8)
        assert out.offset == -3
        assert out.span == 7
        product = dft_of_taps(a, 8).matmul(dft_of_taps(b, 8))
        assert np.allclose(dft_of_taps(out, 8).mats, product.mats, atol=1e-10)

    def test_brute_force(self):
        rng = np.random.default_rng(5)
        a = _random_taps(rng, -1, 2, 2, 2)
        b = _random_taps(rng, 0, 3, 2, 2)
        out = circular_convolve(a, b, 16)
        for n in range(-1, 3):
            expected = sum(a.tap(n - l) @ b.tap(l) for l in range(0, 3))
            assert np.allclose(out.tap(n), expected)

    def test_wrapping(self):
        rng = np.random.default_rng(7)
        a = _random_taps(rng, 0, 4, 1, 2)
        b = _random_taps(rng, 0, 4, 2, 1)
        out = circular_convolve(a, b, 5)
        assert out.span == 5
        product = dft_of_taps(a, 5).matmul(dft_of_taps(b, 5))
        assert np.allclose(dft_of_taps(out, 5).mats, product.mats, atol=1e-10)

    def test_shape_mismatch(self):
        with pytest.raises(DimensionError):
            circular_convolve(TapSequence(0, np.ones((1, 2, 2))), TapSequence(0, np.ones((1, 3, 1))), 4)


class TestLogdet(object):

    def test_examples(self):
        assert logdet_psd(np.eye(3)) == pytest.approx(0.0, abs=1e-12)
        assert logdet_psd(np.diag([2.0, 2.0])) == pytest.approx(2.0)
        assert logdet_psd(np.array([[2.0, 1j], [-1j, 2.0]])) == pytest.approx(np.log2(3.0))

    def test_stack(self):
        result = logdet_psd(np.stack([np.eye(2), 4 * np.eye(2)]))
        assert result.shape == (2,)
        assert np.allclose(result, [0.0, 4.0])

    def test_singular(self):
        assert logdet_psd(np.diag([1.0, 0.0])) == -np.inf

    def test_errors(self):
        with pytest.raises(NotHermitianError):
            logdet_psd(np.array([[1.0, 1.0], [0.0, 1.0]]))
        with pytest.raises(IndefiniteMatrixError):
            logdet_psd(np.diag([1.0, -1.0]))
        with pytest.raises(DimensionError):
            logdet_psd(np.ones((2, 3)))

    def test_eigen_oracle(self):
        rng = np.random.default_rng(2)
        g = rng.standard_normal((5, 3)) + 1j * rng.standard_normal((5, 3))
        m = np.eye(3) + hermitian(g) @ g
        assert logdet_psd(m) == pytest.approx(np.sum(np.log2(np.linalg.eigvalsh(m))), rel=1e-12)


class TestPinv(object):

    def test_unitary(self):
        q = np.array([[1, 1], [1, -1]]) / np.sqrt(2) * np.exp(0.3j)
        assert np.allclose(pinv_tall(q), hermitian(q))

    def test_residual(self):
        rng = np.random.default_rng(9)
        m = rng.standard_normal((6, 3)) + 1j * rng.standard_normal((6, 3))
        assert np.linalg.norm(pinv_tall(m) @ m - np.eye(3)) < 1e-9

    def test_singular(self):
        with pytest.raises(SingularChannelError):
            pinv_tall(np.array([[1.0, 1.0], [1.0, 1.0], [0.0, 0.0]]))
        with pytest.raises(SingularChannelError):
            pinv_tall(np.zeros((3, 2)))

    def test_threshold_is_inclusive(self):
        at_threshold = np.diag([1.0, SINGULAR_TOL])
        assert np.allclose(pinv_tall(at_threshold), np.diag([1.0, 1 / SINGULAR_TOL]))
        with pytest.raises(SingularChannelError):
            pinv_tall(np.diag([1.0, SINGULAR_TOL / 2]))

    def test_stack_names_subcarrier(self):
        stack = np.stack([np.eye(2), np.zeros((2, 2)), np.eye(2)])
        with pytest.raises(SingularChannelError) as err:
            pinv_tall(stack)
        assert err.value.subcarrier == 1
        assert "subcarrier 1" in err.value.description

    def test_wide(self):
        with pytest.raises(DimensionError):
            pinv_tall(np.ones((2, 3)))
