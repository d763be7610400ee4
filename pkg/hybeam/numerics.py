"""
Complex linear algebra and tap sequence transforms

A ComplexMatrix is a 2-D ``numpy.ndarray`` of ``complex128``. Tap sequences
and spectrum grids stack their matrices along a leading axis so every
operation here is vectorised over taps or subcarriers.
"""

import logging
from dataclasses import dataclass

import numpy as np

from hybeam.errors import (
    DimensionError,
    IndefiniteMatrixError,
    NotHermitianError,
    NumericalError,
    SingularChannelError,
    SpectralAliasingError,
)

logger = logging.getLogger(__name__)

HERMITIAN_TOL = 1e-10
SINGULAR_TOL = 1e-10


def _frozen_stack(values, name):
    stack = np.array(values, dtype=np.complex128)
    if stack.ndim == 2:
        stack = stack[np.newaxis]
    if stack.ndim != 3 or stack.shape[0] < 1:
        raise DimensionError(f"{name} must be a non-empty stack of matrices, got shape {stack.shape}")
    if not np.all(np.isfinite(stack)):
        raise NumericalError(f"{name} contains NaN or Inf entries")
    stack.setflags(write=False)
    return stack


@dataclass(frozen=True)
class TapSequence:
    """
    Matrix valued impulse response. The tap at array position i sits at the
    discrete delay ``offset + i``.
    """

    offset: int
    taps: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "offset", int(self.offset))
        object.__setattr__(self, "taps", _frozen_stack(self.taps, "taps"))

    @property
    def span(self):
        return self.taps.shape[0]

    @property
    def shape(self):
        return self.taps.shape[1:]

    @property
    def delays(self):
        return np.arange(self.offset, self.offset + self.span)

    @property
    def last(self):
        return self.offset + self.span - 1

    def tap(self, n):
        """
        Tap at delay *n*, a zero matrix outside the support.
        """

        if self.offset <= n <= self.last:
            return self.taps[n - self.offset]
        return np.zeros(self.shape, dtype=np.complex128)

    def __add__(self, other):
        if self.shape != other.shape:
            raise DimensionError(f"cannot add tap sequences of shapes {self.shape} and {other.shape}")
        first = min(self.offset, other.offset)
        last = max(self.last, other.last)
        out = np.zeros((last - first + 1,) + self.shape, dtype=np.complex128)
        out[self.offset - first:self.last - first + 1] += self.taps
        out[other.offset - first:other.last - first + 1] += other.taps
        return TapSequence(first, out)


@dataclass(frozen=True)
class SpectrumGrid:
    """
    One matrix per subcarrier k = 0..K-1.
    """

    mats: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "mats", _frozen_stack(self.mats, "mats"))

    @property
    def K(self):
        return self.mats.shape[0]

    @property
    def shape(self):
        return self.mats.shape[1:]

    def __getitem__(self, k):
        return self.mats[k]

    def matmul(self, other):
        """
        Subcarrier-wise matrix product ``self[k] @ other[k]``.
        """

        if self.K != other.K:
            raise DimensionError(f"grids have {self.K} and {other.K} subcarriers")
        if self.shape[1] != other.shape[0]:
            raise DimensionError(f"cannot multiply {self.shape} by {other.shape} matrices")
        return SpectrumGrid(self.mats @ other.mats)

    def hermitian(self):
        return SpectrumGrid(hermitian(self.mats))


def hermitian(m):
    """
    Conjugate transpose over the last two axes.
    """

    return np.conj(np.swapaxes(m, -1, -2))


def _phase_table(delays, K):
    k = np.arange(K)
    return np.exp(-2j * np.pi * np.outer(k, delays) / K)


def dft_of_taps(seq, K):
    """
    Frequency response of a tap sequence on K subcarriers,
    ``mats[k] = sum_n seq(n) exp(-j 2 pi n k / K)``.

    Direct evaluation: the sum has at most a few thousand terms per subcarrier
    at the sizes simulated here, and negative delays need no index shuffling.
    """

    if K < 1 or K < seq.span:
        raise SpectralAliasingError(f"spectral aliasing: {seq.span} taps on {K} subcarriers")
    phases = _phase_table(seq.delays, K)
    return SpectrumGrid(np.einsum("kn,nij->kij", phases, seq.taps))


def circular_convolve(a, b, K):
    """
    Convolution of two matrix tap sequences, ``out(n) = sum_l a(n-l) b(l)``.

    The result starts at ``a.offset + b.offset``. When its span exceeds K the
    taps wrap modulo K, so the K-point transform of the result always equals
    the subcarrier-wise product of the transforms.
    """

    if a.shape[1] != b.shape[0]:
        raise DimensionError(f"cannot convolve {a.shape} taps with {b.shape} taps")
    span = a.span + b.span - 1
    out = np.zeros((span, a.shape[0], b.shape[1]), dtype=np.complex128)
    for i in range(a.span):
        out[i:i + b.span] += np.matmul(a.taps[i], b.taps)
    if span > K:
        logger.debug("wrapping %d convolution taps onto %d subcarriers", span, K)
        wrapped = np.zeros((K,) + out.shape[1:], dtype=np.complex128)
        np.add.at(wrapped, np.arange(span) % K, out)
        out = wrapped
    return TapSequence(a.offset + b.offset, out)


def logdet_psd(m):
    """
    log2 det of a Hermitian positive semidefinite matrix, or of every matrix in
    a stack (returns an array then).

    Asymmetry up to 1e-10 of the norm is symmetrized away; larger asymmetry or
    eigenvalues below -1e-10 of the norm raise.
    """

    m = np.asarray(m, dtype=np.complex128)
    single = m.ndim == 2
    stack = m[np.newaxis] if single else m
    if stack.ndim != 3 or stack.shape[-1] != stack.shape[-2]:
        raise DimensionError(f"logdet needs square matrices, got shape {m.shape}")

    scale = np.linalg.norm(stack, axis=(-2, -1))
    asym = np.linalg.norm(stack - hermitian(stack), axis=(-2, -1))
    if np.any(asym > HERMITIAN_TOL * scale):
        raise NotHermitianError(f"matrix is not Hermitian (asymmetry {asym.max():.3g})")
    stack = 0.5 * (stack + hermitian(stack))

    eigs = np.linalg.eigvalsh(stack)
    if np.any(eigs[..., 0] < -HERMITIAN_TOL * scale):
        raise IndefiniteMatrixError(f"matrix is indefinite (smallest eigenvalue {eigs[..., 0].min():.3g})")

    try:
        chol = np.linalg.cholesky(stack)
        result = 2.0 * np.sum(np.log2(np.abs(np.diagonal(chol, axis1=-2, axis2=-1))), axis=-1)
    except np.linalg.LinAlgError:
        # singular PSD input: fall back to the (clipped) spectrum
        with np.errstate(divide="ignore"):
            result = np.sum(np.log2(np.clip(eigs, 0.0, None)), axis=-1)
    return float(result[0]) if single else result


def pinv_tall(m):
    """
    Left pseudo-inverse ``(m^H m)^-1 m^H`` of a tall matrix or of every matrix
    in a stack. Raises SingularChannelError naming the first rank deficient
    matrix of a stack.
    """

    m = np.asarray(m, dtype=np.complex128)
    single = m.ndim == 2
    stack = m[np.newaxis] if single else m
    rows, cols = stack.shape[-2:]
    if rows < cols:
        raise DimensionError(f"pseudo-inverse needs rows >= cols, got {rows}x{cols}")

    sv = np.linalg.svd(stack, compute_uv=False)
    bad = np.flatnonzero((sv[..., -1] < SINGULAR_TOL * sv[..., 0]) | (sv[..., 0] == 0))
    if bad.size:
        raise SingularChannelError(subcarrier=None if single else int(bad[0]))

    mh = hermitian(stack)
    result = np.linalg.solve(mh @ stack, mh)
    return result[0] if single else result
