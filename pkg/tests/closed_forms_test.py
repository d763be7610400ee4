import numpy as np
import pytest

from hybeam.channel import PowerDelayProfile, exponential_pdp
from hybeam.closed_forms import (
    predict,
    prop1_sinr,
    prop1_sum_rate,
    prop2_sinr,
    prop2_sum_rate,
    prop3_envelopes,
    prop4_capacity,
    rate_ceiling,
    sum_rate_ceiling,
)
from hybeam.constants import LTAP, ONE_TAP
from hybeam.errors import ConfigError, ProfileError
from hybeam.metrics import LinkBudget

UNIFORM = [0.25, 0.25, 0.25, 0.25]


class TestProp1(object):

    def test_single_user_flat(self):
        lb = LinkBudget(3.0)
        assert prop1_sinr(lb, 50, 1, 1, [1.0]) == pytest.approx(np.pi / 4 * 50 * 3.0)

    def test_uniform_profile(self):
        # |sum sqrt(d)|^2 = 4 and the denominator is 4 + 15
        assert prop1_sinr(LinkBudget(1.0), 100, 4, 4, UNIFORM) == pytest.approx(100 * np.pi / 19)

    def test_ceiling(self):
        d = exponential_pdp(4, 4).column(2)
        high = np.log2(1 + prop1_sinr(LinkBudget(1e12), 100, 4, 4, d))
        assert rate_ceiling(LTAP, 100, 4, 4, d) == pytest.approx(high, abs=1e-9)
        limit = np.pi * 100 * np.sum(np.sqrt(d)) ** 2 / (4 * 15)
        assert rate_ceiling(LTAP, 100, 4, 4, d) == pytest.approx(np.log2(1 + limit), abs=1e-12)

    def test_interference_free_ceiling(self):
        assert rate_ceiling(LTAP, 10, 1, 1, [1.0]) == np.inf
        assert sum_rate_ceiling(ONE_TAP, 10, exponential_pdp(1, 1)) == np.inf

    def test_monotone(self):
        pdp = exponential_pdp(4, 4)
        in_m = [prop1_sum_rate(LinkBudget(1.0), M, pdp) for M in (20, 50, 100, 400)]
        in_p = [prop1_sum_rate(LinkBudget(p), 100, pdp) for p in (0.1, 1.0, 10.0, 100.0)]
        assert all(b > a for a, b in zip(in_m, in_m[1:]))
        assert all(b > a for a, b in zip(in_p, in_p[1:]))
        assert in_p[-1] < sum_rate_ceiling(LTAP, 100, pdp)

    def test_unnormalized(self):
        with pytest.raises(ProfileError):
            prop1_sinr(LinkBudget(1.0), 100, 4, 2, [0.5, 0.6])


class TestProp2(object):

    def test_flat(self):
        lb = LinkBudget(2.0, 0.5)
        expected = np.pi * 2.0 * 64 / (4 * (0.5 + 2.0 * 2))
        assert prop2_sinr(lb, 64, 3, 1, [1.0]) == pytest.approx(expected)

    def test_uniform_profile(self):
        assert prop2_sinr(LinkBudget(1.0), 100, 4, 4, UNIFORM) == pytest.approx(0.25 * 25 * np.pi / 4.75)

    def test_below_ltap(self):
        for L in range(1, 7):
            d = np.full(L, 1.0 / L)
            for U in range(1, 7):
                for M in (16, 100, 1000):
                    for p in (0.1, 1.0, 100.0):
                        lb = LinkBudget(p)
                        assert prop2_sinr(lb, M, U, L, d) <= prop1_sinr(lb, M, U, L, d) * (1 + 1e-12)

    def test_sum_rate(self):
        pdp = exponential_pdp(4, 4)
        lb = LinkBudget.from_snr_db(5)
        expected = sum(np.log2(1 + prop2_sinr(lb, 100, 4, 4, pdp.column(u))) for u in range(4))
        assert prop2_sum_rate(lb, 100, pdp) == pytest.approx(expected)


class TestProp4(object):

    def test_zero_snr(self):
        assert prop4_capacity(LinkBudget(1e-15), 100, exponential_pdp(4, 4), LTAP) == pytest.approx(0.0, abs=1e-9)

    def test_flat_models_coincide(self):
        pdp = exponential_pdp(1, 4)
        lb = LinkBudget(2.0)
        assert prop4_capacity(lb, 100, pdp, LTAP) == pytest.approx(prop4_capacity(lb, 100, pdp, ONE_TAP))

    def test_matrix_form(self):
        pdp = exponential_pdp(4, 4)
        lb = LinkBudget(1.0)
        root = sum(np.diag(np.sqrt(pdp.gains[l])) for l in range(4))
        scale = lb.rho * np.pi * 100 / 4
        _, ltap = np.linalg.slogdet(np.eye(4) + scale * root @ root)
        _, one = np.linalg.slogdet(np.eye(4) + scale * np.diag(pdp.gains[0]))
        assert prop4_capacity(lb, 100, pdp, LTAP) == pytest.approx(ltap / np.log(2))
        assert prop4_capacity(lb, 100, pdp, ONE_TAP) == pytest.approx(one / np.log(2))

    def test_ltap_dominates(self):
        rng = np.random.default_rng(0)
        for _ in range(50):
            gains = rng.random((4, 3))
            pdp = PowerDelayProfile(gains / gains.sum(axis=0))
            lb = LinkBudget(float(rng.uniform(0.01, 100)))
            assert prop4_capacity(lb, 64, pdp, LTAP) >= prop4_capacity(lb, 64, pdp, ONE_TAP)

    def test_unknown_model(self):
        with pytest.raises(ConfigError):
            prop4_capacity(LinkBudget(1.0), 100, exponential_pdp(2, 2), "2-tap")


class TestProp3(object):

    def test_envelopes(self):
        bounds = prop3_envelopes([100, 25])
        assert np.allclose(bounds[0], [0.1, 0.3])
        assert np.allclose(bounds[1], [0.2, 0.6])

    def test_scaling(self):
        bounds = prop3_envelopes([37, 148], c_low=0.5, c_high=2.0)
        assert bounds[0, 0] / bounds[1, 0] == pytest.approx(2.0, rel=1e-15)
        assert bounds[0, 1] / bounds[1, 1] == pytest.approx(2.0, rel=1e-15)

    def test_invalid(self):
        with pytest.raises(ConfigError):
            prop3_envelopes([0, 4])


class TestPredict(object):

    def test_consistent(self):
        pdp = exponential_pdp(4, 4)
        lb = LinkBudget.from_snr_db(0)
        prediction = predict(lb, 100, pdp, ONE_TAP)
        assert prediction.model == ONE_TAP
        assert prediction.sum_rate == pytest.approx(np.sum(np.log2(1 + prediction.sinr)))
        assert prediction.sum_rate == pytest.approx(prop2_sum_rate(lb, 100, pdp))
        assert prediction.capacity == pytest.approx(prop4_capacity(lb, 100, pdp, ONE_TAP))
