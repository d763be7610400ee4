"""
Asymptotic closed forms

Large-M SINR, sum rate and effective channel capacity of the 1-tap and L-tap
RF beamformers on the rich scattering channel, plus the 1/sqrt(M) envelopes
of the effective channel RMS delay spread. The Monte-Carlo harness validates
against these.
"""

from dataclasses import dataclass

import numpy as np

from hybeam.constants import LTAP, ONE_TAP
from hybeam.errors import ConfigError, ProfileError

PROFILE_TOL = 1e-9
ARRAY_GAIN = np.pi / 4.0


def _column(pdp_column):
    d = np.asarray(pdp_column, dtype=float)
    if np.any(d < 0) or abs(d.sum() - 1.0) > PROFILE_TOL:
        raise ProfileError("power delay profile column must be nonnegative and sum to 1")
    return d


def _check_model(model):
    if model not in (LTAP, ONE_TAP):
        raise ConfigError(f"unknown beamformer model '{model}', expected {LTAP} or {ONE_TAP}")


def prop1_sinr(lb, M, U, L, pdp_column):
    """
    Large-M SINR of one user with the L-tap RF beamformer:
    (pi P_t M / 4) |sum_l sqrt(d_lu)|^2 / (L sigma^2 + P_t (UL - 1)).
    """

    d = _column(pdp_column)
    gain = ARRAY_GAIN * lb.transmit_power * M * np.sum(np.sqrt(d)) ** 2
    return float(gain / (L * lb.noise_variance + lb.transmit_power * (U * L - 1)))


def prop2_sinr(lb, M, U, L, pdp_column):
    """
    Large-M SINR of one user with the 1-tap RF beamformer matched to tap 0:
    (pi P_t M / 4) d_0u / (sigma^2 + P_t sum_{l>=1} d_lu + P_t (U - 1)).
    """

    d = _column(pdp_column)
    interference = lb.transmit_power * (np.sum(d[1:]) + (U - 1))
    return float(ARRAY_GAIN * lb.transmit_power * M * d[0] / (lb.noise_variance + interference))


def _sinrs(lb, M, pdp, model):
    _check_model(model)
    formula = prop1_sinr if model == LTAP else prop2_sinr
    return np.array([formula(lb, M, pdp.U, pdp.L, pdp.column(u)) for u in range(pdp.U)])


def prop1_sum_rate(lb, M, pdp):
    return float(np.sum(np.log2(1.0 + _sinrs(lb, M, pdp, LTAP))))


def prop2_sum_rate(lb, M, pdp):
    return float(np.sum(np.log2(1.0 + _sinrs(lb, M, pdp, ONE_TAP))))


def rate_ceiling(model, M, U, L, pdp_column):
    """
    High SNR limit of log2(1 + SINR) for one user. Infinite when the
    beamformer leaves no interference at all.
    """

    _check_model(model)
    d = _column(pdp_column)
    if model == LTAP:
        gain, interference = np.sum(np.sqrt(d)) ** 2, U * L - 1
    else:
        gain, interference = d[0], np.sum(d[1:]) + (U - 1)
    if interference <= 0:
        return float("inf")
    return float(np.log2(1.0 + ARRAY_GAIN * M * gain / interference))


def sum_rate_ceiling(model, M, pdp):
    return float(sum(rate_ceiling(model, M, pdp.U, pdp.L, pdp.column(u)) for u in range(pdp.U)))


def prop4_capacity(lb, M, pdp, model):
    """
    Large-M capacity of the effective channel. The determinant is diagonal:
    sum_u log2(1 + (rho pi M / 4) g_u) with g_u = (sum_l sqrt(d_lu))^2 for
    the L-tap beamformer and g_u = d_0u for the 1-tap beamformer.
    """

    _check_model(model)
    d = pdp.gains
    for u in range(pdp.U):
        _column(d[:, u])
    gain = np.sum(np.sqrt(d), axis=0) ** 2 if model == LTAP else d[0]
    return float(np.sum(np.log2(1.0 + lb.rho * ARRAY_GAIN * M * gain)))


def prop3_envelopes(M_grid, c_low=1.0, c_high=3.0):
    """
    Lower and upper RMS delay spread envelopes c / sqrt(M), one row per M.
    """

    M = np.asarray(M_grid, dtype=float)
    if np.any(M < 1):
        raise ConfigError("antenna counts must be at least 1")
    root = np.sqrt(M)
    return np.column_stack([c_low / root, c_high / root])


@dataclass(frozen=True)
class AsymptoticPrediction:
    sinr: np.ndarray
    sum_rate: float
    capacity: float
    model: str


def predict(lb, M, pdp, model):
    sinr = _sinrs(lb, M, pdp, model)
    return AsymptoticPrediction(
        sinr=sinr,
        sum_rate=float(np.sum(np.log2(1.0 + sinr))),
        capacity=prop4_capacity(lb, M, pdp, model),
        model=model,
    )
