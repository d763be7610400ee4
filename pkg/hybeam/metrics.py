"""
Performance metrics

Capacity of frequency-selective channels, achievable rates of hybrid
receivers with the exact effective noise covariance, the time-domain SINR
decomposition built from the power delay profile of an effective channel and
RMS delay spreads.
"""

import logging
from dataclasses import dataclass

import numpy as np

from hybeam.errors import ConfigError, EmptyProfileError, SingularCovarianceError
from hybeam.numerics import SINGULAR_TOL, hermitian, logdet_psd

logger = logging.getLogger(__name__)

RADICAND_TOL = 1e-12


def db_to_linear(db):
    return 10.0 ** (np.asarray(db, dtype=float) / 10.0)


@dataclass(frozen=True)
class LinkBudget:
    """
    Transmit power and noise variance, both linear.
    """

    transmit_power: float
    noise_variance: float = 1.0

    def __post_init__(self):
        if not (np.isfinite(self.transmit_power) and self.transmit_power > 0):
            raise ConfigError(f"transmit power must be positive and finite, got {self.transmit_power}")
        if not (np.isfinite(self.noise_variance) and self.noise_variance > 0):
            raise ConfigError(f"noise variance must be positive and finite, got {self.noise_variance}")

    @property
    def rho(self):
        return self.transmit_power / self.noise_variance

    @classmethod
    def from_snr_db(cls, snr_db, noise_variance=1.0):
        """
        Link budget whose P_t / sigma_z^2 equals *snr_db* decibels.
        """

        with np.errstate(over="ignore"):
            return cls(float(db_to_linear(snr_db)) * noise_variance, noise_variance)


@dataclass(frozen=True)
class SinrBreakdown:
    """
    Per user signal, inter-symbol interference, multi-user interference and
    noise powers.
    """

    signal: np.ndarray
    isi: np.ndarray
    mui: np.ndarray
    noise: np.ndarray

    @property
    def sinr(self):
        return self.signal / (self.noise + self.isi + self.mui)

    def component(self, name):
        """
        One of ``signal``, ``isi``, ``mui``, ``noise`` or ``sinr`` by name.
        """

        return getattr(self, name)


@dataclass(frozen=True)
class DelayProfileTensor:
    """
    P_uu'(n) = |H_e(n)_uu'|^2 stored as U x U x span, first delay at *offset*.
    """

    power: np.ndarray
    offset: int

    @property
    def delays(self):
        return np.arange(self.offset, self.offset + self.power.shape[-1])

    def user(self, u):
        return self.power[u, u]


@dataclass(frozen=True)
class DelaySpread:
    mean: float
    rms: float


@dataclass(frozen=True)
class DelaySpreadReport:
    """
    Mean delay and RMS delay spread per user, in tap units. Multiply by the
    sampling interval 1/B for seconds.
    """

    entries: tuple

    @property
    def mean(self):
        return np.array([e.mean for e in self.entries])

    @property
    def rms(self):
        return np.array([e.rms for e in self.entries])


def capacity(spectrum, lb):
    """
    Average over subcarriers of log2 det(I + rho H^H(k) H(k)).
    """

    mats = spectrum.mats
    gram = hermitian(mats) @ mats
    identity = np.eye(gram.shape[-1])
    return float(np.mean(logdet_psd(identity + lb.rho * gram)))


def effective_capacity(eff, lb):
    """
    Capacity of the effective channel spectrum treating its noise as white.
    """

    return capacity(eff.spectrum(), lb)


def _composite(eff, bb):
    gain = eff.spectrum().mats
    noise = eff.noise_cov_spectrum.mats
    if bb is None:
        return gain, noise
    stage = bb.mats
    return stage @ gain, stage @ noise @ hermitian(stage)


def _check_covariance(noise):
    eigs = np.linalg.eigvalsh(0.5 * (noise + hermitian(noise)))
    bad = np.flatnonzero(eigs[..., 0] <= SINGULAR_TOL * eigs[..., -1])
    if bad.size:
        raise SingularCovarianceError(f"singular effective noise covariance at subcarrier {int(bad[0])}",
                                      subcarrier=int(bad[0]))


def achievable_rate_hybrid(eff, bb, lb):
    """
    Average over subcarriers of log2 det(I + rho S^-1 G G^H) where G is the
    combiner-times-channel spectrum and S its noise covariance, evaluated as
    log2 det(S + rho G G^H) - log2 det(S). Without a baseband stage the RF
    output itself is decoded.
    """

    gain, noise = _composite(eff, bb)
    _check_covariance(noise)
    received = noise + lb.rho * (gain @ hermitian(gain))
    return float(np.mean(logdet_psd(received) - logdet_psd(noise)))


def zf_stream_rate(eff, bb, lb):
    """
    Sum rate of decoding every zero-forced stream separately, noise colored by
    the baseband stage: mean_k sum_u log2(1 + rho / S_k[u, u]).
    """

    _, noise = _composite(eff, bb)
    _check_covariance(noise)
    diag = np.real(np.diagonal(noise, axis1=-2, axis2=-1))
    return float(np.mean(np.sum(np.log2(1.0 + lb.rho / diag), axis=-1)))


def pdp_of_effective(eff):
    power = np.abs(eff.taps.taps) ** 2
    return DelayProfileTensor(np.moveaxis(power, 0, -1), eff.taps.offset)


def noise_power_per_user(w, lb):
    """
    Noise power after the RF stage, sigma_z^2 sum_n ||row u of W(n)||^2.
    """

    return lb.noise_variance * np.sum(np.abs(w.taps.taps) ** 2, axis=(0, 2))


def sinr_from_pdp(pdp, noise_power_per_user, lb):
    """
    SINR decomposition of an effective channel from its delay profile: the
    desired tap is the zero-delay tap of each user's own link.
    """

    noise = np.broadcast_to(np.asarray(noise_power_per_user, dtype=float), (pdp.power.shape[0],))
    if np.any(noise <= 0):
        raise ConfigError("noise powers must be positive")

    power = pdp.power
    own = np.einsum("uun->un", power)
    zero = -pdp.offset
    desired = own[:, zero] if 0 <= zero < power.shape[-1] else np.zeros(power.shape[0])
    signal = lb.transmit_power * desired
    isi = lb.transmit_power * (own.sum(axis=-1) - desired)
    mui = lb.transmit_power * (power.sum(axis=(1, 2)) - own.sum(axis=-1))
    return SinrBreakdown(signal, np.maximum(isi, 0.0), np.maximum(mui, 0.0), noise.copy())


def sum_rate_from_sinr(b):
    sinr = b.sinr if isinstance(b, SinrBreakdown) else np.asarray(b, dtype=float)
    return float(np.sum(np.log2(1.0 + sinr)))


def rms_delay_spread(pdp_user, delays=None):
    """
    Mean delay and RMS delay spread of one delay profile.

    Args:
        pdp_user: nonnegative powers, one per delay
        delays: delays of the entries, 0..n-1 when omitted

    Returns:
        DelaySpread in tap units
    """

    power = np.asarray(pdp_user, dtype=float)
    delays = np.arange(power.size) if delays is None else np.asarray(delays, dtype=float)
    total = power.sum()
    if not total > 0:
        raise EmptyProfileError("delay profile has no power")
    mean = float(np.dot(power, delays) / total)
    radicand = float(np.dot(power, delays ** 2) / total - mean ** 2)
    if radicand < 0:
        if radicand < -RADICAND_TOL * max(1.0, mean ** 2):
            logger.warning("negative RMS radicand %.3g clamped", radicand)
        radicand = 0.0
    return DelaySpread(mean, float(np.sqrt(radicand)))


def delay_spread_report(pdp):
    """
    RMS spread of every user's own link P_uu(n).
    """

    return DelaySpreadReport(tuple(
        rms_delay_spread(pdp.user(u), pdp.delays) for u in range(pdp.power.shape[0])
    ))


def siso_rms_delay_spreads(ch):
    """
    RMS spread of every single antenna link |H_l,mu|^2, shape M x U.
    """

    power = np.abs(ch.H) ** 2
    delays = np.arange(ch.dims.L, dtype=float)
    total = power.sum(axis=0)
    if np.any(total <= 0):
        raise EmptyProfileError("a single antenna link has no power")
    mean = np.einsum("l,lmu->mu", delays, power) / total
    second = np.einsum("l,lmu->mu", delays ** 2, power) / total
    return np.sqrt(np.clip(second - mean ** 2, 0.0, None))
