"""
Combiner construction

Fully-digital matched filter and zero-forcing baselines, the constant-modulus
1-tap and L-tap RF beamformers, the sum-of-taps heuristic, the 2L phase
network decomposition and the effective channels they produce.
"""

import logging
from dataclasses import dataclass

import numpy as np

from hybeam.channel import strongest_tap_indices
from hybeam.errors import CombinerError, DimensionError, NumericalError, SingularChannelError
from hybeam.numerics import SpectrumGrid, TapSequence, circular_convolve, dft_of_taps, hermitian, pinv_tall

logger = logging.getLogger(__name__)

MODULUS_TOL = 1e-12


def _phase(values):
    """
    Phase of complex entries; an exact zero has phase 0.
    """

    return np.angle(values)


@dataclass(frozen=True)
class CombinerIR:
    """
    Time-domain combiner, U x M taps on delays -L+1..0. When
    *constant_modulus* is set every entry has magnitude 1/sqrt(M).
    """

    taps: TapSequence
    constant_modulus: bool = False

    def __post_init__(self):
        if self.constant_modulus:
            error = np.max(np.abs(np.abs(self.taps.taps) - self.modulus))
            if error > MODULUS_TOL:
                raise CombinerError(f"constant-modulus combiner deviates by {error:.3g} from 1/sqrt(M)")

    @property
    def M(self):
        return self.taps.shape[1]

    @property
    def U(self):
        return self.taps.shape[0]

    @property
    def modulus(self):
        return 1.0 / np.sqrt(self.M) if self.constant_modulus else None


@dataclass(frozen=True)
class PhaseNetworkBank:
    """
    2L constant-modulus phase shifter networks, two per delay. The pair sums
    reproduce the target combiner scaled by the positive constant *scale*.
    """

    networks: tuple
    gamma: float

    def __post_init__(self):
        delays = [net.taps.offset for net in self.networks]
        if any(delays.count(n) != 2 for n in delays):
            raise CombinerError("phase network bank needs exactly two networks per delay")

    @property
    def M(self):
        return self.networks[0].M

    @property
    def scale(self):
        return 2.0 / (self.gamma * np.sqrt(self.M))


@dataclass(frozen=True)
class EffectiveChannel:
    """
    Combiner followed by the propagation channel: taps on delays -L+1..L-1
    plus the per-subcarrier effective noise covariance W(k) W(k)^H.
    """

    taps: TapSequence
    noise_cov_spectrum: SpectrumGrid

    @property
    def K(self):
        return self.noise_cov_spectrum.K

    def spectrum(self):
        return dft_of_taps(self.taps, self.K)


def _constant_modulus(phases, offset):
    M = phases.shape[-1]
    return CombinerIR(TapSequence(offset, np.exp(1j * phases) / np.sqrt(M)), constant_modulus=True)


def mf_combiner(ch):
    """
    Time reversed matched filter W(n) = H^H(-n) / sqrt(M).
    """

    reversed_taps = hermitian(ch.H[::-1]) / np.sqrt(ch.dims.M)
    return CombinerIR(TapSequence(-(ch.dims.L - 1), reversed_taps))


def rf_ltap(ch):
    """
    L-tap RF beamformer: the phases of the matched filter, theta_lum = -angle(H_lmu).
    """

    phases = -np.swapaxes(_phase(ch.H[::-1]), -1, -2)
    return _constant_modulus(phases, -(ch.dims.L - 1))


def rf_1tap(ch, tap_index=0, strongest=False):
    """
    1-tap RF beamformer matched to the phases of a single channel tap, tap 0 by
    default. With *strongest* each user row follows its own strongest tap.
    """

    if strongest:
        target = ch.H[strongest_tap_indices(ch), :, np.arange(ch.dims.U)]
    else:
        if not 0 <= tap_index < ch.dims.L:
            raise DimensionError(f"tap index {tap_index} outside 0..{ch.dims.L - 1}")
        target = ch.H[tap_index].T
    return _constant_modulus(-_phase(target), 0)


def rf_1tap_sum_heuristic(ch):
    """
    1-tap beamformer following the phases of the sum of all channel taps.
    """

    return _constant_modulus(-_phase(ch.H.sum(axis=0).T), 0)


def decompose_to_phase_banks(mf):
    """
    Split every tap entry a of *mf* into two unit modulus terms: with
    a / gamma = |a'| exp(j theta) and gamma the largest entry magnitude, the
    pair carries phases theta +- arccos(|a'|).
    """

    gamma = float(np.max(np.abs(mf.taps.taps)))
    if gamma == 0.0:
        raise NumericalError("cannot decompose an all-zero combiner")
    normalized = mf.taps.taps / gamma
    theta = _phase(normalized)
    spread = np.arccos(np.clip(np.abs(normalized), 0.0, 1.0))

    networks = []
    for i, n in enumerate(mf.taps.delays):
        networks.append(_constant_modulus(theta[i] + spread[i], n))
        networks.append(_constant_modulus(theta[i] - spread[i], n))
    return PhaseNetworkBank(tuple(networks), gamma)


def bank_combiner(bank):
    """
    End-to-end combiner realized by summing every network of the bank.
    """

    total = bank.networks[0].taps
    for net in bank.networks[1:]:
        total = total + net.taps
    return CombinerIR(total)


def effective_channel(w, ch, K):
    if w.M != ch.dims.M:
        raise DimensionError(f"combiner has {w.M} antenna columns, channel has M={ch.dims.M}")
    span = w.taps.span + ch.taps.span - 1
    if span > K:
        raise DimensionError(f"effective channel spans {span} taps, more than K={K}")
    taps = circular_convolve(w.taps, ch.taps, K)
    combiner = dft_of_taps(w.taps, K)
    return EffectiveChannel(taps, combiner.matmul(combiner.hermitian()))


def digital_effective_channel(ch, K):
    """
    The raw channel seen through an identity RF stage with white noise.
    """

    identity = np.broadcast_to(np.eye(ch.dims.M), (K, ch.dims.M, ch.dims.M))
    return EffectiveChannel(ch.taps, SpectrumGrid(identity))


def digital_zf_combiner(ch, K):
    """
    Fully-digital zero-forcing receiver as an (effective channel, baseband) pair.
    """

    eff = digital_effective_channel(ch, K)
    return eff, zf_baseband(eff)


def zf_baseband(eff):
    """
    Per subcarrier left pseudo-inverse of the effective channel spectrum.
    """

    try:
        return SpectrumGrid(pinv_tall(eff.spectrum().mats))
    except SingularChannelError as err:
        logger.warning("zero-forcing failed: %s", err.description)
        raise


def rf_orthogonality_defect(w):
    """
    Largest deviation of W_l W_l'^H from I delta(l - l'), in Frobenius norm
    divided by sqrt(U).
    """

    if not w.constant_modulus:
        raise CombinerError("orthogonality defect is defined for constant-modulus combiners")
    taps = w.taps.taps
    gram = np.einsum("aum,bvm->abuv", taps, np.conj(taps))
    span = taps.shape[0]
    gram[np.arange(span), np.arange(span)] -= np.eye(w.U)
    return float(np.max(np.linalg.norm(gram, axis=(-2, -1))) / np.sqrt(w.U))
