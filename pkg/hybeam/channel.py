"""
Frequency-selective massive MIMO channel generation

Two models are provided: the rich scattering i.i.d. Rayleigh channel and the
clustered geometric (sparse) channel seen by a uniform linear array. Both use
the exponential power delay profile d_lu = exp(-psi_u l) / sum_l' exp(-psi_u l')
with psi_u = (u-1)/5.
"""

import logging
import zlib
from dataclasses import dataclass

import numpy as np

from hybeam.constants import RICH, SPARSE
from hybeam.errors import ConfigError, DimensionError, ProfileError
from hybeam.numerics import TapSequence, dft_of_taps

logger = logging.getLogger(__name__)

PDP_DECAY = 5.0


@dataclass(frozen=True)
class SystemDims:
    """
    Antennas M, users U, delay taps L and subcarriers K.
    """

    M: int
    U: int
    L: int
    K: int

    def __post_init__(self):
        if self.U < 1 or self.M < self.U:
            raise DimensionError(f"need M >= U >= 1, got M={self.M}, U={self.U}")
        if self.L < 1:
            raise DimensionError(f"need L >= 1, got L={self.L}")
        if self.K < 2 * self.L - 1:
            raise DimensionError(f"need K >= 2L-1 = {2 * self.L - 1}, got K={self.K}")

    def summary(self):
        return f"M={self.M} U={self.U} L={self.L} K={self.K}"


@dataclass(frozen=True)
class PowerDelayProfile:
    """
    Slow fading gains d_lu, one column per user, each column summing to one.
    """

    gains: np.ndarray

    def __post_init__(self):
        gains = np.array(self.gains, dtype=float)
        if gains.ndim != 2:
            raise DimensionError(f"power delay profile must be L x U, got shape {gains.shape}")
        if np.any(gains < 0):
            raise ProfileError("power delay profile has negative gains")
        if np.any(np.abs(gains.sum(axis=0) - 1.0) > 1e-12):
            raise ProfileError("power delay profile columns must sum to 1")
        gains.setflags(write=False)
        object.__setattr__(self, "gains", gains)

    @property
    def L(self):
        return self.gains.shape[0]

    @property
    def U(self):
        return self.gains.shape[1]

    def column(self, u):
        return self.gains[:, u]


@dataclass(frozen=True)
class SparseChannelConfig:
    """
    Clustered channel parameters. The angular spread (degrees) is the standard
    deviation of the Laplacian spread of the paths around the cluster centre.
    """

    clusters: int
    mpcs_per_cluster: int = 5
    angular_spread: float = 10.0
    spacing_ratio: float = 0.5

    def __post_init__(self):
        if self.mpcs_per_cluster < 1:
            raise ConfigError("sparse channel needs at least one path per cluster")
        if self.angular_spread <= 0:
            raise ConfigError("angular spread must be positive")

    def serialize(self):
        return {
            "clusters": self.clusters,
            "mpcs_per_cluster": self.mpcs_per_cluster,
            "angular_spread": self.angular_spread,
            "spacing_ratio": self.spacing_ratio,
        }


@dataclass(frozen=True)
class ChannelRealization:
    """
    L tap matrices H_l of shape M x U at delays 0..L-1.
    """

    dims: SystemDims
    taps: TapSequence
    pdp: PowerDelayProfile

    def __post_init__(self):
        if self.taps.offset != 0 or self.taps.span != self.dims.L:
            raise DimensionError(f"channel needs {self.dims.L} taps starting at delay 0")
        if self.taps.shape != (self.dims.M, self.dims.U):
            raise DimensionError(f"channel taps must be {self.dims.M}x{self.dims.U}, got {self.taps.shape}")

    @property
    def H(self):
        return self.taps.taps


def exponential_pdp(L, U):
    psi = np.arange(U) / PDP_DECAY
    weights = np.exp(-np.outer(np.arange(L), psi))
    return PowerDelayProfile(weights / weights.sum(axis=0))


def realization_rng(master_seed, label, index):
    """
    Counter based generator for one realization. The stream is keyed by the
    master seed, a text label and the realization index, so realizations can
    be drawn in any order or in parallel.
    """

    seq = np.random.SeedSequence(int(master_seed), spawn_key=(zlib.crc32(label.encode("utf-8")), int(index)))
    return np.random.Generator(np.random.Philox(seq))


def _as_rng(seed, label):
    if isinstance(seed, np.random.Generator):
        return seed
    return realization_rng(seed, label, 0)


def complex_gaussian(rng, shape):
    """
    Unit variance circular complex Gaussian samples by Box-Muller:
    ``sqrt(-ln(1-u1)) * exp(j 2 pi u2)``.
    """

    radius = np.sqrt(-np.log1p(-rng.random(shape)))
    return radius * np.exp(2j * np.pi * rng.random(shape))


def _check_profile(dims, pdp):
    if pdp.gains.shape != (dims.L, dims.U):
        raise DimensionError(f"profile shape {pdp.gains.shape} does not match L={dims.L}, U={dims.U}")


def draw_rich(dims, pdp, seed):
    """
    I.i.d. Rayleigh channel H_l = G_l diag(sqrt(d_l1), .., sqrt(d_lU)).
    """

    _check_profile(dims, pdp)
    rng = _as_rng(seed, RICH)
    fast = complex_gaussian(rng, (dims.L, dims.M, dims.U))
    return ChannelRealization(dims, TapSequence(0, fast * np.sqrt(pdp.gains)[:, np.newaxis, :]), pdp)


def steering_vector(M, phi, spacing_ratio=0.5):
    """
    Unit norm ULA response, entry m = exp(j 2 pi (d/lambda) m cos(phi)) / sqrt(M).
    """

    return _steering(M, np.asarray(phi, dtype=float), spacing_ratio).reshape(M, 1)


def _steering(M, phis, spacing_ratio):
    """
    Responses for an array of angles, antenna index on the last axis.
    """

    m = np.arange(M)
    return np.exp(2j * np.pi * spacing_ratio * np.cos(phis)[..., np.newaxis] * m) / np.sqrt(M)


def draw_sparse(dims, pdp, cfg, seed):
    """
    Clustered channel: per user and tap one cluster with a uniform centre angle
    and ``mpcs_per_cluster`` Laplacian distributed paths around it,
    h_lu = sqrt(M / (L N)) sum_i beta_liu a(phi_liu) with beta ~ CN(0, d_lu).
    """

    _check_profile(dims, pdp)
    if cfg.clusters != dims.L:
        raise DimensionError(f"sparse channel has {cfg.clusters} clusters but L={dims.L}")
    rng = _as_rng(seed, SPARSE)
    paths = cfg.mpcs_per_cluster
    scale = np.deg2rad(cfg.angular_spread) / np.sqrt(2.0)

    centres = rng.uniform(0.0, 2.0 * np.pi, size=(dims.L, dims.U, 1))
    phis = centres + rng.laplace(0.0, scale, size=(dims.L, dims.U, paths))
    betas = complex_gaussian(rng, (dims.L, dims.U, paths)) * np.sqrt(pdp.gains)[:, :, np.newaxis]
    arrays = _steering(dims.M, phis, cfg.spacing_ratio)

    taps = np.sqrt(dims.M / (dims.L * paths)) * np.einsum("lui,luim->lmu", betas, arrays)
    return ChannelRealization(dims, TapSequence(0, taps), pdp)


def draw_channel(dims, pdp, model, rng, sparse=None):
    if model == RICH:
        return draw_rich(dims, pdp, rng)
    if model == SPARSE:
        if sparse is None:
            raise ConfigError("sparse channel model needs a sparse configuration")
        return draw_sparse(dims, pdp, sparse, rng)
    raise ConfigError(f"unknown channel model '{model}'")


def channel_spectrum(ch, K):
    return dft_of_taps(ch.taps, K)


def strongest_tap_indices(ch):
    """
    Per user index of the tap with the largest energy.
    """

    energy = np.sum(np.abs(ch.H) ** 2, axis=1)
    return np.argmax(energy, axis=0)


def dump_channel(ch, path, seed, model):
    """
    Write a realization as text: a header ``M U L seed model`` followed by one
    ``l m u re im`` row per entry.
    """

    L, M, U = ch.H.shape
    l, m, u = np.meshgrid(np.arange(L), np.arange(M), np.arange(U), indexing="ij")
    values = ch.H.ravel()
    table = np.column_stack([l.ravel(), m.ravel(), u.ravel(), values.real, values.imag])
    np.savetxt(path, table, fmt=["%d", "%d", "%d", "%.17g", "%.17g"],
               header=f"{M} {U} {L} {seed} {model}", comments="")
    logger.debug("dumped channel to %s", path)


def load_channel(path, K=None):
    with open(path) as handle:
        M, U, L, seed, model = handle.readline().split()
        table = np.loadtxt(handle, ndmin=2)
    M, U, L = int(M), int(U), int(L)
    taps = np.zeros((L, M, U), dtype=np.complex128)
    index = table[:, :3].astype(int)
    taps[index[:, 0], index[:, 1], index[:, 2]] = table[:, 3] + 1j * table[:, 4]
    dims = SystemDims(M, U, L, K if K is not None else max(2 * L - 1, 1))
    return ChannelRealization(dims, TapSequence(0, taps), exponential_pdp(L, U)), int(seed), model
