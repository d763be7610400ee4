"""
Monte-Carlo harness

Runs scenarios over independent channel realizations, aggregates per-scheme
metrics into ResultRows, studies the RMS delay spread of the effective
channels versus M and checks simulations against the closed forms.

Every realization owns a random stream derived from (master seed, model,
index), workers may finish in any order and aggregation always walks the
realizations by index. Thread count therefore never changes the output.
"""

import logging
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np
import yaml

from hybeam import beamforming, closed_forms, metrics
from hybeam import create_settings
from hybeam.channel import (
    SystemDims,
    channel_spectrum,
    draw_channel,
    dump_channel,
    exponential_pdp,
    realization_rng,
)
from hybeam.constants import (
    BANK_2L_ZF,
    CAPACITY,
    CDF_QUANTILES,
    CLOSED_FORM_SCHEMES,
    HEURISTIC_1TAP,
    HEURISTIC_1TAP_ZF,
    LTAP,
    MF,
    ONE_TAP,
    PRESETS_FILE,
    PROP1,
    PROP2,
    PROP3_HIGH,
    PROP3_LOW,
    PROP4_LTAP,
    RATE,
    RATE_STREAMS,
    RF_1TAP,
    RF_1TAP_ZF,
    RF_LTAP,
    RF_LTAP_ZF,
    RF_ONLY_SCHEMES,
    RICH,
    RMS_CDF_POINT,
    RMS_MEAN,
    SCHEMES,
    SINR_COMPONENT,
    SINR_PARTS,
    SISO,
    ZF,
    ZF_SCHEMES,
)
from hybeam.errors import ConfigError, ScenarioError, SingularChannelError
from hybeam.models import Scenario
from hybeam.results import ResultList

logger = logging.getLogger(__name__)

RF_BUILDERS = {
    MF: beamforming.mf_combiner,
    RF_1TAP: beamforming.rf_1tap,
    RF_LTAP: beamforming.rf_ltap,
    HEURISTIC_1TAP: beamforming.rf_1tap_sum_heuristic,
}

# baseband ZF on top of which RF stage
ZF_FRONTS = {
    RF_1TAP_ZF: RF_1TAP,
    RF_LTAP_ZF: RF_LTAP,
    HEURISTIC_1TAP_ZF: HEURISTIC_1TAP,
}

RMS_SCHEMES = (MF, RF_1TAP, RF_LTAP)


# Presets

def load_presets(path=PRESETS_FILE):
    """
    Read the preset catalog and return a dict of scenario documents by name.
    """

    with open(path) as handle:
        catalog = yaml.safe_load(handle)
    defaults = catalog.get("defaults", {})
    docs = {}
    for name, entry in catalog["presets"].items():
        doc = dict(defaults)
        doc.update(entry)
        doc["name"] = name
        docs[name] = doc
    return docs


def load_preset(name):
    docs = load_presets()
    if name not in docs:
        raise ConfigError(f"unknown preset '{name}', available: {', '.join(sorted(docs))}")
    return Scenario.deserialize(docs[name])


# Realizations

def draw_realization(s, index, dims=None):
    """
    Channel number *index* of scenario *s*, optionally with other dimensions.
    """

    dims = s.dims if dims is None else dims
    label = s.model if dims == s.dims else f"{s.model}/M={dims.M}"
    rng = realization_rng(s.seed, label, index)
    return draw_channel(dims, exponential_pdp(dims.L, dims.U), s.model, rng, s.sparse)


def _link_budgets(s):
    return [metrics.LinkBudget.from_snr_db(snr) for snr in s.snr_db]


class _EffectiveChannels(object):
    """
    Per realization cache of the combiners and effective channels shared by
    several schemes.
    """

    def __init__(self, ch, K):
        self.ch = ch
        self.K = K
        self._combiners = {}
        self._channels = {}

    def combiner(self, name):
        if name not in self._combiners:
            if name == BANK_2L_ZF:
                bank = beamforming.decompose_to_phase_banks(self.combiner(MF))
                self._combiners[name] = beamforming.bank_combiner(bank)
            else:
                self._combiners[name] = RF_BUILDERS[name](self.ch)
        return self._combiners[name]

    def effective(self, name):
        if name not in self._channels:
            self._channels[name] = beamforming.effective_channel(self.combiner(name), self.ch, self.K)
        return self._channels[name]

    def zero_forcing(self, scheme):
        """
        Effective channel and ZF baseband of a ZF scheme. Plain ``zf`` is the
        fully-digital receiver.
        """

        if scheme == ZF:
            return beamforming.digital_zf_combiner(self.ch, self.K)
        eff = self.effective(ZF_FRONTS.get(scheme, scheme))
        return eff, beamforming.zf_baseband(eff)


def evaluate_realization(s, ch, lbs=None):
    """
    Every requested metric of every simulated scheme on one channel.

    Returns:
        dict mapping (scheme, metric) to an array with one value per SNR
    """

    lbs = _link_budgets(s) if lbs is None else lbs
    cache = _EffectiveChannels(ch, s.dims.K)
    values = {}

    for scheme in s.schemes:
        if scheme == CAPACITY:
            spectrum = channel_spectrum(ch, s.dims.K)
            values[(scheme, CAPACITY)] = [metrics.capacity(spectrum, lb) for lb in lbs]

        elif scheme in RF_ONLY_SCHEMES:
            w = cache.combiner(scheme)
            eff = cache.effective(scheme)
            pdp = metrics.pdp_of_effective(eff)
            rates, caps, parts = [], [], {part: [] for part in SINR_PARTS}
            for lb in lbs:
                breakdown = metrics.sinr_from_pdp(pdp, metrics.noise_power_per_user(w, lb), lb)
                rates.append(metrics.sum_rate_from_sinr(breakdown))
                caps.append(metrics.effective_capacity(eff, lb))
                for part in SINR_PARTS:
                    parts[part].append(float(np.mean(breakdown.component(part))))
            values[(scheme, RATE)] = rates
            values[(scheme, CAPACITY)] = caps
            for part in SINR_PARTS:
                values[(scheme, f"{SINR_COMPONENT}:{part}")] = parts[part]

        elif scheme in ZF_SCHEMES:
            eff, bb = cache.zero_forcing(scheme)
            values[(scheme, RATE)] = [metrics.achievable_rate_hybrid(eff, bb, lb) for lb in lbs]
            values[(scheme, RATE_STREAMS)] = [metrics.zf_stream_rate(eff, bb, lb) for lb in lbs]

    return {key: np.asarray(v, dtype=float) for key, v in values.items()}


def _map_realizations(work, count, threads):
    """
    Run *work(index)* for every realization index and return the results in
    index order.
    """

    threads = max(1, min(threads, count))
    if threads == 1:
        return [work(index) for index in range(count)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(work, range(count)))


def _resolve_threads(threads):
    if threads is None:
        return create_settings()["THREADS"]
    return max(1, int(threads))


def _check_schemes(s):
    unknown = [scheme for scheme in s.schemes if scheme not in SCHEMES]
    if unknown:
        raise ScenarioError(f"unknown schemes: {', '.join(unknown)}")
    closed = [scheme for scheme in s.schemes if scheme in CLOSED_FORM_SCHEMES]
    if closed and s.model != RICH:
        raise ScenarioError(f"closed forms {', '.join(closed)} assume the rich scattering channel, "
                            f"scenario '{s.name}' uses the {s.model} model")


def _closed_form_rows(s, results):
    pdp = exponential_pdp(s.dims.L, s.dims.U)
    for scheme in s.schemes:
        if scheme not in CLOSED_FORM_SCHEMES:
            continue
        for snr in s.snr_db:
            lb = metrics.LinkBudget.from_snr_db(snr)
            if scheme == PROP1:
                results.add_row(scheme, snr, RATE, closed_forms.prop1_sum_rate(lb, s.dims.M, pdp), realizations=0)
            elif scheme == PROP2:
                results.add_row(scheme, snr, RATE, closed_forms.prop2_sum_rate(lb, s.dims.M, pdp), realizations=0)
            else:
                model = LTAP if scheme == PROP4_LTAP else ONE_TAP
                value = closed_forms.prop4_capacity(lb, s.dims.M, pdp, model)
                results.add_row(scheme, snr, CAPACITY, value, realizations=0)


def run_scenario(s, threads=None, dump_dir=None):
    """
    Simulate every requested scheme of *s* over all realizations.

    Realizations with a singular channel are skipped and counted in
    ``failed_realizations`` of the returned ResultList.
    """

    _check_schemes(s)
    threads = _resolve_threads(threads)
    lbs = _link_budgets(s)
    simulated = any(scheme not in CLOSED_FORM_SCHEMES for scheme in s.schemes)
    logger.info("running %s (%s) on %d threads", s.name, s.summary(), threads)

    def work(index):
        ch = draw_realization(s, index)
        if dump_dir is not None:
            dump_channel(ch, os.path.join(dump_dir, f"{s.name}_{index:05d}.txt"), s.seed, s.model)
        try:
            values = evaluate_realization(s, ch, lbs)
        except SingularChannelError as err:
            logger.warning("skipping realization %d of %s: %s", index, s.name, err.description)
            return None
        logger.debug("realization %d/%d done", index + 1, s.realizations)
        return values

    outcomes = _map_realizations(work, s.realizations, threads) if simulated else []
    results = ResultList(s.name, s.seed)
    results.attempted_realizations = len(outcomes)
    results.failed_realizations = sum(1 for o in outcomes if o is None)
    kept = [o for o in outcomes if o is not None]

    if kept:
        for key in kept[0]:
            scheme, metric = key
            samples = np.stack([o[key] for o in kept])
            for i, snr in enumerate(s.snr_db):
                results.add_samples(scheme, snr, metric, samples[:, i])
    _closed_form_rows(s, results)

    logger.info("finished %s: %d rows, %d of %d realizations skipped",
                s.name, len(results), results.failed_realizations, results.attempted_realizations)
    return results


# RMS delay spread

def _rms_samples(s, M, threads):
    """
    Per realization RMS delay spreads at M antennas.

    Returns:
        dict mapping MF, 1-tap and L-tap to (realizations x U) arrays and the
        SISO baseline to a (realizations,) array of (user, antenna) means
    """

    dims = SystemDims(M, s.dims.U, s.dims.L, s.dims.K)

    def work(index):
        ch = draw_realization(s, index, dims)
        cache = _EffectiveChannels(ch, dims.K)
        spreads = {}
        for scheme in RMS_SCHEMES:
            pdp = metrics.pdp_of_effective(cache.effective(scheme))
            spreads[scheme] = metrics.delay_spread_report(pdp).rms
        spreads[SISO] = float(np.mean(metrics.siso_rms_delay_spreads(ch)))
        return spreads

    outcomes = _map_realizations(work, s.realizations, threads)
    return {key: np.array([o[key] for o in outcomes]) for key in outcomes[0]}


def rms_study(M_grid, s, threads=None):
    """
    Mean RMS delay spread and its empirical CDF at each M, for the MF, 1-tap
    and L-tap effective channels, the SISO baseline and the c/sqrt(M)
    envelopes. Rows carry M in the scenario column as ``<name>/M=<M>``.
    """

    threads = _resolve_threads(threads)
    schemes = [scheme for scheme in RMS_SCHEMES if scheme in s.schemes] or list(RMS_SCHEMES)
    envelopes = closed_forms.prop3_envelopes(M_grid, s.c_low, s.c_high)
    results = ResultList(s.name, s.seed)
    logger.info("RMS delay spread study of %s over M=%s", s.name, list(M_grid))

    for M, (low, high) in zip(M_grid, envelopes):
        label = f"{s.name}/M={M}"
        samples = _rms_samples(s, M, threads)
        results.attempted_realizations += s.realizations
        for scheme in schemes:
            per_user = samples[scheme]
            results.add_samples(scheme, 0.0, RMS_MEAN, per_user.mean(axis=1), scenario=label)
            for q, value in zip(CDF_QUANTILES, np.quantile(per_user.ravel(), CDF_QUANTILES)):
                results.add_row(scheme, 0.0, f"{RMS_CDF_POINT}:q={q}", value,
                                realizations=s.realizations, scenario=label)
        results.add_samples(SISO, 0.0, RMS_MEAN, samples[SISO], scenario=label)
        results.add_row(PROP3_LOW, 0.0, RMS_MEAN, low, realizations=0, scenario=label)
        results.add_row(PROP3_HIGH, 0.0, RMS_MEAN, high, realizations=0, scenario=label)
    return results


def run_experiment(s, threads=None, dump_dir=None):
    """
    Run whatever *s* asks for: the RMS delay spread study when it has an
    antenna grid, the SNR sweep otherwise.
    """

    if s.m_grid:
        _check_schemes(s)
        return rms_study(s.m_grid, s, threads)
    return run_scenario(s, threads, dump_dir)


# Validation

@dataclass(frozen=True)
class ValidationEntry:
    """
    One simulated quantity against its closed form. Envelope checks set
    *lower* and *upper* instead of a tolerance; entries with neither are
    informational.
    """

    proposition: str
    quantity: str
    simulated: float
    predicted: float
    tolerance: float = None
    lower: float = None
    upper: float = None

    @property
    def relative_error(self):
        if self.predicted == 0:
            return abs(self.simulated)
        return abs(self.simulated - self.predicted) / abs(self.predicted)

    @property
    def passed(self):
        if self.lower is not None:
            return self.lower <= self.simulated <= self.upper
        if self.tolerance is None:
            return None
        return self.relative_error <= self.tolerance


class ValidationReport(list):

    def __init__(self, scenario, entries=()):
        super().__init__(entries)
        self.scenario = scenario

    @property
    def passed(self):
        return all(entry.passed is not False for entry in self)

    @property
    def failures(self):
        return [entry for entry in self if entry.passed is False]

    def render(self):
        lines = [f"validation of {self.scenario}"]
        for e in self:
            status = {True: "PASS", False: "FAIL", None: "INFO"}[e.passed]
            if e.lower is not None:
                check = f"bounds [{e.lower:.6g}, {e.upper:.6g}]"
            elif e.tolerance is not None:
                check = f"rel.err {e.relative_error:.4%} tol {e.tolerance:.2%}"
            else:
                check = f"rel.err {e.relative_error:.4%}"
            lines.append(f"{status} {e.proposition:<6} {e.quantity:<28} "
                         f"sim {e.simulated:.6g} pred {e.predicted:.6g} {check}")
        lines.append("result: " + ("PASS" if self.passed else f"FAIL ({len(self.failures)} checks)"))
        return "\n".join(lines) + "\n"


def validate_propositions(s, tolerance=None, threads=None):
    """
    Compare the simulated RF-only sum rates and effective channel capacities
    with their large-M closed forms at every SNR, and the mean effective
    channel RMS delay spreads with the c/sqrt(M) envelopes.
    """

    if s.model != RICH:
        raise ScenarioError("the closed forms assume the rich scattering channel")
    tolerance = create_settings()["PROP_TOLERANCE"] if tolerance is None else tolerance
    threads = _resolve_threads(threads)

    sweep = replace(s, schemes=(RF_LTAP, RF_1TAP), m_grid=())
    rows = run_scenario(sweep, threads)
    simulated = {(row.scheme, row.metric, row.snr_db): row.value for row in rows}
    pdp = exponential_pdp(s.dims.L, s.dims.U)
    report = ValidationReport(s.name)

    for snr in s.snr_db:
        lb = metrics.LinkBudget.from_snr_db(snr)
        checks = (
            ("prop1", RF_LTAP, RATE, closed_forms.prop1_sum_rate(lb, s.dims.M, pdp)),
            ("prop2", RF_1TAP, RATE, closed_forms.prop2_sum_rate(lb, s.dims.M, pdp)),
            ("prop4", RF_LTAP, CAPACITY, closed_forms.prop4_capacity(lb, s.dims.M, pdp, LTAP)),
            ("prop4", RF_1TAP, CAPACITY, closed_forms.prop4_capacity(lb, s.dims.M, pdp, ONE_TAP)),
        )
        for prop, scheme, metric, predicted in checks:
            value = simulated.get((scheme, metric, float(snr)))
            if value is None:
                continue
            report.append(ValidationEntry(prop, f"{scheme} {metric} @ {snr:g} dB", value, predicted, tolerance))

    M_grid = s.m_grid or (s.dims.M,)
    for M, (low, high) in zip(M_grid, closed_forms.prop3_envelopes(M_grid, s.c_low, s.c_high)):
        samples = _rms_samples(s, M, threads)
        for scheme in RMS_SCHEMES:
            mean = float(np.mean(samples[scheme]))
            # the 1-tap spread is not bounded by the envelopes at moderate M
            if scheme == RF_1TAP:
                report.append(ValidationEntry("prop3", f"{scheme} rms @ M={M}", mean, high))
            else:
                report.append(ValidationEntry("prop3", f"{scheme} rms @ M={M}", mean, high, lower=low, upper=high))

    for entry in report.failures:
        logger.warning("validation failed: %s %s", entry.proposition, entry.quantity)
    return report
