"""
Command line front end

    hybeam list
    hybeam run <preset|file> [--M --U --L --K --realizations --snr --seed
                              --outdir --dump-channels --validate --plot]
    hybeam plot <csv> --metric <name> [--schemes a,b] [--x snr_db|M] [--output]

Exit codes: 0 ok, 2 configuration error, 3 numerical failure.
"""

import configparser
import logging
import os
import sys
from dataclasses import dataclass, field

import click
import numpy as np
import yaml

from hybeam import configure_logging, create_settings
from hybeam.constants import EXIT_CONFIG, EXIT_NUMERICAL, EXIT_OK, RATE, RMS_MEAN
from hybeam.errors import ConfigError, HybeamError
from hybeam.experiments import load_preset, load_presets, run_experiment, validate_propositions
from hybeam.models import Scenario
from hybeam.plotting import X_AXES, plot_results
from hybeam.results import read_csv, write_csv

logger = logging.getLogger(__name__)

INT_KEYS = ("M", "U", "L", "K", "realizations", "seed", "clusters", "mpcs_per_cluster")
FLOAT_KEYS = ("c_low", "c_high", "angular_spread", "spacing_ratio")
SNR_EPS = 1e-9


@dataclass
class RunConfig:
    """
    Everything the run command was asked to do. *overrides* holds scenario
    document fields given on the command line.
    """

    target: str
    overrides: dict = field(default_factory=dict)
    outdir: str = None
    dump_channels: bool = False
    plot: bool = False
    validate: bool = False


def parse_snr(text):
    """
    SNR grid from ``a:b:step`` (both ends included) or ``a,b,c``, in dB.
    """

    try:
        if ":" in text:
            start, stop, step = (float(part) for part in text.split(":"))
        else:
            values = [float(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise ConfigError(f"cannot parse SNR grid '{text}', use a:b:step or a,b,c")

    if ":" in text:
        if not np.all(np.isfinite([start, stop, step])):
            raise ConfigError(f"SNR range {text} must be finite")
        if step <= 0:
            raise ConfigError(f"SNR step must be positive, got {step:g}")
        if stop < start:
            raise ConfigError(f"SNR range {text} is empty")
        count = int(np.floor((stop - start) / step + SNR_EPS)) + 1
        return [float(start + i * step) for i in range(count)]
    if not np.all(np.isfinite(values)):
        raise ConfigError(f"SNR values in '{text}' must be finite")
    return values


def _convert(key, value):
    try:
        if key in INT_KEYS:
            return int(value)
        if key in FLOAT_KEYS:
            return float(value)
        if key == "snr_db":
            return parse_snr(value)
        if key == "m_grid":
            return [int(part) for part in value.split(",") if part.strip()]
        if key == "schemes":
            return [part.strip() for part in value.split(",") if part.strip()]
    except ValueError:
        raise ConfigError(f"invalid value '{value}' for {key}")
    return value


def _read_key_value(path):
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    parser.optionxform = str
    try:
        with open(path, encoding="utf-8") as handle:
            parser.read_file(handle)
    except (OSError, UnicodeDecodeError, configparser.Error) as err:
        raise ConfigError(description=f"cannot read scenario file {path}: {err}")
    if not parser.has_section("scenario"):
        raise ConfigError(f"{path} has no [scenario] section")

    doc = {key: _convert(key, value) for key, value in parser.items("scenario")}
    if parser.has_section("sparse"):
        doc["sparse"] = {key: _convert(key, value) for key, value in parser.items("sparse")}
    return doc


def _read_yaml(path):
    try:
        with open(path, encoding="utf-8") as handle:
            doc = yaml.safe_load(handle)
    except (OSError, UnicodeDecodeError, yaml.YAMLError) as err:
        raise ConfigError(description=f"cannot read scenario file {path}: {err}")
    if not isinstance(doc, dict):
        raise ConfigError(f"{path} does not hold a scenario mapping")
    return doc


def load_scenario_file(path):
    """
    Scenario from a key = value file or a YAML file. A ``preset`` key starts
    from that preset; the name defaults to the file name.
    """

    doc = _read_yaml(path) if path.endswith((".yml", ".yaml")) else _read_key_value(path)
    base = doc.pop("preset", None)
    if base is not None:
        presets = load_presets()
        if base not in presets:
            raise ConfigError(f"unknown preset '{base}', available: {', '.join(sorted(presets))}")
        merged = {key: value for key, value in presets[base].items() if key != "name"}
        merged.update(doc)
        doc = merged
    doc.setdefault("name", os.path.splitext(os.path.basename(path))[0])
    return Scenario.deserialize(doc)


def resolve_scenario(target):
    if os.path.isfile(target):
        return load_scenario_file(target)
    return load_preset(target)


def cmd_list():
    lines = []
    for name, doc in load_presets().items():
        s = Scenario.deserialize(doc)
        lines.append(f"{name:<6} {s.summary()}  {s.description}")
    return "\n".join(lines)


def cmd_run(cfg, settings=None):
    """
    Run one scenario and write ``<outdir>/<scenario>.csv``. Returns the exit
    code; configuration errors propagate as exceptions.
    """

    settings = create_settings() if settings is None else settings
    s = resolve_scenario(cfg.target).with_overrides(**cfg.overrides)
    outdir = cfg.outdir or settings["OUTDIR"]
    os.makedirs(outdir, exist_ok=True)

    dump_dir = None
    if cfg.dump_channels:
        dump_dir = os.path.join(outdir, f"{s.name}_channels")
        os.makedirs(dump_dir, exist_ok=True)

    results = run_experiment(s, settings["THREADS"], dump_dir)
    csv_path = os.path.join(outdir, f"{s.name}.csv")
    write_csv(results, csv_path)
    click.echo(f"wrote {len(results)} rows to {csv_path}")

    if cfg.plot and results:
        metric = RMS_MEAN if s.m_grid else RATE
        if not results.select(metric=metric):
            metric = results[0].metric
        svg = plot_results(results, metric, os.path.join(outdir, f"{s.name}_{metric}.svg"),
                           x="M" if s.m_grid else "snr_db", title=s.name)
        click.echo(f"wrote {svg}")

    if cfg.validate:
        report = validate_propositions(s, settings["PROP_TOLERANCE"], settings["THREADS"])
        text = report.render()
        report_path = os.path.join(outdir, f"{s.name}_validation.txt")
        with open(report_path, "w", encoding="utf-8") as handle:
            handle.write(text)
        click.echo(text, nl=False)

    if results.too_many_failures:
        click.echo(f"Error: {results.failed_realizations} of {results.attempted_realizations} "
                   f"realizations had a singular channel", err=True)
        return EXIT_NUMERICAL
    return EXIT_OK


def cmd_plot(csv_path, metric, schemes=None, x="snr_db", output=None):
    rows = read_csv(csv_path)
    if output is None:
        stem = os.path.splitext(csv_path)[0]
        output = f"{stem}_{metric.replace(':', '_').replace('=', '')}.svg"
    return plot_results(rows, metric, output, schemes=schemes, x=x,
                        title=os.path.basename(os.path.splitext(csv_path)[0]))


def _fail(err):
    click.echo(f"Error: {err.description}", err=True)
    sys.exit(err.exit_code)


@click.group()
@click.option("-v", "--verbose", is_flag=True, help="Log debug messages.")
@click.pass_context
def cli(ctx, verbose):
    """
    Hybrid beamforming simulator for frequency-selective massive MIMO.
    """

    try:
        settings = create_settings()
    except HybeamError as err:
        _fail(err)
    configure_logging(logging.DEBUG if verbose else settings["LOG_LEVEL"])
    ctx.obj = settings


@cli.command("list")
def list_command():
    """
    List the scenario presets.
    """

    click.echo(cmd_list())


@cli.command("run")
@click.argument("target")
@click.option("--M", "M", type=int, help="Base station antennas.")
@click.option("--U", "U", type=int, help="Users.")
@click.option("--L", "L", type=int, help="Channel taps.")
@click.option("--K", "K", type=int, help="Subcarriers.")
@click.option("--realizations", type=int, help="Channel realizations.")
@click.option("--snr", help="SNR grid in dB, a:b:step or a,b,c.")
@click.option("--seed", type=int, help="Master seed.")
@click.option("--outdir", type=click.Path(file_okay=False), help="Output directory.")
@click.option("--dump-channels", is_flag=True, help="Write every channel realization as text.")
@click.option("--validate", is_flag=True, help="Check the simulation against the closed forms.")
@click.option("--plot", is_flag=True, help="Also write an SVG chart.")
@click.pass_obj
def run_command(settings, target, M, U, L, K, realizations, snr, seed, outdir, dump_channels, validate, plot):
    """
    Run a preset or a scenario file.
    """

    try:
        overrides = {"M": M, "U": U, "L": L, "K": K, "realizations": realizations, "seed": seed,
                     "snr_db": parse_snr(snr) if snr is not None else None}
        cfg = RunConfig(target, overrides, outdir, dump_channels, plot, validate)
        code = cmd_run(cfg, settings)
    except HybeamError as err:
        _fail(err)
    except OSError as err:
        click.echo(f"Error: {err}", err=True)
        sys.exit(EXIT_CONFIG)
    sys.exit(code)


@cli.command("plot")
@click.argument("csv_path", metavar="CSV")
@click.option("--metric", required=True, help="Metric column value to plot.")
@click.option("--schemes", default="", help="Comma separated schemes, all when empty.")
@click.option("--x", "x", type=click.Choice(X_AXES), default="snr_db", help="Abscissa.")
@click.option("--output", type=click.Path(dir_okay=False), help="SVG file, next to the CSV by default.")
def plot_command(csv_path, metric, schemes, x, output):
    """
    Draw one metric of a result file as SVG.
    """

    selected = [part.strip() for part in schemes.split(",") if part.strip()]
    try:
        path = cmd_plot(csv_path, metric, selected, x, output)
    except HybeamError as err:
        _fail(err)
    except OSError as err:
        click.echo(f"Error: {err}", err=True)
        sys.exit(EXIT_CONFIG)
    click.echo(f"wrote {path}")
