"""
SVG line charts of result files, one line per scheme.
"""

import logging
import re

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from hybeam.errors import PlotError  # noqa: E402

logger = logging.getLogger(__name__)

X_AXES = ("snr_db", "M")
X_LABELS = {
    "snr_db": "P_t / sigma_z^2 (dB)",
    "M": "Number of antennas M",
}
Y_LABELS = {
    "rate": "Spectral efficiency (bits/s/Hz)",
    "rate_streams": "Spectral efficiency (bits/s/Hz)",
    "capacity": "Spectral efficiency (bits/s/Hz)",
    "rms_mean": "RMS delay spread (taps)",
}

_M_SUFFIX = re.compile(r"/M=(\d+)$")


def _abscissa(row, x):
    if x == "snr_db":
        return row.snr_db
    match = _M_SUFFIX.search(row.scenario)
    if match is None:
        raise PlotError(f"row of scenario '{row.scenario}' carries no antenna count, plot it against snr_db")
    return int(match.group(1))


def collect_series(rows, metric, schemes=None, x="snr_db"):
    """
    Group the rows of one metric into (x, y) series keyed by scheme, in the
    order schemes first appear in the file.
    """

    if x not in X_AXES:
        raise PlotError(f"unknown x axis '{x}', available: {', '.join(X_AXES)}")
    available = sorted({row.metric for row in rows})
    if metric not in available:
        raise PlotError(f"unknown metric '{metric}', available: {', '.join(available)}")
    selected = [row for row in rows if row.metric == metric]

    present = list(dict.fromkeys(row.scheme for row in selected))
    if schemes:
        missing = [scheme for scheme in schemes if scheme not in present]
        if missing:
            raise PlotError(f"unknown schemes {', '.join(missing)} for metric '{metric}', "
                            f"available: {', '.join(present)}")
        present = [scheme for scheme in present if scheme in schemes]

    series = {}
    for scheme in present:
        points = sorted((_abscissa(row, x), row.value) for row in selected if row.scheme == scheme)
        series[scheme] = ([p[0] for p in points], [p[1] for p in points])
    return series


def plot_results(rows, metric, output, schemes=None, x="snr_db", title=None):
    """
    Write an SVG chart of *metric* against *x*. Output is byte-stable for a
    given input: the SVG id salt is fixed and no date is embedded.
    """

    series = collect_series(rows, metric, schemes, x)

    with plt.rc_context({"svg.hashsalt": "hybeam", "svg.fonttype": "path"}):
        fig = plt.figure(figsize=(6.4, 4.8))
        ax = plt.axes()
        for scheme, (xs, ys) in series.items():
            ax.plot(xs, ys, marker="o", markersize=4, label=scheme)
        if x == "M":
            ax.set_xscale("log")
        ax.set_xlabel(X_LABELS[x])
        ax.set_ylabel(Y_LABELS.get(metric.split(":", 1)[0], metric))
        if title:
            ax.set_title(title, fontsize=9)
        ax.grid(True, linewidth=0.5, alpha=0.5)
        ax.legend(fontsize=8)
        fig.tight_layout()
        fig.savefig(output, format="svg", metadata={"Date": None})
        plt.close(fig)

    logger.info("wrote %s with %d series", output, len(series))
    return output
