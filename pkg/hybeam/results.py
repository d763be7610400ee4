import csv
import logging

import numpy as np

from hybeam.constants import CSV_HEADER, MAX_FAILURE_RATIO
from hybeam.errors import ConfigError
from hybeam.models import ResultRow

logger = logging.getLogger(__name__)


class ResultList(list):
    """
    A list of ResultRows for one scenario run. Besides the rows it remembers
    how many realizations were attempted and how many had to be skipped
    because the channel turned out singular.

    The add_* shorthands fill in the scenario wide fields (scenario name,
    seed) so the harness only passes what differs between rows.
    """

    def __init__(self, scenario="", seed=0, rows=()):
        super().__init__(rows)
        self.scenario = scenario
        self.seed = seed
        self.failed_realizations = 0
        self.attempted_realizations = 0

    @property
    def failure_ratio(self):
        if not self.attempted_realizations:
            return 0.0
        return self.failed_realizations / self.attempted_realizations

    @property
    def too_many_failures(self):
        return self.failure_ratio > MAX_FAILURE_RATIO

    def add_row(self, scheme, snr_db, metric, value, stderr=0.0, realizations=1, scenario=None):
        """
        Appends a single row.
        : param str scheme: scheme or baseline name
        : param float snr_db: abscissa of the row, 0 for SNR independent rows
        : param str metric: metric family with an optional :qualifier
        """

        self.append(ResultRow(
            scenario=self.scenario if scenario is None else scenario,
            scheme=scheme,
            snr_db=float(snr_db),
            metric=metric,
            value=float(value),
            stderr=float(stderr),
            realizations=int(realizations),
            seed=self.seed,
        ))

    def add_samples(self, scheme, snr_db, metric, samples, scenario=None):
        """
        Appends the mean of per-realization samples with its standard error
        (sample standard deviation over sqrt(N), zero for a single sample).
        """

        samples = np.asarray(samples, dtype=float)
        n = samples.size
        stderr = float(np.std(samples, ddof=1) / np.sqrt(n)) if n > 1 else 0.0
        self.add_row(scheme, snr_db, metric, float(np.mean(samples)), stderr, n, scenario)

    def select(self, metric=None, scheme=None):
        return [row for row in self
                if (metric is None or row.metric == metric) and (scheme is None or row.scheme == scheme)]


def write_csv(rows, path):
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for row in rows:
            writer.writerow(row.serialize())
    logger.info("wrote %d rows to %s", len(rows), path)


def read_csv(path):
    """
    Parse a result file written by write_csv. Unreadable files, a wrong header
    and malformed rows raise ConfigError.
    """

    try:
        with open(path, newline="", encoding="utf-8") as handle:
            records = list(csv.reader(handle))
    except (OSError, UnicodeDecodeError, csv.Error) as err:
        raise ConfigError(description=f"cannot read result file {path}: {err}")
    if not records or records[0] != CSV_HEADER:
        raise ConfigError(description=f"{path} does not start with the header {','.join(CSV_HEADER)}")
    return ResultList(rows=[ResultRow.deserialize(record) for record in records[1:] if record])
