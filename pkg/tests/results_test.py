import pytest

from hybeam import create_settings
from hybeam.constants import CSV_HEADER
from hybeam.errors import ConfigError
from hybeam.models import ResultRow, Scenario
from hybeam.results import ResultList, read_csv, write_csv


@pytest.fixture(scope="function")
def workdir(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    monkeypatch.delenv("HYBEAM_THREADS", raising=False)
    return tmp_path


def _rows():
    """
    Two rows covering a qualified metric and an awkward float

    Returns:
        (ResultList): the rows
    """
    rows = ResultList("unit", 5)
    rows.add_row("rf_ltap", -10, "rate", 0.1 + 0.2, stderr=1e-17, realizations=3)
    rows.add_samples("mf", 0, "sinr_component:isi", [1.0, 2.0, 4.0])
    return rows


class TestResultList(object):

    def test_samples(self):
        rows = _rows()
        row = rows.select(scheme="mf")[0]
        assert row.value == pytest.approx(7 / 3)
        assert row.stderr == pytest.approx(7 ** 0.5 / 3)
        assert row.realizations == 3
        assert row.family == "sinr_component"
        assert rows.select(metric="rate")[0].scheme == "rf_ltap"

    def test_stderr(self):
        rows = ResultList()
        rows.add_samples("zf", 0, "rate", [2.0, 4.0])
        assert rows[0].stderr == pytest.approx(1.0)
        rows.add_samples("zf", 5, "rate", [3.0])
        assert rows[1].stderr == 0.0

    def test_failure_ratio(self):
        rows = ResultList()
        assert not rows.too_many_failures
        rows.attempted_realizations = 200
        rows.failed_realizations = 2
        assert not rows.too_many_failures
        rows.failed_realizations = 3
        assert rows.too_many_failures


class TestCsv(object):

    def test_round_trip(self, workdir):
        rows = _rows()
        write_csv(rows, "rows.csv")
        assert read_csv("rows.csv") == rows
        with open("rows.csv", "rb") as handle:
            assert b"\r" not in handle.read()

    def test_float_format(self):
        record = ResultRow("s", "zf", 0.0, "rate", 0.1 + 0.2, 0.0, 1, 0).serialize()
        assert record[4] == "0.30000000000000004"
        assert len(record) == len(CSV_HEADER)

    def test_bad_header(self, workdir):
        with open("bad.csv", "w") as handle:
            handle.write("scheme,value\nzf,1\n")
        with pytest.raises(ConfigError):
            read_csv("bad.csv")

    def test_malformed_rows(self):
        with pytest.raises(ConfigError):
            ResultRow.deserialize(["s", "zf", "0", "rate", "1"])
        with pytest.raises(ConfigError):
            ResultRow.deserialize(["s", "zf", "zero", "rate", "1", "0", "1", "0"])
        with pytest.raises(ConfigError):
            ResultRow.deserialize(["s", "zf", "0", "rate", "1", "-1", "1", "0"])


class TestScenarioModel(object):

    def _doc(self):
        """
        Minimal valid scenario document

        Returns:
            (dict): the document
        """
        return {"name": "s", "M": 8, "U": 2, "L": 2, "K": 8, "snr_db": [0],
                "realizations": 1, "schemes": ["zf"], "seed": 0}

    def test_round_trip(self):
        s = Scenario.deserialize(self._doc())
        assert Scenario.deserialize(s.serialize()) == s

    def test_schema_violations(self):
        for key, value in (("M", 0), ("schemes", ["rf_2tap"]), ("snr_db", []), ("name", "a b"), ("extra", 1)):
            doc = self._doc()
            doc[key] = value
            with pytest.raises(ConfigError):
                Scenario.deserialize(doc)

    def test_overrides(self):
        doc = self._doc()
        doc.update({"model": "sparse", "sparse": {"mpcs_per_cluster": 2}})
        s = Scenario.deserialize(doc).with_overrides(L=3, K=None)
        assert s.dims.L == 3
        assert s.dims.K == 8
        assert s.sparse.clusters == 3

    def test_cluster_mismatch(self):
        doc = self._doc()
        doc.update({"model": "sparse", "sparse": {"clusters": 3}})
        with pytest.raises(ConfigError):
            Scenario.deserialize(doc)


class TestSettings(object):

    def test_defaults(self, workdir):
        settings = create_settings()
        assert settings["OUTDIR"] == "results"
        assert settings["PROP_TOLERANCE"] == pytest.approx(0.05)
        assert settings["THREADS"] >= 1

    def test_precedence(self, workdir, monkeypatch):
        with open("hybeam.cfg.yml", "w") as handle:
            handle.write("THREADS: 2\nOUTDIR: out\n")
        assert create_settings()["THREADS"] == 2
        assert create_settings()["OUTDIR"] == "out"
        monkeypatch.setenv("HYBEAM_THREADS", "5")
        assert create_settings()["THREADS"] == 5
        assert create_settings({"THREADS": 1})["THREADS"] == 1

    def test_invalid(self, workdir, monkeypatch):
        monkeypatch.setenv("HYBEAM_THREADS", "0")
        with pytest.raises(ConfigError):
            create_settings()
        monkeypatch.delenv("HYBEAM_THREADS")
        with open("hybeam.cfg.yml", "w") as handle:
            handle.write("THREADS: [\n")
        with pytest.raises(ConfigError):
            create_settings()

    def test_not_a_mapping(self, workdir):
        with open("hybeam.cfg.yml", "w") as handle:
            handle.write("- 1\n- 2\n")
        with pytest.raises(ConfigError):
            create_settings()

    def test_log_level(self, workdir):
        with open("hybeam.cfg.yml", "w") as handle:
            handle.write("LOG_LEVEL: info\n")
        assert create_settings()["LOG_LEVEL"] == "INFO"
        with pytest.raises(ConfigError):
            create_settings({"LOG_LEVEL": "LOUD"})
