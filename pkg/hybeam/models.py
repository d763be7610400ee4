import json
from dataclasses import dataclass

from jsonschema import ValidationError, validate

from hybeam.channel import SparseChannelConfig, SystemDims
from hybeam.constants import CSV_FLOAT_FORMAT, CSV_HEADER, RICH, SCENARIO_SCHEMA, SPARSE
from hybeam.errors import ConfigError
from hybeam.metrics import LinkBudget


@dataclass(frozen=True)
class Scenario:
    """
    Everything a Monte-Carlo run needs. Scenarios are built from documents
    (presets, config files) that are validated against the scenario schema.
    """

    name: str
    dims: SystemDims
    snr_db: tuple
    realizations: int
    schemes: tuple
    seed: int
    model: str = RICH
    sparse: SparseChannelConfig = None
    m_grid: tuple = ()
    c_low: float = 1.0
    c_high: float = 3.0
    description: str = ""

    def __post_init__(self):
        if self.realizations < 1:
            raise ConfigError("a scenario needs at least one realization")
        if not self.snr_db:
            raise ConfigError("a scenario needs a nonempty SNR grid")
        for snr in self.snr_db:
            try:
                LinkBudget.from_snr_db(snr)
            except ConfigError:
                raise ConfigError(f"SNR {snr:g} dB does not give a finite transmit power")
        if self.model == SPARSE and self.sparse is None:
            raise ConfigError("sparse scenarios need a sparse channel configuration")

    def serialize(self):
        doc = {
            "name": self.name,
            "M": self.dims.M,
            "U": self.dims.U,
            "L": self.dims.L,
            "K": self.dims.K,
            "model": self.model,
            "snr_db": list(self.snr_db),
            "realizations": self.realizations,
            "schemes": list(self.schemes),
            "seed": self.seed,
            "c_low": self.c_low,
            "c_high": self.c_high,
        }
        if self.sparse is not None:
            doc["sparse"] = self.sparse.serialize()
        if self.m_grid:
            doc["m_grid"] = list(self.m_grid)
        if self.description:
            doc["description"] = self.description
        return doc

    @classmethod
    def deserialize(cls, doc):
        """
        Validate a scenario document and build the scenario. Schema violations
        and dimension errors both surface as ConfigError.
        """

        try:
            validate(doc, cls.json_schema())
        except ValidationError as err:
            raise ConfigError(description=f"invalid scenario: {err.message}")

        model = doc.get("model", RICH)
        sparse = None
        if model == SPARSE:
            params = dict(doc.get("sparse", {}))
            params.setdefault("clusters", doc["L"])
            if params["clusters"] != doc["L"]:
                raise ConfigError(f"sparse channel needs one cluster per tap, got {params['clusters']} for L={doc['L']}")
            sparse = SparseChannelConfig(**params)

        return cls(
            name=doc["name"],
            dims=SystemDims(doc["M"], doc["U"], doc["L"], doc["K"]),
            snr_db=tuple(float(v) for v in doc["snr_db"]),
            realizations=doc["realizations"],
            schemes=tuple(doc["schemes"]),
            seed=doc["seed"],
            model=model,
            sparse=sparse,
            m_grid=tuple(doc.get("m_grid", ())),
            c_low=float(doc.get("c_low", 1.0)),
            c_high=float(doc.get("c_high", 3.0)),
            description=doc.get("description", ""),
        )

    def with_overrides(self, **overrides):
        """
        Copy of the scenario with some document fields replaced; None values
        are ignored. The result goes through the same validation.
        """

        doc = self.serialize()
        doc.update({key: value for key, value in overrides.items() if value is not None})
        if "sparse" in doc and overrides.get("L") is not None:
            doc["sparse"]["clusters"] = overrides["L"]
        return Scenario.deserialize(doc)

    def summary(self):
        text = f"{self.dims.summary()} model={self.model} realizations={self.realizations}"
        if self.m_grid:
            text += " M grid=" + ",".join(str(m) for m in self.m_grid)
        return text

    @staticmethod
    def json_schema():
        with open(SCENARIO_SCHEMA) as handle:
            return json.load(handle)


def _fmt(value):
    return format(value, CSV_FLOAT_FORMAT)


@dataclass(frozen=True)
class ResultRow:
    """
    One aggregated number. *metric* is a family name with an optional
    ``:qualifier``, for example ``sinr_component:isi``.
    """

    scenario: str
    scheme: str
    snr_db: float
    metric: str
    value: float
    stderr: float
    realizations: int
    seed: int

    def __post_init__(self):
        if self.stderr < 0:
            raise ConfigError(f"negative standard error in row {self.scheme}/{self.metric}")

    @property
    def family(self):
        return self.metric.split(":", 1)[0]

    def serialize(self):
        """
        CSV fields in header order, floats with 17 significant digits.
        """

        return [
            self.scenario,
            self.scheme,
            _fmt(self.snr_db),
            self.metric,
            _fmt(self.value),
            _fmt(self.stderr),
            str(self.realizations),
            str(self.seed),
        ]

    @classmethod
    def deserialize(cls, record):
        if len(record) != len(CSV_HEADER):
            raise ConfigError(f"result row has {len(record)} fields, expected {len(CSV_HEADER)}")
        try:
            return cls(
                scenario=record[0],
                scheme=record[1],
                snr_db=float(record[2]),
                metric=record[3],
                value=float(record[4]),
                stderr=float(record[5]),
                realizations=int(record[6]),
                seed=int(record[7]),
            )
        except ValueError as err:
            raise ConfigError(description=f"malformed result row: {err}")
