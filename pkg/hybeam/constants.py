import os

PACKAGE_DIR = os.path.dirname(os.path.abspath(__file__))
SCHEMA_DIR = os.path.join(PACKAGE_DIR, "schemas")
SCENARIO_SCHEMA = os.path.join(SCHEMA_DIR, "scenario_schema.json")
PRESETS_FILE = os.path.join(PACKAGE_DIR, "presets.yml")

INSTANCE_CONFIG = "hybeam.cfg.yml"
THREADS_ENV = "HYBEAM_THREADS"

CSV_HEADER = ["scenario", "scheme", "snr_db", "metric", "value", "stderr", "realizations", "seed"]
CSV_FLOAT_FORMAT = ".17g"

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
MAX_FAILURE_RATIO = 0.01

RICH = "rich"
SPARSE = "sparse"
CHANNEL_MODELS = (RICH, SPARSE)

LTAP = "L-tap"
ONE_TAP = "1-tap"

# Schemes
CAPACITY = "capacity"
MF = "mf"
ZF = "zf"
RF_1TAP = "rf_1tap"
RF_LTAP = "rf_ltap"
HEURISTIC_1TAP = "heuristic_1tap"
RF_1TAP_ZF = "rf_1tap+zf"
RF_LTAP_ZF = "rf_ltap+zf"
HEURISTIC_1TAP_ZF = "heuristic_1tap+zf"
BANK_2L_ZF = "bank_2L+zf"
PROP1 = "prop1"
PROP2 = "prop2"
PROP4_LTAP = "prop4_ltap"
PROP4_1TAP = "prop4_1tap"
SISO = "siso"
PROP3_LOW = "prop3_low"
PROP3_HIGH = "prop3_high"

RF_ONLY_SCHEMES = (MF, RF_1TAP, RF_LTAP, HEURISTIC_1TAP)
ZF_SCHEMES = (ZF, RF_1TAP_ZF, RF_LTAP_ZF, HEURISTIC_1TAP_ZF, BANK_2L_ZF)
CLOSED_FORM_SCHEMES = (PROP1, PROP2, PROP4_LTAP, PROP4_1TAP)
SCHEMES = (CAPACITY,) + RF_ONLY_SCHEMES + ZF_SCHEMES + CLOSED_FORM_SCHEMES

# Metrics
RATE = "rate"
RATE_STREAMS = "rate_streams"
RMS_MEAN = "rms_mean"
RMS_CDF_POINT = "rms_cdf_point"
SINR_COMPONENT = "sinr_component"
SINR_PARTS = ("signal", "isi", "mui", "noise", "sinr")
CDF_QUANTILES = (0.1, 0.25, 0.5, 0.75, 0.9)
