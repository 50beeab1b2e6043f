DEFAULT_SEED = 20240917
DEFAULT_BACKEND = "statevector"
# DEFAULT_BACKEND = "frame"
DEFAULT_OUT_DIR = "results"
DEFAULT_WORKERS = 4

CONFIG_SCHEMA = "vbqc-config/1"
FLOAT_SIGNIFICANT_DIGITS = 17

MAX_STATEVECTOR_AMPLITUDES = 2_000_000
MAX_EXACT_ASSIGNMENTS = 1_000_000
MAX_UNITARY_ATTACK_ANCILLAS = 2

NORM_TOLERANCE = 1e-9
ZERO_BRANCH_TOLERANCE = 1e-14
STATE_TOLERANCE = 1e-9
TWIRL_TOLERANCE = 1e-10
SIGMA_MULTIPLIER = 4.0

TRAP_SUBSET_SIZE = 3

DEFAULT_SAMPLES = 10_000
DEFAULT_LOCALISE_RUNS = 100
DEFAULT_HYBRID_RUNS = 20
DEFAULT_SCALING_GRID = (4, 8, 16, 32, 64)
DEFAULT_D1 = 3
DEFAULT_D2 = 1
DEFAULT_QUDIT_DIMENSION = 5
MIN_LEAKAGE_SAMPLES_PER_BIN = 5

VERBOSE_SESSIONS = False
