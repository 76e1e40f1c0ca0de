"""
Constants to drrmdpf
"""
INTEREST = "interest"
DATA = "data"

EVENT_PACKET_ARRIVAL = "packet arrival"
EVENT_TIMER_FIRE = "timer fire"
EVENT_APP_TICK = "app tick"
EVENT_TX_DONE = "tx done"
EVENT_LINK_DOWN = "link down"

ROLE_ROUTER = "router"
ROLE_CONSUMER = "consumer"
ROLE_PRODUCER = "producer"
ROLES = (ROLE_ROUTER, ROLE_CONSUMER, ROLE_PRODUCER)

ACCEPTED = "accepted"
DROPPED = "dropped"

POSITIVE = "positive"
NEGATIVE = "negative"

REWARD_AS_WRITTEN = "as-written"
REWARD_QUALITATIVE = "qualitative"
REWARD_MODES = (REWARD_AS_WRITTEN, REWARD_QUALITATIVE)

SELECT_ARGMAX = "argmax"
SELECT_SAMPLE = "sample"
SELECTION_MODES = (SELECT_ARGMAX, SELECT_SAMPLE)

STRATEGY_DRR_MDPF = "drr-mdpf"
STRATEGY_BEST_ROUTE = "best-route"
STRATEGY_RANDOM = "random"
STRATEGY_RFA_LIKE = "rfa-like"
STRATEGY_SAF_LIKE = "saf-like"
STRATEGY_SMDPF_LIKE = "smdpf-like"
STRATEGY_LA_MDPF_LIKE = "la-mdpf-like"

ARRIVAL_POISSON = "poisson"
ARRIVAL_CONSTANT = "constant"
ARRIVAL_PROCESSES = (ARRIVAL_POISSON, ARRIVAL_CONSTANT)

PATTERN_ZIPF = "zipf"
PATTERN_SEQUENTIAL = "sequential"
REQUEST_PATTERNS = (PATTERN_ZIPF, PATTERN_SEQUENTIAL)

DROP_QUEUE_FULL = "queue full"
DROP_NO_ROUTE = "no route"
DROP_MALFORMED = "malformed name"
DROP_LINK_DOWN = "link down"

# Face id used by the local consumer/producer application on a node
APP_FACE = -1

# Evaluation defaults
QUEUE_CAPACITY = 100
LINK_BANDWIDTH = 10_000_000
LINK_DELAY = 0.010
SIMULATION_DURATION = 150.0
INTEREST_RATE = 2000.0
CACHE_FRACTION = 0.10
TOPOLOGY_NODES = 40
TOPOLOGY_LINKS = 122

DEFAULT_QUANTUM = 1500
PIT_TIMEOUT = 2.0
RTT_ALPHA = 0.125
LAMBDA_R = 0.9
LAMBDA_SMOOTH = 0.1
BANDWIDTH_WINDOW = 0.1
EVENT_CAP = 10**8

CATALOG_SIZE = 10_000
CONTENT_CLASSES = 10
ZIPF_EXPONENT = 1.0
INTEREST_SIZE = 64
DATA_SIZE = 1024

SAF_DECAY = 0.9
SAF_RECOVERY = 0.1

SIMPLEX_TOL = 1e-9
VALUE_ITERATION_TOL = 1e-6
VALUE_ITERATION_MAX_ITER = 100_000

CSV_HEADER = (
    "scenario",
    "strategy",
    "seed",
    "rate",
    "cache_frac",
    "throughput",
    "isr",
    "drop_rate",
    "mean_retrieval",
    "cov_load",
)

SWEEP_DEFAULTS = {
    "rate": (2000.0, 2500.0, 3000.0, 3500.0, 4000.0),
    "cache_frac": (0.01, 0.15, 0.30, 0.45, 0.60),
}

SWEEP_PARAMS = {
    "rate": "interest_rate",
    "cache_frac": "cache_fraction",
}
