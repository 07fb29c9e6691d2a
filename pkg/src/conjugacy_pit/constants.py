"""Constants used in the conjugacy-pit app."""
ROOT_NODE_ID = "root"
ROOT_NODE_TAG = "Self-check"
GRID_POINT_CAP = 100_000
WORD_CAP = 1_000_000
DEFAULT_TRIALS = 10
MIN_SAMPLE_RANGE = 101
DEFAULT_RANDOM_RANGE = 100
DEFAULT_SELFCHECK_INSTANCES = 20
LOGGER_NAME = "conjugacy_pit"
