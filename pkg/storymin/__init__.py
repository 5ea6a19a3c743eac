import os

__version__ = "0.1.0"

# Solver defaults
DEFAULT_TIME_LIMIT = float(os.environ.get("STORYMIN_TIME_LIMIT", 3600))
SEPARATION_TOLERANCE = 1e-6
LP_TOLERANCE = 1e-7
INTEGRALITY_TOLERANCE = 1e-6
MAX_CUTS_PER_ROUND = 500
MAX_ROUNDS_PER_NODE = 200
INACTIVE_SLACK = 0.1
INACTIVE_ROUNDS = 10
HEURISTIC_SWEEPS = 8
PROGRESS_INTERVAL = 5.0

# Oracle caps
ORACLE_LEAF_CAP = 9
ORACLE_BUDGET = 10**7
