# isort: skip_file

from .config import BRANCHING_RULES, SolveConfig
from .heuristic import barycenter_heuristic
from .branch_and_cut import (
    OptResult,
    SolveStats,
    SolveStatus,
    branch_and_cut,
    heuristic_result,
    instance_stats,
)
