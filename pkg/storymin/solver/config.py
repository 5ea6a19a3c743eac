from dataclasses import dataclass
from typing import Optional

from storymin import (
    DEFAULT_TIME_LIMIT,
    HEURISTIC_SWEEPS,
    INACTIVE_ROUNDS,
    INACTIVE_SLACK,
    MAX_CUTS_PER_ROUND,
    MAX_ROUNDS_PER_NODE,
    PROGRESS_INTERVAL,
    SEPARATION_TOLERANCE,
)
from storymin.solver.backends import BACKENDS

BRANCHING_RULES = ("most-fractional", "first-fractional")


@dataclass
class SolveConfig:
    time_limit: float = DEFAULT_TIME_LIMIT
    tolerance: float = SEPARATION_TOLERANCE
    max_cuts_per_round: int = MAX_CUTS_PER_ROUND
    max_rounds_per_node: int = MAX_ROUNDS_PER_NODE
    inactive_slack: float = INACTIVE_SLACK
    inactive_rounds: int = INACTIVE_ROUNDS
    branching: str = "most-fractional"
    seed: int = 0
    merge_layers: bool = True
    identify_variables: bool = True
    symmetry_breaking: bool = True
    rounding: bool = True
    heuristic_only: bool = False
    sweeps: int = HEURISTIC_SWEEPS
    threads: int = 1
    backend: Optional[str] = None
    progress_interval: float = PROGRESS_INTERVAL

    def __post_init__(self):
        if not self.time_limit > 0:
            raise ValueError("time limit must be positive")
        if not self.tolerance > 0:
            raise ValueError("separation tolerance must be positive")
        if self.max_cuts_per_round < 1 or self.max_rounds_per_node < 1:
            raise ValueError("cut limits must be at least 1")
        if self.sweeps < 1:
            raise ValueError("sweeps must be at least 1")
        if self.threads < 1:
            raise ValueError("threads must be at least 1")
        if self.branching not in BRANCHING_RULES:
            raise ValueError(f"unknown branching rule {self.branching}")
        if self.backend is not None and self.backend not in BACKENDS:
            raise ValueError(f"unknown LP backend {self.backend}")
