import abc
import enum
import logging
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from storymin import LP_TOLERANCE

logger = logging.getLogger(__name__)

# (coefficients by column, lower, upper); either side may be infinite.
Row = Tuple[Dict[int, float], float, float]


class LPStatus(str, enum.Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"
    NUMERICAL = "numerical"
    TIME_LIMIT = "time-limit"


@dataclass
class LPResult:
    status: LPStatus
    value: float = float("nan")
    x: Optional[np.ndarray] = None

    @property
    def ok(self) -> bool:
        return self.status is LPStatus.OPTIMAL


@dataclass
class LPMatrices:
    c: np.ndarray
    a_ub: np.ndarray
    b_ub: np.ndarray
    a_eq: np.ndarray
    b_eq: np.ndarray
    lower: np.ndarray
    upper: np.ndarray


class RelaxationBackend(abc.ABC):
    """Incremental LP: ``min c x`` over column bounds and ranged rows.

    Rows get stable ids from :meth:`add_rows` so they can be dropped later.
    """

    name = "abstract"

    def __init__(self, tolerance: float = LP_TOLERANCE, seed: int = 0):
        self.tolerance = tolerance
        self.rng = np.random.default_rng(seed)
        self.c = np.zeros(0)
        self.lower = np.zeros(0)
        self.upper = np.zeros(0)
        self.rows: Dict[int, Row] = {}
        self._next_row = 0

    @property
    def n_cols(self) -> int:
        return len(self.c)

    @property
    def n_rows(self) -> int:
        return len(self.rows)

    def load(
        self,
        objective: Sequence[float],
        lower: Sequence[float],
        upper: Sequence[float],
    ):
        self.c = np.asarray(objective, dtype=float).copy()
        self.lower = np.asarray(lower, dtype=float).copy()
        self.upper = np.asarray(upper, dtype=float).copy()
        if not (len(self.c) == len(self.lower) == len(self.upper)):
            raise ValueError("objective and bounds differ in length")
        self.rows = {}
        self._next_row = 0

    def add_rows(self, rows: Iterable[Row]) -> List[int]:
        ids = []
        for coefs, lo, hi in rows:
            if any(not 0 <= col < self.n_cols for col in coefs):
                raise ValueError("row refers to an unknown column")
            self.rows[self._next_row] = (dict(coefs), float(lo), float(hi))
            ids.append(self._next_row)
            self._next_row += 1
        return ids

    def remove_rows(self, ids: Iterable[int]):
        for row_id in ids:
            self.rows.pop(row_id, None)

    def set_bounds(self, col: int, lower: float, upper: float):
        self.lower[col] = lower
        self.upper[col] = upper

    def slacks(self, x: np.ndarray) -> Dict[int, float]:
        """Distance of ``x`` from the nearer finite side of every row."""
        out = {}
        for row_id, (coefs, lo, hi) in self.rows.items():
            act = sum(w * x[col] for col, w in coefs.items())
            out[row_id] = min(hi - act, act - lo)
        return out

    def matrices(self) -> LPMatrices:
        ub_rows: List[np.ndarray] = []
        ub_rhs: List[float] = []
        eq_rows: List[np.ndarray] = []
        eq_rhs: List[float] = []
        for coefs, lo, hi in self.rows.values():
            dense = np.zeros(self.n_cols)
            for col, w in coefs.items():
                dense[col] += w
            if lo == hi:
                eq_rows.append(dense)
                eq_rhs.append(hi)
                continue
            if np.isfinite(hi):
                ub_rows.append(dense)
                ub_rhs.append(hi)
            if np.isfinite(lo):
                ub_rows.append(-dense)
                ub_rhs.append(-lo)
        n = self.n_cols
        return LPMatrices(
            self.c,
            np.array(ub_rows).reshape(-1, n),
            np.array(ub_rhs, dtype=float),
            np.array(eq_rows).reshape(-1, n),
            np.array(eq_rhs, dtype=float),
            self.lower,
            self.upper,
        )

    def solve(
        self, perturb: bool = False, time_limit: Optional[float] = None
    ) -> LPResult:
        """Solve the current LP, giving up after ``time_limit`` seconds."""
        if time_limit is not None and time_limit <= 0:
            return LPResult(LPStatus.TIME_LIMIT)
        if np.any(self.lower > self.upper + self.tolerance):
            return LPResult(LPStatus.INFEASIBLE)
        if not self.n_cols:
            return LPResult(LPStatus.OPTIMAL, 0.0, np.zeros(0))
        result = self._solve(self.matrices(), perturb, time_limit)
        if result.ok and result.x is not None:
            result.x = np.clip(result.x, self.lower, self.upper)
            result.value = float(self.c @ result.x)
        return result

    @abc.abstractmethod
    def _solve(
        self, lp: LPMatrices, perturb: bool, time_limit: Optional[float]
    ) -> LPResult:
        pass
