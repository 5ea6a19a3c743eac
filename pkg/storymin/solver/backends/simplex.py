"""Dense two-phase tableau simplex.

Columns are shifted to their lower bounds, fixed columns are dropped and
finite upper bounds become rows. Rows with a negative right-hand side and
equality rows start with an artificial basic column.
"""

import logging
import time
from typing import List, Optional, Tuple

import numpy as np

from storymin.solver.backends.base import (
    LPMatrices,
    LPResult,
    LPStatus,
    RelaxationBackend,
)

logger = logging.getLogger(__name__)

# Degenerate pivots in a row before switching to Bland's rule for good.
STALL_LIMIT = 10


class DenseSimplexBackend(RelaxationBackend):
    name = "simplex"

    def __init__(self, tolerance: float = 1e-9, seed: int = 0):
        super().__init__(tolerance, seed)
        self.iterations = 0

    def _pivot_col(self, cost: np.ndarray, bland: bool) -> Optional[int]:
        candidates = np.flatnonzero(cost < -self.tolerance)
        if not len(candidates):
            return None
        if bland:
            return int(candidates[0])
        return int(candidates[np.argmin(cost[candidates])])

    def _pivot_row(self, t: np.ndarray, col: int, basis: List[int]) -> Optional[int]:
        column = t[:-1, col]
        rows = np.flatnonzero(column > self.tolerance)
        if not len(rows):
            return None
        ratios = t[rows, -1] / column[rows]
        best = ratios.min()
        ties = rows[ratios <= best + self.tolerance]
        return int(min(ties, key=lambda r: basis[r]))

    @staticmethod
    def _pivot(t: np.ndarray, row: int, col: int, basis: List[int]):
        t[row] /= t[row, col]
        factors = t[:, col].copy()
        factors[row] = 0.0
        t -= np.outer(factors, t[row])
        basis[row] = col

    def _iterate(
        self,
        t: np.ndarray,
        basis: List[int],
        allowed: int,
        deadline: Optional[float] = None,
    ) -> LPStatus:
        m, n = t.shape[0] - 1, allowed
        limit = 50 * (m + n) + 100
        best = t[-1, -1]
        stalled = 0
        bland = False
        for _ in range(limit):
            if deadline is not None and time.perf_counter() >= deadline:
                return LPStatus.TIME_LIMIT
            self.iterations += 1
            bland = bland or stalled >= STALL_LIMIT
            col = self._pivot_col(t[-1, :allowed], bland)
            if col is None:
                return LPStatus.OPTIMAL
            row = self._pivot_row(t, col, basis)
            if row is None:
                return LPStatus.UNBOUNDED
            self._pivot(t, row, col, basis)
            # The corner entry holds minus the objective.
            if t[-1, -1] > best + self.tolerance:
                best, stalled = t[-1, -1], 0
            else:
                stalled += 1
        logger.warning("simplex stopped after %d iterations", limit)
        return LPStatus.NUMERICAL

    def _standard_form(self, lp: LPMatrices, perturb: bool):
        free = np.flatnonzero(lp.upper - lp.lower > self.tolerance)
        shift = lp.lower
        width = lp.upper[free] - lp.lower[free]
        bounded = np.flatnonzero(np.isfinite(width))

        a_ub = lp.a_ub[:, free]
        b_ub = lp.b_ub - lp.a_ub @ shift
        bound_rows = np.zeros((len(bounded), len(free)))
        bound_rows[np.arange(len(bounded)), bounded] = 1.0
        a_le = np.vstack([a_ub, bound_rows])
        b_le = np.concatenate([b_ub, width[bounded]])
        a_eq = lp.a_eq[:, free]
        b_eq = lp.b_eq - lp.a_eq @ shift
        if perturb:
            b_le = b_le + self.rng.uniform(0.0, 1e-9, size=len(b_le))
        return free, shift, a_le, b_le, a_eq, b_eq

    def _solve(
        self, lp: LPMatrices, perturb: bool, time_limit: Optional[float]
    ) -> LPResult:
        deadline = None
        if time_limit is not None and np.isfinite(time_limit):
            deadline = time.perf_counter() + time_limit
        free, shift, a_le, b_le, a_eq, b_eq = self._standard_form(lp, perturb)
        n = len(free)
        m_le, m_eq = len(b_le), len(b_eq)
        m = m_le + m_eq

        flip_le = b_le < 0
        flip_eq = b_eq < 0
        n_art = int(flip_le.sum()) + m_eq
        cols = n + m_le + n_art
        t = np.zeros((m + 1, cols + 1))
        basis: List[int] = []

        art = n + m_le
        for i in range(m_le):
            sign = -1.0 if flip_le[i] else 1.0
            t[i, :n] = sign * a_le[i]
            t[i, n + i] = sign
            t[i, -1] = sign * b_le[i]
            if flip_le[i]:
                t[i, art] = 1.0
                basis.append(art)
                art += 1
            else:
                basis.append(n + i)
        for k in range(m_eq):
            i = m_le + k
            sign = -1.0 if flip_eq[k] else 1.0
            t[i, :n] = sign * a_eq[k]
            t[i, -1] = sign * b_eq[k]
            t[i, art] = 1.0
            basis.append(art)
            art += 1

        first_art = n + m_le
        if n_art:
            t[-1, first_art:cols] = 1.0
            for i, b in enumerate(basis):
                if b >= first_art:
                    t[-1] -= t[i]
            status = self._iterate(t, basis, cols, deadline)
            if status is LPStatus.TIME_LIMIT:
                return LPResult(status)
            if status is not LPStatus.OPTIMAL:
                return LPResult(LPStatus.NUMERICAL)
            if -t[-1, -1] > 1e-7:
                return LPResult(LPStatus.INFEASIBLE)
            t, basis = self._drop_artificials(t, basis, first_art)

        t[-1, :] = 0.0
        t[-1, :n] = lp.c[free]
        for i, b in enumerate(basis):
            if t[-1, b] != 0.0:
                t[-1] -= t[-1, b] * t[i]
        status = self._iterate(t, basis, first_art, deadline)
        if status is not LPStatus.OPTIMAL:
            return LPResult(status)

        x = shift.copy()
        for i, b in enumerate(basis):
            if b < n:
                x[free[b]] += t[i, -1]
        return LPResult(LPStatus.OPTIMAL, float(lp.c @ x), x)

    def _drop_artificials(
        self, t: np.ndarray, basis: List[int], first_art: int
    ) -> Tuple[np.ndarray, List[int]]:
        keep_rows = []
        for i, b in enumerate(basis):
            if b < first_art:
                keep_rows.append(i)
                continue
            nonzero = np.flatnonzero(np.abs(t[i, :first_art]) > self.tolerance)
            if len(nonzero):
                self._pivot(t, i, int(nonzero[0]), basis)
                keep_rows.append(i)
        rows = keep_rows + [t.shape[0] - 1]
        cols = list(range(first_art)) + [t.shape[1] - 1]
        return t[np.ix_(rows, cols)].copy(), [basis[i] for i in keep_rows]
