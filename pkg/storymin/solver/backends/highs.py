from typing import Optional

import numpy as np
from scipy.optimize import linprog

from storymin.solver.backends.base import (
    LPMatrices,
    LPResult,
    LPStatus,
    RelaxationBackend,
)

_STATUS = {
    0: LPStatus.OPTIMAL,
    2: LPStatus.INFEASIBLE,
    3: LPStatus.UNBOUNDED,
}


class HighsBackend(RelaxationBackend):
    """Relaxations solved by HiGHS through :func:`scipy.optimize.linprog`."""

    name = "highs"

    def _solve(
        self, lp: LPMatrices, perturb: bool, time_limit: Optional[float]
    ) -> LPResult:
        options = {}
        if time_limit is not None and np.isfinite(time_limit):
            options["time_limit"] = float(time_limit)
        res = linprog(
            lp.c,
            A_ub=lp.a_ub if len(lp.b_ub) else None,
            b_ub=lp.b_ub if len(lp.b_ub) else None,
            A_eq=lp.a_eq if len(lp.b_eq) else None,
            b_eq=lp.b_eq if len(lp.b_eq) else None,
            bounds=np.column_stack([lp.lower, lp.upper]),
            method="highs-ds" if perturb else "highs",
            options=options,
        )
        status = _STATUS.get(res.status, LPStatus.NUMERICAL)
        # linprog reports its iteration and time limits alike as status 1.
        if res.status == 1 and options:
            status = LPStatus.TIME_LIMIT
        if status is not LPStatus.OPTIMAL:
            return LPResult(status)
        return LPResult(status, float(res.fun), np.asarray(res.x, dtype=float))
