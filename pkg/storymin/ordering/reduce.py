"""Variable identification.

Tree equalities tie ordering variables together; each connected group becomes
one class variable and the equalities leave the formulation.
"""

import logging
from collections import Counter
from dataclasses import dataclass
from typing import Dict, List, Sequence, Tuple

import numpy as np
from networkx.utils import UnionFind

from storymin.ordering.model import CrossingTerm, OrderingModel, Parity

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class VariableClasses:
    """``class_of[var]`` is the class id; classes are numbered by smallest member."""

    class_of: np.ndarray
    members: Tuple[Tuple[int, ...], ...]

    @property
    def representatives(self) -> Tuple[int, ...]:
        return tuple(m[0] for m in self.members)

    def __len__(self) -> int:
        return len(self.members)

    @classmethod
    def identity(cls, n: int) -> "VariableClasses":
        return cls(np.arange(n, dtype=np.int64), tuple((v,) for v in range(n)))


@dataclass(frozen=True, eq=False)
class ReducedModel:
    """Model over class variables.

    ``triples`` rows ``(a, b, c)`` stand for ``0 <= x_a + x_b - x_c <= 1``
    (``a`` may equal ``b``). ``equalities`` is only non-empty when
    identification was skipped and the tree constraints stay as rows.
    """

    model: OrderingModel
    classes: VariableClasses
    terms: Tuple[CrossingTerm, ...]
    triples: np.ndarray
    offset: int
    equalities: Tuple[Tuple[int, int], ...] = ()

    @property
    def n_vars(self) -> int:
        return len(self.classes)

    @property
    def n_triples(self) -> int:
        return len(self.triples)

    def reduce_assignment(self, x: Sequence[int]) -> np.ndarray:
        """Class values read off the representatives of a full assignment."""
        reps = np.array(self.classes.representatives, dtype=np.int64)
        return np.asarray(x)[reps]

    def expand_assignment(self, xc: Sequence[int]) -> np.ndarray:
        xc = np.asarray(xc, dtype=np.int64)
        if len(xc) != self.n_vars:
            raise ValueError(f"expected {self.n_vars} class values, got {len(xc)}")
        return xc[self.classes.class_of]


def _classes(model: OrderingModel) -> VariableClasses:
    uf = UnionFind(range(model.n_vars))
    for eq in model.equalities:
        uf.union(eq.u, eq.v)
    groups: Dict[int, List[int]] = {}
    for var in range(model.n_vars):
        groups.setdefault(uf[var], []).append(var)
    members = tuple(sorted(tuple(g) for g in groups.values()))
    class_of = np.empty(model.n_vars, dtype=np.int64)
    for c, group in enumerate(members):
        class_of[list(group)] = c
    return VariableClasses(class_of, members)


def _reduce_terms(
    terms: Sequence[CrossingTerm], class_of: np.ndarray
) -> Tuple[List[CrossingTerm], int]:
    offset = 0
    weights: Counter = Counter()
    for term in terms:
        a, b = int(class_of[term.var_a]), int(class_of[term.var_b])
        if a == b:
            # x xor x is 0, x xnor x is 1
            if term.parity is Parity.XNOR:
                offset += term.weight
            continue
        weights[(min(a, b), max(a, b), term.parity)] += term.weight
    reduced = [CrossingTerm(a, b, p, w) for (a, b, p), w in sorted(weights.items())]
    return reduced, offset


def _reduce_triples(triple_vars: np.ndarray, class_of: np.ndarray) -> np.ndarray:
    if not len(triple_vars):
        return np.empty((0, 3), dtype=np.int64)
    c = class_of[triple_vars]
    a, b = np.minimum(c[:, 0], c[:, 1]), np.maximum(c[:, 0], c[:, 1])
    rows = np.stack([a, b, c[:, 2]], axis=1)
    # x_a - x_a + x_b and friends collapse to a bound.
    keep = (rows[:, 0] != rows[:, 2]) & (rows[:, 1] != rows[:, 2])
    if not keep.any():
        return np.empty((0, 3), dtype=np.int64)
    return np.unique(rows[keep], axis=0)


def identify_variables(
    model: OrderingModel, enabled: bool = True
) -> Tuple[ReducedModel, VariableClasses]:
    if enabled:
        classes = _classes(model)
        equalities: Tuple[Tuple[int, int], ...] = ()
    else:
        classes = VariableClasses.identity(model.n_vars)
        equalities = tuple((eq.u, eq.v) for eq in model.equalities)

    terms, offset = _reduce_terms(model.terms, classes.class_of)
    triples = _reduce_triples(model.triple_vars, classes.class_of)
    reduced = ReducedModel(model, classes, tuple(terms), triples, offset, equalities)
    logger.info(
        "identified %d variables into %d classes; %d of %d triples remain",
        model.n_vars,
        reduced.n_vars,
        reduced.n_triples,
        model.n_triples,
    )
    return reduced, classes
