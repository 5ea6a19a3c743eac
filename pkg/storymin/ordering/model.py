"""Quadratic ordering formulation of MLCM-TC.

A layer is indexed by a fixed tree-consistent order. ``x[i, j] = 1`` for a pair
``i`` before ``j`` in that order means ``i`` is placed above ``j``. A pair of
edges ``(i, k), (j, l)`` between layers ``r`` and ``r + 1`` crosses iff the
relative orders differ, which is an xor of the two pair variables, or an xnor
when ``l`` precedes ``k`` in the index order of layer ``r + 1``.
"""

import enum
import logging
from collections import Counter
from dataclasses import dataclass
from functools import cached_property
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from storymin.errors import OrderingError
from storymin.mlcm.instance import MlcmInstance, Solution, is_tree_consistent, lca

logger = logging.getLogger(__name__)


class Parity(str, enum.Enum):
    XOR = "xor"
    XNOR = "xnor"

    def indicator(self, a: int, b: int) -> int:
        return int(a != b) if self is Parity.XOR else int(a == b)


@dataclass(frozen=True)
class VariableIndex:
    """Dense ids for every pair ``(i, j)`` with ``i`` before ``j`` in index order."""

    order: Tuple[Tuple[int, ...], ...]

    @cached_property
    def position(self) -> Dict[int, int]:
        return {v: k for layer in self.order for k, v in enumerate(layer)}

    @cached_property
    def pairs(self) -> Tuple[Tuple[int, int, int], ...]:
        """``(layer, i, j)`` for every variable id."""
        return tuple(
            (r, layer[a], layer[b])
            for r, layer in enumerate(self.order)
            for a in range(len(layer))
            for b in range(a + 1, len(layer))
        )

    @cached_property
    def lookup(self) -> Dict[Tuple[int, int], int]:
        return {(i, j): var for var, (_, i, j) in enumerate(self.pairs)}

    @cached_property
    def layer_offsets(self) -> Tuple[int, ...]:
        offsets = [0]
        for layer in self.order:
            offsets.append(offsets[-1] + len(layer) * (len(layer) - 1) // 2)
        return tuple(offsets)

    def __len__(self) -> int:
        return len(self.pairs)

    def var(self, i: int, j: int) -> int:
        return self.lookup[(i, j)]

    def literal(self, i: int, j: int) -> Tuple[int, bool]:
        """Variable for "``i`` above ``j``", and whether it is un-complemented."""
        if self.position[i] < self.position[j]:
            return self.lookup[(i, j)], True
        return self.lookup[(j, i)], False

    def layer_vars(self, r: int) -> slice:
        return slice(self.layer_offsets[r], self.layer_offsets[r + 1])


@dataclass(frozen=True)
class CrossingTerm:
    var_a: int
    var_b: int
    parity: Parity
    weight: int = 1

    def value(self, x: Sequence[int]) -> int:
        return self.weight * self.parity.indicator(x[self.var_a], x[self.var_b])


@dataclass(frozen=True)
class TransitivityTriple:
    """``0 <= x_hi + x_ij - x_hj <= 1`` for ``h, i, j`` in index order."""

    layer: int
    nodes: Tuple[int, int, int]
    hi: int
    ij: int
    hj: int


@dataclass(frozen=True)
class TreeEquality:
    u: int
    v: int


@dataclass(frozen=True, eq=False)
class OrderingModel:
    instance: MlcmInstance
    index: VariableIndex
    terms: Tuple[CrossingTerm, ...]
    triple_nodes: np.ndarray
    triple_vars: np.ndarray
    triple_layers: np.ndarray
    equalities: Tuple[TreeEquality, ...]
    offset: int = 0

    @property
    def n_vars(self) -> int:
        return len(self.index)

    @property
    def n_triples(self) -> int:
        return len(self.triple_vars)

    def triple(self, k: int) -> TransitivityTriple:
        h, i, j = (int(v) for v in self.triple_nodes[k])
        hi, ij, hj = (int(v) for v in self.triple_vars[k])
        return TransitivityTriple(int(self.triple_layers[k]), (h, i, j), hi, ij, hj)

    def triples(self) -> Iterator[TransitivityTriple]:
        for k in range(self.n_triples):
            yield self.triple(k)


def _index_order(
    instance: MlcmInstance, order: Optional[Solution]
) -> Tuple[Tuple[int, ...], ...]:
    if order is None:
        return tuple(tree.leaf_order for tree in instance.trees)
    for r, (tree, pi) in enumerate(zip(instance.trees, order.orders)):
        if not is_tree_consistent(tree, pi):
            raise ValueError(f"index order of layer {r + 1} is not tree-consistent")
    return order.orders


def _crossing_terms(instance: MlcmInstance, index: VariableIndex) -> List[CrossingTerm]:
    counts: Counter = Counter()
    pos = index.position
    for gap in instance.edges:
        for a in range(len(gap)):
            for b in range(a + 1, len(gap)):
                (i, k), (j, l) = gap[a], gap[b]
                if i == j or k == l:
                    continue
                if pos[i] > pos[j]:
                    i, j, k, l = j, i, l, k
                if pos[k] < pos[l]:
                    counts[(index.var(i, j), index.var(k, l), Parity.XOR)] += 1
                else:
                    counts[(index.var(i, j), index.var(l, k), Parity.XNOR)] += 1
    return [
        CrossingTerm(a, b, parity, w) for (a, b, parity), w in sorted(counts.items())
    ]


def _layer_triples(instance: MlcmInstance, index: VariableIndex, r: int):
    layer = index.order[r]
    n = len(layer)
    if n < 3:
        return [], [], []
    tree = instance.trees[r]
    under = tree.leaf_sets
    meet = {
        (layer[a], layer[b]): lca(tree, layer[a], layer[b])
        for a in range(n)
        for b in range(a + 1, n)
    }
    nodes, variables, equalities = [], [], []
    for a in range(n):
        h = layer[a]
        for b in range(a + 1, n):
            i = layer[b]
            hi = index.var(h, i)
            for c in range(b + 1, n):
                j = layer[c]
                ij, hj = index.var(i, j), index.var(h, j)
                nodes.append((h, i, j))
                variables.append((hi, ij, hj))
                if j not in under[meet[(h, i)]]:  # type: ignore[index]
                    equalities.append(TreeEquality(hj, ij))
                if h not in under[meet[(i, j)]]:  # type: ignore[index]
                    equalities.append(TreeEquality(hi, hj))
    return nodes, variables, equalities


def build_model(
    instance: MlcmInstance, order: Optional[Solution] = None
) -> OrderingModel:
    """Build the ordering model, indexing each layer by ``order``.

    ``order`` must be tree-consistent on every layer; the depth-first leaf
    order of each tree is used when it is omitted.
    """
    index = VariableIndex(_index_order(instance, order))
    terms = _crossing_terms(instance, index)

    nodes: List[Tuple[int, int, int]] = []
    variables: List[Tuple[int, int, int]] = []
    layers: List[int] = []
    equalities: Dict[TreeEquality, None] = {}
    for r in range(instance.p):
        n, v, e = _layer_triples(instance, index, r)
        nodes.extend(n)
        variables.extend(v)
        layers.extend([r] * len(n))
        equalities.update(dict.fromkeys(e))

    model = OrderingModel(
        instance=instance,
        index=index,
        terms=tuple(terms),
        triple_nodes=np.array(nodes, dtype=np.int64).reshape(-1, 3),
        triple_vars=np.array(variables, dtype=np.int64).reshape(-1, 3),
        triple_layers=np.array(layers, dtype=np.int64),
        equalities=tuple(equalities),
    )
    logger.debug(
        "ordering model: %d variables, %d terms, %d triples, %d equalities",
        model.n_vars,
        len(model.terms),
        model.n_triples,
        len(model.equalities),
    )
    return model


def objective_value(model, assignment: Sequence[int]) -> int:
    """Crossings encoded by ``assignment`` for an ordering or reduced model."""
    if len(assignment) < model.n_vars:
        raise ValueError(
            f"assignment has {len(assignment)} values, "
            f"model has {model.n_vars} variables"
        )
    x = [int(round(v)) for v in assignment]
    return model.offset + sum(term.value(x) for term in model.terms)


def transitivity_witness(model: OrderingModel, x: np.ndarray) -> Optional[int]:
    """First violated triple for an integral assignment, or None."""
    if not model.n_triples:
        return None
    t = model.triple_vars
    sums = x[t[:, 0]] + x[t[:, 1]] - x[t[:, 2]]
    bad = np.flatnonzero((sums < 0) | (sums > 1))
    return int(bad[0]) if len(bad) else None


def decode_assignment(model: OrderingModel, assignment: Sequence[int]) -> Solution:
    x = np.asarray(assignment, dtype=np.int64)
    if len(x) != model.n_vars:
        raise ValueError(
            f"assignment has {len(x)} values, model has {model.n_vars} variables"
        )
    k = transitivity_witness(model, x)
    if k is not None:
        h, i, j = (int(v) for v in model.triple_nodes[k])
        raise OrderingError("assignment not transitive", (h, i, j))

    orders = []
    for r, layer in enumerate(model.index.order):
        n = len(layer)
        above = np.zeros((n, n), dtype=np.int64)
        if n > 1:
            a, b = np.triu_indices(n, 1)
            vals = x[model.index.layer_vars(r)]
            above[a, b] = vals
            above[b, a] = 1 - vals
        # A transitive tournament ranks nodes by how many they are above.
        rank = np.argsort(-above.sum(axis=1), kind="stable")
        orders.append(tuple(layer[k] for k in rank))
    return Solution(tuple(orders))


def encode_solution(model: OrderingModel, sol: Solution) -> np.ndarray:
    if len(sol.orders) != model.instance.p:
        raise ValueError("solution does not cover every layer")
    x = np.zeros(model.n_vars, dtype=np.int64)
    for r, layer in enumerate(model.index.order):
        pos = sol.positions[r]
        if set(pos) != set(layer):
            raise ValueError(f"permutation of layer {r + 1} does not match the layer")
        n = len(layer)
        if n > 1:
            a, b = np.triu_indices(n, 1)
            spots = np.array([pos[v] for v in layer], dtype=np.int64)
            x[model.index.layer_vars(r)] = spots[a] < spots[b]
    return x


def dump_model(model: OrderingModel, classes=None) -> str:
    label = model.instance.label
    lines = [f"variables {model.n_vars}"]
    for var, (r, i, j) in enumerate(model.index.pairs):
        lines.append(f"x {var} layer={r + 1} {label(i)} {label(j)}")
    for term in model.terms:
        parity = term.parity.value
        lines.append(f"term {term.var_a} {term.var_b} {parity} {term.weight}")
    for t in model.triples():
        lines.append(f"triple {t.hi} {t.ij} {t.hj}")
    for eq in model.equalities:
        lines.append(f"equal {eq.u} {eq.v}")
    if classes is not None:
        for c, members in enumerate(classes.members):
            lines.append(f"class {c} " + " ".join(map(str, members)))
    return "\n".join(lines) + "\n"
