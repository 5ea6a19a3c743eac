"""Proper T-level graphs: layered nodes, consecutive-layer edges, one tree per layer."""

from dataclasses import dataclass, field
from functools import cached_property
from typing import (
    Dict,
    FrozenSet,
    Iterable,
    List,
    Mapping,
    Optional,
    Sequence,
    Tuple,
    Union,
)

from storymin.errors import InstanceError, ValidationReport

ROOT = "root"

Node = Union[int, str]
Edge = Tuple[int, int]


@dataclass(frozen=True)
class LayerTree:
    """Rooted tree over one layer.

    Internal nodes are strings (``root`` for a synthetic root, scene labels
    otherwise); leaves are the integer node ids of the layer.
    """

    root: str
    children: Mapping[str, Tuple[Node, ...]]

    def __post_init__(self):
        object.__setattr__(
            self, "children", {k: tuple(v) for k, v in dict(self.children).items()}
        )

    @classmethod
    def star(cls, leaves: Iterable[int], root: str = ROOT) -> "LayerTree":
        return cls(root, {root: tuple(leaves)})

    @classmethod
    def from_blocks(
        cls,
        blocks: Mapping[str, Sequence[int]],
        free: Sequence[int] = (),
        root: str = ROOT,
    ) -> "LayerTree":
        """Height-2 tree: a node per block under the root, then the free leaves."""
        children: Dict[str, Tuple[Node, ...]] = {root: tuple(blocks) + tuple(free)}
        children.update({label: tuple(leaves) for label, leaves in blocks.items()})
        return cls(root, children)

    @cached_property
    def parent(self) -> Dict[Node, str]:
        return {c: p for p, cs in self.children.items() for c in cs}

    @cached_property
    def depth(self) -> Dict[Node, int]:
        depth: Dict[Node, int] = {self.root: 0}
        stack: List[Node] = [self.root]
        while stack:
            node = stack.pop()
            for child in self.children.get(node, ()):  # type: ignore[arg-type]
                depth[child] = depth[node] + 1
                stack.append(child)
        return depth

    @cached_property
    def leaf_order(self) -> Tuple[int, ...]:
        """Depth-first leaf order; always tree-consistent."""
        return tuple(self.leaves_under(self.root))

    @cached_property
    def leaf_sets(self) -> Dict[str, FrozenSet[int]]:
        return {node: frozenset(self.leaves_under(node)) for node in self.children}

    def is_leaf(self, node: Node) -> bool:
        return node not in self.children

    def leaves_under(self, node: Node) -> List[int]:
        if self.is_leaf(node):
            return [node]  # type: ignore[list-item]
        out: List[int] = []
        for child in self.children[node]:  # type: ignore[index]
            out.extend(self.leaves_under(child))
        return out

    def height(self) -> int:
        return max(self.depth.values())

    def ancestors(self, node: Node) -> List[Node]:
        """``node`` followed by its ancestors up to the root."""
        path = [node]
        while path[-1] != self.root:
            path.append(self.parent[path[-1]])
        return path

    def is_bundle(self, node: Node) -> bool:
        """Internal nodes other than a synthetic root group a scene's lines."""
        return not self.is_leaf(node) and node != ROOT


@dataclass(frozen=True)
class MlcmInstance:
    layers: Tuple[Tuple[int, ...], ...]
    edges: Tuple[Tuple[Edge, ...], ...]
    trees: Tuple[LayerTree, ...]
    labels: Mapping[int, str] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "layers", tuple(tuple(layer) for layer in self.layers))
        object.__setattr__(self, "edges", tuple(tuple(gap) for gap in self.edges))
        object.__setattr__(self, "trees", tuple(self.trees))
        object.__setattr__(self, "labels", dict(self.labels))

    @property
    def p(self) -> int:
        return len(self.layers)

    @cached_property
    def layer_of(self) -> Dict[int, int]:
        return {v: r for r, layer in enumerate(self.layers) for v in layer}

    @property
    def n_nodes(self) -> int:
        return sum(len(layer) for layer in self.layers)

    @property
    def n_edges(self) -> int:
        return sum(len(gap) for gap in self.edges)

    def label(self, v: int) -> str:
        return self.labels.get(v, str(v))

    @cached_property
    def down(self) -> Dict[int, List[int]]:
        """Neighbours on the next layer."""
        adj: Dict[int, List[int]] = {v: [] for layer in self.layers for v in layer}
        for gap in self.edges:
            for u, v in gap:
                adj.setdefault(u, []).append(v)
        return adj

    @cached_property
    def up(self) -> Dict[int, List[int]]:
        """Neighbours on the previous layer."""
        adj: Dict[int, List[int]] = {v: [] for layer in self.layers for v in layer}
        for gap in self.edges:
            for u, v in gap:
                adj.setdefault(v, []).append(u)
        return adj


@dataclass(frozen=True)
class Solution:
    """One top-to-bottom order per layer; earlier means higher."""

    orders: Tuple[Tuple[int, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "orders", tuple(tuple(o) for o in self.orders))

    @cached_property
    def positions(self) -> Tuple[Dict[int, int], ...]:
        return tuple({v: i for i, v in enumerate(order)} for order in self.orders)

    def reversed(self) -> "Solution":
        return Solution(tuple(order[::-1] for order in self.orders))

    @classmethod
    def from_trees(cls, instance: MlcmInstance) -> "Solution":
        return cls(tuple(tree.leaf_order for tree in instance.trees))


def lca(tree: LayerTree, i: int, j: int) -> Node:
    for leaf in (i, j):
        if leaf not in tree.parent or not tree.is_leaf(leaf):
            raise InstanceError(f"unknown leaf {leaf}")
    above_i = tree.ancestors(i)
    seen = set(above_i)
    for node in tree.ancestors(j):
        if node in seen:
            return node
    return tree.root


def is_tree_consistent(tree: LayerTree, pi: Sequence[int]) -> bool:
    leaves = tree.leaf_sets.get(tree.root, frozenset())
    if len(pi) != len(leaves) or set(pi) != leaves:
        raise ValueError("permutation does not match the leaves of the tree")
    pos = {v: k for k, v in enumerate(pi)}
    for node, block in tree.leaf_sets.items():
        if not block:
            continue
        spots = [pos[v] for v in block]
        if max(spots) - min(spots) + 1 != len(block):
            return False
    return True


def _check_tree(
    r: int, tree: LayerTree, layer: Sequence[int], report: ValidationReport
):
    where = f"tree {r + 1}"
    if tree.root not in tree.children:
        report.add("tree_structure", "root is not an internal node", where)
        return
    parents: Dict[Node, str] = {}
    for p, cs in tree.children.items():
        if not isinstance(p, str):
            report.add("tree_structure", f"internal node {p} must be labelled", where)
        for c in cs:
            if c in parents:
                report.add("tree_structure", f"node {c} has two parents", where)
            parents[c] = p
    if tree.root in parents:
        report.add("tree_structure", "root has a parent", where)
        return

    reached = set()
    stack: List[Node] = [tree.root]
    while stack:
        node = stack.pop()
        if node in reached:
            report.add("tree_structure", f"cycle through {node}", where)
            return
        reached.add(node)
        stack.extend(tree.children.get(node, ()))  # type: ignore[arg-type]
    for p in tree.children:
        if p not in reached:
            report.add("tree_structure", f"internal node {p} is not connected", where)

    leaves = {n for n in reached if n not in tree.children}
    if any(not isinstance(n, int) for n in leaves):
        report.add("tree_leaf_mismatch", "tree has a leaf that is no layer node", where)
    if leaves != set(layer):
        report.add(
            "tree_leaf_mismatch",
            "tree leaves differ from layer nodes: "
            f"{sorted(map(str, leaves ^ set(layer)))}",
            where,
        )


def validate_instance(instance: MlcmInstance) -> ValidationReport:
    report = ValidationReport()
    p = instance.p
    if len(instance.trees) != p:
        report.add("tree_structure", f"{len(instance.trees)} trees for {p} layers")
    if len(instance.edges) != max(p - 1, 0):
        report.add(
            "edge_not_consecutive", f"{len(instance.edges)} edge sets for {p} layers"
        )

    layer_of: Dict[int, int] = {}
    for r, layer in enumerate(instance.layers):
        for v in layer:
            if v in layer_of:
                report.add("unknown_node", f"node {v} appears twice", f"layer {r + 1}")
            layer_of[v] = r

    for r, gap in enumerate(instance.edges):
        seen = set()
        for u, v in gap:
            where = f"edges {r + 1}: {u}-{v}"
            if u not in layer_of or v not in layer_of:
                report.add("unknown_node", "edge endpoint is not a node", where)
                continue
            if layer_of[u] != r or layer_of[v] != r + 1:
                report.add(
                    "edge_not_consecutive", "edge not between consecutive layers", where
                )
            if (u, v) in seen:
                report.add("multi_edge", "parallel edge", where)
            seen.add((u, v))

    for r, (tree, layer) in enumerate(zip(instance.trees, instance.layers)):
        _check_tree(r, tree, layer, report)

    return report


def tree_signature(tree: LayerTree, name: Optional[Mapping[int, object]] = None):
    """Canonical, order-free form of ``tree`` with leaves renamed by ``name``."""

    def canon(node: Node):
        if tree.is_leaf(node):
            key = name[node] if name is not None else node  # type: ignore[index]
            return ("leaf", key)
        return frozenset(canon(c) for c in tree.children[node])  # type: ignore[index]

    return canon(tree.root)
