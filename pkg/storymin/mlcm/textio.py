"""Plain-text formats for instances and solutions.

Instance::

    p=2
    layer 1: a b c
    tree 1: (root (s:1 a b) c)
    edges 1: a-a, b-b, c-c
    layer 2: a b c
    tree 2: (root a b c)

Solution::

    layer 1: c a b
    layer 2: c a b
    crossings=0

Names holding whitespace, parentheses, commas, dashes or quotes are written as
JSON strings.
"""

import json
import re
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from storymin.errors import InstanceError
from storymin.mlcm.crossings import count_crossings
from storymin.mlcm.instance import LayerTree, MlcmInstance, Node, Solution

_TOKEN = re.compile(r'\s*(?:("(?:[^"\\]|\\.)*")|([(),\-])|([^\s(),"\-]+))')
_PLAIN = re.compile(r'[^\s(),"\-]+')
_HEADER = re.compile(r"^(layer|tree|edges)\s+(\d+)\s*:(.*)$")


def quote(name: str) -> str:
    return name if _PLAIN.fullmatch(name) else json.dumps(name)


def tokenize(text: str) -> List[Tuple[str, str]]:
    """Split into ``("name", value)`` and ``("punct", char)`` tokens."""
    tokens = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        match = _TOKEN.match(text, pos)
        if match is None or match.end() == pos:
            raise InstanceError(f"cannot read {text[pos:]!r}")
        quoted, punct, plain = match.groups()
        if quoted is not None:
            tokens.append(("name", json.loads(quoted)))
        elif punct is not None:
            tokens.append(("punct", punct))
        elif plain is not None:
            tokens.append(("name", plain))
        pos = match.end()
    return tokens


def _dump_tree(tree: LayerTree, names: Mapping[int, str]) -> str:
    def walk(node: Node) -> str:
        if tree.is_leaf(node):
            return quote(names[node])  # type: ignore[index]
        inner = " ".join(walk(c) for c in tree.children[node])  # type: ignore[index]
        head = quote(node)  # type: ignore[arg-type]
        return f"({head} {inner})" if inner else f"({head})"

    return walk(tree.root)


def dump_instance(instance: MlcmInstance) -> str:
    lines = [f"p={instance.p}"]
    for r, layer in enumerate(instance.layers):
        names = {v: instance.label(v) for v in layer}
        lines.append(f"layer {r + 1}: " + " ".join(quote(names[v]) for v in layer))
        lines.append(f"tree {r + 1}: " + _dump_tree(instance.trees[r], names))
        if r < len(instance.edges):
            below = {v: instance.label(v) for v in instance.layers[r + 1]}
            items = [
                f"{quote(names[u])}-{quote(below[v])}" for u, v in instance.edges[r]
            ]
            lines.append(f"edges {r + 1}: " + ", ".join(items))
    return "\n".join(lines) + "\n"


def _parse_tree(tokens: List[Tuple[str, str]], ids: Dict[str, int]) -> LayerTree:
    children: Dict[str, Tuple[Node, ...]] = {}
    pos = 0

    def expect(kind: str, value: Optional[str] = None) -> str:
        nonlocal pos
        if pos >= len(tokens):
            raise InstanceError("unexpected end of tree")
        got_kind, got = tokens[pos]
        if got_kind != kind or (value is not None and got != value):
            raise InstanceError(f"unexpected {got!r} in tree")
        pos += 1
        return got

    def subtree() -> Node:
        nonlocal pos
        if tokens[pos] == ("punct", "("):
            pos += 1
            label = expect("name")
            if label in children:
                raise InstanceError(f"internal node {label} appears twice")
            kids: List[Node] = []
            children[label] = ()
            while pos < len(tokens) and tokens[pos] != ("punct", ")"):
                kids.append(subtree())
            expect("punct", ")")
            children[label] = tuple(kids)
            return label
        name = expect("name")
        if name not in ids:
            raise InstanceError(f"tree leaf {name} is not a node of the layer")
        return ids[name]

    if not tokens:
        raise InstanceError("empty tree")
    root = subtree()
    if pos != len(tokens) or not isinstance(root, str):
        raise InstanceError("a tree is one parenthesised expression")
    return LayerTree(root, children)


def _parse_edges(
    tokens: List[Tuple[str, str]], upper: Dict[str, int], lower: Dict[str, int]
) -> List[Tuple[int, int]]:
    edges = []
    groups: List[List[Tuple[str, str]]] = [[]]
    for tok in tokens:
        if tok == ("punct", ","):
            groups.append([])
        else:
            groups[-1].append(tok)
    for group in groups:
        if not group:
            continue
        if len(group) != 3 or group[1] != ("punct", "-"):
            raise InstanceError("edges are written as 'a-b'")
        (_, a), _, (_, b) = group
        if a not in upper or b not in lower:
            raise InstanceError(f"edge {a}-{b} joins unknown nodes")
        edges.append((upper[a], lower[b]))
    return edges


def parse_instance(text: str) -> MlcmInstance:
    p: Optional[int] = None
    sections: Dict[Tuple[str, int], List[Tuple[str, str]]] = {}
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("p="):
            p = int(line[2:])
            continue
        match = _HEADER.match(line)
        if match is None:
            raise InstanceError(f"line {number}: cannot read {line!r}")
        kind, r, body = match.group(1), int(match.group(2)), match.group(3)
        if (kind, r) in sections:
            raise InstanceError(f"line {number}: {kind} {r} given twice")
        sections[(kind, r)] = tokenize(body)
    if p is None:
        raise InstanceError("missing 'p=' header")

    layers: List[Tuple[int, ...]] = []
    names: List[Dict[str, int]] = []
    labels: Dict[int, str] = {}
    next_id = 0
    for r in range(1, p + 1):
        toks = sections.get(("layer", r), [])
        layer_ids: Dict[str, int] = {}
        for kind, name in toks:
            if kind != "name":
                raise InstanceError(f"layer {r}: unexpected {name!r}")
            if name in layer_ids:
                raise InstanceError(f"layer {r}: node {name} given twice")
            layer_ids[name] = next_id
            labels[next_id] = name
            next_id += 1
        names.append(layer_ids)
        layers.append(tuple(layer_ids.values()))

    trees = []
    for r in range(1, p + 1):
        toks = sections.get(("tree", r))
        if toks is None:
            trees.append(LayerTree.star(layers[r - 1]))
        else:
            trees.append(_parse_tree(toks, names[r - 1]))

    edges = [
        _parse_edges(sections.get(("edges", r), []), names[r - 1], names[r])
        for r in range(1, p)
    ]
    return MlcmInstance(tuple(layers), tuple(map(tuple, edges)), tuple(trees), labels)


def dump_solution(
    instance: MlcmInstance, sol: Solution, crossings: Optional[int] = None
) -> str:
    if crossings is None:
        crossings = count_crossings(instance, sol)
    lines = [
        f"layer {r + 1}: " + " ".join(quote(instance.label(v)) for v in order)
        for r, order in enumerate(sol.orders)
    ]
    lines.append(f"crossings={crossings}")
    return "\n".join(lines) + "\n"


def parse_solution(text: str, instance: MlcmInstance) -> Solution:
    orders: Dict[int, Sequence[int]] = {}
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#") or line.startswith("crossings="):
            continue
        match = _HEADER.match(line)
        if match is None or match.group(1) != "layer":
            raise InstanceError(f"line {number}: cannot read {line!r}")
        r = int(match.group(2)) - 1
        if not 0 <= r < instance.p:
            raise InstanceError(f"line {number}: no layer {r + 1}")
        by_name = {instance.label(v): v for v in instance.layers[r]}
        order = []
        for kind, name in tokenize(match.group(3)):
            if kind != "name" or name not in by_name:
                raise InstanceError(f"line {number}: unknown node {name}")
            order.append(by_name[name])
        orders[r] = order
    if len(orders) != instance.p:
        raise InstanceError(f"solution lists {len(orders)} of {instance.p} layers")
    return Solution(tuple(tuple(orders[r]) for r in range(instance.p)))
