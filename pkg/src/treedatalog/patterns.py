"""Rule patterns, tree normalization, CQ canonical trees, homomorphism search.

A pattern has one node per variable occurrence class; child and desc edges
are kept apart, unary label atoms become constant node labels and sim is
encoded by shared label classes.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Iterator, Optional

from .structures import TreeStructure, make_tree
from .syntax import (
    Child,
    Desc,
    Intensional,
    Label,
    LabelIs,
    Rule,
    Sim,
)


class UnsatisfiableRule(ValueError):
    pass


class UnionFind:
    def __init__(self):
        self.parent: dict[Any, Any] = {}

    def add(self, x: Any) -> None:
        self.parent.setdefault(x, x)

    def find(self, x: Any) -> Any:
        self.add(x)
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a: Any, b: Any) -> Any:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[rb] = ra
        return ra

    def groups(self) -> dict[Any, list[Any]]:
        out: dict[Any, list[Any]] = {}
        for x in self.parent:
            out.setdefault(self.find(x), []).append(x)
        return out


@dataclass(frozen=True)
class Pattern:
    """Nodes 0..n-1 with label classes, typed edges and markers.

    ``node_class`` maps a node to its sim-equality class, ``class_const``
    gives the forced constant of a class (or None).  ``intensional`` lists
    (pred, node) pairs in body order.
    """

    n: int
    node_class: tuple[int, ...]
    class_const: tuple[Optional[Label], ...]
    child_edges: frozenset[tuple[int, int]]
    desc_edges: frozenset[tuple[int, int]]
    head: int
    intensional: tuple[tuple[str, int], ...]

    def nodes(self) -> range:
        return range(self.n)

    def const_of(self, v: int) -> Optional[Label]:
        return self.class_const[self.node_class[v]]

    def is_child_only(self) -> bool:
        return not self.desc_edges


def pattern_of_rule(rule: Rule) -> Pattern:
    """Pattern of a single rule; raises UnsatisfiableRule on label clashes."""
    variables = list(rule.variables())
    index = {v: i for i, v in enumerate(variables)}
    uf = UnionFind()
    for v in variables:
        uf.add(index[v])
    consts: list[tuple[int, Label]] = []
    child_edges = set()
    desc_edges = set()
    intensional = []
    for atom in rule.body:
        if isinstance(atom, Child):
            child_edges.add((index[atom.parent], index[atom.child]))
        elif isinstance(atom, Desc):
            desc_edges.add((index[atom.anc], index[atom.desc]))
        elif isinstance(atom, Sim):
            uf.union(index[atom.left], index[atom.right])
        elif isinstance(atom, LabelIs):
            consts.append((index[atom.var], atom.label))
        elif isinstance(atom, Intensional):
            intensional.append((atom.pred, index[atom.var]))
    class_reps = sorted({uf.find(i) for i in range(len(variables))})
    class_id = {rep: k for k, rep in enumerate(class_reps)}
    node_class = tuple(class_id[uf.find(i)] for i in range(len(variables)))
    class_const: list[Optional[Label]] = [None] * len(class_reps)
    for node, lab in consts:
        cid = node_class[node]
        if class_const[cid] is not None and class_const[cid] != lab:
            raise UnsatisfiableRule(
                f"rule {rule.rid}: node forced two labels "
                f"{class_const[cid].text!r} and {lab.text!r}"
            )
        class_const[cid] = lab
    return Pattern(
        len(variables),
        node_class,
        tuple(class_const),
        frozenset(child_edges),
        frozenset(desc_edges),
        index[rule.head_var],
        tuple(intensional),
    )


def normalize_to_tree(pattern: Pattern, word_shape: bool = False) -> Optional[Pattern]:
    """Merge nodes that share a child until the child-edge graph is a tree.

    Returns None when the pattern is unsatisfiable over trees (cycle,
    self-loop or constant-label clash).  Desc edges are never merged across.
    With ``word_shape`` nodes sharing a parent are merged as well, since over
    words the child relation is functional in both directions.
    """
    uf = UnionFind()
    labels = UnionFind()
    for v in pattern.nodes():
        uf.add(v)
    for cid in range(len(pattern.class_const)):
        labels.add(cid)
    consts: dict[Any, Label] = {}
    for cid, lab in enumerate(pattern.class_const):
        if lab is not None:
            consts[labels.find(cid)] = lab

    def label_union(ca_id: int, cb_id: int) -> bool:
        ra, rb = labels.find(ca_id), labels.find(cb_id)
        if ra == rb:
            return True
        ca, cb = consts.pop(ra, None), consts.pop(rb, None)
        if ca is not None and cb is not None and ca != cb:
            return False
        rep = labels.union(ra, rb)
        keep = ca if ca is not None else cb
        if keep is not None:
            consts[rep] = keep
        return True

    def merge_nodes(a: int, b: int) -> bool:
        if not label_union(pattern.node_class[a], pattern.node_class[b]):
            return False
        uf.union(a, b)
        return True

    while True:
        edges = {(uf.find(p), uf.find(c)) for p, c in pattern.child_edges}
        if any(p == c for p, c in edges):
            return None
        parent_of: dict[int, int] = {}
        child_of: dict[int, int] = {}
        pending: Optional[tuple[int, int]] = None
        for p, c in sorted(edges):
            if c in parent_of and parent_of[c] != p:
                pending = (parent_of[c], p)
                break
            parent_of[c] = p
            if word_shape:
                if p in child_of and child_of[p] != c:
                    pending = (child_of[p], c)
                    break
                child_of[p] = c
        if pending is None:
            break
        if not merge_nodes(*pending):
            return None

    # Rebuild over representative nodes.
    node_reps = sorted({uf.find(v) for v in pattern.nodes()})
    new_ids = {rep: i for i, rep in enumerate(node_reps)}
    rep_of = {v: uf.find(v) for v in pattern.nodes()}

    class_reps = sorted({labels.find(c) for c in range(len(pattern.class_const))})
    class_ids = {rep: i for i, rep in enumerate(class_reps)}
    node_class = tuple(
        class_ids[labels.find(pattern.node_class[rep])] for rep in node_reps
    )
    class_const: list[Optional[Label]] = [None] * len(class_reps)
    for rep, cid in class_ids.items():
        if rep in consts:
            class_const[cid] = consts[rep]

    new_child = set()
    for p, c in pattern.child_edges:
        a, b = new_ids[rep_of[p]], new_ids[rep_of[c]]
        if a == b:
            return None
        new_child.add((a, b))
    new_desc = set()
    for p, c in pattern.desc_edges:
        a, b = new_ids[rep_of[p]], new_ids[rep_of[c]]
        if a == b:
            return None
        new_desc.add((a, b))

    # acyclicity check on the merged child edges
    parents: dict[int, int] = {}
    for p, c in new_child:
        parents[c] = p
    for start in range(len(node_reps)):
        seen = set()
        v = start
        while v in parents:
            if v in seen:
                return None
            seen.add(v)
            v = parents[v]

    return Pattern(
        len(node_reps),
        node_class,
        tuple(class_const),
        frozenset(new_child),
        frozenset(new_desc),
        new_ids[rep_of[pattern.head]],
        tuple((pred, new_ids[rep_of[v]]) for pred, v in pattern.intensional),
    )


def fresh_labels(count: int, avoid: set[str]) -> list[Label]:
    out = []
    i = 1
    while len(out) < count:
        text = f"_f{i}"
        if text not in avoid:
            out.append(Label(text, fresh=True))
        i += 1
    return out


def pattern_to_tree(pattern: Pattern) -> Optional[tuple[TreeStructure, int]]:
    """Realize a connected tree-shaped child-only pattern as a tree.

    Each label class without a constant gets a distinct fresh label.
    Returns (tree, image of the head node) or None when the pattern is not
    realizable as a single tree.
    """
    if pattern.desc_edges:
        return None
    parents: dict[int, int] = {}
    for p, c in pattern.child_edges:
        if c in parents:
            return None
        parents[c] = p
    roots = [v for v in pattern.nodes() if v not in parents]
    if len(roots) != 1:
        return None
    n_classes = len(pattern.class_const)
    avoid = {lab.text for lab in pattern.class_const if lab is not None}
    fresh = iter(fresh_labels(n_classes, avoid))
    class_label: list[Label] = [
        lab if lab is not None else next(fresh) for lab in pattern.class_const
    ]
    kids: dict[int, list[int]] = {v: [] for v in pattern.nodes()}
    for p, c in sorted(pattern.child_edges):
        kids[p].append(c)

    order: list[int] = []

    def nested(v: int) -> tuple:
        order.append(v)
        return (class_label[pattern.node_class[v]], [nested(c) for c in kids[v]])

    tree = make_tree(nested(roots[0]))
    return tree, order.index(pattern.head)


def cq_canonical_tree(rule: Rule) -> Optional[tuple[TreeStructure, int]]:
    """Canonical tree of a connected child-only CQ with its designated node.

    Returns None when the CQ is unsatisfiable over trees.
    """
    if rule.intensional_atoms():
        raise ValueError("CQ must not contain intensional atoms")
    try:
        pattern = pattern_of_rule(rule)
    except UnsatisfiableRule:
        return None
    normal = normalize_to_tree(pattern)
    if normal is None:
        return None
    return pattern_to_tree(normal)


def pattern_homomorphisms(
    pattern: Pattern,
    tree: TreeStructure,
    anchor: Optional[int] = None,
) -> Iterator[dict[int, int]]:
    """Enumerate homomorphisms of the pattern into the tree.

    Child edges map to parent/child pairs, desc edges to strict
    ancestor/descendant pairs, shared label classes to equal labels and
    constants to themselves.  ``anchor`` pins the head node's image.
    """
    nodes = list(pattern.nodes())
    neighbors: dict[int, list[tuple[str, int]]] = {v: [] for v in nodes}
    for p, c in pattern.child_edges:
        neighbors[p].append(("child", c))
        neighbors[c].append(("parent", p))
    for a, d in pattern.desc_edges:
        neighbors[a].append(("desc", d))
        neighbors[d].append(("anc", a))

    by_label: dict[Any, list[int]] = {}
    for v in tree.nodes():
        by_label.setdefault(tree.label(v), []).append(v)

    def cand(v: int, assign: dict[int, int]) -> list[int]:
        const = pattern.const_of(v)
        options: Optional[list[int]] = None
        for kind, u in neighbors[v]:
            if u not in assign:
                continue
            img = assign[u]
            if kind == "child":  # u is v's child: v maps to u's parent
                opts = [tree.parent[img]] if tree.parent[img] is not None else []
            elif kind == "parent":  # u is v's parent: v maps to a child of u
                opts = list(tree.children[img])
            elif kind == "desc":  # u is v's strict descendant
                opts = [w for w in tree.nodes() if tree.is_strict_ancestor(w, img)]
            else:  # u is v's strict ancestor
                opts = [w for w in tree.nodes() if tree.is_strict_ancestor(img, w)]
            options = opts if options is None else [w for w in options if w in set(opts)]
        if options is None:
            if const is not None:
                options = list(by_label.get(const, []))
            else:
                options = list(tree.nodes())
        if const is not None:
            options = [w for w in options if tree.label(w) == const]
        cls = pattern.node_class[v]
        for u, img in assign.items():
            if pattern.node_class[u] == cls:
                options = [w for w in options if tree.label(w) == tree.label(img)]
                break
        return options

    def search(assign: dict[int, int], remaining: list[int]) -> Iterator[dict[int, int]]:
        if not remaining:
            yield dict(assign)
            return
        # pick the most constrained remaining node
        best = max(
            remaining,
            key=lambda v: sum(1 for _, u in neighbors[v] if u in assign),
        )
        rest = [v for v in remaining if v != best]
        for img in cand(best, assign):
            assign[best] = img
            yield from search(assign, rest)
            del assign[best]

    start: dict[int, int] = {}
    remaining = nodes
    if anchor is not None:
        const = pattern.const_of(pattern.head)
        if const is not None and tree.label(anchor) != const:
            return
        start[pattern.head] = anchor
        remaining = [v for v in nodes if v != pattern.head]
    yield from search(start, remaining)


def pattern_homomorphism(
    pattern: Pattern, tree: TreeStructure, anchor: Optional[int] = None
) -> bool:
    for _ in pattern_homomorphisms(pattern, tree, anchor):
        return True
    return False
