"""Fixpoint evaluation of programs on trees and words, proof trees and
canonical models.

Facts are annotated with their derivation depth: the smallest height of a
proof tree deriving them, where height is the longest root-to-leaf path.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Callable, Iterator, Optional, Union

from .patterns import UnionFind, fresh_labels
from .structures import TreeStructure, WordStructure, make_tree
from .syntax import (
    Child,
    Desc,
    Intensional,
    Label,
    LabelIs,
    Program,
    Rule,
    Sim,
)

Structure = Union[TreeStructure, WordStructure]


class _View:
    """Uniform node/edge access for trees and words (word position 1 = root)."""

    def __init__(self, d: Structure):
        self.d = d
        if isinstance(d, WordStructure):
            n = len(d)
            self.node_list = list(range(1, n + 1))
            self._children = {i: ((i + 1,) if i < n else ()) for i in self.node_list}
            self._parent = {i: (i - 1 if i > 1 else None) for i in self.node_list}
            self._label = {i: d.label(i) for i in self.node_list}
        else:
            self.node_list = list(d.nodes())
            self._children = {v: d.children[v] for v in self.node_list}
            self._parent = {v: d.parent[v] for v in self.node_list}
            self._label = {v: d.label(v) for v in self.node_list}
        self.by_label: dict[Any, list[int]] = {}
        for v in self.node_list:
            self.by_label.setdefault(self._label[v], []).append(v)

    def children(self, v):
        return self._children[v]

    def parent(self, v):
        return self._parent[v]

    def label(self, v):
        return self._label[v]

    def is_strict_ancestor(self, a, b) -> bool:
        if isinstance(self.d, WordStructure):
            return a < b
        return self.d.is_strict_ancestor(a, b)

    def strict_descendants(self, a) -> list:
        if isinstance(self.d, WordStructure):
            return [v for v in self.node_list if v > a]
        out = []
        stack = list(self._children[a])
        while stack:
            v = stack.pop()
            out.append(v)
            stack.extend(self._children[v])
        return out

    def strict_ancestors(self, b) -> list:
        out = []
        p = self._parent[b]
        while p is not None:
            out.append(p)
            p = self._parent[p]
        return out


@dataclass
class FactTable:
    """Least fixpoint of the rules with minimal proof-tree heights."""

    depths: dict[tuple[str, Any], int]

    def holds(self, pred: str, node: Any) -> bool:
        return (pred, node) in self.depths

    def depth(self, pred: str, node: Any) -> Optional[int]:
        return self.depths.get((pred, node))

    def nodes_of(self, pred: str) -> list:
        return sorted(node for (p, node) in self.depths if p == pred)


def _match_atoms(
    atoms: list,
    view: _View,
    binding: dict[str, Any],
    fact_holds: Callable[[str, Any], bool],
) -> Iterator[dict[str, Any]]:
    """Backtracking join over the body atoms; yields full bindings."""
    if not atoms:
        yield dict(binding)
        return

    def score(atom) -> int:
        if isinstance(atom, (Child, Desc, Sim)):
            vs = (
                (atom.parent, atom.child)
                if isinstance(atom, Child)
                else (atom.anc, atom.desc)
                if isinstance(atom, Desc)
                else (atom.left, atom.right)
            )
            bound = sum(1 for v in vs if v in binding)
            return 10 + bound * 5 - (0 if isinstance(atom, Sim) else -1)
        return 20 if atom.var in binding else 5

    atom = max(atoms, key=score)
    rest = [a for a in atoms if a is not atom]

    def assigned(var: str, value: Any) -> bool:
        return var in binding and binding[var] != value

    def with_var(var: str, value: Any) -> Optional[dict]:
        if assigned(var, value):
            return None
        return {var: value}

    candidates: list[dict[str, Any]] = []
    if isinstance(atom, Child):
        p, c = atom.parent, atom.child
        if p in binding:
            for ch in view.children(binding[p]):
                ext = with_var(c, ch)
                if ext is not None:
                    candidates.append(ext)
        elif c in binding:
            par = view.parent(binding[c])
            if par is not None:
                candidates.append({p: par})
        else:
            for v in view.node_list:
                for ch in view.children(v):
                    candidates.append({p: v, c: ch})
    elif isinstance(atom, Desc):
        a, d = atom.anc, atom.desc
        if a in binding:
            for w in view.strict_descendants(binding[a]):
                ext = with_var(d, w)
                if ext is not None:
                    candidates.append(ext)
        elif d in binding:
            for w in view.strict_ancestors(binding[d]):
                candidates.append({a: w})
        else:
            for v in view.node_list:
                for w in view.strict_descendants(v):
                    candidates.append({a: v, d: w})
    elif isinstance(atom, Sim):
        l, r = atom.left, atom.right
        if l in binding and r in binding:
            if view.label(binding[l]) == view.label(binding[r]):
                candidates.append({})
        elif l in binding:
            for w in view.by_label.get(view.label(binding[l]), []):
                candidates.append({r: w})
        elif r in binding:
            for w in view.by_label.get(view.label(binding[r]), []):
                candidates.append({l: w})
        else:
            for v in view.node_list:
                for w in view.by_label.get(view.label(v), []):
                    candidates.append({l: v, r: w})
    elif isinstance(atom, LabelIs):
        v = atom.var
        if v in binding:
            if view.label(binding[v]) == atom.label:
                candidates.append({})
        else:
            for w in view.by_label.get(atom.label, []):
                candidates.append({v: w})
    else:  # Intensional
        v = atom.var
        if v in binding:
            if fact_holds(atom.pred, binding[v]):
                candidates.append({})
        else:
            for w in view.node_list:
                if fact_holds(atom.pred, w):
                    candidates.append({v: w})

    for ext in candidates:
        binding.update(ext)
        yield from _match_atoms(rest, view, binding, fact_holds)
        for k in ext:
            del binding[k]


def match_rule_body(
    rule: Rule,
    d: Structure,
    binding: dict[str, Any],
    fact_table: Optional[FactTable] = None,
) -> list[dict[str, Any]]:
    """All extensions of ``binding`` to homomorphisms of the full rule body.

    Intensional atoms are matched against ``fact_table``; bodies with
    intensional atoms require one.
    """
    if rule.intensional_atoms() and fact_table is None:
        raise ValueError("rule body has intensional atoms but no fact table given")
    holds = fact_table.holds if fact_table is not None else (lambda p, v: False)
    view = d if isinstance(d, _View) else _View(d)
    out = []
    seen = set()
    for m in _match_atoms(list(rule.body), view, dict(binding), holds):
        key = tuple(sorted(m.items()))
        if key not in seen:
            seen.add(key)
            out.append(m)
    return out


def evaluate(program: Program, d: Structure) -> FactTable:
    """Least fixpoint; the depth annotation is the minimal proof-tree height."""
    view = _View(d)
    depths: dict[tuple[str, Any], int] = {}
    h = 0
    while True:
        frontier_holds = lambda pred, v: depths.get((pred, v), 1 << 60) <= h - 1
        new: dict[tuple[str, Any], int] = {}
        for rule in program.rules:
            if h == 0 and rule.intensional_atoms():
                continue
            for x in view.node_list:
                key = (rule.head_pred, x)
                if key in depths or key in new:
                    continue
                for _ in _match_atoms(
                    list(rule.body), view, {rule.head_var: x}, frontier_holds
                ):
                    new[key] = h
                    break
        if not new:
            break
        depths.update(new)
        h += 1
    return FactTable(depths)


@dataclass(frozen=True)
class ProofTree:
    """Rule-labeled derivation tree; children follow body atom order."""

    rid: str
    children: tuple["ProofTree", ...] = ()

    @property
    def height(self) -> int:
        return 0 if not self.children else 1 + max(c.height for c in self.children)

    def size(self) -> int:
        return 1 + sum(c.size() for c in self.children)

    def to_sexpr(self) -> str:
        if not self.children:
            return f"({self.rid})"
        return "(" + self.rid + " " + " ".join(c.to_sexpr() for c in self.children) + ")"

    def rule_multiset(self) -> tuple:
        out: list[str] = []

        def walk(t: "ProofTree"):
            out.append(t.rid)
            for c in t.children:
                walk(c)

        walk(self)
        return tuple(sorted(out))


def parse_proof_tree(text: str) -> ProofTree:
    pos = 0

    def node() -> ProofTree:
        nonlocal pos
        while pos < len(text) and text[pos] in " \t\r\n":
            pos += 1
        if pos >= len(text) or text[pos] != "(":
            raise ValueError(f"expected '(' at offset {pos}")
        pos += 1
        start = pos
        while pos < len(text) and text[pos] not in " ()":
            pos += 1
        rid = text[start:pos]
        kids = []
        while True:
            while pos < len(text) and text[pos] in " \t\r\n":
                pos += 1
            if pos < len(text) and text[pos] == "(":
                kids.append(node())
            else:
                break
        if pos >= len(text) or text[pos] != ")":
            raise ValueError(f"expected ')' at offset {pos}")
        pos += 1
        return ProofTree(rid, tuple(kids))

    result = node()
    while pos < len(text) and text[pos] in " \t\r\n":
        pos += 1
    if pos != len(text):
        raise ValueError("trailing input in proof tree")
    return result


def extract_proof_tree(
    program: Program,
    d: Structure,
    x: Any,
    table: Optional[FactTable] = None,
) -> Optional[ProofTree]:
    """A minimal-height proof tree for goal(x), or None."""
    if table is None:
        table = evaluate(program, d)
    if not table.holds(program.goal, x):
        return None
    view = _View(d)

    def build(pred: str, node: Any) -> ProofTree:
        dp = table.depths[(pred, node)]
        bound_holds = lambda p, v: table.depths.get((p, v), 1 << 60) <= dp - 1
        for rule in program.rules_for(pred):
            if dp == 0 and rule.intensional_atoms():
                continue
            for m in _match_atoms(
                list(rule.body), view, {rule.head_var: node}, bound_holds
            ):
                kids = tuple(
                    build(atom.pred, m[atom.var])
                    for atom in rule.body
                    if isinstance(atom, Intensional)
                )
                return ProofTree(rule.rid, kids)
        raise AssertionError("fact table inconsistent with rules")

    return build(program.goal, x)


class MalformedProofTree(ValueError):
    pass


@dataclass(frozen=True)
class CanonicalModel:
    tree: TreeStructure
    designated: int


def proof_tree_satisfiable(
    program: Program, proof: ProofTree
) -> Optional[CanonicalModel]:
    """Canonical model of a proof tree, or None when unsatisfiable.

    The proof pattern is assembled by identifying each rule's intensional
    variables with the head variables of its sub-proofs, merging nodes that
    share a child, and assigning a distinct fresh label to every label class
    not forced to a constant.  Desc atoms are realized minimally as single
    edges; a node acquiring two parents or a cycle makes the proof tree
    unsatisfiable.
    """
    instances: list[tuple[int, Rule]] = []

    def collect(t: ProofTree) -> int:
        try:
            rule = program.rule_by_id(t.rid)
        except KeyError:
            raise MalformedProofTree(f"unknown rule id {t.rid!r}")
        idx = len(instances)
        instances.append((idx, rule))
        ints = rule.intensional_atoms()
        if len(ints) != len(t.children):
            raise MalformedProofTree(
                f"rule {t.rid} expects {len(ints)} sub-proofs, got {len(t.children)}"
            )
        for atom, child in zip(ints, t.children):
            cidx = collect(child)
            crule = instances[cidx][1]
            if crule.head_pred != atom.pred:
                raise MalformedProofTree(
                    f"sub-proof of {t.rid} derives {crule.head_pred!r}, "
                    f"expected {atom.pred!r}"
                )
            links.append(((idx, atom.var), (cidx, crule.head_var)))
        return idx

    links: list[tuple[tuple[int, str], tuple[int, str]]] = []
    collect(proof)

    ident = UnionFind()
    lab = UnionFind()
    consts: dict[Any, Label] = {}

    def all_vars():
        for idx, rule in instances:
            for v in rule.variables():
                yield (idx, v)

    for node in all_vars():
        ident.add(node)
        lab.add(("L", node))

    def label_union(a, b) -> bool:
        ra, rb = lab.find(("L", a)), lab.find(("L", b))
        if ra == rb:
            return True
        ca, cb = consts.pop(ra, None), consts.pop(rb, None)
        if ca is not None and cb is not None and ca != cb:
            return False
        rep = lab.union(ra, rb)
        keep = ca if ca is not None else cb
        if keep is not None:
            consts[rep] = keep
        return True

    child_edges: set[tuple[Any, Any]] = set()
    desc_edges: set[tuple[Any, Any]] = set()
    for idx, rule in instances:
        for atom in rule.body:
            if isinstance(atom, Child):
                child_edges.add(((idx, atom.parent), (idx, atom.child)))
            elif isinstance(atom, Desc):
                desc_edges.add(((idx, atom.anc), (idx, atom.desc)))
            elif isinstance(atom, Sim):
                if not label_union((idx, atom.left), (idx, atom.right)):
                    return None
            elif isinstance(atom, LabelIs):
                rep = lab.find(("L", (idx, atom.var)))
                if rep in consts and consts[rep] != atom.label:
                    return None
                consts[rep] = atom.label

    def merge_nodes(a, b) -> bool:
        if not label_union(a, b):
            return False
        ident.union(a, b)
        return True

    for a, b in links:
        if not merge_nodes(a, b):
            return None

    # merge co-parents of a shared child (child edges only)
    while True:
        edges = {(ident.find(p), ident.find(c)) for p, c in child_edges}
        if any(p == c for p, c in edges):
            return None
        parent_of: dict[Any, Any] = {}
        pending = None
        for p, c in sorted(edges, key=repr):
            if c in parent_of and parent_of[c] != p:
                pending = (parent_of[c], p)
                break
            parent_of[c] = p
        if pending is None:
            break
        if not merge_nodes(*pending):
            return None

    edges = {(ident.find(p), ident.find(c)) for p, c in child_edges}
    for a, d_ in desc_edges:
        ra, rd = ident.find(a), ident.find(d_)
        if ra == rd:
            return None
        edges.add((ra, rd))

    reps = sorted({ident.find(v) for v in all_vars()}, key=repr)
    parent_of = {}
    for p, c in edges:
        if c in parent_of and parent_of[c] != p:
            return None
        parent_of[c] = p
    roots = [r for r in reps if r not in parent_of]
    if len(roots) != 1:
        if len(roots) == 0:
            return None  # cycle
        raise ValueError("disconnected proof pattern (program not connected)")
    # cycle check
    for start in reps:
        seen = set()
        v = start
        while v in parent_of:
            if v in seen:
                return None
            seen.add(v)
            v = parent_of[v]

    label_classes = sorted({lab.find(("L", v)) for v in all_vars()}, key=repr)
    avoid = {l.text for l in consts.values()}
    fresh = iter(fresh_labels(len(label_classes), avoid))
    class_label = {
        rep: (consts[rep] if rep in consts else next(fresh)) for rep in label_classes
    }

    kids: dict[Any, list[Any]] = {r: [] for r in reps}
    for p, c in sorted(edges, key=repr):
        kids[p].append(c)
    order: list[Any] = []

    def nested(v) -> tuple:
        order.append(v)
        return (class_label[lab.find(("L", v))], [nested(c) for c in kids[v]])

    tree = make_tree(nested(roots[0]))
    root_head = ident.find((0, instances[0][1].head_var))
    return CanonicalModel(tree, order.index(root_head))
