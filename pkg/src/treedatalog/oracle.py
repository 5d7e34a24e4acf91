"""Brute-force ground truth by exhaustive enumeration of small structures.

The oracle is the designated source of truth in tests: whenever a decider
disagrees with it inside the enumerated domain, the decider is wrong.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Iterator, Optional, Sequence

from .evaluation import evaluate
from .structures import (
    TreeStructure,
    WordStructure,
    make_tree,
    n_neighbourhood_tree,
    n_neighbourhood_word,
    tree_to_nested,
)
from .syntax import (
    Child,
    Intensional,
    Label,
    LabelIs,
    Program,
    Rule,
    Sim,
    make_program,
)


@dataclass(frozen=True)
class EnumerationSpec:
    """Bounds for exhaustive enumeration.

    kind is one of 'words', 'unranked', 'ranked'; for trees ``max_size``
    bounds the node count and ``rank`` / ``max_branching`` the arity.
    """

    alphabet: tuple[Label, ...]
    kind: str = "words"
    max_size: int = 4
    rank: int = 2
    max_branching: Optional[int] = None

    def __post_init__(self):
        if self.kind not in ("words", "unranked", "ranked"):
            raise ValueError(f"unknown structure kind {self.kind!r}")
        if self.max_size < 1:
            raise ValueError("bounds must be >= 1")


def _labeled_trees(n: int, alphabet: Sequence[Label], branch: Optional[int]):
    """Canonical labeled tree shapes with exactly n nodes.

    Children are generated as non-decreasing sequences of subtree encodings,
    so two trees differing only in sibling order are produced once.
    """
    forest_cache: dict[int, list[tuple]] = {}
    shape_cache: dict[int, list[tuple]] = {}

    def _enc(t: tuple):
        lab, kids = t
        return (lab.text, tuple(_enc(k) for k in kids))

    def cached_shapes(size: int) -> list[tuple]:
        if size not in shape_cache:
            if size == 1:
                shape_cache[size] = [(lab, ()) for lab in alphabet]
            else:
                out = []
                for root_lab in alphabet:
                    for kid_combo in cached_forests(size - 1):
                        out.append((root_lab, kid_combo))
                shape_cache[size] = out
        return shape_cache[size]

    def cached_forests(total: int) -> list[tuple]:
        if total in forest_cache:
            return forest_cache[total]
        out: list[tuple] = []

        def extend(remaining: int, min_key, acc: list):
            if remaining == 0:
                out.append(tuple(acc))
                return
            if branch is not None and len(acc) >= branch:
                return
            for size in range(1, remaining + 1):
                for t in cached_shapes(size):
                    key = _enc(t)
                    if min_key is not None and key < min_key:
                        continue
                    acc.append(t)
                    extend(remaining - size, key, acc)
                    acc.pop()

        extend(total, None, [])
        forest_cache[total] = out
        return out

    return cached_shapes(n)


def enumerate_structures(spec: EnumerationSpec) -> Iterator:
    """Complete, duplicate-free (up to sibling order) enumeration stream."""
    if spec.kind == "words":
        for length in range(1, spec.max_size + 1):
            for letters in itertools.product(spec.alphabet, repeat=length):
                yield WordStructure(letters)
        return
    branch = spec.rank if spec.kind == "ranked" else spec.max_branching
    for n in range(1, spec.max_size + 1):
        for nested in _labeled_trees(n, spec.alphabet, branch):
            yield _to_tree(nested)


def _to_tree(nested: tuple) -> TreeStructure:
    lab, kids = nested
    return make_tree((lab, [_nest(k) for k in kids]))


def _nest(nested: tuple):
    lab, kids = nested
    return (lab, [_nest(k) for k in kids])


def _positions(d) -> list:
    if isinstance(d, WordStructure):
        return list(d.positions())
    return list(d.nodes())


@dataclass(frozen=True)
class Counterexample:
    structure: object
    node: object


def oracle_containment(
    p: Program, q: Program, spec: EnumerationSpec
) -> Optional[Counterexample]:
    """First (structure, node) with p holding and q failing, else None."""
    for d in enumerate_structures(spec):
        tp = evaluate(p, d)
        tq = None
        for x in _positions(d):
            if tp.holds(p.goal, x):
                if tq is None:
                    tq = evaluate(q, d)
                if not tq.holds(q.goal, x):
                    return Counterexample(d, x)
    return None


@dataclass(frozen=True)
class NWitness:
    structure: object
    node: object
    radius: int


def oracle_n_witness(p: Program, n: int, spec: EnumerationSpec) -> Optional[NWitness]:
    """A structure where goal holds at X globally but not on X's n-ball."""
    for d in enumerate_structures(spec):
        table = evaluate(p, d)
        for x in _positions(d):
            if not table.holds(p.goal, x):
                continue
            if isinstance(d, WordStructure):
                ball, off = n_neighbourhood_word(d, x, n)
            else:
                ball, off = n_neighbourhood_tree(d, x, n)
            if not evaluate(p, ball).holds(p.goal, off):
                return NWitness(d, x, n)
    return None


def oracle_satisfiable(p: Program, spec: EnumerationSpec) -> Optional[Counterexample]:
    """First structure (in enumeration order) with a nonempty goal relation."""
    for d in enumerate_structures(spec):
        table = evaluate(p, d)
        for x in _positions(d):
            if table.holds(p.goal, x):
                return Counterexample(d, x)
    return None


# ---------------------------------------------------------------------------
# Random instance generation for decider-vs-oracle suites.

def random_program(
    rng: random.Random,
    n_rules: int = 3,
    max_rule_size: int = 3,
    labels: Sequence[str] = ("a", "b"),
    n_preds: int = 2,
    linear: bool = False,
) -> Program:
    """A random connected child-only program with goal G1.

    Every intensional predicate gets at least one non-recursive rule so the
    goal relation is not trivially empty.
    """
    preds = [f"G{i + 1}" for i in range(max(1, min(n_preds, n_rules)))]
    rules: list[Rule] = []
    for i in range(n_rules):
        head = preds[i] if i < len(preds) else rng.choice(preds)
        size = rng.randint(1, max_rule_size)
        variables = [f"X{j}" for j in range(size)]
        body: list = []
        # connected child-edge skeleton over the variables
        for j in range(1, size):
            other = rng.randrange(j)
            if rng.random() < 0.5:
                body.append(Child(variables[other], variables[j]))
            else:
                body.append(Child(variables[j], variables[other]))
        for v in variables:
            roll = rng.random()
            if roll < 0.4:
                body.append(LabelIs(Label(rng.choice(list(labels))), v))
            elif roll < 0.5 and size > 1:
                w = rng.choice([u for u in variables if u != v])
                body.append(Sim(v, w))
        # intensional atoms; avoid making every rule recursive
        max_ints = 1 if linear else rng.randint(0, 2)
        if i >= len(preds):
            max_ints = min(max_ints, 1)
        n_ints = rng.randint(0, max_ints) if i > 0 else 0
        for _ in range(n_ints):
            body.append(Intensional(rng.choice(preds), rng.choice(variables)))
        rules.append(Rule(head, variables[0], tuple(body), f"r{i + 1}"))
    # guarantee a base (non-recursive) rule per predicate
    have_base = {r.head_pred for r in rules if not r.intensional_atoms()}
    for pred in preds:
        if pred not in have_base:
            lab = Label(rng.choice(list(labels)))
            rules.append(Rule(pred, "X0", (LabelIs(lab, "X0"),), "rx"))
    return make_program(rules, preds[0])


def random_ucq(
    rng: random.Random,
    n_cqs: int = 2,
    max_size: int = 3,
    labels: Sequence[str] = ("a", "b"),
) -> Program:
    """A random connected child-only UCQ with goal Q."""
    rules: list[Rule] = []
    for i in range(n_cqs):
        size = rng.randint(1, max_size)
        variables = [f"X{j}" for j in range(size)]
        body: list = []
        for j in range(1, size):
            other = rng.randrange(j)
            if rng.random() < 0.5:
                body.append(Child(variables[other], variables[j]))
            else:
                body.append(Child(variables[j], variables[other]))
        for v in variables:
            roll = rng.random()
            if roll < 0.5:
                body.append(LabelIs(Label(rng.choice(list(labels))), v))
            elif roll < 0.6 and size > 1:
                w = rng.choice([u for u in variables if u != v])
                body.append(Sim(v, w))
        rules.append(Rule("Q", variables[0], tuple(body), f"r{i + 1}"))
    return make_program(rules, "Q")
