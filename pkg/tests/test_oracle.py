import random

from treedatalog.oracle import (
    EnumerationSpec,
    enumerate_structures,
    oracle_containment,
    oracle_n_witness,
    oracle_satisfiable,
    random_program,
    random_ucq,
)
from treedatalog.structures import WordStructure, word_to_text
from treedatalog.syntax import Label, classify, parse_program

from helpers import P_LOOP, P_TWO_STEP

AB = (Label("a"), Label("b"))


def test_enumerate_words_counts():
    spec = EnumerationSpec(AB, "words", 2)
    words = list(enumerate_structures(spec))
    assert len(words) == 6  # 2 + 4


def test_enumerate_unranked_single_label_counts():
    spec = EnumerationSpec((Label("a"),), "unranked", 3)
    trees = list(enumerate_structures(spec))
    # single, 2-chain, 3-chain, cherry
    assert len(trees) == 4
    exactly3 = [t for t in trees if len(t) == 3]
    assert len(exactly3) == 2


def test_enumerate_binary_one_node():
    spec = EnumerationSpec(AB, "ranked", 1, rank=2)
    assert len(list(enumerate_structures(spec))) == 2


def test_enumerate_ranked_respects_rank():
    spec = EnumerationSpec((Label("a"),), "ranked", 4, rank=2)
    for t in enumerate_structures(spec):
        assert all(len(t.children[v]) <= 2 for v in t.nodes())


def test_enumerate_no_sibling_order_duplicates():
    spec = EnumerationSpec(AB, "unranked", 4)
    seen = set()

    def canon(t, v):
        return (t.label(v).text, tuple(sorted(canon(t, c) for c in t.children[v])))

    for t in enumerate_structures(spec):
        key = canon(t, t.root)
        assert key not in seen
        seen.add(key)


def test_oracle_containment_reflexive():
    spec = EnumerationSpec(AB, "words", 4)
    assert oracle_containment(P_LOOP, P_LOOP, spec) is None


def test_oracle_containment_counterexample():
    q1 = parse_program(
        """
        G(X) :- label(X,"b").
        G(X) :- child(X,Y), label(Y,"b").
        goal G.
        """
    )
    spec = EnumerationSpec(AB, "words", 4)
    cex = oracle_containment(P_LOOP, q1, spec)
    assert cex is not None
    assert word_to_text(cex.structure) == "a.a.b" and cex.node == 1


def test_oracle_containment_empty_goal():
    empty = parse_program('G(X) :- label(X,"zz").\ngoal G.')
    spec = EnumerationSpec(AB, "words", 3)
    assert oracle_containment(empty, P_LOOP, spec) is None


def test_oracle_ucq_in_p_loop():
    q = parse_program('G(X) :- label(X,"b").\ngoal G.')
    spec = EnumerationSpec(AB, "words", 4)
    assert oracle_containment(q, P_LOOP, spec) is None


def test_oracle_n_witness_p_loop():
    spec = EnumerationSpec(AB, "words", 4)
    w = oracle_n_witness(P_LOOP, 1, spec)
    assert w is not None
    assert word_to_text(w.structure) == "a.a.b" and w.node == 1


def test_oracle_n_witness_radius_zero_program():
    p = parse_program('G(X) :- label(X,"a").\ngoal G.')
    spec = EnumerationSpec(AB, "words", 4)
    for n in range(3):
        assert oracle_n_witness(p, n, spec) is None


def test_oracle_n_witness_two_step_bounded():
    spec = EnumerationSpec(AB, "words", 7)
    assert oracle_n_witness(P_TWO_STEP, 2, spec) is None


def test_oracle_n_witness_trees():
    spec = EnumerationSpec(AB, "ranked", 5, rank=2)
    w = oracle_n_witness(P_LOOP, 1, spec)
    assert w is not None


def test_oracle_satisfiable():
    spec = EnumerationSpec(AB, "unranked", 3)
    hit = oracle_satisfiable(P_LOOP, spec)
    assert hit is not None and len(hit.structure) == 1
    conflict = parse_program('G(X) :- label(X,"a"), label(X,"b").\ngoal G.')
    assert oracle_satisfiable(conflict, spec) is None


def test_random_program_flags():
    rng = random.Random(0)
    for _ in range(50):
        p = random_program(rng)
        c = classify(p)
        assert c.connected and c.child_only
        assert c.max_rule_size <= 3
        q = random_ucq(rng)
        assert q.is_ucq() and classify(q).connected and classify(q).child_only
