import pytest

from treedatalog.structures import (
    WordStructure,
    make_tree,
    n_neighbourhood_tree,
    n_neighbourhood_word,
    parse_tree,
    parse_word,
    tree_to_sexpr,
    tree_to_word,
    universal_tree,
    word_to_text,
    word_to_tree,
)
from treedatalog.syntax import Label


def lab(text):
    return Label(text)


def word(text):
    return parse_word(text)


def test_word_basics():
    w = word("a.b.c")
    assert len(w) == 3
    assert w.label(1) == lab("a") and w.label(3) == lab("c")
    with pytest.raises(ValueError):
        WordStructure(())


def test_neighbourhood_word_mid():
    w = word("a.b.c.d.e")
    v, off = n_neighbourhood_word(w, 3, 1)
    assert word_to_text(v) == "b.c.d" and off == 2


def test_neighbourhood_word_left_clamped():
    w = word("a.b.c.d.e")
    v, off = n_neighbourhood_word(w, 1, 2)
    assert word_to_text(v) == "a.b.c" and off == 1


def test_neighbourhood_word_both_clamped():
    w = word("a.b")
    v, off = n_neighbourhood_word(w, 2, 5)
    assert word_to_text(v) == "a.b" and off == 2


def test_neighbourhood_word_out_of_range():
    with pytest.raises(ValueError):
        n_neighbourhood_word(word("a"), 2, 1)


def test_tree_parse_print_roundtrip():
    text = "(c (c) (b (b) (a)))"
    t = parse_tree(text)
    assert len(t) == 5
    assert tree_to_sexpr(t) == text
    assert parse_tree(tree_to_sexpr(t)) == t


def test_neighbourhood_tree_radius_zero():
    t = parse_tree("(c (c) (b (b) (a)))")
    ball, img = n_neighbourhood_tree(t, 3, 0)
    assert len(ball) == 1 and ball.label(img) == lab("b")


def test_neighbourhood_tree_example_root():
    t = parse_tree("(c (c) (b (b) (a)))")
    ball, img = n_neighbourhood_tree(t, t.root, 1)
    assert tree_to_sexpr(ball) == "(c (c) (b))" and img == 0


def test_neighbourhood_tree_chain_middle():
    chain = parse_tree("(a (b (c (d (e)))))")
    ball, img = n_neighbourhood_tree(chain, 2, 1)
    assert tree_to_sexpr(ball) == "(b (c (d)))"
    assert ball.label(img) == lab("c")


def test_neighbourhood_monotone():
    t = parse_tree("(c (a (b) (c)) (b (b) (a (d))))")
    for x in t.nodes():
        for n in range(3):
            small, _ = n_neighbourhood_tree(t, x, n)
            big, _ = n_neighbourhood_tree(t, x, n + 1)
            assert len(small) <= len(big)


def test_universal_tree_sizes():
    sigma = (lab("a"), lab("b"), lab("c"))
    t = universal_tree(sigma, lab("a"), 2)
    assert len(t) == 13
    assert t.label(t.root) == lab("a")
    for v in t.nodes():
        kids = t.children[v]
        if kids:
            assert sorted(t.label(c).text for c in kids) == ["a", "b", "c"]
    assert len(universal_tree(sigma, lab("b"), 0)) == 1
    single = universal_tree((lab("a"),), lab("a"), 3)
    assert len(single) == 4
    assert tree_to_word(single) is not None


def test_universal_tree_bad_root():
    with pytest.raises(ValueError):
        universal_tree((lab("a"),), lab("b"), 1)


def test_word_tree_embedding():
    w = word("a.b.c")
    t = word_to_tree(w)
    assert t.label(t.root) == lab("a")
    assert tree_to_word(t) == w
    assert tree_to_word(parse_tree("(a (b) (c))")) is None


def test_tree_distance():
    t = parse_tree("(c (a (b) (c)) (b))")
    assert t.distance(0, 0) == 0
    assert t.distance(2, 3) == 2
    assert t.distance(2, 4) == 3
