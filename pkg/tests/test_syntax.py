import pytest

from treedatalog.syntax import (
    Label,
    ProgramSemanticsError,
    ProgramSyntaxError,
    classify,
    parse_program,
    print_program,
)

from helpers import EX_LINEAR, EX_NONLINEAR


def test_label_equality_by_text():
    assert Label("a") == Label("a", fresh=True)
    assert Label("a") != Label("b")
    assert len({Label("a"), Label("a", fresh=True)}) == 1


def test_parse_example_nonlinear():
    p = EX_NONLINEAR
    assert p.goal == "P"
    assert set(p.intensional_preds()) == {"P", "Q"}
    c = classify(p)
    assert c.connected and not c.linear and c.child_only
    assert c.sigma_p == frozenset({Label("a"), Label("b")})
    # rule r1 has variables X, Y, Y2
    assert c.max_rule_size == 3


def test_parse_example_linear():
    c = classify(EX_LINEAR)
    assert c.connected and c.linear and c.child_only


def test_empty_body_rule_is_connected():
    p = parse_program("G(X) :- .\ngoal G.")
    assert p.rules[0].body == ()
    assert classify(p).connected
    assert classify(p).max_rule_size == 1


def test_classify_single_label_rule():
    p = parse_program('G(X) :- label(X,"a").\ngoal G.')
    c = classify(p)
    assert c.sigma_p == frozenset({Label("a")})
    assert c.max_rule_size == 1


def test_desc_program_not_child_only():
    p = parse_program(
        """
        P(X) :- desc(X,Y), label(Y,"a").
        P(X) :- child(X,Y), Q(Y).
        Q(X) :- child(X,Y), Q(Y).
        Q(X) :- label(X,"b").
        goal P.
        """
    )
    assert not classify(p).child_only
    assert classify(p).connected and classify(p).linear


def test_disconnected_rule_flagged():
    p = parse_program('G(X) :- label(Y,"a").\ngoal G.')
    assert not classify(p).connected
    # sim edges do not connect the rule graph
    p2 = parse_program('G(X) :- sim(X,Y), label(Y,"a").\ngoal G.')
    assert not classify(p2).connected


def test_roundtrip_print_parse():
    for p in (EX_NONLINEAR, EX_LINEAR):
        assert parse_program(print_program(p)) == p


def test_classify_rule_order_independent():
    p = EX_NONLINEAR
    reordered = parse_program(
        "\n".join(
            line
            for line in reversed(print_program(p).strip().splitlines())
            if not line.startswith("goal")
        )
        + "\ngoal P.\n"
    )
    assert classify(reordered) == classify(p)


def test_syntax_error_position():
    with pytest.raises(ProgramSyntaxError) as err:
        parse_program("G(X) :- child(X Y).\ngoal G.")
    assert err.value.line == 1


def test_zero_ary_rejected():
    with pytest.raises(ProgramSemanticsError, match="zero-ary"):
        parse_program("G() :- .\ngoal G.")
    with pytest.raises(ProgramSemanticsError, match="zero-ary"):
        parse_program("G(X) :- Q().\nQ(X) :- .\ngoal G.")


def test_non_monadic_head_rejected():
    with pytest.raises(ProgramSemanticsError, match="non-monadic"):
        parse_program("G(X,Y) :- .\ngoal G.")


def test_undeclared_intensional_rejected():
    with pytest.raises(ProgramSemanticsError, match="undeclared"):
        parse_program("G(X) :- H(X).\ngoal G.")


def test_goal_required_and_defined():
    with pytest.raises(ProgramSemanticsError, match="no goal"):
        parse_program("G(X) :- .")
    with pytest.raises(ProgramSemanticsError, match="not the head"):
        parse_program("G(X) :- .\ngoal H.")


def test_quoted_labels_roundtrip():
    p = parse_program('G(X) :- label(X,"weird (L,1) \\"label\\"").\ngoal G.')
    assert parse_program(print_program(p)) == p
