"""Shared fixtures: the small example programs used across the test suite."""

from treedatalog.syntax import parse_program

# Reaches an "a" along a path where each node has a same-labeled child and a
# b-descendant chain; connected but not linear.
EX_NONLINEAR = parse_program(
    """
    P(X) :- child(X,Y), P(Y), child(X,Y2), sim(X,Y2), Q(X).
    P(X) :- label(X,"a").
    Q(X) :- child(X,Y), Q(Y).
    Q(X) :- label(X,"b").
    goal P.
    """
)

# Walks down an a-path, then up to a b; connected and linear.
EX_LINEAR = parse_program(
    """
    P(X) :- child(X,Y), label(Y,"a"), P(Y).
    P(X) :- Q(X).
    Q(X) :- child(Y,X), Q(Y).
    Q(X) :- label(X,"b").
    goal P.
    """
)

# Unbounded: G holds where some descendant chain ends in b.
P_LOOP = parse_program(
    """
    G(X) :- child(X,Y), G(Y).
    G(X) :- label(X,"b").
    goal G.
    """
)

# Bounded with recursion depth 1: G holds when the next position is b.
P_TWO_STEP = parse_program(
    """
    G(X) :- child(X,Y), label(Y,"b"), G2(Y).
    G2(X) :- label(X,"b").
    goal G.
    """
)

EX_NONLINEAR_TREE = "(c (c) (b (b) (a)))"
