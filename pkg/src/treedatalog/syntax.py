"""Abstract syntax, parsing and validation of monadic datalog over labeled trees.

Programs consist of rules over the extensional predicates ``child(X,Y)``,
``desc(X,Y)`` (proper descendant), ``sim(X,Y)`` (label equality) and
``label(X,"a")`` tests, plus unary intensional predicates defined by rule
heads.  One rule per line, ``goal P.`` declares the goal predicate and ``#``
starts a comment.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Union

RESERVED = {"child", "desc", "sim", "label", "goal"}


class ProgramError(ValueError):
    """Base class for parse and validation failures."""


class ProgramSyntaxError(ProgramError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{line}:{column}: {message}")
        self.line = line
        self.column = column


class ProgramSemanticsError(ProgramError):
    pass


@dataclass(frozen=True, eq=False)
class Label:
    """An alphabet symbol.  Two labels are equal iff their texts are equal."""

    text: str
    fresh: bool = False

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Label) and self.text == other.text

    def __ne__(self, other: object) -> bool:
        return not self.__eq__(other)

    def __hash__(self) -> int:
        return hash(self.text)

    def __repr__(self) -> str:
        return f"Label({self.text!r})"


@dataclass(frozen=True)
class Child:
    parent: str
    child: str


@dataclass(frozen=True)
class Desc:
    anc: str
    desc: str


@dataclass(frozen=True)
class Sim:
    left: str
    right: str


@dataclass(frozen=True)
class LabelIs:
    label: Label
    var: str


@dataclass(frozen=True)
class Intensional:
    pred: str
    var: str


Atom = Union[Child, Desc, Sim, LabelIs, Intensional]


def atom_vars(atom: Atom) -> tuple[str, ...]:
    if isinstance(atom, Child):
        return (atom.parent, atom.child)
    if isinstance(atom, Desc):
        return (atom.anc, atom.desc)
    if isinstance(atom, Sim):
        return (atom.left, atom.right)
    if isinstance(atom, LabelIs):
        return (atom.var,)
    return (atom.var,)


@dataclass(frozen=True)
class Rule:
    head_pred: str
    head_var: str
    body: tuple[Atom, ...]
    rid: str

    def variables(self) -> tuple[str, ...]:
        seen: dict[str, None] = {self.head_var: None}
        for atom in self.body:
            for v in atom_vars(atom):
                seen.setdefault(v, None)
        return tuple(seen)

    @property
    def size(self) -> int:
        return len(self.variables())

    def intensional_atoms(self) -> tuple[Intensional, ...]:
        return tuple(a for a in self.body if isinstance(a, Intensional))


@dataclass(frozen=True)
class Program:
    rules: tuple[Rule, ...]
    goal: str

    def rules_for(self, pred: str) -> tuple[Rule, ...]:
        return tuple(r for r in self.rules if r.head_pred == pred)

    def rule_by_id(self, rid: str) -> Rule:
        for r in self.rules:
            if r.rid == rid:
                return r
        raise KeyError(rid)

    def intensional_preds(self) -> tuple[str, ...]:
        seen: dict[str, None] = {}
        for r in self.rules:
            seen.setdefault(r.head_pred, None)
        return tuple(seen)

    @property
    def connected(self) -> bool:
        return classify(self).connected

    @property
    def linear(self) -> bool:
        return classify(self).linear

    @property
    def child_only(self) -> bool:
        return classify(self).child_only

    @property
    def sigma_p(self) -> frozenset[Label]:
        return classify(self).sigma_p

    @property
    def max_rule_size(self) -> int:
        return classify(self).max_rule_size

    def is_ucq(self) -> bool:
        """Nonrecursive, single intensional predicate (the goal)."""
        for r in self.rules:
            if r.head_pred != self.goal or r.intensional_atoms():
                return False
        return True


@dataclass(frozen=True)
class Classification:
    connected: bool
    linear: bool
    child_only: bool
    sigma_p: frozenset[Label]
    max_rule_size: int


def rule_graph_edges(rule: Rule) -> set[tuple[str, str]]:
    """Edges of the rule's variable graph; only child/desc atoms count."""
    edges = set()
    for atom in rule.body:
        if isinstance(atom, Child):
            edges.add((atom.parent, atom.child))
        elif isinstance(atom, Desc):
            edges.add((atom.anc, atom.desc))
    return edges


def rule_connected(rule: Rule) -> bool:
    variables = set(rule.variables())
    adj: dict[str, set[str]] = {v: set() for v in variables}
    for a, b in rule_graph_edges(rule):
        adj[a].add(b)
        adj[b].add(a)
    seen = {rule.head_var}
    stack = [rule.head_var]
    while stack:
        v = stack.pop()
        for u in adj[v]:
            if u not in seen:
                seen.add(u)
                stack.append(u)
    return seen == variables


@lru_cache(maxsize=None)
def classify(program: Program) -> Classification:
    """Recompute all structural flags of a program from scratch."""
    connected = all(rule_connected(r) for r in program.rules)
    linear = all(len(r.intensional_atoms()) <= 1 for r in program.rules)
    child_only = not any(
        isinstance(a, Desc) for r in program.rules for a in r.body
    )
    sigma = frozenset(
        a.label for r in program.rules for a in r.body if isinstance(a, LabelIs)
    )
    max_size = max((r.size for r in program.rules), default=0)
    return Classification(connected, linear, child_only, sigma, max_size)


class _Tokenizer:
    PUNCT = (":-", "(", ")", ",", ".")

    def __init__(self, text: str):
        self.text = text
        self.pos = 0
        self.line = 1
        self.col = 1

    def error(self, message: str) -> ProgramSyntaxError:
        return ProgramSyntaxError(message, self.line, self.col)

    def _advance(self, n: int) -> None:
        for ch in self.text[self.pos : self.pos + n]:
            if ch == "\n":
                self.line += 1
                self.col = 1
            else:
                self.col += 1
        self.pos += n

    def tokens(self) -> Iterator[tuple[str, str, int, int]]:
        text = self.text
        while self.pos < len(text):
            ch = text[self.pos]
            if ch in " \t\r\n":
                self._advance(1)
                continue
            if ch == "#":
                end = text.find("\n", self.pos)
                self._advance((end if end != -1 else len(text)) - self.pos)
                continue
            line, col = self.line, self.col
            if text.startswith(":-", self.pos):
                self._advance(2)
                yield (":-", ":-", line, col)
                continue
            if ch in "(),.":
                self._advance(1)
                yield (ch, ch, line, col)
                continue
            if ch == '"':
                end = self.pos + 1
                out = []
                while end < len(text) and text[end] != '"':
                    if text[end] == "\\" and end + 1 < len(text):
                        out.append(text[end + 1])
                        end += 2
                    else:
                        out.append(text[end])
                        end += 1
                if end >= len(text):
                    raise self.error("unterminated label literal")
                self._advance(end + 1 - self.pos)
                yield ("STRING", "".join(out), line, col)
                continue
            if ch.isalnum() or ch == "_":
                end = self.pos
                while end < len(text) and (text[end].isalnum() or text[end] == "_"):
                    end += 1
                word = text[self.pos : end]
                self._advance(end - self.pos)
                yield ("IDENT", word, line, col)
                continue
            raise self.error(f"unexpected character {ch!r}")


class _Parser:
    def __init__(self, text: str):
        self.toks = list(_Tokenizer(text).tokens())
        self.i = 0

    def peek(self) -> tuple[str, str, int, int] | None:
        return self.toks[self.i] if self.i < len(self.toks) else None

    def next(self) -> tuple[str, str, int, int]:
        tok = self.peek()
        if tok is None:
            last = self.toks[-1] if self.toks else ("", "", 1, 1)
            raise ProgramSyntaxError("unexpected end of input", last[2], last[3])
        self.i += 1
        return tok

    def expect(self, kind: str) -> tuple[str, str, int, int]:
        tok = self.next()
        if tok[0] != kind:
            raise ProgramSyntaxError(
                f"expected {kind!r}, found {tok[1]!r}", tok[2], tok[3]
            )
        return tok

    def parse(self) -> Program:
        raw_rules: list[tuple[str, str, list, int, int]] = []
        goal: str | None = None
        while self.peek() is not None:
            kind, word, line, col = self.expect("IDENT")
            if word == "goal":
                gtok = self.expect("IDENT")
                self.expect(".")
                if goal is not None:
                    raise ProgramSemanticsError("goal declared twice")
                goal = gtok[1]
                continue
            raw_rules.append(self._rule_tail(word, line, col))
        if goal is None:
            raise ProgramSemanticsError("no goal declared (expected 'goal P.')")

        heads = {head for head, _, _, _, _ in raw_rules}
        if goal not in heads:
            raise ProgramSemanticsError(
                f"goal predicate {goal!r} is not the head of any rule"
            )
        rules = []
        for idx, (head, head_var, body, line, col) in enumerate(raw_rules, 1):
            checked: list[Atom] = []
            for atom in body:
                if isinstance(atom, Intensional) and atom.pred not in heads:
                    raise ProgramSemanticsError(
                        f"undeclared intensional predicate {atom.pred!r} "
                        f"(line {line})"
                    )
                checked.append(atom)
            rules.append(Rule(head, head_var, tuple(checked), f"r{idx}"))
        return Program(tuple(rules), goal)

    def _rule_tail(self, head: str, line: int, col: int):
        if head in RESERVED:
            raise ProgramSyntaxError(
                f"reserved predicate {head!r} cannot be a rule head", line, col
            )
        self.expect("(")
        tok = self.peek()
        if tok is not None and tok[0] == ")":
            raise ProgramSemanticsError(
                f"zero-ary intensional predicate {head!r} (line {line})"
            )
        head_var = self.expect("IDENT")[1]
        tok = self.next()
        if tok[0] == ",":
            raise ProgramSemanticsError(
                f"non-monadic head {head!r} (line {line})"
            )
        if tok[0] != ")":
            raise ProgramSyntaxError(f"expected ')', found {tok[1]!r}", tok[2], tok[3])
        self.expect(":-")
        body: list[Atom] = []
        tok = self.next()
        while tok[0] != ".":
            if tok[0] != "IDENT":
                raise ProgramSyntaxError(
                    f"expected atom, found {tok[1]!r}", tok[2], tok[3]
                )
            body.append(self._atom(tok))
            tok = self.next()
            if tok[0] == ",":
                tok = self.next()
            elif tok[0] != ".":
                raise ProgramSyntaxError(
                    f"expected ',' or '.', found {tok[1]!r}", tok[2], tok[3]
                )
        return (head, head_var, body, line, col)

    def _atom(self, tok: tuple[str, str, int, int]) -> Atom:
        _, name, line, col = tok
        self.expect("(")
        if name in ("child", "desc", "sim"):
            x = self.expect("IDENT")[1]
            self.expect(",")
            y = self.expect("IDENT")[1]
            self.expect(")")
            if name == "child":
                return Child(x, y)
            if name == "desc":
                return Desc(x, y)
            return Sim(x, y)
        if name == "label":
            x = self.expect("IDENT")[1]
            self.expect(",")
            s = self.expect("STRING")[1]
            self.expect(")")
            return LabelIs(Label(s), x)
        if name == "goal":
            raise ProgramSyntaxError("'goal' is not an atom", line, col)
        nxt = self.peek()
        if nxt is not None and nxt[0] == ")":
            raise ProgramSemanticsError(
                f"zero-ary intensional predicate {name!r} (line {line})"
            )
        x = self.expect("IDENT")[1]
        nxt = self.next()
        if nxt[0] == ",":
            raise ProgramSemanticsError(
                f"non-monadic intensional predicate {name!r} (line {line})"
            )
        if nxt[0] != ")":
            raise ProgramSyntaxError(
                f"expected ')', found {nxt[1]!r}", nxt[2], nxt[3]
            )
        return Intensional(name, x)


def parse_program(text: str) -> Program:
    """Parse program source; raises ProgramSyntaxError / ProgramSemanticsError."""
    return _Parser(text).parse()


def _quote(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def print_atom(atom: Atom) -> str:
    if isinstance(atom, Child):
        return f"child({atom.parent},{atom.child})"
    if isinstance(atom, Desc):
        return f"desc({atom.anc},{atom.desc})"
    if isinstance(atom, Sim):
        return f"sim({atom.left},{atom.right})"
    if isinstance(atom, LabelIs):
        return f"label({atom.var},{_quote(atom.label.text)})"
    return f"{atom.pred}({atom.var})"


def print_rule(rule: Rule) -> str:
    body = ", ".join(print_atom(a) for a in rule.body)
    return f"{rule.head_pred}({rule.head_var}) :- {body}."


def print_program(program: Program) -> str:
    lines = [print_rule(r) for r in program.rules]
    lines.append(f"goal {program.goal}.")
    return "\n".join(lines) + "\n"


def make_program(rules: list[Rule], goal: str) -> Program:
    """Assemble a program, renumbering rule ids positionally."""
    renum = tuple(
        Rule(r.head_pred, r.head_var, r.body, f"r{i}")
        for i, r in enumerate(rules, 1)
    )
    heads = {r.head_pred for r in renum}
    if goal not in heads:
        raise ProgramSemanticsError(f"goal predicate {goal!r} has no rule")
    for r in renum:
        for a in r.intensional_atoms():
            if a.pred not in heads:
                raise ProgramSemanticsError(
                    f"undeclared intensional predicate {a.pred!r}"
                )
    return Program(renum, goal)
