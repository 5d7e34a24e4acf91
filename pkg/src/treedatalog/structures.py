"""Finite labeled trees and words, neighbourhoods, universal trees.

Trees store an arbitrary child order but all semantics ignore it.  A word
embeds into a tree as a chain whose root is position 1 and whose "next
position" is the child.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Iterator, Sequence

from .syntax import Label


@dataclass(frozen=True)
class WordStructure:
    """A nonempty word; positions are 1-based."""

    letters: tuple[Any, ...]

    def __post_init__(self):
        if not self.letters:
            raise ValueError("words must be nonempty")

    def __len__(self) -> int:
        return len(self.letters)

    def positions(self) -> range:
        return range(1, len(self.letters) + 1)

    def label(self, pos: int) -> Any:
        return self.letters[pos - 1]


@dataclass(frozen=True)
class TreeStructure:
    """A finite labeled tree; node 0 is the root, nodes are preorder ids."""

    labels: tuple[Any, ...]
    parent: tuple[Any, ...]  # parent[root] is None
    children: tuple[tuple[int, ...], ...]
    root: int = 0
    depth: tuple[int, ...] = field(default=())

    def __post_init__(self):
        if not self.depth:
            depth = [0] * len(self.labels)
            order = [self.root]
            while order:
                v = order.pop()
                for c in self.children[v]:
                    depth[c] = depth[v] + 1
                    order.append(c)
            object.__setattr__(self, "depth", tuple(depth))

    def __len__(self) -> int:
        return len(self.labels)

    def nodes(self) -> range:
        return range(len(self.labels))

    def label(self, v: int) -> Any:
        return self.labels[v]

    def ancestors(self, v: int) -> Iterator[int]:
        p = self.parent[v]
        while p is not None:
            yield p
            p = self.parent[p]

    def is_strict_ancestor(self, a: int, d: int) -> bool:
        if self.depth[a] >= self.depth[d]:
            return False
        p = self.parent[d]
        while p is not None and self.depth[p] >= self.depth[a]:
            if p == a:
                return True
            p = self.parent[p]
        return False

    def distance(self, a: int, b: int) -> int:
        x, y = a, b
        dx, dy = self.depth[x], self.depth[y]
        steps = 0
        while dx > dy:
            x = self.parent[x]
            dx -= 1
            steps += 1
        while dy > dx:
            y = self.parent[y]
            dy -= 1
            steps += 1
        while x != y:
            x = self.parent[x]
            y = self.parent[y]
            steps += 2
        return steps


def make_tree(nested: tuple) -> TreeStructure:
    """Build a tree from nested (label, [children]) pairs, preorder ids."""
    labels: list[Any] = []
    parent: list[Any] = []
    children: list[list[int]] = []

    def build(node: tuple, par: Any) -> int:
        lab, kids = node
        vid = len(labels)
        labels.append(lab)
        parent.append(par)
        children.append([])
        if par is not None:
            children[par].append(vid)
        for kid in kids:
            build(kid, vid)
        return vid

    build(nested, None)
    return TreeStructure(
        tuple(labels), tuple(parent), tuple(tuple(c) for c in children)
    )


def tree_to_nested(t: TreeStructure, v: int | None = None) -> tuple:
    if v is None:
        v = t.root
    return (t.label(v), [tree_to_nested(t, c) for c in t.children[v]])


_BARE = set("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789_")


def _atom_str(lab: Any) -> str:
    text = lab.text if isinstance(lab, Label) else str(lab)
    if text and all(ch in _BARE for ch in text):
        return text
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def tree_to_sexpr(t: TreeStructure, v: int | None = None) -> str:
    if v is None:
        v = t.root
    parts = [_atom_str(t.label(v))]
    parts.extend(tree_to_sexpr(t, c) for c in t.children[v])
    return "(" + " ".join(parts) + ")"


def parse_tree(text: str) -> TreeStructure:
    """Parse the s-expression tree format, e.g. ``(c (c) (b (b) (a)))``."""
    pos = 0

    def skip_ws():
        nonlocal pos
        while pos < len(text) and text[pos] in " \t\r\n":
            pos += 1

    def atom() -> str:
        nonlocal pos
        if text[pos] == '"':
            pos += 1
            out = []
            while pos < len(text) and text[pos] != '"':
                if text[pos] == "\\" and pos + 1 < len(text):
                    out.append(text[pos + 1])
                    pos += 2
                else:
                    out.append(text[pos])
                    pos += 1
            if pos >= len(text):
                raise ValueError("unterminated label literal")
            pos += 1
            return "".join(out)
        start = pos
        while pos < len(text) and text[pos] in _BARE:
            pos += 1
        if start == pos:
            raise ValueError(f"expected label at offset {pos}")
        return text[start:pos]

    def node() -> tuple:
        nonlocal pos
        skip_ws()
        if pos >= len(text) or text[pos] != "(":
            raise ValueError(f"expected '(' at offset {pos}")
        pos += 1
        skip_ws()
        lab = atom()
        kids = []
        skip_ws()
        while pos < len(text) and text[pos] == "(":
            kids.append(node())
            skip_ws()
        if pos >= len(text) or text[pos] != ")":
            raise ValueError(f"expected ')' at offset {pos}")
        pos += 1
        return (Label(lab), kids)

    result = node()
    skip_ws()
    if pos != len(text):
        raise ValueError(f"trailing input at offset {pos}")
    return make_tree(result)


def word_to_text(w: WordStructure) -> str:
    return ".".join(_atom_str(l) for l in w.letters)


def parse_word(text: str) -> WordStructure:
    """Parse the dotted word format, e.g. ``a.a.b``."""
    parts = []
    pos = 0
    while pos < len(text):
        if text[pos] == '"':
            end = pos + 1
            out = []
            while end < len(text) and text[end] != '"':
                if text[end] == "\\" and end + 1 < len(text):
                    out.append(text[end + 1])
                    end += 2
                else:
                    out.append(text[end])
                    end += 1
            parts.append("".join(out))
            pos = end + 1
        else:
            end = text.find(".", pos)
            if end == -1:
                end = len(text)
            parts.append(text[pos:end].strip())
            pos = end
        if pos < len(text):
            if text[pos] != ".":
                raise ValueError(f"expected '.' at offset {pos}")
            pos += 1
    if not parts or any(p == "" for p in parts):
        raise ValueError("malformed word")
    return WordStructure(tuple(Label(p) for p in parts))


def word_to_tree(w: WordStructure) -> TreeStructure:
    """Embed a word as a chain tree: position 1 is the root."""
    n = len(w)
    labels = tuple(w.letters)
    parent = tuple([None] + [i - 1 for i in range(1, n)])
    children = tuple(tuple([i + 1]) if i + 1 < n else () for i in range(n))
    return TreeStructure(labels, parent, children)


def tree_to_word(t: TreeStructure) -> WordStructure | None:
    """Inverse of word_to_tree for chain-shaped trees, else None."""
    letters = []
    v = t.root
    while True:
        letters.append(t.label(v))
        kids = t.children[v]
        if len(kids) == 0:
            return WordStructure(tuple(letters))
        if len(kids) > 1:
            return None
        v = kids[0]


def n_neighbourhood_word(w: WordStructure, x: int, n: int) -> tuple[WordStructure, int]:
    """The infix [max(1,x-n), min(|w|,x+n)] plus x's offset inside it."""
    if not 1 <= x <= len(w):
        raise ValueError(f"position {x} out of range 1..{len(w)}")
    lo = max(1, x - n)
    hi = min(len(w), x + n)
    return WordStructure(w.letters[lo - 1 : hi]), x - lo + 1


def n_neighbourhood_tree(t: TreeStructure, x: int, n: int) -> tuple[TreeStructure, int]:
    """Induced substructure on the distance<=n ball around x.

    Re-rooted at the shallowest retained ancestor of x; returns the new tree
    and the image of x in it.
    """
    dist = {x: 0}
    frontier = [x]
    while frontier:
        nxt = []
        for v in frontier:
            d = dist[v]
            if d == n:
                continue
            neigh = list(t.children[v])
            if t.parent[v] is not None:
                neigh.append(t.parent[v])
            for u in neigh:
                if u not in dist:
                    dist[u] = d + 1
                    nxt.append(u)
        frontier = nxt
    new_root = x
    while t.parent[new_root] is not None and t.parent[new_root] in dist:
        new_root = t.parent[new_root]

    mapping: dict[int, int] = {}
    labels: list[Any] = []
    parent: list[Any] = []
    children: list[list[int]] = []

    def build(v: int, par: Any) -> int:
        vid = len(labels)
        mapping[v] = vid
        labels.append(t.label(v))
        parent.append(par)
        children.append([])
        if par is not None:
            children[par].append(vid)
        for c in t.children[v]:
            if c in dist:
                build(c, vid)
        return vid

    build(new_root, None)
    out = TreeStructure(
        tuple(labels), tuple(parent), tuple(tuple(c) for c in children)
    )
    return out, mapping[x]


def universal_tree(sigma0: Sequence[Label], root_label: Label, height: int) -> TreeStructure:
    """Full |sigma0|-ary tree of the given height: one child per label."""
    sigma = sorted(set(sigma0), key=lambda l: l.text)
    if root_label not in set(sigma):
        raise ValueError(f"root label {root_label!r} not in alphabet")
    if height < 0:
        raise ValueError("height must be >= 0")

    def grow(lab: Label, h: int) -> tuple:
        if h == 0:
            return (lab, [])
        return (lab, [grow(b, h - 1) for b in sigma])

    return make_tree(grow(root_label, height))
