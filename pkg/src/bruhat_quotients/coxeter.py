"""Coxeter matrices, bw-graphs and the word model (braid moves, nil moves)."""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .errors import ParseError, ResourceError

INF = math.inf
DEFAULT_CLOSURE_CAP = 2_000_000

Word = tuple[int, ...]


@dataclass(frozen=True)
class CoxeterMatrix:
    entries: tuple[tuple[float, ...], ...]

    def __post_init__(self):
        n = len(self.entries)
        for i, row in enumerate(self.entries):
            if len(row) != n:
                raise ValueError("Coxeter matrix must be square")
            if row[i] != 1:
                raise ValueError("diagonal entries must be 1")
            for j, m in enumerate(row):
                if m != self.entries[j][i]:
                    raise ValueError("Coxeter matrix must be symmetric")
                if i != j and not (m == INF or (int(m) == m and m >= 2)):
                    raise ValueError(f"bad bond {m!r}")

    @classmethod
    def from_bonds(cls, size: int, bonds: dict[tuple[int, int], float]) -> "CoxeterMatrix":
        rows = [[1 if i == j else 2 for j in range(size)] for i in range(size)]
        for (i, j), m in bonds.items():
            rows[i][j] = rows[j][i] = m
        return cls(tuple(tuple(r) for r in rows))

    @property
    def size(self) -> int:
        return len(self.entries)

    def __call__(self, s: int, t: int) -> float:
        return self.entries[s][t]


@dataclass(frozen=True)
class BwGraph:
    """A Coxeter graph whose black nodes are the generators outside J."""

    names: tuple[str, ...]
    matrix: CoxeterMatrix
    black: frozenset[int] = field(default_factory=frozenset)

    def __post_init__(self):
        if len(self.names) != self.matrix.size:
            raise ValueError("one name per generator required")
        if len(set(self.names)) != len(self.names):
            raise ValueError("generator names must be distinct")
        if not self.black <= set(range(self.size)):
            raise ValueError("black set must consist of generators")

    @classmethod
    def build(cls, names: Sequence[str], edges: Iterable[tuple[str, str, float]], black: Iterable[str] = ()) -> "BwGraph":
        index = {n: i for i, n in enumerate(names)}
        bonds = {(index[a], index[b]): m for a, b, m in edges}
        return cls(tuple(names), CoxeterMatrix.from_bonds(len(names), bonds), frozenset(index[b] for b in black))

    @property
    def size(self) -> int:
        return self.matrix.size

    @property
    def white(self) -> frozenset[int]:
        return frozenset(range(self.size)) - self.black

    def m(self, s: int, t: int) -> float:
        return self.matrix(s, t)

    def index(self, name: str) -> int:
        return self.names.index(name)

    def edges(self) -> list[tuple[int, int, float]]:
        return [(i, j, self.m(i, j)) for i in range(self.size) for j in range(i + 1, self.size) if self.m(i, j) != 2]

    def neighbours(self, s: int) -> list[int]:
        return [t for t in range(self.size) if t != s and self.m(s, t) != 2]

    def components(self) -> list[list[int]]:
        seen, out = set(), []
        for start in range(self.size):
            if start in seen:
                continue
            comp, todo = [], [start]
            seen.add(start)
            while todo:
                s = todo.pop()
                comp.append(s)
                for t in self.neighbours(s):
                    if t not in seen:
                        seen.add(t)
                        todo.append(t)
            out.append(sorted(comp))
        return out

    def is_connected(self) -> bool:
        return len(self.components()) <= 1

    def subgraph(self, nodes: Sequence[int]) -> "BwGraph":
        nodes = sorted(nodes)
        pos = {s: i for i, s in enumerate(nodes)}
        bonds = {(pos[a], pos[b]): m for a, b, m in self.edges() if a in pos and b in pos}
        return BwGraph(
            tuple(self.names[s] for s in nodes),
            CoxeterMatrix.from_bonds(len(nodes), bonds),
            frozenset(pos[s] for s in nodes if s in self.black),
        )

    def format_word(self, word: Iterable[int]) -> str:
        return format_word(word, self.names)

    def parse_word(self, text: str) -> Word:
        return parse_word(text, self.names)

    def to_text(self) -> str:
        lines = ["nodes: " + " ".join(self.names)]
        lines.append(("black: " + " ".join(self.names[b] for b in sorted(self.black))).rstrip())
        lines.append("edges:")
        for i, j, m in self.edges():
            lines.append(f"{self.names[i]} {self.names[j]} {format_bond(m)}")
        return "\n".join(lines) + "\n"


def format_bond(m: float) -> str:
    return "inf" if m == INF else str(int(m))


def format_word(word: Iterable[int], names: Sequence[str]) -> str:
    sep = "" if all(len(n) == 1 for n in names) else " "
    return sep.join(names[s] for s in word)


def parse_word(text: str, names: Sequence[str]) -> Word:
    index = {n: i for i, n in enumerate(names)}
    tokens = text.split() if any(len(n) != 1 for n in names) else list(text.replace(" ", ""))
    try:
        return tuple(index[t] for t in tokens)
    except KeyError as exc:
        raise ParseError(f"unknown generator {exc.args[0]!r} in word {text!r}") from None


def parse_bw_graph(text: str) -> BwGraph:
    names: list[str] | None = None
    black: list[str] = []
    edge_tokens: list[str] = []
    in_edges = False
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, rest = line.partition(":")
        key = key.strip().lower()
        if sep and key in ("nodes", "black", "edges"):
            if key == "nodes":
                if names is not None:
                    raise ParseError("nodes listed twice")
                names = rest.split()
                in_edges = False
            elif key == "black":
                black = rest.split()
                in_edges = False
            else:
                in_edges = True
                edge_tokens.extend(rest.replace(",", " ").split())
            continue
        if not in_edges:
            raise ParseError(f"unexpected line {raw!r}")
        edge_tokens.extend(line.replace(",", " ").split())
    if names is None:
        raise ParseError("missing 'nodes:' line")
    if len(set(names)) != len(names):
        raise ParseError("duplicate node names")
    for n in names:
        if any(c in n for c in ":,\\"):
            raise ParseError(f"bad node name {n!r}")
    known = set(names)
    for b in black:
        if b not in known:
            raise ParseError(f"black node {b!r} is not a node")
    if len(edge_tokens) % 3:
        raise ParseError("edges must be triples '<name> <name> <label>'")
    bonds: dict[frozenset[str], float] = {}
    for a, b, label in zip(*[iter(edge_tokens)] * 3):
        for n in (a, b):
            if n not in known:
                raise ParseError(f"edge references unknown node {n!r}")
        if a == b:
            raise ParseError(f"self-loop on {a!r}")
        if label.lower() in ("inf", "∞"):
            m = INF
        else:
            try:
                m = int(label)
            except ValueError:
                raise ParseError(f"bad edge label {label!r}") from None
            if m < 3:
                raise ParseError(f"edge label {m} < 3 (commuting pairs are implicit)")
        key = frozenset((a, b))
        if key in bonds and bonds[key] != m:
            raise ParseError(f"conflicting labels for edge {a}-{b}")
        bonds[key] = m
    edges = [(*sorted(k, key=names.index), m) for k, m in bonds.items()]
    return BwGraph.build(names, edges, black)


@dataclass(frozen=True, order=True)
class Element:
    """Group element stored as its lex-least reduced word."""

    canonical: Word

    @property
    def length(self) -> int:
        return len(self.canonical)


def _braid_neighbours(word: Word, matrix: CoxeterMatrix):
    n = len(word)
    for i in range(n - 1):
        s, t = word[i], word[i + 1]
        if s == t:
            continue
        m = matrix(s, t)
        if m == INF or i + m > n:
            continue
        m = int(m)
        if all(word[i + j] == (s if j % 2 == 0 else t) for j in range(m)):
            swapped = tuple(t if j % 2 == 0 else s for j in range(m))
            yield word[:i] + swapped + word[i + m:]


def braid_closure(word: Sequence[int], matrix: CoxeterMatrix, cap: int = DEFAULT_CLOSURE_CAP) -> set[Word]:
    start = tuple(word)
    seen = {start}
    todo = deque([start])
    while todo:
        w = todo.popleft()
        for v in _braid_neighbours(w, matrix):
            if v not in seen:
                seen.add(v)
                if len(seen) > cap:
                    raise ResourceError(f"braid closure exceeded cap {cap} at length {len(start)}")
                todo.append(v)
    return seen


def _nil_move(closure: set[Word]) -> Word | None:
    for w in closure:
        for i in range(len(w) - 1):
            if w[i] == w[i + 1]:
                return w[:i] + w[i + 2:]
    return None


def reduce(word: Sequence[int], matrix: CoxeterMatrix, cap: int = DEFAULT_CLOSURE_CAP) -> Element:
    w = tuple(word)
    while True:
        closure = braid_closure(w, matrix, cap)
        shorter = _nil_move(closure)
        if shorter is None:
            return Element(min(closure))
        w = shorter


def multiply_left(s: int, w: Element, matrix: CoxeterMatrix, cap: int = DEFAULT_CLOSURE_CAP) -> Element:
    return reduce((s,) + w.canonical, matrix, cap)


def multiply_right(w: Element, s: int, matrix: CoxeterMatrix, cap: int = DEFAULT_CLOSURE_CAP) -> Element:
    return reduce(w.canonical + (s,), matrix, cap)


def is_min_coset_rep(w: Element, graph: BwGraph, cap: int = DEFAULT_CLOSURE_CAP) -> bool:
    # length test: w is minimal in wW_J iff every right multiplication by J goes up
    return all(multiply_right(w, s, graph.matrix, cap).length > w.length for s in graph.white)


def has_white_suffix(w: Element, graph: BwGraph, cap: int = DEFAULT_CLOSURE_CAP) -> bool:
    """True if some reduced word of w ends in a white generator."""
    white = graph.white
    return any(v and v[-1] in white for v in braid_closure(w.canonical, graph.matrix, cap))
