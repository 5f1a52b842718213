"""Enumeration of W^J by length, Bruhat covers, and the PosetFile format.

The default enumerator tracks the left action of each generator on cosets
wW_J.  For a level-l element w and a generator s whose action is not yet
known, the rank-2 orbit of w under <r, s> (r any left descent of w) decides
whether s.w goes up or stays in the same coset, and which other (t, y) pairs
produce the same new element.  No group arithmetic beyond the action table is
needed, so long elements of finite groups stay cheap.
"""

from __future__ import annotations

import json
from functools import cached_property
from typing import Sequence

from .coxeter import (
    DEFAULT_CLOSURE_CAP,
    INF,
    BwGraph,
    Element,
    Word,
    braid_closure,
    is_min_coset_rep,
    multiply_left,
    multiply_right,
    parse_bw_graph,
    reduce,
)
from .errors import ConsistencyError, ParseError, ResourceError

FIXED = -1


class QuotientPoset:
    """A graded poset with elements indexed level by level.

    ``words`` and ``graph`` are present for enumerated posets and absent for
    blind ones loaded from a file.  ``complete`` is False for truncations, in
    which case nothing is known above ``max_length``.
    """

    def __init__(self, length: Sequence[int], down: Sequence[Sequence[int]], *, complete: bool,
                 max_length: int, words: Sequence[Word] | None = None, graph: BwGraph | None = None,
                 labels: Sequence[str] | None = None, action=None):
        n = len(length)
        if any(length[i] > length[i + 1] for i in range(n - 1)):
            raise ValueError("elements must be indexed level by level")
        self.length = list(length)
        self.down = [tuple(sorted(d)) for d in down]
        up: list[list[int]] = [[] for _ in range(n)]
        for w, ds in enumerate(self.down):
            for u in ds:
                up[u].append(w)
        self.up = [tuple(sorted(u)) for u in up]
        self.complete = complete
        self.max_length = max_length
        self.words = [tuple(w) for w in words] if words is not None else None
        self.graph = graph
        if labels is not None:
            self.labels = list(labels)
        elif words is not None and graph is not None:
            self.labels = [graph.format_word(w) for w in self.words]
        else:
            self.labels = [str(i) for i in range(n)]
        self._action = action

    def __len__(self) -> int:
        return len(self.length)

    def __repr__(self) -> str:
        state = "complete" if self.complete else f"truncated at {self.max_length}"
        return f"<QuotientPoset {len(self)} elements, {state}>"

    @cached_property
    def levels(self) -> list[list[int]]:
        out: list[list[int]] = []
        for i, l in enumerate(self.length):
            while len(out) <= l:
                out.append([])
            out[l].append(i)
        return out

    @cached_property
    def covers(self) -> list[tuple[int, int]]:
        edges = [(u, w) for w in range(len(self)) for u in self.down[w]]
        return sorted(edges, key=lambda e: (self.length[e[1]], e[0], e[1]))

    @cached_property
    def below(self) -> list[int]:
        """Bitset of the lower set of each element (including itself)."""
        out = [0] * len(self)
        for w in range(len(self)):
            acc = 1 << w
            for u in self.down[w]:
                acc |= out[u]
            out[w] = acc
        return out

    @cached_property
    def above(self) -> list[int]:
        out = [0] * len(self)
        for u in reversed(range(len(self))):
            acc = 1 << u
            for w in self.up[u]:
                acc |= out[w]
            out[u] = acc
        return out

    @cached_property
    def level_masks(self) -> list[int]:
        return [sum(1 << i for i in lvl) for lvl in self.levels]

    def leq(self, u: int, w: int) -> bool:
        return bool(self.below[w] >> u & 1)

    def at_boundary(self, w: int) -> bool:
        """True when the elements above w may lie past the truncation."""
        return not self.complete and self.length[w] >= self.max_length

    def label(self, i: int) -> str:
        return self.labels[i] if self.labels[i] else "e"

    def index(self, key) -> int:
        """Look up an element by word tuple or label string."""
        if isinstance(key, str):
            if self.graph is not None and self.words is not None:
                key = self.graph.parse_word(key)
            else:
                return self.labels.index(key)
        if self._word_index is None:
            raise KeyError(key)
        try:
            return self._word_index[tuple(key)]
        except KeyError:
            raise KeyError(key) from None

    @cached_property
    def _word_index(self) -> dict[Word, int] | None:
        if self.words is None:
            return None
        return {w: i for i, w in enumerate(self.words)}

    def evaluate(self, word: Sequence[int]) -> int:
        """Index of the coset representative of the product of ``word``."""
        if self._action is None:
            if self.graph is None:
                raise ValueError("evaluation needs the source graph")
            element = reduce(word, self.graph.matrix)
            lowered = _strip_white_suffix(element, self.graph)
            return self.index(lowered)
        x = 0
        for s in reversed(word):
            y = self._action[x][s]
            if y is None:
                raise ValueError("word leaves the truncated poset")
            if y != FIXED:
                x = y
        return x

    def act(self, s: int, w: int) -> int | None:
        """s.w as an index, FIXED when s.w lies in wW_J, None when beyond truncation."""
        if self._action is None:
            raise ValueError("no action table for this poset")
        return self._action[w][s]

    def subposet(self, keep: Sequence[int], graph: BwGraph | None = None, words=None) -> "QuotientPoset":
        """Restriction to a lower set, reindexed in the same order."""
        keep = sorted(keep)
        pos = {x: i for i, x in enumerate(keep)}
        down = []
        for x in keep:
            if any(u not in pos for u in self.down[x]):
                raise ValueError("subposet must be a lower set")
            down.append([pos[u] for u in self.down[x]])
        return QuotientPoset(
            [self.length[x] for x in keep], down, complete=self.complete, max_length=self.max_length,
            words=words, graph=graph, labels=[self.labels[x] for x in keep] if words is None else None,
        )


def _strip_white_suffix(element: Element, graph: BwGraph) -> Word:
    w = element
    changed = True
    while changed:
        changed = False
        for s in sorted(graph.white):
            shorter = multiply_right(w, s, graph.matrix)
            if shorter.length < w.length:
                w, changed = shorter, True
                break
    return w.canonical


class _OrbitEngine:
    """Builds the left action of S on W/W_J level by level."""

    def __init__(self, graph: BwGraph, max_elements: int | None = None):
        self.graph = graph
        self.max_elements = max_elements
        self.rank = graph.size
        self.length = [0]
        self.act: list[list[int | None]] = [[FIXED if s in graph.white else None for s in range(self.rank)]]

    def _down(self, x: int, g: int) -> bool:
        y = self.act[x][g]
        return y is not None and y >= 0 and self.length[y] < self.length[x]

    def _walk_down(self, w: int, first: int, second: int) -> tuple[int, int, int]:
        """Descend alternately (first, second, ...) while possible: (bottom, steps, next gen)."""
        x, k, g = w, 0, first
        while self._down(x, g):
            x = self.act[x][g]
            k += 1
            g = second if g == first else first
        return x, k, g

    def _goes_up(self, w: int, s: int) -> bool:
        if w == 0:
            return s in self.graph.black
        r = next(t for t in range(self.rank) if self._down(w, t))
        bottom, k, g = self._walk_down(w, r, s)
        status = self.act[bottom][g]
        if status is None:
            raise ConsistencyError("rank-2 orbit walk reached an unresolved action")
        m = self.graph.m(r, s)
        if status == FIXED:
            return k < m - 1
        if k >= m:
            raise ConsistencyError("generator should have been a descent")
        return True

    def _parents(self, w: int, s: int) -> list[tuple[int, int]]:
        """All (t, y) with t.y equal to the new element s.w."""
        links = [(s, w)]
        for t in range(self.rank):
            if t == s or not self._down(w, t):
                continue
            m = self.graph.m(s, t)
            if m == INF:
                continue
            bottom, k, g = self._walk_down(w, t, s)
            if self.act[bottom][g] == FIXED or k != m - 1:
                continue
            y, h = bottom, g
            for _ in range(int(m) - 1):
                y = self.act[y][h]
                h = s if h == t else t
            links.append((t, y))
        return links

    def _attach(self, w: int, s: int) -> bool:
        links = self._parents(w, s)
        found = {self.act[x][g] for g, x in links} - {None}
        if len(found) > 1 or FIXED in found:
            raise ConsistencyError("conflicting identifications in orbit enumeration")
        if found:
            z, created = found.pop(), False
        else:
            z, created = len(self.length), True
            if self.max_elements is not None and z >= self.max_elements:
                raise ResourceError(f"quotient exceeds {self.max_elements} elements")
            self.length.append(self.length[w] + 1)
            self.act.append([None] * self.rank)
        for g, x in links:
            self.act[x][g] = z
            self.act[z][g] = x
        return created

    def run(self, max_length: int) -> tuple[list[list[int]], bool]:
        levels = [[0]]
        while True:
            grow = len(levels) - 1 < max_length
            nxt: list[int] = []
            for w in levels[-1]:
                for s in range(self.rank):
                    if self.act[w][s] is not None:
                        continue
                    if not self._goes_up(w, s):
                        self.act[w][s] = FIXED
                    elif not grow:
                        return levels, False
                    elif self._attach(w, s):
                        nxt.append(len(self.length) - 1)
            if not nxt:
                return levels, True
            levels.append(nxt)

    def descents(self, z: int) -> list[int]:
        return [t for t in range(self.rank) if self._down(z, t)]


def enumerate_quotient(graph: BwGraph, max_length: int, method: str = "orbit",
                       cap: int = DEFAULT_CLOSURE_CAP, max_elements: int | None = None) -> QuotientPoset:
    """All of W^J up to ``max_length`` with their Bruhat covers.

    ``method="words"`` runs the slower word-model enumeration (generator
    multiplication, braid-closure reduction, coset filtering, covers by letter
    deletion); it exists as an independent route for cross-checking.
    ``max_elements`` aborts the orbit enumeration with ResourceError once the
    poset grows past that many elements.
    """
    if max_length < 0:
        raise ValueError("max_length must be >= 0")
    if method == "words":
        return _enumerate_by_words(graph, max_length, cap, max_elements)
    if method != "orbit":
        raise ValueError(f"unknown method {method!r}")
    engine = _OrbitEngine(graph, max_elements)
    levels, complete = engine.run(max_length)
    old_words: dict[int, Word] = {0: ()}
    for lvl in levels[1:]:
        for z in lvl:
            g = engine.descents(z)[0]
            old_words[z] = (g,) + old_words[engine.act[z][g]]
    order = [z for lvl in levels for z in sorted(lvl, key=old_words.__getitem__)]
    new = {z: i for i, z in enumerate(order)}
    action = []
    for z in order:
        row = []
        for y in engine.act[z]:
            row.append(y if y is None or y == FIXED else new.get(y))
        action.append(row)
    length = [engine.length[z] for z in order]
    words = [old_words[z] for z in order]
    down: list[list[int]] = [[] for _ in order]
    for z in range(1, len(order)):
        s = words[z][0]
        lower = action[z][s]
        cov = {lower}
        for x in down[lower]:
            y = action[x][s]
            if y is not None and y >= 0 and length[y] > length[x]:
                cov.add(y)
        down[z] = sorted(cov)
    return QuotientPoset(length, down, complete=complete, max_length=max_length, words=words,
                         graph=graph, action=action)


def _enumerate_by_words(graph: BwGraph, max_length: int, cap: int, max_elements: int | None) -> QuotientPoset:
    m = graph.matrix
    levels: list[list[Element]] = [[Element(())]]
    complete = False
    total = 1
    while True:
        found: dict[Word, Element] = {}
        target = len(levels)
        for w in levels[-1]:
            for s in range(graph.size):
                for x in (multiply_left(s, w, m, cap), multiply_right(w, s, m, cap)):
                    if x.length == target and x.canonical not in found and is_min_coset_rep(x, graph, cap):
                        found[x.canonical] = x
        if not found:
            complete = True
            break
        if target > max_length:
            break
        total += len(found)
        if max_elements is not None and total > max_elements:
            raise ResourceError(f"quotient exceeds {max_elements} elements")
        levels.append([found[k] for k in sorted(found)])
    elements = [e for lvl in levels for e in lvl]
    index = {e.canonical: i for i, e in enumerate(elements)}
    down = [sorted(compute_cover_set(e, graph, index, cap)) for e in elements]
    return QuotientPoset([e.length for e in elements], down, complete=complete, max_length=max_length,
                         words=[e.canonical for e in elements], graph=graph)


def compute_cover_set(w: Element, graph: BwGraph, index: dict[Word, int], cap: int = DEFAULT_CLOSURE_CAP) -> set[int]:
    """Covers of w by single-letter deletion from every word in its braid closure."""
    out = set()
    for word in braid_closure(w.canonical, graph.matrix, cap):
        for i in range(len(word)):
            u = reduce(word[:i] + word[i + 1:], graph.matrix, cap)
            if u.length == w.length - 1 and u.canonical in index and is_min_coset_rep(u, graph, cap):
                out.add(index[u.canonical])
    return out


def compute_covers(p: QuotientPoset) -> list[tuple[int, int]]:
    return p.covers


def poset_length(p: QuotientPoset, x: int) -> int:
    """Length of the longest chain from the least element, from covers alone."""
    longest = _longest_chains(p)
    return longest[x]


def _longest_chains(p: QuotientPoset) -> list[int]:
    out = [0] * len(p)
    for w in range(len(p)):
        if w and not p.down[w]:
            raise ConsistencyError(f"element {p.label(w)} has no lower cover")
        out[w] = max((out[u] + 1 for u in p.down[w]), default=0)
        if out[w] != p.length[w] or any(out[u] + 1 != out[w] for u in p.down[w]):
            raise ConsistencyError(f"poset is not graded at {p.label(w)}")
    return out


def save_poset(p: QuotientPoset) -> str:
    levels = [[p.labels[i] for i in lvl] for lvl in p.levels]
    lines = ["{", '  "levels": [']
    lines += ["    " + json.dumps(lvl) + ("," if k < len(levels) - 1 else "") for k, lvl in enumerate(levels)]
    lines.append("  ],")
    lines.append('  "covers": [')
    cov = p.covers
    lines += [f"    [{u}, {w}]" + ("," if k < len(cov) - 1 else "") for k, (u, w) in enumerate(cov)]
    lines.append("  ],")
    lines.append(f'  "complete": {json.dumps(p.complete)},')
    tail = f'  "maxLength": {p.max_length}'
    if p.graph is not None:
        lines.append(tail + ",")
        lines.append(f'  "graph": {json.dumps(p.graph.to_text())}')
    else:
        lines.append(tail)
    lines.append("}")
    return "\n".join(lines) + "\n"


def load_poset(text: str) -> QuotientPoset:
    try:
        doc = json.loads(text)
        levels = doc["levels"]
        covers = doc["covers"]
        complete = bool(doc["complete"])
        max_length = int(doc["maxLength"])
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"not a poset file: {exc}") from None
    if not levels or len(levels[0]) != 1:
        raise ParseError("a poset file needs exactly one element of length 0")
    labels = [lab for lvl in levels for lab in lvl]
    length = [l for l, lvl in enumerate(levels) for _ in lvl]
    n = len(labels)
    down: list[list[int]] = [[] for _ in range(n)]
    for edge in covers:
        u, w = edge
        if not (0 <= u < n and 0 <= w < n):
            raise ParseError(f"cover {edge} references a missing element")
        if length[w] != length[u] + 1:
            raise ParseError(f"cover {edge} does not join adjacent levels")
        down[w].append(u)
    for w in range(1, n):
        if not down[w]:
            raise ParseError(f"element {labels[w]!r} is a second minimal element")
    graph = words = None
    if doc.get("graph"):
        graph = parse_bw_graph(doc["graph"])
        words = [graph.parse_word(lab) for lab in labels]
    return QuotientPoset(length, down, complete=complete, max_length=max_length, words=words, graph=graph,
                         labels=labels)
