"""Named finite Coxeter systems, finite-type recognition and bw-graph utilities.

Generator numbering follows the usual diagrams: A_n, B_n, H_n, F_4 are paths
1..n (B_n and H_n carry their label on edge 1-2, F_4 on 2-3), D_n is the path
1..n-1 with node 0 attached to 2, E_n is the path 1..n-1 with 0 attached to 3.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

from .coxeter import INF, BwGraph, CoxeterMatrix


def _path(n: int, labels: dict[int, float] | None = None, start: int = 1) -> tuple[list[str], list]:
    names = [str(i) for i in range(start, start + n)]
    labels = labels or {}
    edges = [(names[i], names[i + 1], labels.get(i + 1, 3)) for i in range(n - 1)]
    return names, edges


def _finish(names, edges, black: Iterable[str]) -> BwGraph:
    black = list(black)
    unknown = [b for b in black if b not in names]
    if unknown:
        raise ValueError(f"black nodes {unknown} not in {names}")
    return BwGraph.build(names, edges, black)


def type_a(n: int, black: Iterable[str]) -> BwGraph:
    return _finish(*_path(n), black)


def type_b(n: int, black: Iterable[str]) -> BwGraph:
    if n < 2:
        raise ValueError("B_n needs n >= 2")
    return _finish(*_path(n, {1: 4}), black)


def type_d(n: int, black: Iterable[str]) -> BwGraph:
    if n < 4:
        raise ValueError("D_n needs n >= 4")
    names, edges = _path(n - 1)
    return _finish(["0"] + names, edges + [("0", "2", 3)], black)


def type_e(n: int, black: Iterable[str]) -> BwGraph:
    if n not in (6, 7, 8):
        raise ValueError("E_n exists for n = 6, 7, 8")
    names, edges = _path(n - 1)
    return _finish(["0"] + names, edges + [("0", "3", 3)], black)


def type_f4(black: Iterable[str]) -> BwGraph:
    return _finish(*_path(4, {2: 4}), black)


def type_h(n: int, black: Iterable[str]) -> BwGraph:
    if n not in (3, 4):
        raise ValueError("H_n exists for n = 3, 4")
    return _finish(*_path(n, {1: 5}), black)


def type_i2(m: float, black: Iterable[str]) -> BwGraph:
    return _finish(["1", "2"], [("1", "2", m)] if m != 2 else [], black)


# Unambiguous pairs used by the isomorphism classification.

def i2_a1(m: float) -> BwGraph:
    return type_i2(m, ["1"])


def a_an(n: int) -> BwGraph:
    return type_a(n, ["1"])


def b_bn(k: int) -> BwGraph:
    """(B_k, B_{k-1}): the black node sits at the end far from the 4-label."""
    return type_b(k, [str(k)])


def b_an(n: int) -> BwGraph:
    return type_b(n, ["1"])


def d_an(n: int) -> BwGraph:
    """(D_{n+1}, A_n): black node on one of the two short arms."""
    return type_d(n + 1, ["1"])


def h3_h2() -> BwGraph:
    return type_h(3, ["3"])


def d6_d5() -> BwGraph:
    return type_d(6, ["5"])


@dataclass(frozen=True)
class FiniteType:
    family: str
    rank: int
    bond: int = 0  # only for I2

    @property
    def name(self) -> str:
        return f"I2({self.bond})" if self.family == "I" else f"{self.family}{self.rank}"

    @property
    def order(self) -> int:
        n = self.rank
        if self.family == "A":
            return math.factorial(n + 1)
        if self.family == "B":
            return 2**n * math.factorial(n)
        if self.family == "D":
            return 2 ** (n - 1) * math.factorial(n)
        if self.family == "I":
            return 2 * self.bond
        return {("E", 6): 51840, ("E", 7): 2903040, ("E", 8): 696729600,
                ("F", 4): 1152, ("H", 3): 120, ("H", 4): 14400}[(self.family, n)]


def finite_type(graph: BwGraph, nodes: Sequence[int] | None = None) -> FiniteType | None:
    """Type of the parabolic subsystem on a connected node set, None if infinite."""
    nodes = list(range(graph.size)) if nodes is None else list(nodes)
    n = len(nodes)
    if n == 0:
        raise ValueError("empty node set")
    if n == 1:
        return FiniteType("A", 1)
    edges = [(a, b, graph.m(a, b)) for a, b in itertools.combinations(nodes, 2) if graph.m(a, b) != 2]
    if any(m == INF for _, _, m in edges) or len(edges) != n - 1:
        return None
    adj = {s: [] for s in nodes}
    for a, b, _ in edges:
        adj[a].append(b)
        adj[b].append(a)
    seen, todo = {nodes[0]}, [nodes[0]]
    while todo:
        for t in adj[todo.pop()]:
            if t not in seen:
                seen.add(t)
                todo.append(t)
    if len(seen) != n:
        raise ValueError("node set is not connected")
    if n == 2:
        m = int(edges[0][2])
        return FiniteType("A", 2) if m == 3 else FiniteType("I", 2, m)
    degrees = {s: len(adj[s]) for s in nodes}
    branch = [s for s in nodes if degrees[s] >= 3]
    if branch:
        if len(branch) > 1 or degrees[branch[0]] > 3 or any(m != 3 for *_, m in edges):
            return None
        arms = sorted(_arm_length(adj, branch[0], t) for t in adj[branch[0]])
        if arms[0] == 1 and arms[1] == 1:
            return FiniteType("D", n)
        if arms[:2] == [1, 2] and arms[2] in (2, 3, 4):
            return FiniteType("E", n)
        return None
    end = next(s for s in nodes if degrees[s] == 1)
    order, prev = [end], None
    while len(order) < n:
        nxt = next(t for t in adj[order[-1]] if t != prev)
        prev = order[-1]
        order.append(nxt)
    labels = [graph.m(order[i], order[i + 1]) for i in range(n - 1)]
    odd = [(i, m) for i, m in enumerate(labels) if m != 3]
    if not odd:
        return FiniteType("A", n)
    if len(odd) > 1:
        return None
    pos, m = odd[0]
    at_end = pos in (0, n - 2)
    if m == 4 and at_end:
        return FiniteType("B", n)
    if m == 4 and n == 4:
        return FiniteType("F", 4)
    if m == 5 and at_end and n in (3, 4):
        return FiniteType("H", n)
    return None


def _arm_length(adj, centre, first) -> int:
    length, prev, cur = 1, centre, first
    while len(adj[cur]) == 2:
        prev, cur = cur, next(t for t in adj[cur] if t != prev)
        length += 1
    return length


def parabolic_order(graph: BwGraph, nodes: Iterable[int]) -> int | None:
    total = 1
    sub = graph.subgraph(sorted(nodes))
    for comp in sub.components():
        t = finite_type(sub, comp)
        if t is None:
            return None
        total *= t.order
    return total


def quotient_size(graph: BwGraph) -> int | None:
    """|W^J| from group orders, or None when the quotient is infinite."""
    total = 1
    for comp in graph.components():
        if not graph.black & set(comp):
            continue
        whole = parabolic_order(graph, comp)
        if whole is None:
            return None
        white = [s for s in comp if s not in graph.black]
        total *= whole // (parabolic_order(graph, white) if white else 1)
    return total


def graph_isomorphisms(g: BwGraph, h: BwGraph) -> Iterator[dict[int, int]]:
    """All colour- and label-preserving bijections between generator sets."""
    if g.size != h.size or len(g.black) != len(h.black):
        return

    def signature(graph, s):
        return (s in graph.black, sorted(graph.m(s, t) for t in graph.neighbours(s)))

    gs = [signature(g, s) for s in range(g.size)]
    hs = [signature(h, s) for s in range(h.size)]
    if sorted(gs) != sorted(hs):
        return
    mapping: dict[int, int] = {}
    used: set[int] = set()

    def extend(s):
        if s == g.size:
            yield dict(mapping)
            return
        for t in range(h.size):
            if t in used or hs[t] != gs[s]:
                continue
            if all(g.m(s, a) == h.m(t, b) for a, b in mapping.items()):
                mapping[s] = t
                used.add(t)
                yield from extend(s + 1)
                del mapping[s]
                used.discard(t)

    yield from extend(0)


def graph_isomorphism(g: BwGraph, h: BwGraph) -> dict[int, int] | None:
    return next(graph_isomorphisms(g, h), None)


def canonical_key(graph: BwGraph) -> tuple:
    """Isomorphism-invariant key (brute force over permutations; small graphs only)."""
    n = graph.size
    best = None
    for perm in itertools.permutations(range(n)):
        key = (
            tuple(perm[i] in graph.black for i in range(n)),
            tuple(graph.m(perm[i], perm[j]) for i in range(n) for j in range(i + 1, n)),
        )
        if best is None or key < best:
            best = key
    return best


def small_graphs(max_nodes: int = 4, labels: Sequence[int] = (3, 4, 5, 6), finite_only: bool = True,
                 max_size: int | None = None) -> list[BwGraph]:
    """Connected bw-graphs with a non-empty black set, one per isomorphism class."""
    out, seen = [], set()
    for n in range(1, max_nodes + 1):
        pairs = list(itertools.combinations(range(n), 2))
        for bonds in itertools.product((2, *labels), repeat=len(pairs)):
            matrix = CoxeterMatrix.from_bonds(n, dict(zip(pairs, bonds)))
            base = BwGraph(tuple(str(i) for i in range(n)), matrix)
            if not base.is_connected():
                continue
            if finite_only and finite_type(base) is None:
                continue
            for mask in range(1, 2**n):
                g = BwGraph(base.names, matrix, frozenset(i for i in range(n) if mask >> i & 1))
                key = canonical_key(g)
                if key in seen:
                    continue
                seen.add(key)
                if max_size is not None:
                    size = quotient_size(g)
                    if size is None or size > max_size:
                        continue
                out.append(g)
    return out
