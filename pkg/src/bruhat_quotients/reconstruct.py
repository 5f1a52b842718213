"""Recovering the bw-graph from a bare poset, and splitting reducible quotients."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .chainlike import (
    Form,
    Measure,
    chainlike_elements,
    equivalent,
    parent,
    sibling_bond,
)
from .coxeter import INF, BwGraph, CoxeterMatrix, format_bond
from .errors import ConsistencyError
from .quotient import QuotientPoset


class _Partition:
    def __init__(self, items: Iterable[int]):
        self.root = {x: x for x in items}

    def find(self, x: int) -> int:
        while self.root[x] != x:
            self.root[x] = self.root[self.root[x]]
            x = self.root[x]
        return x

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.root[max(ra, rb)] = min(ra, rb)

    def classes(self) -> list[list[int]]:
        groups: dict[int, list[int]] = {}
        for x in self.root:
            groups.setdefault(self.find(x), []).append(x)
        return sorted((sorted(g) for g in groups.values()), key=lambda g: g[0])


@dataclass
class ReconstructionResult:
    classes: list[list[int]]
    black: set[int]
    labels: dict[tuple[int, int], Measure]
    class_map: dict[int, int]
    caveats: list[str] = field(default_factory=list)
    provenance: list[tuple[str, int, int, int, int]] = field(default_factory=list)
    unlabelled: set[tuple[int, int]] = field(default_factory=set)

    @property
    def names(self) -> list[str]:
        return [f"c{i}" for i in range(len(self.classes))]

    def to_graph(self) -> BwGraph:
        """The graph with every lower-bounded label read as infinity."""
        bonds = {e: (m.value if m.is_exact else INF) for e, m in self.labels.items()}
        return BwGraph(tuple(self.names), CoxeterMatrix.from_bonds(len(self.classes), bonds), frozenset(self.black))

    @property
    def exact(self) -> bool:
        return all(m.is_exact for m in self.labels.values())

    def to_text(self) -> str:
        names = self.names
        lines = ["nodes: " + " ".join(names),
                 ("black: " + " ".join(names[b] for b in sorted(self.black))).rstrip(), "edges:"]
        for (a, b), m in sorted(self.labels.items()):
            if m.is_exact:
                lines.append(f"{names[a]} {names[b]} {format_bond(m.value)}")
            else:
                lines.append(f"{names[a]} {names[b]} inf  # truncated: {m}")
        lines += [f"# {c}" for c in self.caveats]
        return "\n".join(lines) + "\n"


def _merge_label(old: Measure | None, new: Measure) -> Measure:
    if old is None:
        return new
    if old.is_exact and new.is_exact:
        if old.value != new.value:
            raise ConsistencyError(f"edge labelled both {old} and {new}")
        return old
    if old.is_exact or new.is_exact:
        exact, bound = (old, new) if old.is_exact else (new, old)
        if exact.value < bound.value:
            raise ConsistencyError(f"edge labelled {exact} below bound {bound}")
        return exact
    return Measure.at_least(max(old.value, new.value))


def _classes(p: QuotientPoset, members: Sequence[int], caveats: list[str]) -> _Partition:
    part = _Partition(members)
    for i, u in enumerate(members):
        for v in members[i + 1:]:
            same = equivalent(p, u, v)
            if same is None:
                caveats.append(f"~ undecided for {p.label(u)}, {p.label(v)} (truncation)")
            elif same:
                part.union(u, v)
    return part


def _assemble(p, part, members) -> ReconstructionResult:
    classes = part.classes()
    class_map = {x: i for i, cls in enumerate(classes) for x in cls}
    black = {i for i, cls in enumerate(classes) if any(p.length[x] == 1 for x in cls)}
    return ReconstructionResult(classes, black, {}, class_map)


def _add_edge(result: ReconstructionResult, rule: str, u: int, v: int, label: Measure | None) -> None:
    """Record an edge; ``label=None`` means 'joined, label 3 unless another rule says more'."""
    a, b = result.class_map[u], result.class_map[v]
    if a == b:
        raise ConsistencyError(f"{rule} joins a class to itself")
    key = (min(a, b), max(a, b))
    if label is None:
        if key not in result.labels:
            result.labels[key] = Measure.exact(3)
            result.unlabelled.add(key)
    elif key in result.unlabelled:
        result.unlabelled.discard(key)
        result.labels[key] = label
    else:
        result.labels[key] = _merge_label(result.labels.get(key), label)
    result.provenance.append((rule, key[0], key[1], u, v))


def reconstruct_simply_laced(p: QuotientPoset) -> ReconstructionResult:
    """Graph of a simply-laced pair: classes of chainlikes, edges by parents and shared covers."""
    members = chainlike_elements(p)
    caveats: list[str] = []
    part = _classes(p, members, caveats)
    result = _assemble(p, part, members)
    result.caveats = caveats
    three = Measure.exact(3)
    for v in members:
        u = parent(p, v)
        if u and result.class_map[u] != result.class_map[v]:
            _add_edge(result, "parent", u, v, three)
    for i, u in enumerate(members):
        for v in members[i + 1:]:
            if parent(p, u) != parent(p, v) or result.class_map[u] == result.class_map[v]:
                continue
            if p.at_boundary(u):
                caveats.append(f"common covers of {p.label(u)}, {p.label(v)} lie past the truncation")
                continue
            if len(set(p.up[u]) & set(p.up[v])) == 2:
                _add_edge(result, "shared-cover", u, v, three)
    return result


def check_forms(p: QuotientPoset, forms: Mapping[int, Form]) -> None:
    """Reject assignments that contradict the parent structure of the three forms."""
    children: dict[int, list[int]] = {}
    for w in chainlike_elements(p):
        f = Form(forms[w])
        par = parent(p, w)
        pf = Form(forms[par]) if par else None
        grand = Form(forms[parent(p, par)]) if par and parent(p, par) else None
        ok = {
            Form.I: pf in (None, Form.I),
            Form.II: pf == Form.II or (pf == Form.I and p.length[par] >= 2),
            Form.III: pf == Form.III or (pf == Form.II and grand == Form.I),
        }.get(f, False)
        if not ok:
            raise ConsistencyError(f"form {f.value} of {p.label(w)} impossible under parent form")
        children.setdefault(par, []).append(w)
    for par, kids in children.items():
        kinds = [Form(forms[k]) for k in kids]
        if kinds.count(Form.II) > 1 or kinds.count(Form.III) > 1:
            raise ConsistencyError(f"{p.label(par)} has two children of the same non-simple form")


def reconstruct(p: QuotientPoset, forms: Mapping[int, Form]) -> ReconstructionResult:
    """Graph of an arbitrary pair given the form of every chainlike."""
    check_forms(p, forms)
    chain = chainlike_elements(p)
    simple = [w for w in chain if forms[w] == Form.I]
    caveats: list[str] = []
    part = _classes(p, simple, caveats)
    result = _assemble(p, part, simple)
    result.caveats = caveats
    for v in simple:
        u = parent(p, v)
        if u and result.class_map[u] != result.class_map[v]:
            _add_edge(result, "parent", u, v, None)
    for i, u in enumerate(simple):
        for v in simple[i + 1:]:
            if parent(p, u) != parent(p, v) or result.class_map[u] == result.class_map[v]:
                continue
            bond = sibling_bond(p, u, v)
            if bond.status == "unknown":
                caveats.append(f"bond of {p.label(u)}, {p.label(v)} undecided (truncation)")
            elif bond.value >= 3:
                _add_edge(result, "siblings", u, v, bond)
    for u in chain:
        if forms[u] != Form.II or forms[parent(p, u)] != Form.I:
            continue
        above = [w for w in chain if forms[w] == Form.III and w != u and p.leq(u, w)]
        label = Measure.exact(len(above) + 4)
        if any(p.at_boundary(w) for w in [u, *above]):
            label = Measure.at_least(len(above) + 4)
        _add_edge(result, "form-II", parent(p, u), parent(p, parent(p, u)), label)
    return result


@dataclass
class Component:
    atoms: list[int]
    generators: list[str]
    poset: QuotientPoset
    graph: BwGraph | None = None
    elements: list[int] = field(default_factory=list)


@dataclass
class Decomposition:
    components: list[Component]
    trivial_count: int
    trivial_generators: list[list[str]] = field(default_factory=list)
    caveats: list[str] = field(default_factory=list)


def _root_atom(p: QuotientPoset, w: int) -> int:
    while p.length[w] > 1:
        w = parent(p, w)
    return w


def decompose(p: QuotientPoset) -> Decomposition:
    atoms = p.levels[1] if len(p.levels) > 1 else []
    part = _Partition(atoms)
    caveats: list[str] = []
    for i, a in enumerate(atoms):
        for b in atoms[i + 1:]:
            if p.at_boundary(a):
                caveats.append("bonds between atoms lie past the truncation")
                continue
            if len(set(p.up[a]) & set(p.up[b])) >= 2:
                part.union(a, b)
    chain = chainlike_elements(p)
    roots = {w: _root_atom(p, w) for w in chain}
    for i, u in enumerate(chain):
        for v in chain[i + 1:]:
            if part.find(roots[u]) == part.find(roots[v]):
                continue
            same = equivalent(p, u, v)
            if same is None:
                caveats.append(f"~ undecided for {p.label(u)}, {p.label(v)} (truncation)")
            elif same:
                part.union(roots[u], roots[v])
    atom_bits = sum(1 << a for a in atoms)
    components = []
    graph = p.graph
    graph_parts = graph.components() if graph is not None else []
    for group in part.classes():
        mask = sum(1 << a for a in group)
        keep = [w for w in range(len(p)) if not (p.below[w] & atom_bits & ~mask)]
        sub_graph = words = None
        generators = [p.label(a) for a in group]
        if graph is not None and p.words is not None:
            black = {p.words[a][0] for a in group}
            nodes = next(c for c in graph_parts if black & set(c))
            if not black <= set(nodes):
                raise ConsistencyError("atoms of one factor span several graph components")
            sub_graph = graph.subgraph(nodes)
            pos = {s: i for i, s in enumerate(nodes)}
            words = [tuple(pos[s] for s in p.words[w]) for w in keep]
            generators = [graph.names[s] for s in nodes]
        components.append(Component(group, generators, p.subposet(keep, sub_graph, words), sub_graph, keep))
    trivial = [[graph.names[s] for s in c] for c in graph_parts if not graph.black & set(c)] if graph else []
    if p.complete:
        size = 1
        for c in components:
            size *= len(c.poset)
        if size != len(p):
            raise ConsistencyError(f"factor sizes multiply to {size}, poset has {len(p)}")
    return Decomposition(components, len(trivial), trivial, caveats)


def product_poset(factors: Sequence[QuotientPoset], max_length: int | None = None) -> QuotientPoset:
    """Cartesian product ordered componentwise, optionally cut at ``max_length``."""
    elements: list[tuple[int, ...]] = [()]
    for f in factors:
        elements = [e + (x,) for e in elements for x in range(len(f))]

    def total(e):
        return sum(f.length[x] for f, x in zip(factors, e))

    if max_length is not None:
        elements = [e for e in elements if total(e) <= max_length]
    elements.sort(key=lambda e: (total(e), e))
    index = {e: i for i, e in enumerate(elements)}
    down = []
    for e in elements:
        lower = []
        for k, f in enumerate(factors):
            for y in f.down[e[k]]:
                lower.append(index[e[:k] + (y,) + e[k + 1:]])
        down.append(lower)
    complete = all(f.complete for f in factors) and max_length is None
    bound = max_length if max_length is not None else sum(f.max_length for f in factors)
    return QuotientPoset([total(e) for e in elements], down, complete=complete, max_length=bound)
