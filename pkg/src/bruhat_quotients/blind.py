"""Form resolution for posets given without their Coxeter graph.

Candidate form assignments are generated under the parent/child rules that
every chainlike forest obeys, and each candidate is kept only if the graph it
reconstructs enumerates back to a poset isomorphic to the input.  Distinct
graphs surviving that test are the readings of the poset; more than one
reading means the poset is one of the exceptional coincidences.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .catalog import graph_isomorphism
from .chainlike import Form, chainlike_elements, parent, word_forms
from .coxeter import BwGraph
from .errors import ConsistencyError, ResourceError
from .isomorphism import are_isomorphic
from .quotient import QuotientPoset, enumerate_quotient
from .reconstruct import ReconstructionResult, decompose, reconstruct


@dataclass
class Reading:
    forms: dict[int, Form]
    result: ReconstructionResult
    graph: BwGraph


@dataclass
class FactorResolution:
    elements: list[int]
    readings: list[Reading]
    partial: bool = False

    @property
    def exception(self) -> bool:
        return len(self.readings) > 1


@dataclass
class BlindResolution:
    factors: list[FactorResolution]
    notes: list[str] = field(default_factory=list)

    @property
    def exception(self) -> bool:
        return any(f.exception for f in self.factors)

    @property
    def partial(self) -> bool:
        return any(f.partial for f in self.factors)

    def assignments(self, limit: int = 1000) -> list[dict[int, Form]]:
        """Form maps over the whole poset, one per combination of factor readings."""
        out = []
        for combo in itertools.product(*(f.readings for f in self.factors)):
            merged: dict[int, Form] = {}
            for factor, reading in zip(self.factors, combo):
                merged.update({factor.elements[w]: form for w, form in reading.forms.items()})
            out.append(merged)
            if len(out) >= limit:
                break
        return out


def _options(p: QuotientPoset, w: int, forms: dict[int, Form], kids: dict[int, list[int]]) -> list[Form]:
    if p.length[w] <= 2:
        return [Form.I]
    par = parent(p, w)
    pf = forms[par]
    grand = forms.get(parent(p, par)) if p.length[par] > 1 else None
    siblings = [forms[k] for k in kids.get(par, [])]
    if pf == Form.I:
        options = [Form.I, Form.II]
    elif pf == Form.II:
        options = [Form.II] + ([Form.III] if grand == Form.I else [])
    else:
        options = [Form.III]
    return [f for f in options if f == Form.I or f not in siblings]


def _candidates(p: QuotientPoset, chain: list[int]):
    forms: dict[int, Form] = {}
    kids: dict[int, list[int]] = {}

    def assign(i: int):
        if i == len(chain):
            yield dict(forms)
            return
        w = chain[i]
        par = parent(p, w)
        for f in _options(p, w, forms, kids):
            forms[w] = f
            kids.setdefault(par, []).append(w)
            yield from assign(i + 1)
            kids[par].pop()
            del forms[w]

    yield from assign(0)


def _pullback(p: QuotientPoset, q: QuotientPoset, mapping: dict[int, int]) -> dict[int, Form]:
    theirs = word_forms(q)
    return {w: theirs[mapping[w]] for w in chainlike_elements(p)}


def resolve_factor(p: QuotientPoset, budget: int = 5000) -> FactorResolution:
    """Every graph (up to isomorphism) whose quotient reproduces an irreducible poset."""
    chain = chainlike_elements(p)
    readings: list[Reading] = []
    partial = False
    for count, forms in enumerate(_candidates(p, chain)):
        if count >= budget:
            partial = True
            break
        try:
            result = reconstruct(p, forms)
        except ConsistencyError:
            continue
        graph = result.to_graph()
        if not graph.is_connected() or any(graph_isomorphism(graph, r.graph) for r in readings):
            continue
        try:
            q = enumerate_quotient(graph, p.max_length, max_elements=len(p))
        except ResourceError:
            continue
        if q.complete != p.complete:
            continue
        mapping = are_isomorphic(p, q)
        if mapping is None:
            continue
        readings.append(Reading(_pullback(p, q, mapping), result, graph))
    return FactorResolution(list(range(len(p))), readings, partial)


def resolve_forms_blind(p: QuotientPoset, budget: int = 5000) -> BlindResolution:
    """Forms of every chainlike of a blind poset, factor by factor."""
    if len(p) == 1:
        return BlindResolution([], ["trivial poset: no chainlike elements"])
    parts = decompose(p)
    factors, notes = [], list(parts.caveats)
    if not p.complete:
        notes.append(f"truncated at length {p.max_length}: readings agree with the input only up to that length")
    for comp in parts.components:
        sub = QuotientPoset(comp.poset.length, comp.poset.down, complete=comp.poset.complete,
                            max_length=comp.poset.max_length, labels=comp.poset.labels)
        factor = resolve_factor(sub, budget)
        factor.elements = list(comp.elements)
        if not factor.readings:
            notes.append(f"no reading found for the factor on atoms {comp.generators}")
        factors.append(factor)
    return BlindResolution(factors, notes)
