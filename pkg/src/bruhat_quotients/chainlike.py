"""Chainlike elements and the poset-intrinsic quantities built on them.

Everything here reads only the cover relation of a QuotientPoset, except
``classify_form`` which needs the source graph.  Quantities that climb the
poset report a Measure so that truncation is never mistaken for an answer.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Mapping

from .coxeter import INF, BwGraph, Word
from .errors import ConsistencyError
from .quotient import QuotientPoset


class Form(str, Enum):
    I = "I"
    II = "II"
    III = "III"
    UNKNOWN = "?"


@dataclass(frozen=True)
class Measure:
    """An exact value, a lower bound, or nothing (status 'unknown')."""

    value: float | None
    status: str

    @classmethod
    def exact(cls, value) -> "Measure":
        return cls(value, "exact")

    @classmethod
    def at_least(cls, value) -> "Measure":
        return cls(value, "at_least")

    @classmethod
    def unknown(cls) -> "Measure":
        return cls(None, "unknown")

    @property
    def is_exact(self) -> bool:
        return self.status == "exact"

    def __str__(self) -> str:
        if self.status == "unknown":
            return "?"
        text = "inf" if self.value == INF else str(int(self.value))
        return text if self.is_exact else "≥" + text

    def to_json(self):
        value = None if self.value is None else ("inf" if self.value == INF else int(self.value))
        return {"value": value, "status": self.status}


@dataclass(frozen=True)
class ChainlikeRecord:
    element: int
    parent: int | None
    form: Form
    expression: Word | None
    anchor: Word | None
    certain: bool = True


@dataclass(frozen=True)
class BasketRecord:
    u: int
    v: int
    kind: str


def semi_chainlike(p: QuotientPoset, w: int) -> bool:
    return len(p.down[w]) == 1


def parent(p: QuotientPoset, w: int) -> int:
    """w' for a semi-chainlike w (the identity for atoms)."""
    if not semi_chainlike(p, w):
        raise ValueError(f"{p.label(w)} is not semi-chainlike")
    return p.down[w][0]


def chainlike_elements(p: QuotientPoset) -> list[int]:
    chain = [False] * len(p)
    out = []
    for w in range(1, len(p)):
        if semi_chainlike(p, w) and (p.down[w][0] == 0 or chain[p.down[w][0]]):
            chain[w] = True
            out.append(w)
    return out


def classify_form(word: Word, graph: BwGraph) -> tuple[Form, Word] | None:
    """Match a reduced word against the three chainlike shapes.

    Returns the form and the underlying simple word s_k...s_0, or None.
    """
    if not word:
        return None
    rev = word[::-1]
    seen: list[int] = []
    for s in rev:
        if s in seen:
            break
        seen.append(s)
    k = len(seen) - 1
    chain = seen
    m = graph.m
    if chain[0] not in graph.black or any(s in graph.black for s in chain[1:]):
        return None
    for i in range(k + 1):
        for j in range(i + 1, k + 1):
            if (m(chain[i], chain[j]) >= 3) != (j == i + 1):
                return None
    anchor = tuple(reversed(chain))
    extra = rev[k + 1:]
    if not extra:
        return Form.I, anchor
    if k < 1 or extra[0] != chain[k - 1]:
        return None
    top = m(chain[k], chain[k - 1])
    lowest = k - len(extra)
    if lowest >= 0 and list(extra) == [chain[k - 1 - i] for i in range(len(extra))]:
        if top >= 4 and all(m(chain[i], chain[i + 1]) == 3 for i in range(lowest, k - 1)):
            return Form.II, anchor
        return None
    alternating = [chain[k - 1] if i % 2 == 0 else chain[k] for i in range(len(extra))]
    if len(extra) >= 2 and list(extra) == alternating and 4 <= len(extra) + 2 < top:
        return Form.III, anchor
    return None


def chainlikes(p: QuotientPoset, forms: Mapping[int, Form] | None = None) -> list[ChainlikeRecord]:
    """Chainlike records; forms come from the word model, ``forms``, or stay unknown."""
    out = []
    for w in chainlike_elements(p):
        par = p.down[w][0]
        expression = anchor = None
        form = Form.UNKNOWN
        if forms is not None:
            form = Form(forms.get(w, Form.UNKNOWN))
        elif p.words is not None and p.graph is not None:
            expression = p.words[w]
            match = classify_form(expression, p.graph)
            if match is None:
                raise ConsistencyError(f"chainlike {p.label(w)} matches no chainlike form")
            form, anchor = match
        out.append(ChainlikeRecord(w, par or None, form, expression, anchor, not p.at_boundary(w)))
    return out


def word_forms(p: QuotientPoset) -> dict[int, Form]:
    return {r.element: r.form for r in chainlikes(p)}


def join_length(p: QuotientPoset, u: int, v: int) -> Measure:
    """Least length of a common upper bound of u and v."""
    common = p.above[u] & p.above[v]
    if not common:
        if p.complete:
            raise ConsistencyError("complete poset without a common upper bound")
        return Measure.unknown()
    first = (common & -common).bit_length() - 1
    return Measure.exact(p.length[first])


def equivalent(p: QuotientPoset, u: int, v: int) -> bool | None:
    """The ~ relation on chainlikes; None when truncation hides an upper bound."""
    lengths = [join_length(p, u, v), join_length(p, parent(p, u), v), join_length(p, u, parent(p, v))]
    if any(not m.is_exact for m in lengths):
        return None
    return lengths[0].value == lengths[1].value == lengths[2].value


def _climb(p: QuotientPoset, current: set[int], index: int) -> Measure:
    """Iterate 'all elements covering every member' until a singleton appears."""
    while True:
        if any(p.at_boundary(x) for x in current):
            return Measure.at_least(index + 1)
        sets = [set(p.up[x]) for x in current]
        nxt = set.intersection(*sets)
        index += 1
        if len(nxt) == 1:
            return Measure.exact(index)
        if not nxt:
            if p.complete:
                raise ConsistencyError("common-cover iteration ran empty")
            return Measure.unknown()
        current = nxt


def sibling_bond(p: QuotientPoset, u: int, v: int) -> Measure:
    """Bond between the leftmost letters of chainlikes u, v sharing a parent."""
    if u == v or parent(p, u) != parent(p, v):
        raise ValueError("sibling_bond needs distinct chainlikes with a common parent")
    return _climb(p, {u, v}, 1)


def minimal_upper_bounds(p: QuotientPoset, u: int, x: int) -> list[int] | None:
    total = join_length(p, u, x)
    if not total.is_exact:
        return None
    bits = p.above[u] & p.above[x] & p.level_masks[int(total.value)]
    return [i for i in range(bits.bit_length()) if bits >> i & 1]


def _check_detector_pair(p: QuotientPoset, u: int, x: int, strict: bool = True):
    pu, px = parent(p, u), parent(p, x)
    if not p.leq(px, pu) or (strict and px == pu):
        raise ValueError("detection needs x' < u'")
    if p.leq(x, u):
        raise ValueError("detection needs x not below u")
    return pu


def detects(p: QuotientPoset, u: int, x: int) -> bool | None:
    pu = _check_detector_pair(p, u, x)
    upper, lower = minimal_upper_bounds(p, u, x), minimal_upper_bounds(p, pu, x)
    if upper is None or lower is None:
        return None
    return len(upper) == len(lower) + 1


def detection_pivot(p: QuotientPoset, u: int, x: int) -> tuple[int, tuple[int, int]]:
    """The element of X(u', x) covered by two members of X(u, x), and that pair."""
    upper = set(minimal_upper_bounds(p, u, x) or ())
    lower = minimal_upper_bounds(p, parent(p, u), x) or ()
    hits = [(w, sorted(upper.intersection(p.up[w]))) for w in lower]
    hits = [(w, pair) for w, pair in hits if len(pair) >= 2]
    if len(hits) != 1 or len(hits[0][1]) != 2:
        raise ConsistencyError(f"no unique pivot for {p.label(u)} detected by {p.label(x)}")
    w, pair = hits[0]
    return w, (pair[0], pair[1])


def detector_bond(p: QuotientPoset, u: int, x: int) -> Measure:
    """Bond between leftmost letters of u and x, for x' <= u' and x not below u."""
    if parent(p, x) == parent(p, u):
        return sibling_bond(p, u, x)
    seen = detects(p, u, x)
    if seen is None:
        return Measure.unknown()
    if not seen:
        return Measure.exact(2)
    _, pair = detection_pivot(p, u, x)
    return _climb(p, set(pair), 2)


def semichain_depth(p: QuotientPoset, u: int, v: int) -> Measure:
    """First i with no semi-chainlike element hanging i steps above the common cover."""
    if sibling_bond(p, u, v) != Measure.exact(2):
        raise ValueError("semichain_depth needs commuting siblings")
    current = set(p.up[u]) & set(p.up[v])
    index = 0
    while True:
        if any(p.at_boundary(x) for x in current):
            return Measure.at_least(index + 1)
        current = {w for x in current for w in p.up[x] if semi_chainlike(p, w)}
        index += 1
        if not current:
            return Measure.exact(index)


def detector_pairs(p: QuotientPoset, elements: Iterable[int] | None = None) -> list[tuple[int, int]]:
    """Chainlike pairs (u, x) with x' < u' and x not below u, in report order."""
    chain = list(chainlike_elements(p) if elements is None else elements)
    out = []
    for u in chain:
        pu = parent(p, u)
        for x in chain:
            px = parent(p, x)
            if px != pu and p.leq(px, pu) and not p.leq(x, u):
                out.append((u, x))
    return sorted(out, key=lambda e: (p.length[e[0]], p.length[e[1]], e))


def sibling_pairs(p: QuotientPoset, elements: Iterable[int] | None = None) -> list[tuple[int, int]]:
    chain = list(chainlike_elements(p) if elements is None else elements)
    out = [(u, v) for u in chain for v in chain if u < v and parent(p, u) == parent(p, v)]
    return sorted(out, key=lambda e: (p.length[e[0]], p.length[e[1]], e))


def find_baskets(p: QuotientPoset, forms: Mapping[int, Form] | None = None) -> list[BasketRecord]:
    if forms is None:
        forms = {r.element: r.form for r in chainlikes(p)}
    chain = [w for w in chainlike_elements(p) if p.length[w] >= 2]
    out = []
    for i, u in enumerate(chain):
        for v in chain[i + 1:]:
            pu, pv = parent(p, u), parent(p, v)
            if pu == pv or p.length[u] != p.length[v] or parent(p, pu) != parent(p, pv):
                continue
            if detects(p, v, pu) and detects(p, u, pv):
                kind = f"{Form(forms.get(u, Form.UNKNOWN)).value}/{Form(forms.get(v, Form.UNKNOWN)).value}"
                out.append(BasketRecord(u, v, kind))
    return sorted(out, key=lambda b: (p.length[b.u], p.length[b.v], b.u, b.v))


def analysis_report(p: QuotientPoset, forms: Mapping[int, Form] | None = None) -> dict:
    records = chainlikes(p, forms)
    form_of = {r.element: r.form for r in records}
    lab = p.label
    report = {
        "elements": len(p),
        "complete": p.complete,
        "maxLength": p.max_length,
        "chainlikes": [
            {
                "element": r.element,
                "word": lab(r.element),
                "parent": r.parent,
                "form": r.form.value,
                "anchor": p.graph.format_word(r.anchor) if r.anchor is not None and p.graph else None,
                "certain": r.certain,
            }
            for r in records
        ],
        "baskets": [{"u": b.u, "v": b.v, "words": [lab(b.u), lab(b.v)], "kind": b.kind}
                    for b in find_baskets(p, form_of)],
    }
    detectors = []
    for u, x in detector_pairs(p):
        seen = detects(p, u, x)
        detectors.append({"u": u, "x": x, "words": [lab(u), lab(x)], "detects": seen,
                          "bond": detector_bond(p, u, x).to_json()})
    report["detectors"] = detectors
    siblings = []
    for u, v in sibling_pairs(p):
        bond = sibling_bond(p, u, v)
        depth = semichain_depth(p, u, v).to_json() if bond == Measure.exact(2) else None
        siblings.append({"u": u, "v": v, "words": [lab(u), lab(v)], "bond": bond.to_json(), "depth": depth})
    report["siblings"] = siblings
    return report
