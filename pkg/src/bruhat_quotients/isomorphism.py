"""Poset isomorphism search, the explicit B/D map, and the pair classification table."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

from .catalog import finite_type, graph_isomorphism, quotient_size, type_a, type_b, type_d, type_h
from .chainlike import chainlike_elements
from .coxeter import INF, BwGraph, Word
from .errors import ConsistencyError, ResourceError
from .quotient import QuotientPoset, enumerate_quotient

CASE_NUMBERS = {
    "I2n-A": 1, "Bn-A2n": 2, "Bn-I2": 3, "BnA-DA": 4, "H3-D6": 5,
    "trivial": 6, "graph-isomorphic": 7,
}

_MIX = np.uint64(0x9E3779B97F4A7C15)


def _scramble(x: np.ndarray) -> np.ndarray:
    # splitmix64 finaliser: a fixed, well-spread hash of colour ids
    z = x.astype(np.uint64) * _MIX
    z ^= z >> np.uint64(30)
    z *= np.uint64(0xBF58476D1CE4E5B9)
    z ^= z >> np.uint64(27)
    z *= np.uint64(0x94D049BB133111EB)
    z ^= z >> np.uint64(31)
    return z


class _Joint:
    """Disjoint union of two posets for simultaneous colour refinement."""

    def __init__(self, p: QuotientPoset, q: QuotientPoset):
        self.split = len(p)
        self.size = len(p) + len(q)
        lo, hi = [], []
        for offset, poset in ((0, p), (len(p), q)):
            for u, w in poset.covers:
                lo.append(u + offset)
                hi.append(w + offset)
        self.lo = np.array(lo, dtype=np.int64)
        self.hi = np.array(hi, dtype=np.int64)
        length = np.array(p.length + q.length, dtype=np.int64)
        down = np.bincount(self.hi, minlength=self.size)
        up = np.bincount(self.lo, minlength=self.size)
        self.initial = self._relabel(np.stack([length, down, up], axis=1).astype(np.uint64))

    @staticmethod
    def _relabel(rows: np.ndarray) -> np.ndarray:
        _, inverse = np.unique(rows, axis=0, return_inverse=True)
        return inverse.reshape(-1).astype(np.int64)

    def refine(self, colours: np.ndarray) -> np.ndarray:
        count = int(colours.max()) + 1
        while True:
            weight = _scramble(colours)
            below = np.zeros(self.size, dtype=np.uint64)
            above = np.zeros(self.size, dtype=np.uint64)
            np.add.at(below, self.hi, weight[self.lo])
            np.add.at(above, self.lo, weight[self.hi])
            rows = np.stack([colours.astype(np.uint64), below, above], axis=1)
            colours = self._relabel(rows)
            new_count = int(colours.max()) + 1
            if new_count == count:
                return colours
            count = new_count

    def balanced(self, colours: np.ndarray) -> bool:
        n = int(colours.max()) + 1
        left = np.bincount(colours[: self.split], minlength=n)
        right = np.bincount(colours[self.split:], minlength=n)
        return bool(np.array_equal(left, right))


def verify_isomorphism(p: QuotientPoset, q: QuotientPoset, mapping: dict[int, int]) -> bool:
    """Bijection check plus covers-to-covers in both directions."""
    if len(p) != len(q) or len(mapping) != len(p) or sorted(mapping.values()) != list(range(len(q))):
        return False
    if any(p.length[a] != q.length[b] for a, b in mapping.items()):
        return False
    image = {(mapping[u], mapping[w]) for u, w in p.covers}
    return image == set(q.covers)


def _compatible(p: QuotientPoset, q: QuotientPoset) -> bool:
    if p.complete != q.complete or (not p.complete and p.max_length != q.max_length):
        raise ValueError("compare two complete posets or two truncated at the same length")
    if len(p) != len(q) or len(p.covers) != len(q.covers):
        return False
    return [len(l) for l in p.levels] == [len(l) for l in q.levels]


def _search(joint: _Joint, colours: np.ndarray, budget: list[int]) -> Iterator[dict[int, int]]:
    colours = joint.refine(colours)
    if not joint.balanced(colours):
        return
    budget[0] -= 1
    if budget[0] < 0:
        raise ResourceError("isomorphism search budget exhausted")
    left = colours[: joint.split]
    counts = np.bincount(left)
    crowded = np.flatnonzero(counts > 1)
    if crowded.size == 0:
        where = {int(c): i for i, c in enumerate(colours[joint.split:])}
        yield {a: where[int(c)] for a, c in enumerate(left)}
        return
    target = crowded[np.argmin(counts[crowded])]
    a = int(np.flatnonzero(left == target)[0])
    fresh = int(colours.max()) + 1
    for b in np.flatnonzero(colours[joint.split:] == target):
        branch = colours.copy()
        branch[a] = fresh
        branch[joint.split + int(b)] = fresh
        yield from _search(joint, branch, budget)


def isomorphisms(p: QuotientPoset, q: QuotientPoset, budget: int = 200_000) -> Iterator[dict[int, int]]:
    """Verified cover-preserving bijections p -> q, found by refinement and backtracking."""
    if not _compatible(p, q):
        return
    joint = _Joint(p, q)
    for mapping in _search(joint, joint.initial, [budget]):
        if verify_isomorphism(p, q, mapping):
            yield mapping


def are_isomorphic(p: QuotientPoset, q: QuotientPoset, budget: int = 200_000) -> dict[int, int] | None:
    return next(isomorphisms(p, q, budget), None)


@dataclass
class Automorphism:
    mapping: dict[int, int]
    moves_chainlike: bool


@dataclass
class AutomorphismSearch:
    automorphisms: list[Automorphism]
    partial: bool

    @property
    def moves_chainlikes(self) -> bool:
        return any(a.moves_chainlike for a in self.automorphisms)


def find_automorphisms(p: QuotientPoset, limit: int = 10_000) -> AutomorphismSearch:
    """All automorphisms of p, or the first ``limit`` of them with ``partial`` set."""
    chain = chainlike_elements(p)
    found: list[Automorphism] = []
    try:
        for mapping in isomorphisms(p, p, budget=50 * limit):
            found.append(Automorphism(mapping, any(mapping[c] != c for c in chain)))
            if len(found) >= limit:
                return AutomorphismSearch(found, True)
    except ResourceError:
        return AutomorphismSearch(found, True)
    return AutomorphismSearch(found, False)


def explicit_iso_B_to_D(n: int) -> dict[Word, Word]:
    """The map from (B_n, A_{n-1}) to (D_{n+1}, A_n) on reduced words.

    Words use generator indices of ``b_an(n)`` and ``d_an(n)``.  A subset
    k_1 > ... > k_m of {1..n} gives the B-word (s_{k_m}..s_1)...(s_{k_1}..s_1);
    letters s_i with i > 1 become t_i, and the s_1 letters become t_1, t_0,
    t_1, ... reading from the right.
    """
    if n < 3:
        raise ValueError("the B/D correspondence needs n >= 3")
    out: dict[Word, Word] = {}
    for m in range(n + 1):
        for subset in itertools.combinations(range(n, 0, -1), m):
            blocks = [list(range(k, 0, -1)) for k in reversed(subset)]
            b_letters = [i for block in blocks for i in block]
            d_letters = []
            ones = 0
            for i in reversed(b_letters):
                if i == 1:
                    d_letters.append(1 if ones % 2 == 0 else 0)
                    ones += 1
                else:
                    d_letters.append(i)
            out[tuple(i - 1 for i in b_letters)] = tuple(reversed(d_letters))
    return out


def _word_map_to_indices(mapping: dict[Word, Word], p: QuotientPoset, q: QuotientPoset) -> dict[int, int]:
    out = {}
    for a, b in mapping.items():
        x, y = p.evaluate(a), q.evaluate(b)
        if p.length[x] != len(a) or q.length[y] != len(b):
            raise ConsistencyError("word map hit a non-reduced word")
        out[x] = y
    return out


@dataclass
class Verdict:
    case: str
    parameters: dict = field(default_factory=dict)
    witness: dict[int, int] | None = None
    scope: str = "complete"
    components: list["Verdict"] = field(default_factory=list)

    @property
    def isomorphic(self) -> bool:
        return self.case != "not-isomorphic"

    @property
    def case_number(self) -> int | None:
        return CASE_NUMBERS.get(self.case)

    def to_json(self) -> dict:
        doc = {
            "case": self.case,
            "parameters": self.parameters,
            "witness": None if self.witness is None else [[a, b] for a, b in sorted(self.witness.items())],
            "scope": self.scope,
        }
        if self.case_number is not None:
            doc["caseNumber"] = self.case_number
        if self.components:
            doc["components"] = [c.to_json() for c in self.components]
        return doc


def _shape(g: BwGraph) -> tuple[str, int] | None:
    """Recognise the graphs that appear in the exceptional correspondences."""
    if len(g.black) != 1:
        return None
    kind = finite_type(g)
    if kind is None:
        return None
    n = kind.rank

    def same(h: BwGraph) -> bool:
        return graph_isomorphism(g, h) is not None

    if kind.family == "A" and same(type_a(n, ["1"])):
        return "chain-A", n + 1
    if kind.family == "I":
        return "chain-I", kind.bond
    if kind.family == "B" and n >= 3:
        if same(type_b(n, [str(n)])):
            return "chain-B", 2 * n
        if same(type_b(n, ["1"])):
            return "BA", n
    if kind.family == "D" and same(type_d(n, ["1"])):
        return "DA", n - 1
    if kind.family == "H" and n == 3 and same(type_h(3, ["3"])):
        return "H3H2", 0
    if kind.family == "D" and n == 6 and same(type_d(6, ["5"])):
        return "D6D5", 0
    return None


def exceptional_cases(g: BwGraph) -> list[int]:
    """Numbers of the correspondences a connected pair can take part in (7 always applies)."""
    if not g.black:
        return [6]
    shape = _shape(g)
    cases = []
    if shape is not None:
        kind, n = shape
        if kind == "chain-A" and n >= 4:
            cases.append(1)
        if kind == "chain-A" and n % 2 == 0 and n >= 6:
            cases.append(2)
        if kind == "chain-I" and n >= 4:
            cases.append(1)
        if kind == "chain-I" and n % 2 == 0 and n >= 6:
            cases.append(3)
        if kind == "chain-B":
            cases += [2, 3]
        if kind in ("BA", "DA"):
            cases.append(4)
        if kind in ("H3H2", "D6D5"):
            cases.append(5)
    return cases + [7]


def table_case(g: BwGraph, h: BwGraph) -> tuple[str, dict]:
    """Classification of two connected pairs by the correspondence table alone."""
    if not g.black and not h.black:
        return "trivial", {}
    if not g.black or not h.black:
        return "not-isomorphic", {}
    sigma = graph_isomorphism(g, h)
    if sigma is not None:
        return "graph-isomorphic", {"generators": {g.names[a]: h.names[b] for a, b in sorted(sigma.items())}}
    a, b = _shape(g), _shape(h)
    if a is None or b is None:
        return "not-isomorphic", {}
    (ka, na), (kb, nb) = sorted([a, b])
    if ka.startswith("chain") and kb.startswith("chain"):
        if na != nb:
            return "not-isomorphic", {}
        pair = {ka, kb}
        if pair == {"chain-A", "chain-I"}:
            return "I2n-A", {"n": na}
        if pair == {"chain-A", "chain-B"}:
            return "Bn-A2n", {"n": na // 2}
        if pair == {"chain-B", "chain-I"}:
            return "Bn-I2", {"n": na // 2}
        return "not-isomorphic", {}
    if (ka, kb) == ("BA", "DA") and na == nb:
        return "BnA-DA", {"n": na}
    if (ka, kb) == ("D6D5", "H3H2"):
        return "H3-D6", {}
    return "not-isomorphic", {}


def _generator_witness(g: BwGraph, h: BwGraph, p: QuotientPoset, q: QuotientPoset) -> dict[int, int]:
    sigma = graph_isomorphism(g, h)
    return {x: q.evaluate(tuple(sigma[s] for s in p.words[x])) for x in range(len(p))}


def _table_witness(case: str, g: BwGraph, h: BwGraph, p: QuotientPoset, q: QuotientPoset) -> dict[int, int] | None:
    if case == "trivial":
        return {0: 0}
    if case == "graph-isomorphic":
        return _generator_witness(g, h, p, q)
    if case in ("I2n-A", "Bn-A2n", "Bn-I2"):
        return {x: x for x in range(len(p))}
    if case == "BnA-DA":
        flip = _shape(g)[0] == "DA"
        bg, dg = (h, g) if flip else (g, h)
        n = _shape(bg)[1]
        pb, pd = enumerate_quotient(type_b(n, ["1"]), 4 * n * n), enumerate_quotient(type_d(n + 1, ["1"]), 4 * n * n)
        core = _word_map_to_indices(explicit_iso_B_to_D(n), pb, pd)
        into_b = _generator_witness(bg, type_b(n, ["1"]), q if flip else p, pb)
        from_d = _generator_witness(type_d(n + 1, ["1"]), dg, pd, p if flip else q)
        forward = {x: from_d[core[y]] for x, y in into_b.items()}
        return {v: k for k, v in forward.items()} if flip else forward
    return None


def _bound_for(g: BwGraph, h: BwGraph, bound: int) -> tuple[int, str]:
    if quotient_size(g) is not None and quotient_size(h) is not None:
        return max(_max_length(g), _max_length(h)), "complete"
    return bound, f"truncated:{bound}"


def _max_length(g: BwGraph) -> int:
    # the length of the longest coset representative never exceeds the number of reflections
    total = 0
    for comp in g.components():
        kind = finite_type(g, comp)
        if kind is not None:
            total += _reflections(kind)
    return total


def _reflections(kind) -> int:
    n = kind.rank
    return {
        "A": n * (n + 1) // 2, "B": n * n, "D": n * (n - 1), "I": kind.bond,
        "E": {6: 36, 7: 63, 8: 120}.get(n, 0), "F": 24, "H": {3: 15, 4: 60}.get(n, 0),
    }[kind.family]


def classify_pair(g: BwGraph, h: BwGraph, bound: int = 14, search_limit: int = 5000) -> Verdict:
    """Verdict for two bw-graphs, cross-checked by search whenever the quotients are small."""
    if not g.is_connected() or not h.is_connected():
        return _classify_reducible(g, h, bound, search_limit)
    case, params = table_case(g, h)
    max_len, scope = _bound_for(g, h, bound)
    try:
        p = enumerate_quotient(g, max_len, max_elements=search_limit)
        q = enumerate_quotient(h, max_len, max_elements=search_limit)
    except ResourceError:
        p = q = None
    if p is None:
        if case == "not-isomorphic":
            return Verdict(case, params, None, scope)
        raise ResourceError("quotients too large to build a witness")
    if p.complete != q.complete:
        if case != "not-isomorphic":
            raise ConsistencyError(f"table says {case} for a finite and an infinite quotient")
        return Verdict(case, params, None, scope)
    found = are_isomorphic(p, q) if _compatible(p, q) else None
    if case == "not-isomorphic":
        if found is not None and scope == "complete":
            raise ConsistencyError(f"table says not isomorphic, search found a witness ({scope})")
        return Verdict(case, params, None, scope)
    if scope == "complete" and found is None:
        raise ConsistencyError(f"table says {case}, search found no isomorphism")
    witness = _table_witness(case, g, h, p, q) or found
    if witness is None or not verify_isomorphism(p, q, witness):
        raise ConsistencyError(f"witness for {case} failed verification")
    return Verdict(case, params, witness, scope)


def _nontrivial_parts(g: BwGraph) -> tuple[list[BwGraph], list[list[str]]]:
    parts, trivial = [], []
    for comp in g.components():
        if g.black & set(comp):
            parts.append(g.subgraph(comp))
        else:
            trivial.append([g.names[s] for s in comp])
    return parts, trivial


def _classify_reducible(g: BwGraph, h: BwGraph, bound: int, search_limit: int) -> Verdict:
    gp, gt = _nontrivial_parts(g)
    hp, ht = _nontrivial_parts(h)
    if len(gp) != len(hp):
        return Verdict("not-isomorphic", {"reason": "different numbers of non-trivial factors"})
    table = [[classify_pair(a, b, bound, search_limit) for b in hp] for a in gp]
    used: list[int] = []

    def match(i: int) -> bool:
        if i == len(gp):
            return True
        for j in range(len(hp)):
            if j not in used and table[i][j].isomorphic:
                used.append(j)
                if match(i + 1):
                    return True
                used.pop()
        return False

    if not match(0):
        return Verdict("not-isomorphic", {"reason": "no factor matching"})
    components = []
    for i, j in enumerate(used):
        v = table[i][j]
        v.parameters = {**v.parameters, "left": list(gp[i].names), "right": list(hp[j].names)}
        components.append(v)
    if gt or ht:
        components.append(Verdict("trivial", {"left": sorted(sum(gt, [])), "right": sorted(sum(ht, []))},
                                  {0: 0}))
    scope = "complete" if all(c.scope == "complete" for c in components) else f"truncated:{bound}"
    witness = None
    max_len = bound if scope != "complete" else max(_max_length(g), _max_length(h))
    try:
        p = enumerate_quotient(g, max_len, max_elements=search_limit)
        q = enumerate_quotient(h, max_len, max_elements=search_limit)
        witness = are_isomorphic(p, q)
        if witness is None:
            raise ConsistencyError("factors match but the product posets are not isomorphic")
    except ResourceError:
        pass
    return Verdict("reducible", {"factors": len(components)}, witness, scope, components)


@dataclass
class BasketTemplate:
    """Generators s_0..s_2k of a basket-case graph, as indices."""

    chain: list[int]

    @property
    def k(self) -> int:
        return len(self.chain) // 2

    def swap(self) -> dict[int, int]:
        n = len(self.chain) - 1
        return {s: self.chain[n - i] for i, s in enumerate(self.chain)}


def match_basket_template(g: BwGraph) -> BasketTemplate | None:
    if len(g.black) != 1:
        return None
    (start,) = g.black
    for k in range(1, g.size // 2 + 1):
        for chain in _template_chains(g, start, k):
            if _template_ok(g, chain, k):
                return BasketTemplate(chain)
    return None


def _template_chains(g: BwGraph, start: int, k: int) -> Iterator[list[int]]:
    wanted = [3] * (k - 1) + [INF, INF] + [3] * (k - 1)

    def grow(chain):
        if len(chain) == 2 * k + 1:
            yield list(chain)
            return
        bond = wanted[len(chain) - 1]
        for t in g.neighbours(chain[-1]):
            if t not in chain and g.m(chain[-1], t) == bond:
                yield from grow(chain + [t])

    yield from grow([start])


def _template_ok(g: BwGraph, chain: list[int], k: int) -> bool:
    m = g.m
    index = {s: i for i, s in enumerate(chain)}
    for a, b in itertools.combinations(range(len(chain)), 2):
        if b != a + 1 and m(chain[a], chain[b]) != 2:
            return False
    for s in range(g.size):
        if s in index:
            continue
        for i, t in enumerate(chain):
            if i not in (k - 1, k, k + 1) and m(s, t) != 2:
                return False
        left, right = m(s, chain[k - 1]), m(s, chain[k + 1])
        if left != right or left not in (2, INF):
            return False
    return True


def basket_automorphism(g: BwGraph, bound: int) -> tuple[QuotientPoset, dict[int, int]]:
    """The branch-swapping automorphism of a basket-case quotient, on its truncation at ``bound``."""
    template = match_basket_template(g)
    if template is None:
        raise ValueError("graph does not match the basket-case template")
    p = enumerate_quotient(g, bound)
    k = template.k
    base = tuple(reversed(template.chain[: k + 1]))
    pivot = p.index(base)
    swap = template.swap()
    mapping = {}
    for w in range(len(p)):
        word = p.words[w]
        if w == pivot or not p.leq(pivot, w):
            mapping[w] = w
            continue
        head, tail = word[: len(word) - k], word[len(word) - k:]
        image = p.evaluate(tuple(swap.get(s, s) for s in head) + tail)
        if p.length[image] != p.length[w]:
            raise ConsistencyError("basket map changed a length")
        mapping[w] = image
    if not verify_isomorphism(p, p, mapping):
        raise ConsistencyError("basket map is not a poset automorphism")
    return p, mapping

