import json
from pathlib import Path

import pytest

from bruhat_quotients.catalog import a_an, b_an, b_bn, i2_a1, small_graphs, type_a, type_b
from bruhat_quotients.coxeter import braid_closure, parse_bw_graph
from bruhat_quotients.errors import ConsistencyError, ParseError, ResourceError
from bruhat_quotients.quotient import (
    QuotientPoset,
    compute_covers,
    enumerate_quotient,
    load_poset,
    poset_length,
    save_poset,
)
from fixtures import B3B2, BASKET_LINE, H3H2, graph
from oracles import CayleyOracle, subword_covers

GOLDEN = Path(__file__).parent / "golden"


def _words(p):
    return {p.words[u]: u for u in range(len(p))}


def test_h3h2_poset():
    p = enumerate_quotient(graph(H3H2), 12)
    assert p.complete and len(p) == 12
    assert max(p.length) == 10
    assert p.label(len(p) - 1) == "1232132321"
    w = p.index("2321")
    assert sorted(p.label(x) for x in p.up[w]) == ["12321", "32321"]


def test_h3h2_golden_bytes():
    p = enumerate_quotient(graph(H3H2), 20)
    assert save_poset(p) == (GOLDEN / "h3h2.json").read_text(encoding="utf-8")


def test_trivial_quotient():
    p = enumerate_quotient(type_a(3, []), 5)
    assert p.complete and len(p) == 1 and p.covers == []


def test_b4_a3_has_sixteen():
    p = enumerate_quotient(b_an(4), 20)
    assert p.complete and len(p) == 16


def test_b3_b2_chain():
    p = enumerate_quotient(graph(B3B2), 20)
    assert [p.label(i) for i in range(len(p))] == ["e", "1", "21", "321", "2321", "12321"]
    assert len(p.covers) == 5


@pytest.mark.parametrize("m", range(3, 11))
def test_dihedral_chain(m):
    p = enumerate_quotient(i2_a1(m), 30)
    assert p.complete and len(p) == m
    assert all(len(level) == 1 for level in p.levels)


@pytest.mark.parametrize("n", range(1, 9))
def test_a_chain(n):
    p = enumerate_quotient(a_an(n), 30)
    assert p.complete and len(p) == n + 1


@pytest.mark.parametrize("k", range(2, 6))
def test_b_chain_has_2k(k):
    p = enumerate_quotient(b_bn(k), 30)
    assert p.complete and len(p) == 2 * k
    assert all(len(level) == 1 for level in p.levels)


def test_atoms_are_black_nodes():
    g = type_b(4, ["1", "3"])
    p = enumerate_quotient(g, 30)
    assert sorted(p.words[a] for a in p.up[0]) == [(0,), (2,)]


def test_truncation_flags():
    p = enumerate_quotient(graph(BASKET_LINE), 5)
    assert not p.complete and p.max_length == 5
    assert max(p.length) == 5
    assert all(p.at_boundary(w) == (p.length[w] == 5) for w in range(len(p)))


def test_completeness_at_exact_bound():
    # the chain tops out at length 5, so the level beyond the bound is known to be empty
    assert enumerate_quotient(graph(B3B2), 5).complete
    assert not enumerate_quotient(graph(B3B2), 4).complete
    assert enumerate_quotient(graph(B3B2), 5, method="words").complete


def test_max_elements():
    with pytest.raises(ResourceError):
        enumerate_quotient(graph(BASKET_LINE), 30, max_elements=40)
    with pytest.raises(ResourceError):
        enumerate_quotient(graph(BASKET_LINE), 30, method="words", max_elements=40)


def test_word_route_closure_cap():
    with pytest.raises(ResourceError):
        enumerate_quotient(type_a(6, ["1"]), 20, method="words", cap=3)


@pytest.mark.parametrize("g", list(small_graphs(3, labels=(3, 4, 5, 6, 7), max_size=200)),
                         ids=lambda g: g.to_text().replace("\n", ";"))
def test_routes_agree(g):
    a = enumerate_quotient(g, 60)
    b = enumerate_quotient(g, 60, method="words")
    assert a.words == b.words and a.covers == b.covers
    assert compute_covers(a) == a.covers


def test_routes_agree_on_truncation():
    g = parse_bw_graph("nodes: a b c d\nblack: a\nedges: a b 3, b c inf, c d 4, a d 3")
    a = enumerate_quotient(g, 7)
    b = enumerate_quotient(g, 7, method="words")
    assert a.words == b.words and a.covers == b.covers


ORACLE_GRAPHS = [g for g in small_graphs(4, labels=(3, 4, 5, 6)) if len(enumerate_quotient(g, 80)) <= 60]


@pytest.mark.parametrize("g", ORACLE_GRAPHS, ids=lambda g: g.to_text().replace("\n", ";"))
def test_covers_match_oracles(g):
    p = enumerate_quotient(g, 80)
    oracle = CayleyOracle(g)
    reps, covers = oracle.quotient_covers()
    index = _words(p)
    assert set(reps) == set(index)
    mine = {(p.words[u], p.words[w]) for u, w in p.covers}
    assert mine == covers == subword_covers(oracle)


def test_oracle_sweep_is_not_empty():
    assert len(ORACLE_GRAPHS) >= 40


def test_covers_sorted_and_graded():
    p = enumerate_quotient(type_b(4, ["2"]), 30)
    keys = [(p.length[w], u, w) for u, w in p.covers]
    assert keys == sorted(keys)
    assert all(p.length[w] == p.length[u] + 1 for u, w in p.covers)
    assert all(p.down[w] for w in range(1, len(p)))


def test_subword_soundness():
    g = type_b(3, ["1", "3"])
    p = enumerate_quotient(g, 30)
    for u, w in p.covers:
        # fixing w's word, some reduced word of u must sit inside it
        big = p.words[w]
        assert any(_is_subword(small, big) for small in braid_closure(p.words[u], g.matrix))


def _is_subword(small, big):
    it = iter(big)
    return all(s in it for s in small)


def test_directed():
    p = enumerate_quotient(type_a(4, ["2"]), 30)
    assert all(p.above[u] & p.above[v] for u in range(len(p)) for v in range(len(p)))


def test_poset_length():
    p = enumerate_quotient(graph(H3H2), 12)
    assert poset_length(p, 0) == 0
    assert all(poset_length(p, a) == 1 for a in p.up[0])
    assert poset_length(p, len(p) - 1) == 10


def test_leq_and_bitsets():
    p = enumerate_quotient(graph(H3H2), 12)
    a, b = p.index("12321"), p.index("32321")
    assert not p.leq(a, b) and not p.leq(b, a)
    assert p.leq(p.index("21"), a) and p.leq(0, len(p) - 1)


def test_evaluate_and_act():
    g = graph(H3H2)
    p = enumerate_quotient(g, 12)
    assert p.evaluate(g.parse_word("2321")) == p.index("2321")
    # a white letter on the right is absorbed by the coset
    assert p.evaluate(g.parse_word("232132")) == p.index("2321")
    assert p.evaluate(g.parse_word("21232")) == p.index("21")
    assert p.act(0, p.index("2321")) == p.index("12321")


def test_save_load_round_trip():
    p = enumerate_quotient(graph(H3H2), 12)
    q = load_poset(save_poset(p))
    assert q.covers == p.covers and q.labels == p.labels and q.complete
    assert q.graph == p.graph


def test_load_without_graph():
    p = enumerate_quotient(graph(H3H2), 12)
    doc = json.loads(save_poset(p))
    del doc["graph"]
    q = load_poset(json.dumps(doc))
    assert q.graph is None and q.words is None and q.covers == p.covers


@pytest.mark.parametrize("doc", [
    {"levels": [[""], ["1"], ["21"]], "covers": [[0, 1], [0, 2]], "complete": True, "maxLength": 5},
    {"levels": [["", "x"]], "covers": [], "complete": True, "maxLength": 0},
    {"levels": [[""], ["1"]], "covers": [[0, 7]], "complete": True, "maxLength": 5},
    {"levels": [[""], ["1", "2"]], "covers": [[0, 1]], "complete": True, "maxLength": 5},
    {"levels": [[""]], "complete": True},
])
def test_load_errors(doc):
    with pytest.raises(ParseError):
        load_poset(json.dumps(doc))


def test_load_rejects_garbage():
    with pytest.raises(ParseError):
        load_poset("{not json")


def test_ungraded_poset_detected():
    bad = QuotientPoset([0, 1, 2, 2], [[], [0], [1], [0]], complete=True, max_length=5)
    with pytest.raises(ConsistencyError):
        poset_length(bad, 3)
