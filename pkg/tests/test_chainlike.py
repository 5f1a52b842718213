import pytest

from bruhat_quotients.catalog import a_an, quotient_size, small_graphs, type_a, type_b, type_d, type_e
from bruhat_quotients.chainlike import (
    Form,
    Measure,
    chainlike_elements,
    chainlikes,
    classify_form,
    detection_pivot,
    detector_bond,
    detector_pairs,
    detects,
    equivalent,
    find_baskets,
    join_length,
    minimal_upper_bounds,
    parent,
    semi_chainlike,
    semichain_depth,
    sibling_bond,
    sibling_pairs,
    word_forms,
)
from bruhat_quotients.coxeter import braid_closure, parse_bw_graph
from bruhat_quotients.errors import ResourceError
from bruhat_quotients.quotient import enumerate_quotient
from fixtures import (
    BASKET_LINE,
    D6D5,
    D8_TREE,
    H3H2,
    LABELLED_CHAIN,
    SIX_LABEL,
    SQUARE_OVER_CHAIN,
    THREE_STAR,
    TWO_CLUSTERS,
    graph,
)
from oracles import CayleyOracle, longest_common_subsequence


def _finite_catalog(limit=3000):
    out = []
    for g in small_graphs(4, labels=(3, 4, 5, 6)):
        try:
            out.append(enumerate_quotient(g, 200, max_elements=limit))
        except ResourceError:
            pass
    return out


CATALOG = _finite_catalog()


def labels(p, items):
    return [p.label(i) for i in items]


def test_tree_chainlikes():
    p = enumerate_quotient(graph(D8_TREE), 30)
    assert sorted(labels(p, chainlike_elements(p))) == sorted(
        ["0", "10", "210", "3210", "40", "540", "6540", "7540"])
    assert set(word_forms(p).values()) == {Form.I}


def test_total_order_all_chainlike():
    p = enumerate_quotient(a_an(4), 10)
    assert len(chainlike_elements(p)) == 4 == len(p) - 1
    assert find_baskets(p) == []


def test_labelled_chain_forms():
    p = enumerate_quotient(graph(LABELLED_CHAIN), 10)
    forms = {p.label(w): f for w, f in word_forms(p).items()}
    assert {w for w, f in forms.items() if f == Form.I} == {"0", "10", "210", "3210", "43210", "543210"}
    assert {w for w, f in forms.items() if f == Form.II} == {"010", "23210", "123210"}
    assert {w for w, f in forms.items() if f == Form.III} == {"323210", "2323210"}


def test_classify_form_patterns():
    g = graph(LABELLED_CHAIN)
    assert classify_form(g.parse_word("543210"), g) == (Form.I, g.parse_word("543210"))
    assert classify_form(g.parse_word("123210"), g) == (Form.II, g.parse_word("3210"))
    assert classify_form(g.parse_word("2323210"), g) == (Form.III, g.parse_word("3210"))
    assert classify_form(g.parse_word("1210"), g) is None
    assert classify_form((), g) is None


def test_third_form_needs_room_below_bond():
    # 3232...: with m(2,3)=6 the alternation stops one short of the bond
    g = graph(LABELLED_CHAIN)
    assert classify_form(g.parse_word("23232323210"), g) is None


def test_records_carry_expression_and_parent():
    p = enumerate_quotient(graph(LABELLED_CHAIN), 10)
    rec = {p.label(r.element): r for r in chainlikes(p)}
    assert rec["0"].parent is None
    assert p.label(rec["123210"].parent) == "23210"
    assert p.graph.format_word(rec["2323210"].anchor) == "3210"
    assert not rec["2323210"].certain or p.max_length > 7


def test_blind_records_are_unknown():
    p = enumerate_quotient(graph(H3H2), 12)
    p.words = None
    assert {r.form for r in chainlikes(p, {})} == {Form.UNKNOWN}


@pytest.mark.parametrize("p", CATALOG, ids=lambda p: p.graph.to_text().replace("\n", ";"))
def test_chainlike_invariants(p):
    g = p.graph
    for w in chainlike_elements(p):
        # unique reduced word, beginning with the leftmost letter
        assert braid_closure(p.words[w], g.matrix) == {p.words[w]}
        assert classify_form(p.words[w], g) is not None
    for w in range(1, len(p)):
        # closures of long words (H4 reaches length 60) are too big to list
        if not semi_chainlike(p, w) or p.length[w] > 12:
            continue
        closure = braid_closure(p.words[w], g.matrix)
        assert len({word[0] for word in closure}) == 1
        for word in closure:
            if len(word) >= 2 and word[1] in word[2:]:
                assert word[0] in word[2:]


def _simple_words(g):
    """Induced paths from a black node through white nodes, written leftmost-first."""
    out = []

    def grow(path):
        out.append(tuple(reversed(path)))
        for t in g.neighbours(path[-1]):
            if t in g.black or t in path:
                continue
            if all(g.m(t, s) == 2 for s in path[:-1]):
                grow(path + [t])

    for b in sorted(g.black):
        grow([b])
    return sorted(out)


@pytest.mark.parametrize("g", [type_a(5, ["3"]), type_d(5, ["1"]), type_d(5, ["0"]), type_e(6, ["2"]),
                               type_a(4, ["1", "4"]), graph(D8_TREE), graph(SQUARE_OVER_CHAIN)],
                         ids=lambda g: g.to_text().replace("\n", ";"))
def test_simply_laced_chainlikes_are_simple(g):
    bound = 30 if quotient_size(g) else 12
    p = enumerate_quotient(g, bound)
    interior = [w for w in chainlike_elements(p) if not p.at_boundary(w)]
    expected = [w for w in _simple_words(g) if len(w) < bound]
    assert sorted(p.words[w] for w in interior) == expected


def test_chainlikes_match_cayley_oracle():
    for p in CATALOG[:40]:
        oracle = CayleyOracle(p.graph)
        reps, covers = oracle.quotient_covers()
        below = {}
        for u, w in covers:
            below.setdefault(w, []).append(u)
        chain = {()}
        for w in sorted(reps, key=len):
            if w and len(below.get(w, [])) == 1 and below[w][0] in chain:
                chain.add(w)
        assert {p.words[w] for w in chainlike_elements(p)} == chain - {()}


def test_join_length_examples():
    p = enumerate_quotient(graph(H3H2), 12)
    u, v = p.index("12321"), p.index("32321")
    assert join_length(p, u, v) == Measure.exact(6)
    assert join_length(p, u, u) == Measure.exact(5)
    assert join_length(p, 0, v) == Measure.exact(5)


@pytest.mark.parametrize("p", CATALOG[::3], ids=lambda p: p.graph.to_text().replace("\n", ";"))
def test_join_length_formula(p):
    chain = chainlike_elements(p)
    for u in chain:
        for v in chain:
            lcs = longest_common_subsequence(p.words[u], p.words[v])
            assert join_length(p, u, v).value == p.length[u] + p.length[v] - lcs


def test_join_length_unknown_on_truncation():
    p = enumerate_quotient(graph(BASKET_LINE), 3)
    assert join_length(p, p.index("abc"), p.index("cbc")).status == "unknown"


def test_two_clusters_equivalence_classes():
    p = enumerate_quotient(graph(TWO_CLUSTERS), 7)
    i = p.index
    assert equivalent(p, i("20"), i("21"))
    assert not equivalent(p, i("20"), i("60"))
    assert equivalent(p, i("320"), i("341"))
    assert equivalent(p, i("9760"), i("9760"))


def test_square_over_chain_equivalence():
    p = enumerate_quotient(graph(SQUARE_OVER_CHAIN), 10)
    assert equivalent(p, p.index("53210"), p.index("54210"))
    assert not equivalent(p, p.index("3210"), p.index("4210"))


@pytest.mark.parametrize("g", [type_a(5, ["3"]), type_d(5, ["1"]), type_e(6, ["2"]), graph(D8_TREE)],
                         ids=lambda g: g.to_text().replace("\n", ";"))
def test_equivalence_is_leftmost_letter(g):
    p = enumerate_quotient(g, 30)
    simple = [w for w, f in word_forms(p).items() if f == Form.I]
    for u in simple:
        for v in simple:
            assert equivalent(p, u, v) == (p.words[u][0] == p.words[v][0])


def test_sibling_bond_on_star():
    commuting = parse_bw_graph("nodes: 0 1 2\nblack: 0\nedges: 0 1 3, 0 2 3")
    linked = parse_bw_graph("nodes: 0 1 2\nblack: 0\nedges: 0 1 3, 0 2 3, 1 2 3")
    p = enumerate_quotient(commuting, 20)
    assert sibling_bond(p, p.index("10"), p.index("20")) == Measure.exact(2)
    assert len(set(p.up[p.index("10")]) & set(p.up[p.index("20")])) == 1
    q = enumerate_quotient(linked, 20)
    assert sibling_bond(q, q.index("10"), q.index("20")) == Measure.exact(3)


def test_sibling_bond_on_d6():
    p = enumerate_quotient(graph(D6D5), 20)
    assert sibling_bond(p, p.index("54321"), p.index("64321")) == Measure.exact(2)


def test_sibling_bond_boundary():
    g = parse_bw_graph("nodes: 0 1 2\nblack: 0\nedges: 0 1 3, 0 2 3, 1 2 inf")
    p = enumerate_quotient(g, 6)
    m = sibling_bond(p, p.index("10"), p.index("20"))
    assert m.status == "at_least" and m.value >= 4


def test_sibling_bond_needs_siblings():
    p = enumerate_quotient(graph(H3H2), 12)
    with pytest.raises(ValueError):
        sibling_bond(p, p.index("21"), p.index("321"))


def test_detector_examples():
    p = enumerate_quotient(graph(LABELLED_CHAIN), 10)
    u, x = p.index("123210"), p.index("010")
    assert detects(p, u, x)
    assert detector_bond(p, u, x) == Measure.exact(4)
    q = enumerate_quotient(graph(THREE_STAR), 20)
    u, x = q.index("sus"), q.index("ts")
    assert detects(q, u, x)
    assert detector_bond(q, u, x) == Measure.exact(3)
    w, pair = detection_pivot(q, u, x)
    assert w in minimal_upper_bounds(q, parent(q, u), x)
    assert all(w in q.down[y] for y in pair)


def test_commuting_atom_does_not_detect():
    g = parse_bw_graph("nodes: 0 1 2\nblack: 0 2\nedges: 0 1 3")
    p = enumerate_quotient(g, 20)
    u, x = p.index("10"), p.index("2")
    assert detects(p, u, x) is False
    assert detector_bond(p, u, x) == Measure.exact(2)


def test_detector_precondition():
    p = enumerate_quotient(graph(LABELLED_CHAIN), 10)
    with pytest.raises(ValueError):
        detects(p, p.index("10"), p.index("210"))


@pytest.mark.parametrize("p", CATALOG, ids=lambda p: p.graph.to_text().replace("\n", ";"))
def test_detector_and_bond_soundness(p):
    g = p.graph
    lead = lambda w: p.words[w][0]
    for u, x in detector_pairs(p):
        m = g.m(lead(u), lead(x))
        assert detects(p, u, x) == (m >= 3)
        assert detector_bond(p, u, x) == Measure.exact(m)
    for u, v in sibling_pairs(p):
        assert sibling_bond(p, u, v) == Measure.exact(g.m(lead(u), lead(v)))
        if g.m(lead(u), lead(v)) == 2:
            assert len(set(p.up[u]) & set(p.up[v])) == 1


def test_catalog_is_substantial():
    assert len(CATALOG) >= 70


def test_semichain_depth_known_values():
    p = enumerate_quotient(graph(H3H2), 12)
    assert semichain_depth(p, p.index("12321"), p.index("32321")) == Measure.exact(5)
    q = enumerate_quotient(graph(D6D5), 12)
    assert semichain_depth(q, q.index("54321"), q.index("64321")) == Measure.exact(5)


NSHAPES = {
    # case (a): branches s=4, t=5 on a chain 0-1-2-3; k=3
    "a_long": ("nodes: 0 1 2 3 4 5\nblack: 0\nedges: 0 1 3, 1 2 3, 2 3 3, 3 4 3, 3 5 3", "43210", "53210", 16, 5),
    "a_l1": ("nodes: 0 1 2 3 4 5\nblack: 0\nedges: 0 1 4, 1 2 3, 2 3 3, 3 4 3, 3 5 3", "43210", "53210", 16, 4),
    "a_one": ("nodes: 0 1 2 3 4 5\nblack: 0\nedges: 0 1 3, 1 2 3, 2 3 3, 3 4 4, 3 5 3", "43210", "53210", 12, 1),
    # case (b): u=1210 of the second form, v=3210 simple
    "b_three": ("nodes: 0 1 2 3\nblack: 0\nedges: 0 1 3, 1 2 4, 2 3 3", "1210", "3210", 30, 3),
    "b_one": ("nodes: 0 1 2 3\nblack: 0\nedges: 0 1 3, 1 2 5, 2 3 3", "1210", "3210", 12, 1),
    # case (c): u of the third form, v of the second
    "c_five": (H3H2, "32321", "12321", 20, 5),
    "c_one": ("nodes: 1 2 3\nblack: 1\nedges: 1 2 3, 2 3 6", "32321", "12321", 12, 1),
}


@pytest.mark.parametrize("name", NSHAPES)
def test_semichain_depth_case_table(name):
    text, u, v, bound, expected = NSHAPES[name]
    p = enumerate_quotient(parse_bw_graph(text), bound)
    assert semichain_depth(p, p.index(u), p.index(v)) == Measure.exact(expected)


def test_semichain_depth_boundary():
    p = enumerate_quotient(graph(D6D5), 7)
    m = semichain_depth(p, p.index("54321"), p.index("64321"))
    assert m.status == "at_least"


def test_semichain_depth_needs_commuting():
    g = parse_bw_graph("nodes: 0 1 2\nblack: 0\nedges: 0 1 3, 0 2 3, 1 2 3")
    p = enumerate_quotient(g, 20)
    with pytest.raises(ValueError):
        semichain_depth(p, p.index("10"), p.index("20"))


def test_semi_chainlike_examples():
    p = enumerate_quotient(graph(H3H2), 12)
    assert all(semi_chainlike(p, a) for a in p.up[0])
    assert not semi_chainlike(p, p.index("132321"))
    q = enumerate_quotient(graph(LABELLED_CHAIN), 10)
    assert semi_chainlike(q, q.index("23210"))


def test_basket_line_basket():
    p = enumerate_quotient(graph(BASKET_LINE), 6)
    found = [(p.label(b.u), p.label(b.v), b.kind) for b in find_baskets(p)]
    assert found == [("babc", "bcbc", "II/III")]


def test_square_over_chain_basket():
    p = enumerate_quotient(graph(SQUARE_OVER_CHAIN), 10)
    found = [(p.label(b.u), p.label(b.v), b.kind) for b in find_baskets(p)]
    assert found == [("53210", "54210", "I/I")]


def test_six_label_forms():
    p = enumerate_quotient(graph(SIX_LABEL), 10)
    forms = {p.label(w): f.value for w, f in word_forms(p).items()}
    assert forms == {"0": "I", "10": "I", "210": "I", "010": "II", "1010": "III", "01010": "III"}


def test_no_baskets_in_b_type():
    assert find_baskets(enumerate_quotient(type_b(4, ["1"]), 30)) == []
