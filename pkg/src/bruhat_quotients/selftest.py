"""A handful of fast end-to-end checks behind ``bruhat-quotients selftest``."""

from __future__ import annotations

from typing import Callable

from .catalog import b_an, d_an, d6_d5, graph_isomorphism, h3_h2, small_graphs, type_b
from .chainlike import word_forms
from .coxeter import parse_bw_graph
from .isomorphism import are_isomorphic, classify_pair
from .quotient import enumerate_quotient
from .reconstruct import reconstruct

H3_H2 = "nodes: 1 2 3\nblack: 1\nedges: 1 2 3, 2 3 5\n"


def _h3h2_top() -> bool:
    p = enumerate_quotient(parse_bw_graph(H3_H2), 12)
    return p.complete and len(p) == 12 and p.label(len(p) - 1) == "1232132321"


def _routes_agree() -> bool:
    for g in small_graphs(3, labels=(3, 4, 5), max_size=40):
        a = enumerate_quotient(g, 40)
        b = enumerate_quotient(g, 40, method="words")
        if a.words != b.words or a.covers != b.covers:
            return False
    return True


def _exceptional_pairs() -> bool:
    checks = [
        (h3_h2(), d6_d5(), "H3-D6"),
        (b_an(3), d_an(3), "BnA-DA"),
        (type_b(3, ["3"]), type_b(3, ["3"]), "graph-isomorphic"),
    ]
    return all(classify_pair(a, b).case == case for a, b, case in checks)


def _round_trip() -> bool:
    for g in small_graphs(3, labels=(3, 4, 5, 6), max_size=200):
        p = enumerate_quotient(g, 60)
        if graph_isomorphism(reconstruct(p, word_forms(p)).to_graph(), g) is None:
            return False
    return True


def _h3_d6_search() -> bool:
    return are_isomorphic(enumerate_quotient(h3_h2(), 20), enumerate_quotient(d6_d5(), 20)) is not None


CHECKS: list[tuple[str, Callable[[], bool]]] = [
    ("H3/H2 has 12 elements with top 1232132321", _h3h2_top),
    ("orbit and word enumeration agree on small graphs", _routes_agree),
    ("exceptional pairs classified", _exceptional_pairs),
    ("reconstruction round-trip on small graphs", _round_trip),
    ("H3/H2 and D6/D5 posets isomorphic by search", _h3_d6_search),
]


def run_selftest() -> tuple[list[str], bool]:
    lines, ok = [], True
    for name, check in CHECKS:
        passed = check()
        ok &= passed
        lines.append(f"{'PASS' if passed else 'FAIL'}  {name}")
    return lines, ok
