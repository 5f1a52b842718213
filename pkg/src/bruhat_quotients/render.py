"""DOT output for bw-graphs, reconstructed graphs and posets."""

from __future__ import annotations

import json

from .coxeter import BwGraph, format_bond
from .quotient import QuotientPoset
from .reconstruct import ReconstructionResult


def _quote(text: str) -> str:
    return json.dumps(text, ensure_ascii=False)


def _graph_dot(names, black, edges) -> str:
    lines = ["graph bw {", "  node [shape=circle];"]
    for i, name in enumerate(names):
        style = ' [style=filled, fillcolor=black, fontcolor=white]' if i in black else ""
        lines.append(f"  {_quote(name)}{style};")
    for a, b, label in edges:
        attr = f" [label={_quote(label)}]" if label is not None else ""
        lines.append(f"  {_quote(names[a])} -- {_quote(names[b])}{attr};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def graph_to_dot(g: BwGraph) -> str:
    edges = [(a, b, format_bond(m) if m >= 4 else None) for a, b, m in g.edges()]
    return _graph_dot(g.names, g.black, edges)


def reconstruction_to_dot(result: ReconstructionResult) -> str:
    edges = []
    for (a, b), m in sorted(result.labels.items()):
        text = str(m)
        edges.append((a, b, None if text == "3" else text))
    return _graph_dot(result.names, result.black, edges)


def poset_to_dot(p: QuotientPoset) -> str:
    lines = ["digraph poset {", "  rankdir=BT;", "  node [shape=plaintext];"]
    for level, members in enumerate(p.levels):
        ids = " ".join(f"n{i};" for i in members)
        lines.append(f"  {{ rank=same; {ids} }}  // length {level}")
    for i in range(len(p)):
        lines.append(f"  n{i} [label={_quote(p.label(i))}];")
    for u, w in p.covers:
        lines.append(f"  n{u} -> n{w};")
    lines.append("}")
    return "\n".join(lines) + "\n"
