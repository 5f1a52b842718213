"""bw-graph texts for the small systems used across the tests."""

from bruhat_quotients.coxeter import parse_bw_graph

H3H2 = "nodes: 1 2 3\nblack: 1\nedges: 1 2 3, 2 3 5\n"
D6D5 = "nodes: 1 2 3 4 5 6\nblack: 1\nedges: 1 2 3, 2 3 3, 3 4 3, 4 5 3, 4 6 3\n"
B3B2 = "nodes: 1 2 3\nblack: 1\nedges: 1 2 3, 2 3 4\n"
LABELLED_CHAIN = "nodes: 0 1 2 3 4 5\nblack: 0\nedges: 0 1 4, 1 2 3, 2 3 6, 3 4 3, 4 5 3\n"
THREE_STAR = "nodes: s t u\nblack: s\nedges: s t 3, s u 4\n"
BASKET_LINE = "nodes: a b c\nblack: c\nedges: a b inf, b c inf\n"
D8_TREE = "nodes: 0 1 2 3 4 5 6 7\nblack: 0\nedges: 0 1 3, 1 2 3, 2 3 3, 0 4 3, 4 5 3, 5 6 3, 5 7 3\n"
TWO_CLUSTERS = """nodes: 0 1 2 3 4 5 6 7 8 9
black: 0 1
edges: 0 1 3, 0 2 3, 0 6 3, 1 2 3, 1 4 3, 3 2 3, 3 4 3, 5 3 3, 5 4 3
7 6 3, 7 8 3, 7 9 3, 8 6 3, 8 9 3
"""
SQUARE_OVER_CHAIN = "nodes: 0 1 2 3 4 5\nblack: 0\nedges: 0 1 3, 1 2 3, 2 3 3, 2 4 3, 3 5 3, 4 5 3\n"
SIX_LABEL = "nodes: 0 1 2\nblack: 0\nedges: 0 1 6, 1 2 3\n"
REDUCIBLE_W = """nodes: s1 s2 s3 s4 s5 s6 s7 s8 s9
black: s2 s4 s5
edges: s2 s1 5, s2 s3 3, s2 s4 3, s5 s6 6, s7 s8 3, s7 s9 3, s8 s9 3
"""
REDUCIBLE_U = """nodes: t1 t2 t3 t4 t5 t6 t7
black: t2 t3 t5
edges: t2 t1 3, t2 t3 3, t2 t4 5, t6 t5 3, t6 t7 4
"""


def graph(text):
    return parse_bw_graph(text)
