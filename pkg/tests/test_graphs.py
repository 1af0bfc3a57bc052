import random

import pytest

from foldkit.graphs import (
    GraphBuilder,
    GraphMorphism,
    are_isomorphic,
    canonical_form,
    core,
    fold,
    format_graph,
    is_immersion,
    label_map,
    labeled_pullback,
    parse_graph,
    pullback,
    rose,
)
from foldkit.words import Alphabet

A, AI, B, BI = 0, 1, 2, 3


def cycle(n, label=A):
    b = GraphBuilder()
    vs = [b.add_vertex() for _ in range(n)]
    for i in range(n):
        b.add_edge(vs[i], vs[(i + 1) % n], label)
    return b.build()


def test_identity_is_immersion():
    g = rose(2)
    assert is_immersion(GraphMorphism.identity(g))


def test_collapsing_parallel_loops_is_not_immersion():
    b = GraphBuilder(labeled=False)
    b.add_vertex()
    b.add_edge(0, 0)
    b.add_edge(0, 0)
    g = b.build()
    f = GraphMorphism(g, rose(1), (0,), (0, 1, 0, 1))
    f.validate()
    assert not is_immersion(f)


def test_double_cover_is_immersion():
    c4 = cycle(4)
    b = GraphBuilder(labeled=False)
    b.add_vertex(), b.add_vertex()
    b.add_edge(0, 1)
    b.add_edge(1, 0)
    c2 = b.build()
    f = GraphMorphism(c4, c2, (0, 1, 0, 1), (0, 1, 2, 3, 0, 1, 2, 3))
    f.validate()
    assert is_immersion(f)


def test_fold_examples():
    b = GraphBuilder()
    b.add_vertex()
    b.add_edge(0, 0, A)
    b.add_edge(0, 0, A)
    g, q = fold(b.build())
    assert (g.num_vertices, g.num_edges) == (1, 1)
    q.validate()

    c = cycle(3)
    g, q = fold(c)
    assert are_isomorphic(g, c)
    assert q.vmap == (0, 1, 2)

    # open paths a b a^-1 and a b from one vertex share the prefix a b
    b = GraphBuilder()
    o = b.add_vertex()
    b.add_path(o, b.add_vertex(), [A, B, AI])
    b.add_path(o, b.add_vertex(), [A, B])
    g, _ = fold(b.build())
    assert (g.num_vertices, g.num_edges) == (4, 3) and g.is_folded()


def test_pullback_examples():
    c = cycle(3)
    idc = GraphMorphism.identity(c)
    p = pullback(idc, idc)
    assert are_isomorphic(p.graph, c)

    la = GraphBuilder(); la.add_vertex(); la.add_edge(0, 0, A)
    lb = GraphBuilder(); lb.add_vertex(); lb.add_edge(0, 0, B)
    p = labeled_pullback(la.build(), lb.build())
    assert (p.graph.num_vertices, p.graph.num_edges) == (1, 0)

    c2 = cycle(2)
    p = labeled_pullback(c2, c2)
    assert p.graph.num_components == 2
    assert p.graph.betti1() == ([1, 1], 2)
    for proj in (p.proj_a, p.proj_b):
        proj.validate()
        assert is_immersion(proj)


def test_betti_and_euler():
    b = GraphBuilder(); b.add_vertex()
    g = b.build()
    assert g.betti1() == ([0], 0) and g.euler_char() == 1
    assert rose(2).betti1()[1] == 2 and rose(2).euler_char() == -1
    assert cycle(4).betti1()[1] == 1 and cycle(4).euler_char() == 0


def test_core_examples():
    b = GraphBuilder()
    vs = [b.add_vertex() for _ in range(4)]
    for i in range(3):
        b.add_edge(vs[i], vs[i + 1], A)
    c = core(b.build(), 0)
    assert (c.graph.num_vertices, c.graph.num_edges, c.basepoint) == (1, 0, 0)

    b = GraphBuilder()
    vs = [b.add_vertex() for _ in range(4)]
    b.add_edge(0, 1, A); b.add_edge(1, 2, A); b.add_edge(2, 0, A); b.add_edge(2, 3, B)
    c = core(b.build(), 0)
    assert (c.graph.num_vertices, c.graph.num_edges) == (3, 3)

    b = GraphBuilder()
    b.add_vertex(), b.add_vertex()
    for lab in (A, B, 4):
        b.add_edge(0, 1, lab)
    theta = b.build()
    assert core(theta, 0).graph.num_edges == 3


def random_labeled_graph(rng, max_edges=12, rank=2):
    b = GraphBuilder()
    n = rng.randint(1, 6)
    for _ in range(n):
        b.add_vertex()
    for _ in range(rng.randint(0, max_edges)):
        b.add_edge(rng.randrange(n), rng.randrange(n), rng.randrange(2 * rank))
    return b.build()


def test_fold_confluence():
    rng = random.Random(11)
    for _ in range(100):
        g = random_labeled_graph(rng)
        ref, _ = fold(g)
        code = canonical_form(ref)
        for _ in range(10):
            other, q = fold(g, rng=rng)
            q.validate()
            assert other.is_folded()
            assert canonical_form(other) == code


def test_pullback_universal_property():
    rng = random.Random(5)
    for _ in range(50):
        a, _ = fold(random_labeled_graph(rng, 8))
        b, _ = fold(random_labeled_graph(rng, 8))
        p = labeled_pullback(a, b)
        pairs = {(u, v) for u in range(a.num_vertices) for v in range(b.num_vertices)}
        assert set(p.pairs) == pairs and len(p.pairs) == len(pairs)
        for proj in (p.proj_a, p.proj_b):
            proj.validate()
            assert is_immersion(proj)
        per, total = p.graph.betti1()
        tree, _ = p.graph.spanning_forest()
        assert total == p.graph.num_edges - len(tree)


def test_immersion_composition():
    rng = random.Random(2)
    for _ in range(40):
        g, _ = fold(random_labeled_graph(rng, 8))
        f = label_map(g, 2)
        h, _ = fold(random_labeled_graph(rng, 8))
        p = labeled_pullback(g, h)
        comp = p.proj_a.then(f)
        comp.validate()
        assert is_immersion(comp)


def test_canonical_form_general_graphs():
    rng = random.Random(3)
    for _ in range(60):
        g = random_labeled_graph(rng, 8)
        perm = list(range(g.num_vertices))
        rng.shuffle(perm)
        b = GraphBuilder()
        for _ in perm:
            b.add_vertex()
        order = list(range(g.num_edges))
        rng.shuffle(order)
        for k in order:
            h = 2 * k + rng.randint(0, 1)
            b.add_edge(perm[g.src[h]], perm[g.dst[h]], g.labels[h])
        assert canonical_form(b.build()) == canonical_form(g)
    assert canonical_form(cycle(3)) != canonical_form(cycle(4))


def test_text_roundtrip():
    al = Alphabet(["a", "b"])
    text = "vertex p\nvertex q\nedge e p q a\nedge f q p b^-1\n"
    g = parse_graph(text, al)
    assert g.labels == (A, AI, BI, B)
    assert format_graph(g, al) == text
    with pytest.raises(Exception):
        parse_graph("vertex p\nedge e p r a\n", al)
