import itertools
import random

import pytest

from foldkit import complexes
from foldkit.complexes import (
    EdgeClass,
    Staggering,
    classify_edge,
    complex_from_words,
    find_staggering,
    format_complex,
    fundamental_group_presentation,
    has_proper_powers,
    is_bireducible,
    is_collapsible,
    is_reducible,
    is_small,
    magnus_subgroup,
    parse_complex,
    presentation_complex,
    reduce,
    validate_staggering,
)
from foldkit.errors import DegenerateInputError, ParseError, PreconditionError
from foldkit.graphs import GraphBuilder
from foldkit.presentations import parse_presentation
from foldkit.results import Answer, Outcome

from helpers import fixture_complex, words_complex

A, B, X = 0, 1, 2


def test_classify_examples():
    assert classify_edge(words_complex("a", "a^2"), A) is EdgeClass.REDUCING
    assert classify_edge(words_complex("a b", "a b"), B) is EdgeClass.COLLAPSING
    assert classify_edge(words_complex("a b", "a b", "a b^-1"), A) is EdgeClass.NEITHER
    assert classify_edge(words_complex("a b", "a"), B) is EdgeClass.FREE


def test_reduce_examples():
    y = reduce(words_complex("a b", "a b"), B)
    assert (y.graph.num_vertices, y.graph.num_edges, y.num_cells) == (1, 1, 0)
    y = reduce(words_complex("a", "a^2"), A)
    assert (y.graph.num_vertices, y.graph.num_edges, y.num_cells) == (1, 0, 0)
    y = reduce(words_complex("a b", "a b", "a"), B)
    assert (y.graph.num_edges, y.num_cells, y.cells) == (1, 1, ((0,),))
    with pytest.raises(PreconditionError):
        reduce(words_complex("a b", "a b", "a b^-1"), A)


def test_predicate_examples():
    assert is_reducible(words_complex("a b", "a b a^-1 b^-1")).holds
    check = is_reducible(words_complex("a b", "a b", "a b^-1"))
    assert check.outcome is Outcome.FALSE and check.witness == (0, 1)
    k = fixture_complex("staggered_example.pres")
    assert is_reducible(k).holds and is_bireducible(k).holds
    assert is_bireducible(words_complex("a b", "a b a b")).holds
    assert is_bireducible(words_complex("a x b", "a x", "x b")).holds


def test_budget():
    x = words_complex("a b c", "a b c", "a b^-1 c", "a b c^-1", "a^2 b c")
    assert is_reducible(x, cap=2).outcome is Outcome.BUDGET_EXCEEDED


def test_staggering_examples():
    s = find_staggering(words_complex("a b", "a b a^-1 b^-1"))
    assert s is not None
    x = words_complex("a x b", "a x", "x b")
    s = find_staggering(x)
    assert s is not None and validate_staggering(x, s)
    assert validate_staggering(x, Staggering((0, 1), (A, 1, 2)))
    assert find_staggering(words_complex("a b", "a b", "a b^-1")) is None
    k = fixture_complex("staggered_example.pres")
    s = find_staggering(k)
    assert s is not None and validate_staggering(k, s)


def test_proper_powers_examples():
    assert has_proper_powers(words_complex("a", "a^2")) == (Answer.YES, 0)
    assert has_proper_powers(words_complex("a b", "a b a^-1 b^-1")) == (Answer.NO, None)
    assert has_proper_powers(words_complex("a b", "a b", "a b^-1")) == (Answer.UNKNOWN, None)


def test_small_examples():
    torus = words_complex("a b", "a b a^-1 b^-1")
    assert is_small(torus, [A]).holds
    assert is_small(torus, [A, B]).outcome is Outcome.FALSE
    single = words_complex("a b", "b^2")
    assert is_small(single, [A]).holds
    b = GraphBuilder()
    b.add_vertex(), b.add_vertex()
    b.add_edge(0, 0, 0)
    b.add_edge(1, 1, 2)
    from foldkit.complexes import TwoComplex

    disconnected = TwoComplex(b.build(), ())
    with pytest.raises(PreconditionError):
        is_small(disconnected, [0, 1])


def test_magnus_examples():
    torus = words_complex("a b", "a b a^-1 b^-1")
    m = magnus_subgroup(torus, [A])
    assert m.rank == 1 and [w.letters for w in m.words] == [(0,)]
    big = words_complex("a b c", "c^2")
    m = magnus_subgroup(big, [A, B])
    assert m.rank == 2
    b = GraphBuilder()
    b.add_vertex(), b.add_vertex(), b.add_vertex()
    for lab in (0, 2, 4):
        b.add_edge(0, 1, lab)
    b.add_edge(1, 2, 6)
    from foldkit.complexes import TwoComplex

    theta = TwoComplex(b.build(), ())
    assert magnus_subgroup(theta, [0, 1, 2]).rank == 2
    with pytest.raises(PreconditionError):
        magnus_subgroup(torus, [A, B])


def test_euler_and_presentation_complex():
    p = parse_presentation("generators: a t\nrelator: t a t^-1 a^-2\n")
    x = presentation_complex(p)
    assert (x.graph.num_vertices, x.graph.num_edges, x.num_cells, x.euler_char()) == (1, 2, 1, 0)
    assert presentation_complex(parse_presentation("generators: a\nrelator: a^2\n")).euler_char() == 1
    assert fixture_complex("torus.cplx").euler_char() == 0


def test_presentation_complex_cyclically_reduces():
    x = presentation_complex(parse_presentation("generators: a b\nrelator: b a b^-1\n"))
    assert x.cells == ((0,),)


def test_parse_and_format():
    x = fixture_complex("torus.cplx")
    assert parse_complex(format_complex(x)).cells == x.cells
    with pytest.raises(ParseError):
        parse_complex("vertex o\nedge a o o\ncell r: a a^-1\n")
    with pytest.raises(ParseError):
        parse_complex("vertex o\nedge a o o\ncell r: z\n")


def test_fundamental_group_presentation():
    p = fundamental_group_presentation(fixture_complex("klein.cplx"))
    assert p.num_generators == 2 and len(p.relators) == 1


def random_complex(rng, max_edges=4, max_cells=3, max_len=6):
    n = rng.randint(1, max_edges)
    cells = []
    for _ in range(rng.randint(1, max_cells)):
        while True:
            w = [rng.randrange(2 * n) for _ in range(rng.randint(1, max_len))]
            if all(w[i] != w[(i + 1) % len(w)] ^ 1 for i in range(len(w))):
                break
        cells.append(w)
    return complex_from_words(n, cells)


def brute_reducible(x, mode):
    n = x.num_cells
    for k in range(1, n + 1):
        for subset in itertools.combinations(range(n), k):
            sub = complexes.restrict(x, subset)
            classes = [classify_edge(sub, e) for e in range(sub.graph.num_edges)]
            if mode == "reducible":
                ok = any(c in (EdgeClass.REDUCING, EdgeClass.COLLAPSING) for c in classes)
            elif mode == "collapsible":
                ok = EdgeClass.COLLAPSING in classes
            else:
                owners = set()
                for e, c in enumerate(classes):
                    if c in (EdgeClass.REDUCING, EdgeClass.COLLAPSING):
                        owners |= {i for i, row in enumerate(sub.traversals) if row[e]}
                ok = k == 1 or len(owners) >= 2
            if not ok:
                return False
    return True


def test_predicates_match_brute_force():
    rng = random.Random(8)
    for _ in range(300):
        x = random_complex(rng)
        assert is_reducible(x).holds == brute_reducible(x, "reducible")
        assert is_collapsible(x).holds == brute_reducible(x, "collapsible")
        assert is_bireducible(x).holds == brute_reducible(x, "bireducible")


def brute_staggering(x):
    traversed = [k for k in range(x.graph.num_edges) if any(row[k] for row in x.traversals)]
    for r in range(1, len(traversed) + 1):
        for order in itertools.permutations(traversed, r):
            for cells in itertools.permutations(range(x.num_cells)):
                if validate_staggering(x, Staggering(cells, order)):
                    return True
    return False


def test_staggering_matches_brute_force():
    rng = random.Random(9)
    for _ in range(200):
        x = random_complex(rng)
        assert (find_staggering(x) is not None) == brute_staggering(x)


def test_reductions_preserve_euler_characteristic():
    rng = random.Random(10)
    before = complexes.reduction_checks
    for _ in range(100):
        x = random_complex(rng)
        while True:
            reducing = [e for e in range(x.graph.num_edges) if classify_edge(x, e) in (EdgeClass.REDUCING, EdgeClass.COLLAPSING)]
            if not reducing:
                break
            y = reduce(x, reducing[0])
            assert y.euler_char() == x.euler_char()
            x = y
    assert complexes.reduction_checks > before
