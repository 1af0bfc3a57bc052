import random

from foldkit.complexes import complex_from_words
from foldkit.homology import betti_inequality_report, boundary_matrices, homology

from helpers import fixture_complex, words_complex
from test_complexes import random_complex


def test_boundary_examples():
    cc = boundary_matrices(fixture_complex("torus.cplx"))
    assert cc.d2 == [[0], [0]] and cc.d1 == [[0, 0]]
    assert boundary_matrices(fixture_complex("c2.cplx")).d2 == [[2]]
    assert boundary_matrices(fixture_complex("klein.cplx")).d2 == [[2], [0]]


def test_homology_examples():
    h = homology(fixture_complex("torus.cplx"))
    assert (h.b0, h.b1, h.b2, h.torsion) == (1, 2, 1, ())
    h = homology(fixture_complex("klein.cplx"))
    assert (h.b0, h.b1, h.b2, h.torsion) == (1, 1, 0, (2,))
    h = homology(complex_from_words(2, []))
    assert (h.b0, h.b1, h.b2) == (1, 2, 0)


def test_betti_report_examples():
    assert betti_inequality_report(fixture_complex("torus.cplx")).satisfies
    r = betti_inequality_report(fixture_complex("c2.cplx"), hypothesis=False)
    assert not r.satisfies and "excluded" in r.note
    assert betti_inequality_report(complex_from_words(2, [])).satisfies


def test_euler_poincare_random():
    rng = random.Random(12)
    for _ in range(200):
        x = random_complex(rng, max_edges=6, max_cells=4, max_len=8)
        h = homology(x)
        assert h.b0 - h.b1 + h.b2 == x.euler_char()
