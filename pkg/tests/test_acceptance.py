"""Acceptance gate: one pass/fail line per criterion.

Each test prints ``criterion N: PASS|FAIL ...`` to the terminal (bypassing
capture) before asserting, so ``pytest -v tests/test_acceptance.py`` shows the
full scorecard even when some criteria fail.
"""
import itertools
import random
import time
from fractions import Fraction

import numpy as np
import pytest

from foldkit import complexes
from foldkit.cli import main
from foldkit.complexes import complex_from_words, find_staggering, is_bireducible
from foldkit.homology import homology, smith_normal_form
from foldkit.immersions import bireducible_pullback_rows, npi_scan
from foldkit.presentations import (
    CoxeterDiagram,
    Pi1Status,
    Presentation,
    coxeter_chibar,
    coxeter_coherence_predicate,
    hierarchy,
)
from foldkit.results import Outcome
from foldkit.subgroups import Containment, StallingsAutomaton, double_coset_sum, hn_verdict
from foldkit.suites import implication_failures, is_proper_power, run_suites, traversal_family
from foldkit.words import Alphabet, Word, parse_word

from helpers import fixture_complex
from oracles import (
    double_coset_ranks,
    invariant_factor_table,
    naive_membership,
    random_nielsen_set,
    random_transitive_action,
    reduce,
    schreier_generators,
)

AB = Alphabet(["a", "b"])


@pytest.fixture
def verdict(request, capsys):
    number = request.node.get_closest_marker("criterion").args[0]

    def report(ok, detail):
        with capsys.disabled():
            print(f"\ncriterion {number:2d}: {'PASS' if ok else 'FAIL'} {detail}")
        assert ok, detail

    return report


def sub(*words):
    return StallingsAutomaton.from_generators(AB, [parse_word(w, AB) for w in words])


def suite(name, seed=0):
    start = time.perf_counter()
    (report,) = run_suites(seed=seed, names=[name])
    return report, time.perf_counter() - start


@pytest.mark.criterion(1)
def test_hanna_neumann_suite(verdict):
    report, elapsed = suite("hanna-neumann")
    n, bad = len(report.results), len(report.failures)
    verdict(n == 200 and bad == 0 and elapsed < 60, f"cases={n} violations={bad} time={elapsed:.1f}s (<60s)")


@pytest.mark.criterion(2)
def test_shnc_suite(verdict):
    report, elapsed = suite("shnc")
    n, bad = len(report.results), len(report.failures)
    verdict(n == 200 and bad == 0 and elapsed < 60, f"cases={n} violations={bad} time={elapsed:.1f}s (<60s)")


@pytest.mark.criterion(3)
def test_worked_hanna_neumann_example(verdict):
    r = hn_verdict(sub("a^2", "b"), sub("a"), budget=1000)
    got = (r.sum, r.containment, r.bound, r.holds)
    verdict(got == (1, Containment.OUTSIDE, 1, True), f"sum={r.sum} containment={r.containment.value} bound={r.bound}")


@pytest.mark.criterion(4)
def test_finite_index_double_cosets(verdict):
    rng = random.Random(2024)
    mismatches = 0
    for _ in range(50):
        pu = random_transitive_action(rng, rng.randint(1, 6))
        pw = random_transitive_action(rng, rng.randint(1, 6))
        gu, gw = schreier_generators(pu), schreier_generators(pw)
        u = StallingsAutomaton.from_generators(AB, [Word(g) for g in gu])
        w = StallingsAutomaton.from_generators(AB, [Word(g) for g in gw])
        _, ranks = double_coset_sum(u, w)
        if u.index() != len(pu[0]) or sorted(ranks) != double_coset_ranks(pu, pw, gw):
            mismatches += 1
    verdict(mismatches == 0, f"pairs=50 mismatches={mismatches}")


@pytest.mark.criterion(5)
def test_membership_oracle(verdict):
    rng = random.Random(77)
    cases = disagree = members = 0
    while cases < 1000:
        gens = random_nielsen_set(rng)
        u = StallingsAutomaton.from_generators(AB, [Word(g) for g in gens])
        if cases % 2:
            raw = []
            for _ in range(rng.randint(1, 4)):
                g = rng.choice(gens)
                raw += g if rng.random() < 0.5 else [x ^ 1 for x in reversed(g)]
            letters = reduce(raw)
        else:
            letters = reduce([rng.randrange(4) for _ in range(rng.randint(0, 8))])
        if len(letters) > 10:
            continue
        expected = naive_membership(gens, letters)
        members += expected
        disagree += u.membership(Word(letters)) != expected
        cases += 1
    verdict(disagree == 0, f"cases={cases} members={members} disagreements={disagree}")


@pytest.mark.criterion(6)
def test_fold_confluence(verdict):
    report, _ = suite("fold-confluence")
    n, bad = len(report.results), len(report.failures)
    verdict(n == 100 and bad == 0, f"graphs={n} orders=10 non-isomorphic={bad}")


@pytest.mark.criterion(7)
def test_exhaustive_implication_chain(verdict):
    start = time.perf_counter()
    count = staggered = 0
    bad = []
    for X in traversal_family(max_cells=3, max_edges=4, max_len=6):
        count += 1
        staggered += find_staggering(X) is not None
        if implication_failures(X):
            bad.append(X)
    elapsed = time.perf_counter() - start
    verdict(
        not bad and elapsed < 120,
        f"complexes={count} staggered={staggered} counterexamples={len(bad)} time={elapsed:.1f}s (<120s)",
    )


@pytest.mark.criterion(8)
def test_reductions_preserve_euler_characteristic(verdict):
    before = complexes.reduction_checks
    report, _ = suite("euler-poincare")
    calls = complexes.reduction_checks - before
    counted = sum(r.counters.get("reductions", 0) for r in report.results)
    ok = calls > 0 and calls == counted and not report.failures
    verdict(ok, f"reduce-calls={calls} failures={len(report.failures)}")


@pytest.mark.criterion(9)
def test_npi_scan(verdict):
    start = time.perf_counter()
    c2 = npi_scan(fixture_complex("c2.cplx"), 1)
    torus = npi_scan(fixture_complex("torus.cplx"), 3)
    elapsed = time.perf_counter() - start
    certified = [v for v in c2.violations if v.chi == 1 and v.torsion == (2,) and v.pi1 is Pi1Status.NONTRIVIAL]
    ok = (
        len(certified) == 1
        and not torus.violations
        and not torus.potential_violations
        and not torus.bound_reached
        and elapsed < 30
    )
    verdict(
        ok,
        f"c2-violations={len(c2.violations)} torus={len(torus.violations)}/{len(torus.potential_violations)} "
        f"time={elapsed:.1f}s (<30s)",
    )


def primitive_one_relator_words(max_len=6):
    """Cyclically reduced primitive words on two generators, one per orbit of
    rotation, inversion, and the signed permutations of the generators."""

    def images(w):
        for swap, *flips in itertools.product((0, 1), repeat=3):
            m = [2 * ((x >> 1) ^ swap) | (x & 1) ^ flips[x >> 1] for x in range(4)]
            v = tuple(m[x] for x in w)
            for u in (v, tuple(x ^ 1 for x in reversed(v))):
                for k in range(len(u)):
                    yield u[k:] + u[:k]

    out = set()
    for n in range(1, max_len + 1):
        for w in itertools.product(range(4), repeat=n):
            if reduce(w) == w and w[0] != w[-1] ^ 1 and not is_proper_power(w):
                out.add(min(images(w)))
    return sorted(out, key=lambda w: (len(w), w))


@pytest.mark.criterion(10)
def test_bireducible_pullback_inequality(verdict):
    start = time.perf_counter()
    fixtures = [complex_from_words(2, [w]) for w in primitive_one_relator_words()]
    fixtures.append(fixture_complex("torus.cplx"))
    rows = violations = 0
    for X in fixtures:
        assert is_bireducible(X).outcome is Outcome.TRUE
        for row in bireducible_pullback_rows(X, 4):
            rows += 1
            violations += not row.holds
    elapsed = time.perf_counter() - start
    verdict(
        len(fixtures) >= 10 and violations == 0 and elapsed < 120,
        f"fixtures={len(fixtures)} immersions={rows} violations={violations} time={elapsed:.1f}s (<120s)",
    )


def snf_mismatches(mats):
    """Compare the Smith diagonal with the minor-gcd oracle on an ``(N, r, c)`` batch."""
    expected = invariant_factor_table(mats)
    bad = 0
    for m, want in zip(mats.tolist(), expected.tolist()):
        S, _, _ = smith_normal_form(m)
        bad += [S[i][i] for i in range(len(want))] != want
    return bad


def all_matrices(r, c):
    return np.array(list(itertools.product(range(-3, 4), repeat=r * c)), dtype=np.int64).reshape(-1, r, c)


def square3_representatives():
    """One 3x3 matrix per orbit of row permutations and row sign changes."""
    rows = [r for r in itertools.product(range(-3, 4), repeat=3) if not any(r) or next(x for x in r if x) > 0]
    reps = list(itertools.combinations_with_replacement(rows, 3))
    return np.array(reps, dtype=np.int64)


@pytest.mark.criterion(11)
def test_homology(verdict):
    t = homology(fixture_complex("torus.cplx"))
    k = homology(fixture_complex("klein.cplx"))
    fixed = (t.b0, t.b1, t.b2, t.torsion) == (1, 2, 1, ()) and (k.b0, k.b1, k.b2, k.torsion) == (1, 1, 0, (2,))
    report, _ = suite("euler-poincare")
    euler_bad = len(report.failures)
    checked = snf_bad = 0
    for r, c in itertools.product((1, 2, 3), repeat=2):
        mats = square3_representatives() if (r, c) == (3, 3) else all_matrices(r, c)
        checked += len(mats)
        snf_bad += snf_mismatches(mats)
    verdict(
        fixed and euler_bad == 0 and snf_bad == 0,
        f"torus=({t.b0},{t.b1},{t.b2}) klein=({k.b0},{k.b1},{k.b2}) torsion={list(k.torsion)} "
        f"euler-poincare={len(report.results) - euler_bad}/{len(report.results)} snf-matrices={checked} mismatches={snf_bad}",
    )


def one_relator(gens, relator):
    al = Alphabet(gens.split())
    return Presentation(al, (parse_word(relator, al),))


@pytest.mark.criterion(12)
def test_hierarchy(verdict):
    named = [one_relator("a t", "t a t^-1 a^-2"), one_relator("a b", "a b a^-1 b^-1")]
    named_ok = all(h.steps and all(s.is_valid() for s in h.steps) for h in map(hierarchy, named))
    rng = random.Random(12)
    done = steps = invalid = 0
    while done < 50:
        n = rng.randint(2, 3)
        al = Alphabet([f"x{i}" for i in range(n)])
        w = Word(reduce([rng.randrange(2 * n) for _ in range(rng.randint(2, 12))]))
        if len(w.generators()) < 2:
            continue
        h = hierarchy(Presentation(al, (w,)), depth=6)
        steps += len(h.steps)
        invalid += sum(not s.is_valid() for s in h.steps)
        done += 1
    verdict(named_ok and invalid == 0, f"named-valid={named_ok} random=50 steps={steps} invalid={invalid}")


@pytest.mark.criterion(13)
def test_coxeter(verdict):
    tri = CoxeterDiagram(("x", "y", "z"), ((0, 1, 2), (1, 2, 2), (0, 2, 2)))
    chibar = coxeter_chibar(tri)
    k5 = CoxeterDiagram(tuple("pqrst"), tuple((u, v, 2) for u, v in itertools.combinations(range(5), 2)))
    k5_check, k5_value = coxeter_coherence_predicate(k5)
    rng = random.Random(13)
    edges = tuple((u, v, rng.choice([5, 6, 7, 8])) for u, v in itertools.combinations(range(10), 2))
    big = CoxeterDiagram(tuple(f"v{i}" for i in range(10)), edges)
    start = time.perf_counter()
    big_check, _ = coxeter_coherence_predicate(big)
    elapsed = time.perf_counter() - start
    ok = (
        chibar == Fraction(-1, 2)
        and k5_check.outcome is Outcome.FALSE
        and k5_value == 1
        and big_check.outcome is Outcome.TRUE
        and elapsed < 5
    )
    verdict(ok, f"chibar(triangle)={chibar} k5-witness-value={k5_value} scan10={elapsed:.2f}s (<5s)")


@pytest.mark.criterion(14)
def test_determinism(verdict, capsys):
    outputs = []
    for workers in ("1", "1", "2"):
        code = main(["suite", "--seed", "0", "--workers", workers])
        outputs.append((code, capsys.readouterr().out))
    same = outputs[0] == outputs[1] == outputs[2]
    verdict(same and outputs[0][0] == 0, f"runs=3 workers=1,1,2 identical={same} bytes={len(outputs[0][1])}")
