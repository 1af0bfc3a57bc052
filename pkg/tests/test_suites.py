import itertools

import pytest

from foldkit.suites import (
    SUITES,
    case_rng,
    implication_failures,
    is_proper_power,
    random_two_complex,
    random_word,
    run_case,
    run_suites,
    traversal_family,
)

from oracles import reduce


def proper_power_oracle(w):
    """Compare ``w`` with every conjugate of every power ``r^k`` of a short root."""
    n = len(w)
    for k in range(2, n + 1):
        for rlen in range(1, n // k + 1):
            for r in itertools.product(range(4), repeat=rlen):
                if reduce(r) != r or reduce(r * k) != r * k:
                    continue
                for clen in range((n - k * rlen) // 2 + 1):
                    for c in itertools.product(range(4), repeat=clen):
                        if reduce(c) != c:
                            continue
                        inv = tuple(x ^ 1 for x in reversed(c))
                        if reduce(c + r * k + inv) == w:
                            return True
    return False


def test_proper_power_matches_oracle():
    words = {
        w
        for n in range(1, 7)
        for w in itertools.product(range(4), repeat=n)
        if reduce(w) == w
    }
    for w in sorted(words):
        assert is_proper_power(w) == proper_power_oracle(w), w


def test_random_word_is_reduced_and_in_range():
    rng = case_rng(0, 9, 0)
    for _ in range(200):
        w = random_word(rng, 3, 2, 7).letters
        assert 2 <= len(w) <= 7
        assert reduce(w) == w
        assert max(w) < 6


def test_case_rng_depends_on_every_component():
    draws = {tuple(case_rng(*key).integers(0, 2**32, 4)) for key in [(0, 1, 0), (1, 1, 0), (0, 2, 0), (0, 1, 1)]}
    assert len(draws) == 4


@pytest.mark.parametrize("spec", SUITES, ids=lambda s: s.name)
def test_cases_replay_identically(spec):
    for i in range(5):
        assert run_case(spec.name, 7, i) == run_case(spec.name, 7, i)


def test_reports_independent_of_workers():
    cases = {s.name: 12 for s in SUITES}
    one = run_suites(seed=5, workers=1, cases=cases)
    two = run_suites(seed=5, workers=2, cases=cases)
    assert one == two
    assert [r.name for r in one] == [s.name for s in SUITES]
    assert all(not r.failures for r in one)


def test_suite_line_format():
    (report,) = run_suites(seed=0, names=["euler-poincare"], cases={"euler-poincare": 20})
    (line,) = report.lines(0)
    assert line.startswith("suite=euler-poincare cases=20 passed=20 failed=0 reductions=")


def test_random_complexes_are_valid():
    rng = case_rng(0, 9, 1)
    for _ in range(50):
        X = random_two_complex(rng)
        g = X.graph
        for path in X.cells:
            assert all(g.dst[path[i]] == g.src[path[(i + 1) % len(path)]] for i in range(len(path)))
            assert path[0] != path[-1] ^ 1


def test_traversal_family_is_nonvacuous():
    family = list(traversal_family(max_cells=2, max_edges=2, max_len=3))
    assert len(family) > 10
    assert len({tuple(X.cells) for X in family}) == len(family)
    for X in family:
        assert implication_failures(X) == []
