"""Seeded randomized invariant suites.

Every case draws from its own Philox stream keyed by ``(seed, suite, index)``,
so a case can be replayed alone and results do not depend on how cases are
spread over worker processes.
"""
from __future__ import annotations

import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterator

import numpy as np

from . import complexes
from .complexes import (
    EdgeClass,
    TwoComplex,
    classify_edge,
    complex_from_words,
    find_staggering,
    is_bireducible,
    is_collapsible,
    is_reducible,
    reduce,
)
from .graphs import GraphBuilder, canonical_form, fold, rose
from .homology import homology
from .subgroups import SRStatus, StallingsAutomaton, hn_verdict, shnc_check, verify_strictly_reducible
from .words import Alphabet, Word, format_word

AB = Alphabet(["a", "b"])


def case_rng(seed: int, suite_id: int, index: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, suite_id, index])))


def random_word(rng: np.random.Generator, ngens: int, lo: int, hi: int) -> Word:
    """A uniformly grown freely reduced word with length in ``[lo, hi]``."""
    n = int(rng.integers(lo, hi + 1))
    out: list[int] = []
    while len(out) < n:
        x = int(rng.integers(0, 2 * ngens))
        if out and out[-1] == x ^ 1:
            continue
        out.append(x)
    return Word(tuple(out))


def is_proper_power(letters: tuple[int, ...]) -> bool:
    """Search every split ``w = v · r^k · v^-1`` with ``k >= 2``."""
    n = len(letters)
    for p in range(n // 2 + 1):
        if any(letters[i] != letters[n - 1 - i] ^ 1 for i in range(p)):
            break
        middle = letters[p:n - p]
        m = len(middle)
        for k in range(2, m + 1):
            if m % k == 0 and middle == middle[: m // k] * k:
                return True
    return False


@dataclass(frozen=True)
class CaseResult:
    ok: bool
    tag: str = ""
    detail: str = ""
    counters: dict[str, int] = field(default_factory=dict)


def _words(ws) -> str:
    return ",".join(format_word(w, AB) for w in ws)


# --- individual suites -----------------------------------------------------------------


def _hn_case(rng: np.random.Generator) -> CaseResult:
    u_gens = [random_word(rng, 2, 1, 6) for _ in range(int(rng.integers(1, 4)))]
    if rng.integers(0, 2):
        while True:
            w = random_word(rng, 2, 1, 8)
            if not is_proper_power(w.letters):
                break
        tag = "primitive"
    else:
        base, split = ("a", "b") if rng.integers(0, 2) else ("b", "a")
        bi, si = AB.index(base), AB.index(split)
        while True:
            letters: list[int] = []
            for _ in range(int(rng.integers(1, 4))):
                for g in (bi, si):
                    e = int(rng.choice([-2, -1, 1, 2]))
                    letters += [2 * g + (e < 0)] * abs(e)
            w = Word(tuple(letters))
            if verify_strictly_reducible(AB, [base], [split], [w]).status is SRStatus.CERTIFIED:
                break
        tag = "strictly-reducible"
    U = StallingsAutomaton.from_generators(AB, u_gens)
    W = StallingsAutomaton.from_generators(AB, [w])
    rep = hn_verdict(U, W, [w], budget=2000)
    detail = f"U={_words(u_gens)} W={_words([w])} sum={rep.sum} bound={rep.bound} containment={rep.containment.value}"
    return CaseResult(rep.holds, tag, detail, {"flagged": int(rep.flagged)})


def _shnc_case(rng: np.random.Generator) -> CaseResult:
    u_gens = [random_word(rng, 2, 1, 6) for _ in range(int(rng.integers(1, 4)))]
    w_gens = [random_word(rng, 2, 1, 6) for _ in range(int(rng.integers(1, 4)))]
    rep = shnc_check(StallingsAutomaton.from_generators(AB, u_gens), StallingsAutomaton.from_generators(AB, w_gens))
    return CaseResult(rep.holds, "", f"U={_words(u_gens)} W={_words(w_gens)} lhs={rep.lhs} rhs={rep.rhs}")


def _fold_case(rng: np.random.Generator, orders: int = 10) -> CaseResult:
    b = GraphBuilder()
    n = int(rng.integers(1, 7))
    for _ in range(n):
        b.add_vertex()
    edges = []
    for _ in range(int(rng.integers(1, 9))):
        u, v, lab = int(rng.integers(0, n)), int(rng.integers(0, n)), int(rng.integers(0, 4))
        b.add_edge(u, v, lab)
        edges.append(f"{u}-{lab}-{v}")
    g = b.build()
    codes = {canonical_form(fold(g, random.Random(int(rng.integers(0, 2**63))))[0]) for _ in range(orders)}
    return CaseResult(len(codes) == 1, "", f"V={n} edges={' '.join(edges)} distinct={len(codes)}")


def _random_closed_path(rng: np.random.Generator, g, max_len: int) -> tuple[int, ...] | None:
    for _ in range(50):
        start = int(rng.integers(0, g.num_vertices))
        path: list[int] = []
        v = start
        for _ in range(int(rng.integers(1, max_len + 1))):
            choices = [h for h in g.out[v] if not path or h != path[-1] ^ 1]
            if not choices:
                break
            h = choices[int(rng.integers(0, len(choices)))]
            path.append(h)
            v = g.dst[h]
        if path and v == start and path[0] != path[-1] ^ 1:
            return tuple(path)
    return None


def random_two_complex(rng: np.random.Generator, max_vertices: int = 3, max_edges: int = 5,
                       max_cells: int = 3, max_len: int = 6) -> TwoComplex:
    b = GraphBuilder(labeled=False)
    n = int(rng.integers(1, max_vertices + 1))
    for _ in range(n):
        b.add_vertex()
    for _ in range(int(rng.integers(1, max_edges + 1))):
        b.add_edge(int(rng.integers(0, n)), int(rng.integers(0, n)))
    g = b.build()
    cells = []
    for _ in range(int(rng.integers(0, max_cells + 1))):
        p = _random_closed_path(rng, g, max_len)
        if p is not None:
            cells.append(p)
    return TwoComplex(g, tuple(cells))


def _describe(X: TwoComplex) -> str:
    g = X.graph
    edges = " ".join(f"{g.src[2 * k]}-{g.dst[2 * k]}" for k in range(g.num_edges))
    cells = ";".join(",".join(map(str, c)) for c in X.cells)
    return f"V={g.num_vertices} edges={edges} cells={cells or '-'}"


def _euler_case(rng: np.random.Generator) -> CaseResult:
    X = random_two_complex(rng)
    detail = _describe(X)
    before = complexes.reduction_checks
    ok = homology(X).euler_poincare_ok
    while ok:
        edges = [e for e in range(X.graph.num_edges)
                 if classify_edge(X, e) in (EdgeClass.REDUCING, EdgeClass.COLLAPSING)]
        if not edges:
            break
        chi = X.euler_char()
        X = reduce(X, edges[int(rng.integers(0, len(edges)))])
        ok = X.euler_char() == chi and homology(X).euler_poincare_ok
    return CaseResult(ok, "", detail, {"reductions": complexes.reduction_checks - before})


def implication_failures(X: TwoComplex) -> list[str]:
    """Which of staggered ⇒ bireducible ⇒ reducible and collapsible ⇒ reducible fail on ``X``."""
    staggered = find_staggering(X) is not None
    bi = is_bireducible(X).holds
    red = is_reducible(X).holds
    col = is_collapsible(X).holds
    bad = []
    if staggered and not bi:
        bad.append("staggered=>bireducible")
    if bi and not red:
        bad.append("bireducible=>reducible")
    if col and not red:
        bad.append("collapsible=>reducible")
    return bad


def _implication_case(rng: np.random.Generator) -> CaseResult:
    ngens = int(rng.integers(1, 5))
    words = []
    for _ in range(int(rng.integers(1, 4))):
        while True:
            w = random_word(rng, ngens, 1, 6).letters
            if w[0] != w[-1] ^ 1:
                break
        words.append(w)
    X = complex_from_words(ngens, words)
    bad = implication_failures(X)
    cells = ";".join(format_word(w, Alphabet([chr(97 + i) for i in range(ngens)])) for w in words)
    tag = "staggered" if find_staggering(X) is not None else "other"
    return CaseResult(not bad, tag, f"gens={ngens} cells={cells} failed={','.join(bad) or '-'}")


@dataclass(frozen=True)
class SuiteSpec:
    name: str
    suite_id: int
    cases: int
    run: Callable[[np.random.Generator], CaseResult]


SUITES: tuple[SuiteSpec, ...] = (
    SuiteSpec("hanna-neumann", 1, 200, _hn_case),
    SuiteSpec("shnc", 2, 200, _shnc_case),
    SuiteSpec("fold-confluence", 3, 100, _fold_case),
    SuiteSpec("euler-poincare", 4, 500, _euler_case),
    SuiteSpec("implication-chain", 5, 500, _implication_case),
)
_BY_NAME = {s.name: s for s in SUITES}


def run_case(name: str, seed: int, index: int) -> CaseResult:
    spec = _BY_NAME[name]
    return spec.run(case_rng(seed, spec.suite_id, index))


def _run_task(task: tuple[str, int, int]) -> CaseResult:
    return run_case(*task)


@dataclass(frozen=True)
class SuiteReport:
    name: str
    results: tuple[CaseResult, ...]

    @property
    def failures(self) -> list[tuple[int, CaseResult]]:
        return [(i, r) for i, r in enumerate(self.results) if not r.ok]

    def lines(self, seed: int) -> Iterator[str]:
        tags: dict[str, int] = {}
        counters: dict[str, int] = {}
        for r in self.results:
            if r.tag:
                tags[r.tag] = tags.get(r.tag, 0) + 1
            for k, v in r.counters.items():
                counters[k] = counters.get(k, 0) + v
        passed = sum(r.ok for r in self.results)
        parts = [f"suite={self.name}", f"cases={len(self.results)}", f"passed={passed}",
                 f"failed={len(self.results) - passed}"]
        parts += [f"{k}={v}" for k, v in sorted(tags.items())]
        parts += [f"{k}={v}" for k, v in sorted(counters.items())]
        yield " ".join(parts)
        for i, r in self.failures:
            yield f"replay suite={self.name} seed={seed} index={i} {r.detail}"


def run_suites(seed: int = 0, workers: int = 1, names=None, cases: dict[str, int] | None = None) -> list[SuiteReport]:
    """Run the named suites (all by default); output is independent of ``workers``."""
    specs = [s for s in SUITES if names is None or s.name in names]
    tasks = [(s.name, seed, i) for s in specs for i in range((cases or {}).get(s.name, s.cases))]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_task, tasks, chunksize=8))
    else:
        results = [_run_task(t) for t in tasks]
    reports = []
    pos = 0
    for s in specs:
        n = (cases or {}).get(s.name, s.cases)
        reports.append(SuiteReport(s.name, tuple(results[pos:pos + n])))
        pos += n
    return reports


# --- exhaustive implication family ------------------------------------------------------


def traversal_family(max_cells: int = 3, max_edges: int = 4, max_len: int = 6) -> Iterator[TwoComplex]:
    """One complex per traversal-count matrix, up to reordering cells and edges.

    Reducible, collapsible, bireducible and staggered only depend on how often
    each cell crosses each edge, so realising every matrix (as positive words
    over a rose) covers all complexes with these bounds. Rows are taken as
    sorted multisets and columns in non-increasing order of their sums.
    """
    rows = []

    def grow(prefix: list[int]) -> None:
        if len(prefix) == max_edges:
            if 0 < sum(prefix) <= max_len:
                rows.append(tuple(prefix))
            return
        for k in range(max_len - sum(prefix) + 1):
            grow(prefix + [k])

    grow([])
    rows.sort()

    def emit(chosen: list[tuple[int, ...]]) -> TwoComplex | None:
        sums = [sum(r[k] for r in chosen) for k in range(max_edges)]
        if any(sums[k] < sums[k + 1] for k in range(max_edges - 1)):
            return None
        words = [tuple(2 * k for k in range(max_edges) for _ in range(r[k])) for r in chosen]
        return complex_from_words(max_edges, words)

    def choose(start: int, chosen: list[tuple[int, ...]]):
        if chosen:
            X = emit(chosen)
            if X is not None:
                yield X
        if len(chosen) == max_cells:
            return
        for i in range(start, len(rows)):
            yield from choose(i, chosen + [rows[i]])

    yield from choose(0, [])
