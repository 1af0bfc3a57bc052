"""Bounded enumeration of immersions into a two-complex and the scans built on it.

An immersion of graphs ``Θ -> Γ`` is stored as a folded graph whose half-edge
labels are the half-edge ids of ``Γ``; the vertex map is carried separately so
that isolated vertices keep their image.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Sequence

from . import kernels
from .complexes import (
    DEFAULT_CAP,
    EdgeClass,
    TwoComplex,
    classify_edge,
    fundamental_group_presentation,
    has_proper_powers,
    is_bireducible,
    is_collapsible,
    reduce,
    restrict,
)
from .errors import BudgetExceeded, PreconditionError
from .graphs import GraphMorphism, SerreGraph, is_immersion, subgraph
from .homology import homology
from .presentations import Pi1Status, pi1_status
from .results import Answer, Check, Outcome

DEFAULT_MAX_VERTICES = 5
DEFAULT_SUBSET_CAP = 16
DEFAULT_RECORD_CAP = 100_000

# adjacency of a partial immersion: (vertex, half-edge of Γ) -> target vertex
_Adj = dict[tuple[int, int], int]


@dataclass(frozen=True, eq=False)
class GraphImmersion:
    """A connected folded graph over ``Γ``; ``code`` is its canonical key."""

    theta: GraphMorphism
    code: tuple

    @property
    def graph(self) -> SerreGraph:
        return self.theta.domain


def _code(n: int, imgs: Sequence[int], adj: _Adj, out: Sequence[Sequence[int]]) -> tuple[tuple, list[int]]:
    """Least breadth-first code over all roots, with the vertex order realising it."""
    best = None
    best_order: list[int] = []
    for root in range(n):
        order = {root: 0}
        seq = [root]
        rows = []
        i = 0
        while i < len(seq):
            v = seq[i]
            i += 1
            row = []
            for h in out[imgs[v]]:
                t = adj.get((v, h))
                if t is None:
                    continue
                if t not in order:
                    order[t] = len(seq)
                    seq.append(t)
                row.append((h, order[t]))
            rows.append((imgs[v], tuple(row)))
        code = (n, tuple(rows))
        if best is None or code < best:
            best, best_order = code, seq
    return best, best_order


def _relabel(imgs: Sequence[int], adj: _Adj, order: Sequence[int]) -> tuple[tuple[int, ...], _Adj]:
    pos = {v: i for i, v in enumerate(order)}
    return (
        tuple(imgs[v] for v in order),
        {(pos[v], h): pos[t] for (v, h), t in adj.items()},
    )


def _extensions(n: int, imgs: tuple[int, ...], adj: _Adj, gamma: SerreGraph, max_vertices: int):
    for v in range(n):
        for h in gamma.out[imgs[v]]:
            if (v, h) in adj:
                continue
            target = gamma.dst[h]
            for u in range(n):
                if imgs[u] == target and (u, h ^ 1) not in adj:
                    new = dict(adj)
                    new[(v, h)] = u
                    new[(u, h ^ 1)] = v
                    yield n, imgs, new
            if n < max_vertices:
                new = dict(adj)
                new[(v, h)] = n
                new[(n, h ^ 1)] = v
                yield n + 1, imgs + (target,), new


def _to_immersion(gamma: SerreGraph, code: tuple, imgs: tuple[int, ...], adj: _Adj) -> GraphImmersion:
    src: list[int] = []
    dst: list[int] = []
    labels: list[int] = []
    for v in range(len(imgs)):
        for h in gamma.out[imgs[v]]:
            t = adj.get((v, h))
            if t is None or (t, h ^ 1) < (v, h):
                continue
            src += [v, t]
            dst += [t, v]
            labels += [h, h ^ 1]
    g = SerreGraph(len(imgs), tuple(src), tuple(dst), tuple(labels))
    return GraphImmersion(GraphMorphism(g, gamma, imgs, tuple(labels)), code)


def enumerate_graph_immersions(gamma: SerreGraph, max_vertices: int) -> Iterator[GraphImmersion]:
    """Every connected immersion into ``gamma`` with at most ``max_vertices`` vertices, up to isomorphism.

    Graphs are grown one edge at a time (every connected folded graph is
    reached through connected folded subgraphs) and deduplicated by a
    canonical breadth-first code. The stream is sorted by that code.
    """
    if max_vertices < 1:
        return
    out = [sorted(hs) for hs in gamma.out]
    seen: dict[tuple, tuple[tuple[int, ...], _Adj]] = {}
    frontier = []
    for x in range(gamma.num_vertices):
        code, _ = _code(1, (x,), {}, out)
        seen[code] = ((x,), {})
        frontier.append(((x,), {}))
    while frontier:
        nxt = []
        for imgs, adj in frontier:
            for n, imgs2, adj2 in _extensions(len(imgs), imgs, adj, gamma, max_vertices):
                code, order = _code(n, imgs2, adj2, out)
                if code in seen:
                    continue
                rep = _relabel(imgs2, adj2, order)
                seen[code] = rep
                nxt.append(rep)
        frontier = nxt
    for code in sorted(seen):
        imgs, adj = seen[code]
        yield _to_immersion(gamma, code, imgs, adj)


# --- pullback cycles ---------------------------------------------------------------


@dataclass(frozen=True)
class PullbackCycle:
    """A closed component of ``Θ ×_Γ 𝕊``: a lift of cell ``cell`` wound ``degree`` times."""

    cell: int
    start: tuple[int, int]
    path: tuple[int, ...]
    degree: int


def pullback_cycles(theta: GraphMorphism, X: TwoComplex) -> tuple[PullbackCycle, ...]:
    """Cycles of the pullback of the attaching circles of ``X`` along ``theta``.

    Arc components are dropped. Cycles are ordered by cell, then by the
    smallest (vertex, position) node they pass through.
    """
    if theta.codomain.num_half_edges != X.graph.num_half_edges:
        raise ValueError("immersion does not map into the one-skeleton of the complex")
    if not is_immersion(theta):
        raise PreconditionError("map is not an immersion")
    g = theta.domain
    nlab = X.graph.num_half_edges
    out_target = [-1] * (g.num_vertices * nlab)
    out_edge = [-1] * (g.num_vertices * nlab)
    for h in range(g.num_half_edges):
        slot = g.src[h] * nlab + theta.emap[h]
        out_target[slot] = g.dst[h]
        out_edge[slot] = h
    found = []
    for c, path in enumerate(X.cells):
        n = len(path)
        for node, edges in kernels.lift_cycles(out_target, out_edge, nlab, g.num_vertices, list(path)):
            found.append(PullbackCycle(c, divmod(node, n), tuple(edges), len(edges) // n))
    return tuple(found)


@dataclass(frozen=True, eq=False)
class ImmersedComplex:
    """``Θ`` together with a selection of pullback cycles used as two-cells."""

    immersion: GraphImmersion
    cycles: tuple[PullbackCycle, ...]
    selected: tuple[int, ...]
    complex: TwoComplex


def immersed_subcomplexes(
    immersion: GraphImmersion | GraphMorphism, X: TwoComplex, cap: int = DEFAULT_SUBSET_CAP
) -> Iterator[ImmersedComplex]:
    """One complex per subset of the pullback cycles, in increasing bitmask order."""
    if isinstance(immersion, GraphMorphism):
        immersion = GraphImmersion(immersion, ())
    cycles = pullback_cycles(immersion.theta, X)
    if len(cycles) > cap:
        raise BudgetExceeded(f"{len(cycles)} pullback cycles exceed the subset cap {cap}", len(cycles))
    for mask in range(1 << len(cycles)):
        sel = tuple(i for i in range(len(cycles)) if mask >> i & 1)
        Y = TwoComplex(immersion.graph, tuple(cycles[i].path for i in sel))
        yield ImmersedComplex(immersion, cycles, sel, Y)


# --- scans ------------------------------------------------------------------------------


@dataclass(frozen=True)
class ScanRecord:
    immersion: int
    selected: tuple[int, ...]
    vertices: int
    edges: int
    cells: int
    chi: int
    b1: int
    b2: int
    torsion: tuple[int, ...]
    pi1: Pi1Status | None
    pi1_reason: str
    verdict: str

    def fields(self) -> dict[str, object]:
        return {
            "immersion": self.immersion,
            "cells": "+".join(map(str, self.selected)) or "-",
            "V": self.vertices,
            "E": self.edges,
            "F": self.cells,
            "chi": self.chi,
            "b1": self.b1,
            "b2": self.b2,
            "torsion": ",".join(map(str, self.torsion)) or "-",
            "pi1": self.pi1.value if self.pi1 is not None else "skipped",
            "verdict": self.verdict,
        }


@dataclass(frozen=True)
class ScanReport:
    kind: str
    records: tuple[ScanRecord, ...]
    violations: tuple[ScanRecord, ...]
    potential_violations: tuple[ScanRecord, ...]
    bound_reached: bool
    immersions: int

    @property
    def status(self) -> str:
        if self.violations:
            return "violation"
        if self.potential_violations or self.bound_reached:
            return "inconclusive"
        return "clean"


def _npi_verdict(chi: int, status: Pi1Status | None) -> str:
    if chi < 1 or status is Pi1Status.TRIVIAL:
        return "ok"
    return "violation" if status is Pi1Status.NONTRIVIAL else "potential"


def _wnpi_verdict(chi: int, status: Pi1Status | None) -> str:
    return "violation" if chi >= 2 else "ok"


def _run_scan(kind, verdict_of, X, max_vertices, subset_cap, record_cap) -> ScanReport:
    records: list[ScanRecord] = []
    bound = False
    count = 0
    for idx, imm in enumerate(enumerate_graph_immersions(X.graph, max_vertices)):
        count += 1
        try:
            subs = list(immersed_subcomplexes(imm, X, subset_cap))
        except BudgetExceeded:
            bound = True
            continue
        for sub in subs:
            if len(records) >= record_cap:
                bound = True
                break
            records.append(_record(idx, sub, verdict_of))
        if bound and len(records) >= record_cap:
            break
    return ScanReport(
        kind,
        tuple(records),
        tuple(r for r in records if r.verdict == "violation"),
        tuple(r for r in records if r.verdict == "potential"),
        bound,
        count,
    )


def _record(idx: int, sub: ImmersedComplex, verdict_of) -> ScanRecord:
    Y = sub.complex
    h = homology(Y)
    chi = Y.euler_char()
    assert chi == h.b0 - h.b1 + h.b2, "Euler-Poincare identity failed on a scan record"
    status, reason = (None, "")
    if chi >= 1:
        status, reason = pi1_status(fundamental_group_presentation(Y))
    g = Y.graph
    return ScanRecord(
        idx, sub.selected, g.num_vertices, g.num_edges, Y.num_cells, chi, h.b1, h.b2,
        h.torsion, status, reason, verdict_of(chi, status),
    )


def npi_scan(
    X: TwoComplex,
    max_vertices: int = DEFAULT_MAX_VERTICES,
    subset_cap: int = DEFAULT_SUBSET_CAP,
    record_cap: int = DEFAULT_RECORD_CAP,
) -> ScanReport:
    """Look for immersed ``Y`` with ``χ(Y) ≥ 1`` and nontrivial fundamental group.

    A certified nontrivial group makes a violation; an undecided one makes a
    potential violation.
    """
    return _run_scan("npi", _npi_verdict, X, max_vertices, subset_cap, record_cap)


def wnpi_scan(
    X: TwoComplex,
    max_vertices: int = DEFAULT_MAX_VERTICES,
    subset_cap: int = DEFAULT_SUBSET_CAP,
    record_cap: int = DEFAULT_RECORD_CAP,
) -> ScanReport:
    """Look for immersed ``Y`` with ``χ(Y) ≥ 2``."""
    return _run_scan("wnpi", _wnpi_verdict, X, max_vertices, subset_cap, record_cap)


# --- NTPI -------------------------------------------------------------------------------


def collapse_free_faces(Y: TwoComplex) -> TwoComplex:
    """Remove collapsing edges with their cell, and hanging edges with their leaf vertex."""
    while True:
        g = Y.graph
        step = None
        for e in range(g.num_edges):
            cls = classify_edge(Y, e)
            if cls is EdgeClass.COLLAPSING:
                step = ("cell", e)
                break
            if cls is EdgeClass.FREE and g.src[2 * e] != g.dst[2 * e]:
                leaf = next((v for v in (g.src[2 * e], g.dst[2 * e]) if g.degree(v) == 1), None)
                if leaf is not None:
                    step = ("leaf", e, leaf)
                    break
        if step is None:
            return Y
        if step[0] == "cell":
            Y = reduce(Y, step[1])
        else:
            _, e, leaf = step
            keep = [k for k in range(g.num_edges) if k != e]
            verts = [v for v in range(g.num_vertices) if v != leaf]
            sub, inc = subgraph(g, verts, keep)
            hmap = {h: i for i, h in enumerate(inc.emap)}
            Y = TwoComplex(sub, tuple(tuple(hmap[h] for h in c) for c in Y.cells), Y.cell_names, Y.alphabet)


def _blocks(g: SerreGraph) -> list[list[int]]:
    """Edge orbits grouped into blocks; every loop is a block of its own."""
    disc = [-1] * g.num_vertices
    low = [0] * g.num_vertices
    stack: list[int] = []
    pushed: set[int] = set()
    blocks: list[list[int]] = []
    clock = 0

    def dfs(v: int, via: int) -> None:
        nonlocal clock
        disc[v] = low[v] = clock
        clock += 1
        for h in g.out[v]:
            k = h >> 1
            w = g.dst[h]
            if k == via or w == v:
                continue
            if disc[w] < 0:
                stack.append(k)
                pushed.add(k)
                dfs(w, k)
                low[v] = min(low[v], low[w])
                if low[w] >= disc[v]:
                    block = []
                    while True:
                        top = stack.pop()
                        block.append(top)
                        if top == k:
                            break
                    blocks.append(sorted(block))
            elif k not in pushed:
                stack.append(k)
                pushed.add(k)
                low[v] = min(low[v], disc[w])

    for v in range(g.num_vertices):
        if disc[v] < 0:
            dfs(v, -1)
    blocks += [[k] for k in range(g.num_edges) if g.src[2 * k] == g.dst[2 * k]]
    return blocks


def wedge_pieces(Y: TwoComplex) -> list[TwoComplex]:
    """Split at cut vertices: blocks of the graph, merged when a cell meets both."""
    g = Y.graph
    owner = list(range(g.num_edges))

    def find(x: int) -> int:
        while owner[x] != x:
            owner[x] = owner[owner[x]]
            x = owner[x]
        return x

    for block in _blocks(g):
        for k in block[1:]:
            owner[find(k)] = find(block[0])
    for path in Y.cells:
        for h in path[1:]:
            owner[find(h >> 1)] = find(path[0] >> 1)
    groups: dict[int, list[int]] = {}
    for k in range(g.num_edges):
        groups.setdefault(find(k), []).append(k)
    pieces = []
    for edges in sorted(groups.values()):
        es = set(edges)
        cells = [c for c, path in enumerate(Y.cells) if path[0] >> 1 in es]
        pieces.append(restrict(Y, cells, edges))
    return pieces


def is_c_like(Y: TwoComplex) -> bool:
    """The graph is one embedded cycle (cells then wrap around it a whole number of times)."""
    g = Y.graph
    return (
        g.num_edges > 0
        and g.num_vertices == g.num_edges
        and g.is_connected()
        and all(g.degree(v) == 2 for v in range(g.num_vertices))
    )


@dataclass(frozen=True)
class NTPIClassification:
    witnessed: bool
    pieces: tuple[tuple[int, bool], ...]  # (chi, c_like) per piece


def ntpi_classify(Y: TwoComplex) -> NTPIClassification:
    """Try to exhibit ``Y`` as a wedge of cycle-like pieces and pieces with ``χ ≤ 0``."""
    pieces = wedge_pieces(collapse_free_faces(Y))
    info = tuple((P.euler_char(), is_c_like(P)) for P in pieces)
    return NTPIClassification(all(c_like or chi <= 0 for chi, c_like in info), info)


def ntpi_scan(
    X: TwoComplex,
    max_vertices: int = DEFAULT_MAX_VERTICES,
    subset_cap: int = DEFAULT_SUBSET_CAP,
    record_cap: int = DEFAULT_RECORD_CAP,
) -> ScanReport:
    """Records that the wedge decomposition cannot witness become potential violations."""
    records: list[ScanRecord] = []
    bound = False
    count = 0
    for idx, imm in enumerate(enumerate_graph_immersions(X.graph, max_vertices)):
        count += 1
        try:
            subs = list(immersed_subcomplexes(imm, X, subset_cap))
        except BudgetExceeded:
            bound = True
            continue
        for sub in subs:
            if len(records) >= record_cap:
                bound = True
                break
            witnessed = ntpi_classify(sub.complex).witnessed
            records.append(_record(idx, sub, lambda chi, st: "ok" if witnessed else "potential"))
        if len(records) >= record_cap:
            break
    return ScanReport(
        "ntpi",
        tuple(records),
        (),
        tuple(r for r in records if r.verdict == "potential"),
        bound,
        count,
    )


# --- pullback inequality ---------------------------------------------------------------


@dataclass(frozen=True)
class PullbackRow:
    immersion: int
    chi: int
    cycles: int
    collapsible: Outcome | None
    holds: bool | None


def bireducible_pullback_rows(X: TwoComplex, max_vertices: int = 4, cap: int = DEFAULT_CAP) -> Iterator[PullbackRow]:
    """Per immersion: is the pullback complex collapsible, or are there at most ``-χ(Θ)`` cycles?"""
    bi = is_bireducible(X, cap)
    if bi.outcome is not Outcome.TRUE:
        raise PreconditionError(f"complex is not certified bireducible ({bi.outcome.value})")
    powers, cell = has_proper_powers(X, cap)
    if powers is not Answer.NO:
        raise PreconditionError(f"attaching maps are not certified primitive (cell {cell})")
    for idx, imm in enumerate(enumerate_graph_immersions(X.graph, max_vertices)):
        cycles = pullback_cycles(imm.theta, X)
        chi = imm.graph.euler_char()
        if len(cycles) <= -chi:
            yield PullbackRow(idx, chi, len(cycles), None, True)
            continue
        col = is_collapsible(TwoComplex(imm.graph, tuple(c.path for c in cycles)), cap).outcome
        holds = None if col is Outcome.BUDGET_EXCEEDED else col is Outcome.TRUE
        yield PullbackRow(idx, chi, len(cycles), col, holds)


def bireducible_pullback_check(X: TwoComplex, max_vertices: int = 4, cap: int = DEFAULT_CAP) -> Check:
    """``TRUE`` when every enumerated immersion passes; the witness is the first failing immersion index."""
    checked = 0
    budget = False
    for row in bireducible_pullback_rows(X, max_vertices, cap):
        checked += 1
        if row.holds is False:
            return Check(Outcome.FALSE, (row.immersion,), checked)
        if row.holds is None:
            budget = True
    return Check(Outcome.BUDGET_EXCEEDED if budget else Outcome.TRUE, None, checked)
