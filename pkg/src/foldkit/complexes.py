"""Combinatorial two-complexes: a graph plus immersed attaching cycles."""
from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

from . import kernels
from .errors import BudgetExceeded, DegenerateInputError, ParseError, PreconditionError
from .graphs import GraphBuilder, SerreGraph, parse_graph_lines, rose, subgraph
from .presentations import Presentation, parse_presentation
from .results import Answer, Check, Outcome
from .words import Alphabet, Word, cyclic_reduce, smallest_period

DEFAULT_CAP = 1 << 20

# Incremented by every call to ``reduce``; each call asserts that the Euler
# characteristic is unchanged, so the counter records how many checks ran.
reduction_checks = 0


@dataclass(frozen=True, eq=False)
class TwoComplex:
    graph: SerreGraph
    cells: tuple[tuple[int, ...], ...]
    cell_names: tuple[str, ...] | None = None
    alphabet: Alphabet | None = None

    def __post_init__(self):
        g = self.graph
        object.__setattr__(self, "cells", tuple(tuple(c) for c in self.cells))
        for i, path in enumerate(self.cells):
            if not path:
                raise DegenerateInputError(f"cell {i} has an empty attaching path")
            n = len(path)
            for j, h in enumerate(path):
                if not 0 <= h < g.num_half_edges:
                    raise ValueError(f"cell {i} uses unknown half-edge {h}")
                nxt = path[(j + 1) % n]
                if g.dst[h] != g.src[nxt]:
                    raise ValueError(f"cell {i} is not a closed path at position {j}")
                if nxt == h ^ 1:
                    raise ValueError(f"cell {i} backtracks at position {j}")

    def __repr__(self) -> str:
        return f"TwoComplex(V={self.graph.num_vertices}, E={self.graph.num_edges}, F={len(self.cells)})"

    @property
    def num_cells(self) -> int:
        return len(self.cells)

    def cell_name(self, i: int) -> str:
        return self.cell_names[i] if self.cell_names else f"c{i}"

    def euler_char(self) -> int:
        return self.graph.num_vertices - self.graph.num_edges + len(self.cells)

    @cached_property
    def traversals(self) -> tuple[tuple[int, ...], ...]:
        """``traversals[c][k]``: how often cell ``c`` crosses edge orbit ``k``."""
        out = []
        for path in self.cells:
            row = [0] * self.graph.num_edges
            for h in path:
                row[h >> 1] += 1
            out.append(tuple(row))
        return tuple(out)

    @cached_property
    def masks(self) -> tuple[list[int], list[int]]:
        """Per cell: bitmask of traversed edges and of edges traversed exactly once."""
        cell_masks, once_masks = [], []
        for row in self.traversals:
            m = o = 0
            for k, n in enumerate(row):
                if n:
                    m |= 1 << k
                if n == 1:
                    o |= 1 << k
            cell_masks.append(m)
            once_masks.append(o)
        return cell_masks, once_masks


class EdgeClass(enum.Enum):
    REDUCING = "reducing"
    COLLAPSING = "collapsing"
    FREE = "free"
    NEITHER = "neither"


def classify_edge(X: TwoComplex, e: int) -> EdgeClass:
    if not 0 <= e < X.graph.num_edges:
        raise ValueError(f"edge {e} out of range")
    counts = [row[e] for row in X.traversals if row[e]]
    total = sum(counts)
    if total == 0:
        return EdgeClass.FREE
    if total == 1:
        return EdgeClass.COLLAPSING
    if len(counts) == 1:
        return EdgeClass.REDUCING
    return EdgeClass.NEITHER


def restrict(X: TwoComplex, cells: Iterable[int], edges: Iterable[int] = (), vertices: Iterable[int] = ()) -> TwoComplex:
    """Subcomplex on ``cells`` with their traversed edges plus ``edges`` and ``vertices``."""
    cells = sorted(set(cells))
    es = set(edges)
    for c in cells:
        es.update(h >> 1 for h in X.cells[c])
    sub, inc = subgraph(X.graph, vertices, es)
    hmap = {h: i for i, h in enumerate(inc.emap)}
    new_cells = tuple(tuple(hmap[h] for h in X.cells[c]) for c in cells)
    names = tuple(X.cell_name(c) for c in cells) if X.cell_names else None
    return TwoComplex(sub, new_cells, names, X.alphabet)


def reduce(X: TwoComplex, e: int) -> TwoComplex:
    """Remove edge orbit ``e`` together with the unique cell crossing it."""
    global reduction_checks
    cls = classify_edge(X, e)
    if cls not in (EdgeClass.REDUCING, EdgeClass.COLLAPSING):
        raise PreconditionError(f"edge {e} is {cls.value}, not reducing")
    owners = [c for c, row in enumerate(X.traversals) if row[e]]
    assert len(owners) == 1, "a reducing edge must be crossed by exactly one cell"
    keep_edges = [k for k in range(X.graph.num_edges) if k != e]
    sub, inc = subgraph(X.graph, range(X.graph.num_vertices), keep_edges)
    hmap = {h: i for i, h in enumerate(inc.emap)}
    keep_cells = [c for c in range(X.num_cells) if c != owners[0]]
    cells = tuple(tuple(hmap[h] for h in X.cells[c]) for c in keep_cells)
    names = tuple(X.cell_name(c) for c in keep_cells) if X.cell_names else None
    Y = TwoComplex(sub, cells, names, X.alphabet)
    reduction_checks += 1
    assert Y.euler_char() == X.euler_char(), "reduction changed the Euler characteristic"
    return Y


def _scan(X: TwoComplex, mode: int, cap: int, forbidden: int = 0) -> Check:
    if cap <= 0:
        raise ValueError("cap must be positive")
    cell_masks, once_masks = X.masks
    if not cell_masks:
        return Check(Outcome.TRUE, None, 0)
    subset, explored, finished = kernels.scan_subsets(cell_masks, once_masks, forbidden, mode, cap)
    if subset >= 0:
        witness = tuple(c for c in range(len(cell_masks)) if subset >> c & 1)
        return Check(Outcome.FALSE, witness, explored)
    if not finished:
        return Check(Outcome.BUDGET_EXCEEDED, None, explored)
    return Check(Outcome.TRUE, None, explored)


def is_reducible(X: TwoComplex, cap: int = DEFAULT_CAP) -> Check:
    """Every subcomplex with a cell has an edge crossed by exactly one of its cells."""
    return _scan(X, kernels.REDUCIBLE, cap)


def is_collapsible(X: TwoComplex, cap: int = DEFAULT_CAP) -> Check:
    """Every subcomplex with a cell has an edge crossed exactly once."""
    return _scan(X, kernels.COLLAPSIBLE, cap)


def is_bireducible(X: TwoComplex, cap: int = DEFAULT_CAP) -> Check:
    """Every subcomplex with at least two cells has reducing edges for two distinct cells."""
    return _scan(X, kernels.BIREDUCIBLE, cap)


def _edges_mask(edges: Iterable[int]) -> int:
    m = 0
    for k in edges:
        m |= 1 << k
    return m


def _check_connected_subgraph(X: TwoComplex, edges: Sequence[int], vertices: Sequence[int]) -> SerreGraph:
    for k in edges:
        if not 0 <= k < X.graph.num_edges:
            raise ValueError(f"edge {k} out of range")
    sub, _ = subgraph(X.graph, vertices, edges)
    if sub.num_vertices == 0 or not sub.is_connected():
        raise PreconditionError("the subgraph must be nonempty and connected")
    return sub


def is_small(X: TwoComplex, edges: Iterable[int], vertices: Iterable[int] = (), cap: int = DEFAULT_CAP) -> Check:
    """Every subcomplex containing the subgraph and a cell reduces along an edge outside it."""
    edges, vertices = sorted(set(edges)), sorted(set(vertices))
    _check_connected_subgraph(X, edges, vertices)
    return _scan(X, kernels.REDUCIBLE, cap, _edges_mask(edges))


@dataclass(frozen=True)
class MagnusBasis:
    base_vertex: int
    tree: tuple[int, ...]
    loops: tuple[tuple[int, ...], ...]
    words: tuple[Word, ...] | None

    @property
    def rank(self) -> int:
        return len(self.loops)


def magnus_subgroup(X: TwoComplex, edges: Iterable[int], vertices: Iterable[int] = (), cap: int = DEFAULT_CAP) -> MagnusBasis:
    """Free basis of the fundamental group of a small subgraph.

    Loops are half-edge paths of the ambient graph based at the least vertex
    of the subgraph, one per edge outside a breadth-first spanning tree.
    """
    edges, vertices = sorted(set(edges)), sorted(set(vertices))
    check = is_small(X, edges, vertices, cap)
    if check.outcome is not Outcome.TRUE:
        raise PreconditionError("subgraph is not certified small")
    sub, inc = subgraph(X.graph, vertices, edges)
    tree, _ = sub.spanning_forest()
    paths = sub.tree_paths(0, tree)
    loops = []
    for k in range(sub.num_edges):
        if k in tree:
            continue
        h = 2 * k
        local = list(paths[sub.src[h]]) + [h] + [e ^ 1 for e in reversed(paths[sub.dst[h]])]
        loops.append(tuple(inc.emap[x] for x in local))
    words = None
    if X.graph.labels is not None:
        words = tuple(Word(tuple(X.graph.labels[h] for h in loop)) for loop in loops)
    return MagnusBasis(inc.vmap[0], tuple(sorted(inc.emap[2 * k] >> 1 for k in tree)), tuple(loops), words)


# --- staggerings -------------------------------------------------------------------------


@dataclass(frozen=True)
class Staggering:
    cell_order: tuple[int, ...]
    edge_order: tuple[int, ...]


def validate_staggering(X: TwoComplex, s: Staggering) -> bool:
    if sorted(s.cell_order) != list(range(X.num_cells)):
        return False
    if len(set(s.edge_order)) != len(s.edge_order):
        return False
    pos = {k: i for i, k in enumerate(s.edge_order)}
    spans = []
    for c in s.cell_order:
        ranks = [pos[k] for k, n in enumerate(X.traversals[c]) if n and k in pos]
        if not ranks:
            return False
        spans.append((min(ranks), max(ranks)))
    return all(a[0] < b[0] and a[1] < b[1] for a, b in zip(spans, spans[1:]))


def find_staggering(X: TwoComplex, cap: int = DEFAULT_CAP) -> Staggering | None:
    """Search ordered edge subsets; the cell order is forced by the minimal edges.

    Returns a validated staggering or None when the exhaustive search finds
    none. Raises ``BudgetExceeded`` after ``cap`` search nodes.
    """
    n = X.num_cells
    if n == 0:
        return Staggering((), ())
    cell_masks, _ = X.masks
    candidates = [k for k in range(X.graph.num_edges) if any(m >> k & 1 for m in cell_masks)]
    explored = 0

    def finish(order: list[int], cells_by_min: list[int]) -> Staggering | None:
        pos = {k: i for i, k in enumerate(order)}
        maxes = []
        for c in cells_by_min:
            maxes.append(max(pos[k] for k in order if cell_masks[c] >> k & 1))
        if all(a < b for a, b in zip(maxes, maxes[1:])):
            return Staggering(tuple(cells_by_min), tuple(order))
        return None

    def search(order: list[int], used: int, covered: int, cells_by_min: list[int]) -> Staggering | None:
        nonlocal explored
        explored += 1
        if explored > cap:
            raise BudgetExceeded("staggering search exceeded its cap", explored)
        if len(cells_by_min) == n:
            found = finish(order, cells_by_min)
            if found is not None:
                return found
        for k in candidates:
            if used >> k & 1:
                continue
            fresh = [c for c in range(n) if not covered >> c & 1 and cell_masks[c] >> k & 1]
            if len(fresh) > 1:
                continue
            new_covered = covered | (1 << fresh[0]) if fresh else covered
            # an edge that starts no cell and is crossed only by finished cells can only raise maxes
            res = search(order + [k], used | (1 << k), new_covered, cells_by_min + fresh)
            if res is not None:
                return res
        return None

    result = search([], 0, 0, [])
    if result is not None:
        assert validate_staggering(X, result), "staggering certificate failed to validate"
    return result


def has_proper_powers(X: TwoComplex, cap: int = DEFAULT_CAP) -> tuple[Answer, int | None]:
    """Exact on bireducible complexes; otherwise only an imprimitive cycle decides."""
    for c, path in enumerate(X.cells):
        if smallest_period(path) < len(path):
            return Answer.YES, c
    if is_bireducible(X, cap).outcome is Outcome.TRUE:
        return Answer.NO, None
    return Answer.UNKNOWN, None


# --- constructions and text format ---------------------------------------------------------


def presentation_complex(p: Presentation) -> TwoComplex:
    """One vertex, a loop per generator and a cell per cyclically reduced relator."""
    g = rose(len(p.alphabet), p.alphabet.names)
    cells = []
    for r in p.relators:
        if not len(r):
            raise DegenerateInputError("empty relator")
        cells.append(cyclic_reduce(r)[0].rep)
    names = tuple(f"r{i}" for i in range(len(cells)))
    return TwoComplex(g, tuple(cells), names, p.alphabet)


def fundamental_group_presentation(X: TwoComplex) -> Presentation:
    """Presentation read off a spanning forest: one generator per non-tree edge."""
    g = X.graph
    tree, _ = g.spanning_forest()
    gens = [k for k in range(g.num_edges) if k not in tree]
    index = {k: i for i, k in enumerate(gens)}
    alph = Alphabet([g.edge_name(k) for k in gens])
    rels = []
    for path in X.cells:
        w = Word(tuple(2 * index[h >> 1] + (h & 1) for h in path if (h >> 1) in index))
        if len(w):
            rels.append(w)
    return Presentation(alph, tuple(rels))


def parse_complex(text: str) -> TwoComplex:
    """Parse a complex file, or a presentation file (``generators:`` first)."""
    lines = []
    for i, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            lines.append((i, line))
    if lines and lines[0][1].startswith("generators"):
        return presentation_complex(parse_presentation(text))
    cell_lines = [(i, l) for i, l in lines if l.split()[0] == "cell"]
    graph_lines = [(i, l) for i, l in lines if l.split()[0] != "cell"]
    b, _, eindex, alph = parse_graph_lines(graph_lines)
    g = b.build(names=True)
    cells, names = [], []
    for lineno, line in cell_lines:
        head, colon, body = line.partition(":")
        parts = head.split()
        if not colon or len(parts) != 2 or parts[0] != "cell":
            raise ParseError("expected 'cell <name>: <edge path>'", lineno, 1)
        if parts[1] in names:
            raise ParseError(f"duplicate cell {parts[1]!r}", lineno)
        path = []
        pos = line.index(":") + 1
        for tok in body.split():
            col = line.index(tok, pos) + 1
            pos = col - 1 + len(tok)
            name, inv = (tok[:-3], True) if tok.endswith("^-1") else (tok, False)
            if name not in eindex:
                raise ParseError(f"unknown edge {name!r}", lineno, col)
            path.append(eindex[name] ^ (1 if inv else 0))
        if not path:
            raise ParseError("empty attaching path", lineno)
        cells.append(tuple(path))
        names.append(parts[1])
    try:
        return TwoComplex(g, tuple(cells), tuple(names), alph)
    except ValueError as exc:
        raise ParseError(str(exc)) from None


def format_complex(X: TwoComplex) -> str:
    from .graphs import format_graph

    out = format_graph(X.graph, X.alphabet)
    for i, path in enumerate(X.cells):
        toks = [X.graph.edge_name(h >> 1) + ("^-1" if h & 1 else "") for h in path]
        out += f"cell {X.cell_name(i)}: {' '.join(toks)}\n"
    return out


def complex_from_words(ngens: int, words: Sequence[Sequence[int]]) -> TwoComplex:
    """Cells given as cyclically reduced words over a rose with ``ngens`` petals."""
    return TwoComplex(rose(ngens), tuple(tuple(w) for w in words))
