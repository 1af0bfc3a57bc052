"""Serre graphs, combinatorial maps, Stallings folding and fiber products.

Edges are stored as half-edge pairs: orbit ``k`` consists of half-edges
``2k`` and ``2k + 1``, which are inverse to each other. "Number of edges"
always means the number of orbits. Labels are ints with the same inverse
convention (``label(h ^ 1) == label(h) ^ 1``): free-group letters for graphs
over a rose, or half-edge ids of a target graph for immersions.
"""
from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, NamedTuple, Sequence

from .errors import ParseError

Code = tuple


@dataclass(frozen=True, eq=False)
class SerreGraph:
    num_vertices: int
    src: tuple[int, ...]
    dst: tuple[int, ...]
    labels: tuple[int, ...] | None = None
    vertex_names: tuple[str, ...] | None = None
    edge_names: tuple[str, ...] | None = None

    def __post_init__(self):
        if len(self.src) != len(self.dst) or len(self.src) % 2:
            raise ValueError("half-edge arrays must pair up")
        for h in range(0, len(self.src), 2):
            if self.src[h] != self.dst[h + 1] or self.dst[h] != self.src[h + 1]:
                raise ValueError(f"half-edge {h} and its inverse do not swap endpoints")
        if self.labels is not None:
            if len(self.labels) != len(self.src):
                raise ValueError("one label per half-edge required")
            for h in range(0, len(self.src), 2):
                if self.labels[h + 1] != self.labels[h] ^ 1:
                    raise ValueError(f"label of half-edge {h + 1} is not the inverse label")
        for v in self.src:
            if not 0 <= v < self.num_vertices:
                raise ValueError(f"vertex {v} out of range")

    def __repr__(self) -> str:
        return f"SerreGraph(V={self.num_vertices}, E={self.num_edges})"

    @property
    def num_edges(self) -> int:
        return len(self.src) // 2

    @property
    def num_half_edges(self) -> int:
        return len(self.src)

    @property
    def is_labeled(self) -> bool:
        return self.labels is not None

    @cached_property
    def out(self) -> tuple[tuple[int, ...], ...]:
        """Half-edges leaving each vertex, in increasing id order."""
        adj: list[list[int]] = [[] for _ in range(self.num_vertices)]
        for h, v in enumerate(self.src):
            adj[v].append(h)
        return tuple(tuple(a) for a in adj)

    @cached_property
    def out_by_label(self) -> tuple[dict[int, int], ...]:
        """``label -> half-edge`` per vertex; only meaningful when folded."""
        assert self.labels is not None
        return tuple({self.labels[h]: h for h in hs} for hs in self.out)

    def degree(self, v: int) -> int:
        return len(self.out[v])

    def is_folded(self) -> bool:
        if self.labels is None:
            raise ValueError("folding needs a labelled graph")
        return all(len({self.labels[h] for h in hs}) == len(hs) for hs in self.out)

    @cached_property
    def component_index(self) -> tuple[int, ...]:
        comp = [-1] * self.num_vertices
        c = 0
        for s in range(self.num_vertices):
            if comp[s] >= 0:
                continue
            comp[s] = c
            stack = [s]
            while stack:
                v = stack.pop()
                for h in self.out[v]:
                    t = self.dst[h]
                    if comp[t] < 0:
                        comp[t] = c
                        stack.append(t)
            c += 1
        return tuple(comp)

    @property
    def num_components(self) -> int:
        return max(self.component_index, default=-1) + 1

    def components(self) -> list[tuple[list[int], list[int]]]:
        """``(vertices, edge orbits)`` for each connected component."""
        comps: list[tuple[list[int], list[int]]] = [([], []) for _ in range(self.num_components)]
        for v, c in enumerate(self.component_index):
            comps[c][0].append(v)
        for k in range(self.num_edges):
            comps[self.component_index[self.src[2 * k]]][1].append(k)
        return comps

    def is_connected(self) -> bool:
        return self.num_components <= 1

    def euler_char(self) -> int:
        return self.num_vertices - self.num_edges

    def betti1(self) -> tuple[list[int], int]:
        per = [len(es) - len(vs) + 1 for vs, es in self.components()]
        return per, sum(per)

    def spanning_forest(self) -> tuple[frozenset[int], tuple[int, ...]]:
        """Tree edge orbits of a BFS spanning forest and each vertex's root."""
        root = [-1] * self.num_vertices
        tree: set[int] = set()
        for s in range(self.num_vertices):
            if root[s] >= 0:
                continue
            root[s] = s
            queue = deque([s])
            while queue:
                v = queue.popleft()
                for h in self.out[v]:
                    t = self.dst[h]
                    if root[t] < 0:
                        root[t] = s
                        tree.add(h >> 1)
                        queue.append(t)
        return frozenset(tree), tuple(root)

    def tree_paths(self, base: int, tree: Iterable[int]) -> dict[int, tuple[int, ...]]:
        """Half-edge path from ``base`` to each vertex inside the tree ``tree``."""
        tree = set(tree)
        paths: dict[int, tuple[int, ...]] = {base: ()}
        queue = deque([base])
        while queue:
            v = queue.popleft()
            for h in self.out[v]:
                t = self.dst[h]
                if (h >> 1) in tree and t not in paths:
                    paths[t] = paths[v] + (h,)
                    queue.append(t)
        return paths

    def vertex_name(self, v: int) -> str:
        return self.vertex_names[v] if self.vertex_names else f"v{v}"

    def edge_name(self, k: int) -> str:
        return self.edge_names[k] if self.edge_names else f"e{k}"


class GraphBuilder:
    """Mutable single-owner builder; ``build`` freezes into a ``SerreGraph``."""

    def __init__(self, labeled: bool = True):
        self.labeled = labeled
        self.n = 0
        self.src: list[int] = []
        self.dst: list[int] = []
        self.labels: list[int] = []
        self.vertex_names: list[str] = []
        self.edge_names: list[str] = []

    def add_vertex(self, name: str | None = None) -> int:
        self.vertex_names.append(name if name is not None else f"v{self.n}")
        self.n += 1
        return self.n - 1

    def add_edge(self, u: int, v: int, label: int | None = None, name: str | None = None) -> int:
        h = len(self.src)
        self.src += [u, v]
        self.dst += [v, u]
        if self.labeled:
            if label is None:
                raise ValueError("labelled builder needs a label")
            self.labels += [label, label ^ 1]
        self.edge_names.append(name if name is not None else f"e{h // 2}")
        return h

    def add_path(self, u: int, v: int, labels: Sequence[int]) -> list[int]:
        """Subdivided path from ``u`` to ``v`` reading ``labels``."""
        if not labels:
            raise ValueError("empty path")
        hs = []
        cur = u
        for i, lab in enumerate(labels):
            nxt = v if i == len(labels) - 1 else self.add_vertex()
            hs.append(self.add_edge(cur, nxt, lab))
            cur = nxt
        return hs

    def build(self, names: bool = False) -> SerreGraph:
        return SerreGraph(
            self.n,
            tuple(self.src),
            tuple(self.dst),
            tuple(self.labels) if self.labeled else None,
            tuple(self.vertex_names) if names else None,
            tuple(self.edge_names) if names else None,
        )


def rose(rank: int, names: Sequence[str] | None = None) -> SerreGraph:
    """One vertex with a loop per generator; half-edge ``h`` carries label ``h``."""
    b = GraphBuilder()
    b.add_vertex("o")
    for g in range(rank):
        b.add_edge(0, 0, 2 * g, names[g] if names else None)
    return b.build(names=names is not None)


@dataclass(frozen=True, eq=False)
class GraphMorphism:
    domain: SerreGraph
    codomain: SerreGraph
    vmap: tuple[int, ...]
    emap: tuple[int, ...]

    def validate(self) -> None:
        a, b = self.domain, self.codomain
        if len(self.vmap) != a.num_vertices or len(self.emap) != a.num_half_edges:
            raise ValueError("map sizes do not match the domain")
        for h, img in enumerate(self.emap):
            if self.emap[h ^ 1] != img ^ 1:
                raise ValueError(f"edge map does not commute with inversion at {h}")
            if b.src[img] != self.vmap[a.src[h]]:
                raise ValueError(f"edge map does not commute with source at {h}")
            if a.labels is not None and b.labels is not None and a.labels[h] != b.labels[img]:
                raise ValueError(f"edge map does not preserve the label at {h}")

    def is_immersion(self) -> bool:
        return is_immersion(self)

    def then(self, other: GraphMorphism) -> GraphMorphism:
        """The composite ``other ∘ self``."""
        return GraphMorphism(
            self.domain,
            other.codomain,
            tuple(other.vmap[v] for v in self.vmap),
            tuple(other.emap[h] for h in self.emap),
        )

    @classmethod
    def identity(cls, g: SerreGraph) -> GraphMorphism:
        return cls(g, g, tuple(range(g.num_vertices)), tuple(range(g.num_half_edges)))


def label_map(g: SerreGraph, rank: int | None = None) -> GraphMorphism:
    """The labelling of a rose-labelled graph as a morphism to the rose."""
    if g.labels is None:
        raise ValueError("unlabelled graph")
    if rank is None:
        rank = (max(g.labels, default=-1) >> 1) + 1
    return GraphMorphism(g, rose(rank), (0,) * g.num_vertices, g.labels)


def is_immersion(f: GraphMorphism) -> bool:
    """Locally injective: distinct half-edges leaving a vertex have distinct images."""
    for hs in f.domain.out:
        images = [f.emap[h] for h in hs]
        if len(set(images)) != len(images):
            return False
    return True


def fold(g: SerreGraph, rng: random.Random | None = None) -> tuple[SerreGraph, GraphMorphism]:
    """Stallings-fold a labelled graph.

    Returns the folded graph and the surjective, label-preserving quotient
    map. With ``rng`` the next fold is chosen at random among all pending
    ones; the result is the same up to labelled isomorphism.
    """
    if g.labels is None:
        raise ValueError("folding needs a labelled graph")
    labels = g.labels
    vparent = list(range(g.num_vertices))
    eparent = list(range(g.num_half_edges))

    def vfind(v: int) -> int:
        while vparent[v] != v:
            vparent[v] = vparent[vparent[v]]
            v = vparent[v]
        return v

    out: list[dict[int, list[int]] | None] = [{} for _ in range(g.num_vertices)]
    for h, v in enumerate(g.src):
        out[v].setdefault(labels[h], []).append(h)

    def dup_labels(v: int) -> list[int]:
        return [lab for lab, hs in out[v].items() if len(hs) > 1]

    pending = {v for v in range(g.num_vertices) if dup_labels(v)}
    while pending:
        if rng is None:
            v = min(pending)
        else:
            v = rng.choice(sorted(pending))
        dups = dup_labels(v)
        if not dups:
            pending.discard(v)
            continue
        lab = min(dups) if rng is None else rng.choice(sorted(dups))
        hs = out[v][lab]
        if rng is None:
            h1, h2 = hs[0], hs[1]
        else:
            h1, h2 = rng.sample(hs, 2)
        t1, t2 = vfind(g.dst[h1]), vfind(g.dst[h2])
        hs.remove(h2)
        out[t2][lab ^ 1].remove(h2 ^ 1)
        eparent[h2] = h1
        eparent[h2 ^ 1] = h1 ^ 1
        if t1 != t2:
            small, big = (t1, t2) if sum(map(len, out[t1].values())) < sum(map(len, out[t2].values())) else (t2, t1)
            for key, lst in out[small].items():
                out[big].setdefault(key, []).extend(lst)
            out[small] = None
            vparent[small] = big
            pending.discard(small)
            if dup_labels(big):
                pending.add(big)
        v = vfind(v)
        if out[v] is not None and dup_labels(v):
            pending.add(v)
        else:
            pending.discard(v)

    def efind(h: int) -> int:
        while eparent[h] != h:
            h = eparent[h]
        return h

    vnew: dict[int, int] = {}
    for v in range(g.num_vertices):
        r = vfind(v)
        if r not in vnew:
            vnew[r] = len(vnew)
    knew: dict[int, int] = {}
    for k in range(g.num_edges):
        if eparent[2 * k] == 2 * k:
            knew[k] = len(knew)
    src, dst, labs = [], [], []
    for k in knew:
        for h in (2 * k, 2 * k + 1):
            src.append(vnew[vfind(g.src[h])])
            dst.append(vnew[vfind(g.dst[h])])
            labs.append(labels[h])
    folded = SerreGraph(len(vnew), tuple(src), tuple(dst), tuple(labs))
    vmap = tuple(vnew[vfind(v)] for v in range(g.num_vertices))
    emap = []
    for h in range(g.num_half_edges):
        s = efind(h)
        emap.append(2 * knew[s >> 1] + (s & 1))
    return folded, GraphMorphism(g, folded, vmap, tuple(emap))


class Pullback(NamedTuple):
    graph: SerreGraph
    proj_a: GraphMorphism
    proj_b: GraphMorphism
    pairs: tuple[tuple[int, int], ...]


def pullback(f: GraphMorphism, g: GraphMorphism) -> Pullback:
    """Fiber product of two maps into the same graph.

    Vertices are pairs with equal image, listed in lexicographic order; edge
    orbits are pairs (positive half-edge of A, half-edge of B) with equal
    image. Labels are the codomain labels (or codomain half-edge ids).
    """
    A, B, C = f.domain, g.domain, f.codomain
    by_vertex: dict[int, list[int]] = {}
    for b in range(B.num_vertices):
        by_vertex.setdefault(g.vmap[b], []).append(b)
    pairs: list[tuple[int, int]] = []
    index: dict[tuple[int, int], int] = {}
    for a in range(A.num_vertices):
        for b in by_vertex.get(f.vmap[a], ()):
            index[(a, b)] = len(pairs)
            pairs.append((a, b))
    by_edge: dict[int, list[int]] = {}
    for h in range(B.num_half_edges):
        by_edge.setdefault(g.emap[h], []).append(h)
    src, dst, labs, ea, eb = [], [], [], [], []
    clabels = C.labels
    for e in range(0, A.num_half_edges, 2):
        img = f.emap[e]
        for e2 in by_edge.get(img, ()):
            for ha, hb in ((e, e2), (e ^ 1, e2 ^ 1)):
                src.append(index[(A.src[ha], B.src[hb])])
                dst.append(index[(A.dst[ha], B.dst[hb])])
                i = f.emap[ha]
                labs.append(clabels[i] if clabels is not None else i)
                ea.append(ha)
                eb.append(hb)
    P = SerreGraph(len(pairs), tuple(src), tuple(dst), tuple(labs))
    pa = GraphMorphism(P, A, tuple(p[0] for p in pairs), tuple(ea))
    pb = GraphMorphism(P, B, tuple(p[1] for p in pairs), tuple(eb))
    return Pullback(P, pa, pb, tuple(pairs))


def labeled_pullback(a: SerreGraph, b: SerreGraph) -> Pullback:
    """Pullback of two rose-labelled graphs over the rose."""
    rank = (max((*a.labels, *b.labels), default=-1) >> 1) + 1
    return pullback(label_map(a, rank), label_map(b, rank))


def subgraph(g: SerreGraph, vertices: Iterable[int], orbits: Iterable[int]) -> tuple[SerreGraph, GraphMorphism]:
    """Subgraph on the given vertices and edge orbits, with its inclusion map.

    Endpoints of the chosen orbits are added to the vertex set.
    """
    orbits = sorted(set(orbits))
    vset = set(vertices)
    for k in orbits:
        vset.add(g.src[2 * k])
        vset.add(g.dst[2 * k])
    vs = sorted(vset)
    vnew = {v: i for i, v in enumerate(vs)}
    src, dst, labs, emap = [], [], [], []
    for k in orbits:
        for h in (2 * k, 2 * k + 1):
            src.append(vnew[g.src[h]])
            dst.append(vnew[g.dst[h]])
            emap.append(h)
            if g.labels is not None:
                labs.append(g.labels[h])
    sub = SerreGraph(
        len(vs),
        tuple(src),
        tuple(dst),
        tuple(labs) if g.labels is not None else None,
        tuple(g.vertex_names[v] for v in vs) if g.vertex_names else None,
        tuple(g.edge_names[k] for k in orbits) if g.edge_names else None,
    )
    return sub, GraphMorphism(sub, g, tuple(vs), tuple(emap))


class Core(NamedTuple):
    graph: SerreGraph
    basepoint: int | None
    inclusion: GraphMorphism


def core(g: SerreGraph, basepoint: int | None = None) -> Core:
    """Iteratively delete degree-1 vertices other than the basepoint.

    Isolated vertices other than the basepoint are dropped too, except that a
    graph never shrinks below one vertex.
    """
    alive_v = [True] * g.num_vertices
    alive_e = [True] * g.num_edges
    deg = [len(hs) for hs in g.out]
    queue = deque(v for v in range(g.num_vertices) if deg[v] <= 1 and v != basepoint)
    remaining = g.num_vertices
    while queue:
        v = queue.popleft()
        if not alive_v[v] or v == basepoint or deg[v] > 1 or remaining == 1:
            continue
        alive_v[v] = False
        remaining -= 1
        for h in g.out[v]:
            if alive_e[h >> 1]:
                alive_e[h >> 1] = False
                t = g.dst[h]
                deg[t] -= 1
                deg[v] -= 1
                if deg[t] <= 1 and t != basepoint:
                    queue.append(t)
    sub, inc = subgraph(g, [v for v in range(g.num_vertices) if alive_v[v]],
                        [k for k in range(g.num_edges) if alive_e[k]])
    bp = None if basepoint is None else inc.vmap.index(basepoint)
    return Core(sub, bp, inc)


# --- canonical forms -------------------------------------------------------


def _is_locally_injective(g: SerreGraph) -> bool:
    return g.labels is not None and g.is_folded()


def _rooted_code(g: SerreGraph, root: int, colors: Sequence[int]) -> Code:
    order = {root: 0}
    seq = [root]
    i = 0
    rows = []
    while i < len(seq):
        v = seq[i]
        i += 1
        row = []
        for h in sorted(g.out[v], key=lambda h: g.labels[h]):
            t = g.dst[h]
            if t not in order:
                order[t] = len(seq)
                seq.append(t)
            row.append((g.labels[h], order[t]))
        rows.append((colors[v], tuple(row)))
    return (len(seq), tuple(rows))


def _refine(g: SerreGraph, colors: list[int]) -> list[int]:
    labels = g.labels
    while True:
        sigs = []
        for v in range(g.num_vertices):
            nb = sorted(
                ((labels[h] if labels is not None else -1), colors[g.dst[h]]) for h in g.out[v]
            )
            sigs.append((colors[v], tuple(nb)))
        ranks = {s: i for i, s in enumerate(sorted(set(sigs)))}
        new = [ranks[s] for s in sigs]
        if len(ranks) == len(set(colors)):
            return new
        colors = new


def _discrete_code(g: SerreGraph, colors: list[int], base_colors: Sequence) -> Code:
    pos = colors
    labels = g.labels
    vrow = [None] * g.num_vertices
    for v in range(g.num_vertices):
        vrow[pos[v]] = base_colors[v]
    edges = sorted(
        (pos[g.src[h]], (labels[h] if labels is not None else -1), pos[g.dst[h]])
        for h in range(g.num_half_edges)
    )
    return (g.num_vertices, tuple(vrow), tuple(edges))


def _ir_code(g: SerreGraph, colors: list[int], base_colors: Sequence) -> Code:
    colors = _refine(g, colors)
    if len(set(colors)) == g.num_vertices:
        return _discrete_code(g, colors, base_colors)
    counts: dict[int, int] = {}
    for c in colors:
        counts[c] = counts.get(c, 0) + 1
    target = min(c for c, k in counts.items() if k > 1)
    best = None
    for v in range(g.num_vertices):
        if colors[v] != target:
            continue
        indiv = [2 * c + (0 if u == v else 1) for u, c in enumerate(colors)]
        code = _ir_code(g, indiv, base_colors)
        if best is None or code < best:
            best = code
    return best


def canonical_form(
    g: SerreGraph, basepoint: int | None = None, vertex_colors: Sequence[int] | None = None
) -> Code:
    """A hashable code equal for two graphs iff they are isomorphic.

    Isomorphisms preserve labels, the optional vertex colours and the optional
    basepoint. Folded labelled graphs use rooted breadth-first codes; anything
    else goes through colour refinement with individualisation.
    """
    colors = list(vertex_colors) if vertex_colors is not None else [0] * g.num_vertices
    if g.num_vertices == 0:
        return ("empty",)
    if _is_locally_injective(g):
        comps = g.components()
        codes = []
        bp_code = None
        for vs, _ in comps:
            if basepoint is not None and basepoint in vs:
                bp_code = _rooted_code(g, basepoint, colors)
            else:
                codes.append(min(_rooted_code(g, r, colors) for r in vs))
        return ("folded", bp_code, tuple(sorted(codes)))
    base = [(c, 1 if v == basepoint else 0) for v, c in enumerate(colors)]
    ranks = {b: i for i, b in enumerate(sorted(set(base)))}
    return ("general", _ir_code(g, [ranks[b] for b in base], base))


def are_isomorphic(g1: SerreGraph, g2: SerreGraph, bp1: int | None = None, bp2: int | None = None) -> bool:
    return canonical_form(g1, bp1) == canonical_form(g2, bp2)


# --- text format -------------------------------------------------------------


def parse_graph_lines(lines: Iterable[tuple[int, str]], alphabet=None):
    """Parse ``vertex``/``edge`` records; returns ``(builder, vertex index, edge index, alphabet)``.

    Labels are generator tokens ``g`` or ``g^-1``. Without an alphabet one is
    built from labels in order of first appearance.
    """
    from .words import Alphabet

    names: list[str] = list(alphabet.names) if alphabet is not None else []
    records = []
    for lineno, text in lines:
        parts = text.split()
        if not parts:
            continue
        kind = parts[0]
        if kind == "vertex":
            if len(parts) != 2:
                raise ParseError("expected 'vertex <name>'", lineno, 1)
            records.append((lineno, "v", parts[1:]))
        elif kind == "edge":
            if len(parts) not in (4, 5):
                raise ParseError("expected 'edge <name> <src> <dst> [label]'", lineno, 1)
            if len(parts) == 5:
                lab = parts[4]
                base = lab[:-3] if lab.endswith("^-1") else lab
                if base.endswith("^1"):
                    base = base[:-2]
                if alphabet is None and base not in names:
                    names.append(base)
            records.append((lineno, "e", parts[1:]))
        else:
            raise ParseError(f"unknown record {kind!r}", lineno, 1)
    alph = alphabet if alphabet is not None else (Alphabet(names) if names else None)
    labeled = any(len(p) == 4 for _, k, p in records if k == "e")
    if labeled and not all(len(p) == 4 for _, k, p in records if k == "e"):
        raise ParseError("either every edge is labelled or none is")
    b = GraphBuilder(labeled=labeled)
    vindex: dict[str, int] = {}
    eindex: dict[str, int] = {}
    for lineno, kind, p in records:
        if kind == "v":
            if p[0] in vindex:
                raise ParseError(f"duplicate vertex {p[0]!r}", lineno)
            vindex[p[0]] = b.add_vertex(p[0])
    for lineno, kind, p in records:
        if kind != "e":
            continue
        name, u, v = p[:3]
        for end in (u, v):
            if end not in vindex:
                raise ParseError(f"unknown vertex {end!r}", lineno)
        if name in eindex:
            raise ParseError(f"duplicate edge {name!r}", lineno)
        lab = None
        if labeled:
            tok = p[3]
            sign = -1 if tok.endswith("^-1") else 1
            base = tok[:-3] if sign < 0 else (tok[:-2] if tok.endswith("^1") else tok)
            if base not in alph:
                raise ParseError(f"unknown label {tok!r}", lineno)
            lab = alph.letter(base, sign)
        eindex[name] = b.add_edge(vindex[u], vindex[v], lab, name)
    return b, vindex, eindex, alph


def parse_graph(text: str, alphabet=None) -> SerreGraph:
    lines = []
    for i, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            lines.append((i, line))
    b, _, _, _ = parse_graph_lines(lines, alphabet)
    return b.build(names=True)


def format_graph(g: SerreGraph, alphabet=None) -> str:
    lines = [f"vertex {g.vertex_name(v)}" for v in range(g.num_vertices)]
    for k in range(g.num_edges):
        h = 2 * k
        line = f"edge {g.edge_name(k)} {g.vertex_name(g.src[h])} {g.vertex_name(g.dst[h])}"
        if g.labels is not None and alphabet is not None:
            lab = g.labels[h]
            line += " " + alphabet.names[lab >> 1] + ("^-1" if lab & 1 else "")
        lines.append(line)
    return "\n".join(lines) + "\n"
