"""Integer cellular homology of two-complexes via Smith normal form."""
from __future__ import annotations

from dataclasses import dataclass, field

Matrix = list[list[int]]


def zeros(r: int, c: int) -> Matrix:
    return [[0] * c for _ in range(r)]


def identity(n: int) -> Matrix:
    m = zeros(n, n)
    for i in range(n):
        m[i][i] = 1
    return m


def matmul(a: Matrix, b: Matrix, inner: int | None = None) -> Matrix:
    if inner is None:
        inner = len(b)
    cols = len(b[0]) if b else 0
    out = zeros(len(a), cols)
    for i, row in enumerate(a):
        o = out[i]
        for k in range(inner):
            x = row[k]
            if x:
                bk = b[k]
                for j in range(cols):
                    o[j] += x * bk[j]
    return out


def smith_normal_form(m: Matrix, ncols: int | None = None) -> tuple[Matrix, Matrix, Matrix]:
    """Return ``(S, U, V)`` with ``U @ m @ V == S`` and ``S`` in Smith form.

    ``ncols`` is only needed for matrices with no rows. The identity and the
    divisibility chain are re-verified before returning.
    """
    rows = len(m)
    cols = len(m[0]) if rows else (ncols or 0)
    S = [list(r) for r in m]
    U = identity(rows)
    V = identity(cols)

    def swap_rows(i, j):
        S[i], S[j] = S[j], S[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for r in S:
            r[i], r[j] = r[j], r[i]
        for r in V:
            r[i], r[j] = r[j], r[i]

    def add_row(dst, src, k):
        # row_dst += k * row_src
        S[dst] = [a + k * b for a, b in zip(S[dst], S[src])]
        U[dst] = [a + k * b for a, b in zip(U[dst], U[src])]

    def add_col(dst, src, k):
        for r in S:
            r[dst] += k * r[src]
        for r in V:
            r[dst] += k * r[src]

    t = 0
    while t < min(rows, cols):
        nz = [(abs(S[i][j]), i, j) for i in range(t, rows) for j in range(t, cols) if S[i][j]]
        if not nz:
            break
        _, i, j = min(nz)
        swap_rows(t, i)
        swap_cols(t, j)
        while True:
            done = True
            for i in range(t + 1, rows):
                if S[i][t]:
                    q = S[i][t] // S[t][t]
                    add_row(i, t, -q)
                    if S[i][t]:
                        done = False
                        if abs(S[i][t]) < abs(S[t][t]):
                            swap_rows(t, i)
            for j in range(t + 1, cols):
                if S[t][j]:
                    q = S[t][j] // S[t][t]
                    add_col(j, t, -q)
                    if S[t][j]:
                        done = False
                        if abs(S[t][j]) < abs(S[t][t]):
                            swap_cols(t, j)
            if not done:
                continue
            p = S[t][t]
            bad = next(
                ((i, j) for i in range(t + 1, rows) for j in range(t + 1, cols) if S[i][j] % p),
                None,
            )
            if bad is None:
                break
            add_row(t, bad[0], 1)
        if S[t][t] < 0:
            S[t] = [-x for x in S[t]]
            U[t] = [-x for x in U[t]]
        t += 1

    check = matmul(matmul(U, m, rows), V, cols) if rows else zeros(0, cols)
    assert check == S, "Smith form identity failed"
    diag = [S[i][i] for i in range(min(rows, cols))]
    for a, b in zip(diag, diag[1:]):
        assert (a == 0 and b == 0) or (a != 0 and b % a == 0), "divisibility chain failed"
    return S, U, V


def invariant_factors(m: Matrix, ncols: int | None = None) -> list[int]:
    S, _, _ = smith_normal_form(m, ncols)
    return [S[i][i] for i in range(min(len(S), len(S[0]) if S else 0)) if S[i][i]]


def rank(m: Matrix, ncols: int | None = None) -> int:
    return len(invariant_factors(m, ncols))


@dataclass(frozen=True)
class ChainComplex2:
    num_vertices: int
    num_edges: int
    num_cells: int
    d1: Matrix = field(repr=False)
    d2: Matrix = field(repr=False)


@dataclass(frozen=True)
class HomologySummary:
    b0: int
    b1: int
    b2: int
    torsion: tuple[int, ...]
    euler_char: int

    @property
    def euler_poincare_ok(self) -> bool:
        return self.b0 - self.b1 + self.b2 == self.euler_char


def boundary_matrices(X) -> ChainComplex2:
    """Cellular boundary maps of a two-complex.

    ``d2[k][c]`` is the net number of times cell ``c`` crosses edge orbit ``k``
    in its positive direction; ``d1[v][k]`` is target minus source incidence.
    """
    g = X.graph
    V, E, F = g.num_vertices, g.num_edges, len(X.cells)
    d1 = zeros(V, E)
    for k in range(E):
        d1[g.dst[2 * k]][k] += 1
        d1[g.src[2 * k]][k] -= 1
    d2 = zeros(E, F)
    for c, path in enumerate(X.cells):
        for h in path:
            d2[h >> 1][c] += -1 if h & 1 else 1
    prod = matmul(d1, d2, E) if V else []
    assert all(x == 0 for row in prod for x in row), "boundary of boundary is not zero"
    return ChainComplex2(V, E, F, d1, d2)


def homology(X) -> HomologySummary:
    cc = boundary_matrices(X)
    r1 = rank(cc.d1, cc.num_edges)
    f2 = invariant_factors(cc.d2, cc.num_cells)
    r2 = len(f2)
    b0 = cc.num_vertices - r1
    b1 = cc.num_edges - r1 - r2
    b2 = cc.num_cells - r2
    chi = cc.num_vertices - cc.num_edges + cc.num_cells
    summary = HomologySummary(b0, b1, b2, tuple(d for d in f2 if d > 1), chi)
    assert summary.euler_poincare_ok, "Euler-Poincare identity failed"
    return summary


@dataclass(frozen=True)
class BettiReport:
    b1: int
    b2: int
    satisfies: bool
    hypothesis: bool | None
    note: str


def betti_inequality_report(X, hypothesis: bool | None = None) -> BettiReport:
    """Compare ``b2`` with ``b1 - 1``.

    ``hypothesis`` is the caller's claim that the fundamental group is not a
    free product of finite cyclic groups; it is echoed, never checked.
    """
    h = homology(X)
    ok = h.b2 <= h.b1 - 1
    if ok:
        note = "inequality holds"
    elif hypothesis is False:
        note = "inequality fails; group declared a free product of finite cyclic groups (excluded case)"
    elif hypothesis is True:
        note = "inequality fails although the hypothesis was declared"
    else:
        note = "inequality fails; hypothesis not supplied"
    return BettiReport(h.b1, h.b2, ok, hypothesis, note)
