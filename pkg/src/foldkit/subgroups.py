"""Finitely generated subgroups of free groups as Stallings automata."""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .errors import AlphabetError, ConfigError, NoAlternation, ParseError, PreconditionError
from .graphs import GraphBuilder, SerreGraph, core, fold, labeled_pullback, subgraph
from .presentations import NCResult, normal_closure_membership
from .results import Answer
from .words import Alphabet, Word, cyclic_reduce, format_word, parse_word, syllable_decomposition


@dataclass(frozen=True, eq=False)
class StallingsAutomaton:
    graph: SerreGraph
    basepoint: int
    alphabet: Alphabet

    @classmethod
    def from_generators(cls, alphabet: Alphabet, words: Iterable[Word]) -> StallingsAutomaton:
        b = GraphBuilder()
        base = b.add_vertex()
        for w in words:
            alphabet.check(w.letters)
            if len(w):
                b.add_path(base, base, w.letters)
        folded, q = fold(b.build())
        c = core(folded, q.vmap[base])
        return cls(c.graph, c.basepoint, alphabet)

    @classmethod
    def from_graph(cls, graph: SerreGraph, basepoint: int, alphabet: Alphabet) -> StallingsAutomaton:
        """Fold and core an arbitrary labelled based graph."""
        folded, q = fold(graph)
        bp = q.vmap[basepoint]
        comp = folded.component_index
        vs = [v for v in range(folded.num_vertices) if comp[v] == comp[bp]]
        es = [k for k in range(folded.num_edges) if comp[folded.src[2 * k]] == comp[bp]]
        sub, inc = subgraph(folded, vs, es)
        c = core(sub, inc.vmap.index(bp))
        return cls(c.graph, c.basepoint, alphabet)

    def rank(self) -> int:
        return self.graph.num_edges - self.graph.num_vertices + 1

    def dbar(self) -> int:
        return max(0, self.rank() - 1)

    def read(self, w: Word | Sequence[int]) -> int | None:
        """End vertex of the path reading ``w`` from the basepoint, or None."""
        table = self.graph.out_by_label
        v = self.basepoint
        for x in w:
            h = table[v].get(x)
            if h is None:
                return None
            v = self.graph.dst[h]
        return v

    def membership(self, w: Word) -> bool:
        self.alphabet.check(w.letters)
        return self.read(w.letters) == self.basepoint

    def __contains__(self, w: Word) -> bool:
        return self.membership(w)

    def basis(self) -> tuple[Word, ...]:
        """Free basis read off a breadth-first spanning tree."""
        g = self.graph
        tree, _ = g.spanning_forest()
        paths = g.tree_paths(self.basepoint, tree)
        out = []
        for k in range(g.num_edges):
            if k in tree:
                continue
            h = 2 * k
            letters = [g.labels[e] for e in paths[g.src[h]]]
            letters.append(g.labels[h])
            letters += [g.labels[e ^ 1] for e in reversed(paths[g.dst[h]])]
            out.append(Word(tuple(letters)))
        return tuple(out)

    def is_finite_index(self) -> bool:
        full = 2 * len(self.alphabet)
        return all(self.graph.degree(v) == full for v in range(self.graph.num_vertices))

    def index(self) -> int | None:
        return self.graph.num_vertices if self.is_finite_index() else None


def _same_alphabet(u: StallingsAutomaton, w: StallingsAutomaton) -> None:
    if u.alphabet != w.alphabet:
        raise AlphabetError("subgroups live over different alphabets")


def intersect(u: StallingsAutomaton, w: StallingsAutomaton) -> StallingsAutomaton:
    _same_alphabet(u, w)
    p = labeled_pullback(u.graph, w.graph)
    bp = p.pairs.index((u.basepoint, w.basepoint))
    return StallingsAutomaton.from_graph(p.graph, bp, u.alphabet)


def double_coset_sum(u: StallingsAutomaton, w: StallingsAutomaton) -> tuple[int, list[int]]:
    """Sum of first Betti numbers over the components of the core pullback.

    Components are listed in order of their least pullback vertex; their
    ``b1`` values are the ranks ``d(xUx^-1 ∩ W)`` over double cosets meeting
    the cores, and components with ``b1 = 0`` are trivial intersections.
    """
    _same_alphabet(u, w)
    p = labeled_pullback(w.graph, u.graph)
    per, total = p.graph.betti1()
    return total, per


class Containment(enum.Enum):
    INSIDE = "inside"
    OUTSIDE = "outside"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class HNReport:
    sum: int
    containment: Containment
    bound: int
    holds: bool
    rank: int
    ranks: tuple[int, ...] = ()
    oracle: tuple[NCResult, ...] = field(default=(), repr=False)

    @property
    def flagged(self) -> bool:
        return self.containment is Containment.UNKNOWN


def containment_in_normal_closure(
    u: StallingsAutomaton, w_generators: Sequence[Word], budget: int
) -> tuple[Containment, tuple[NCResult, ...]]:
    results = []
    verdict = Containment.INSIDE
    for g in u.basis():
        res = normal_closure_membership(u.alphabet, w_generators, g, budget)
        results.append(res)
        if res.answer is Answer.NO:
            verdict = Containment.OUTSIDE
            break
        if res.answer is Answer.UNKNOWN:
            verdict = Containment.UNKNOWN
    return verdict, tuple(results)


def hn_verdict(
    u: StallingsAutomaton,
    w: StallingsAutomaton,
    w_generators: Sequence[Word] | None = None,
    budget: int = 10_000,
) -> HNReport:
    """Compare the double coset sum with ``d(U)`` or ``d̄(U)``.

    The bound is ``d̄(U)`` only when ``U`` is certified outside the normal
    closure of ``W``; an undecided containment keeps the larger bound.
    """
    if budget <= 0:
        raise ConfigError("budget must be positive")
    _same_alphabet(u, w)
    gens = tuple(w.basis() if w_generators is None else w_generators)
    total, per = double_coset_sum(u, w)
    containment, oracle = containment_in_normal_closure(u, gens, budget)
    bound = u.dbar() if containment is Containment.OUTSIDE else u.rank()
    return HNReport(total, containment, bound, total <= bound, u.rank(), tuple(per), oracle)


@dataclass(frozen=True)
class SHNCReport:
    lhs: int
    rhs: int

    @property
    def holds(self) -> bool:
        return self.lhs <= self.rhs

    def __bool__(self) -> bool:
        return self.holds


def shnc_check(u: StallingsAutomaton, w: StallingsAutomaton) -> SHNCReport:
    _, per = double_coset_sum(u, w)
    return SHNCReport(sum(max(0, b - 1) for b in per), u.dbar() * w.dbar())


# --- strictly reducible families ---------------------------------------------------


class SRStatus(enum.Enum):
    CERTIFIED = "certified"
    REFUTED = "refuted"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class SRResult:
    status: SRStatus
    condition: int | None = None
    index: int | None = None
    conjugators: tuple[Word, ...] = ()

    def __str__(self) -> str:
        if self.status is SRStatus.CERTIFIED:
            return "Certified"
        if self.status is SRStatus.REFUTED:
            return f"Refuted(condition {self.condition}, {self.index})"
        return f"Unknown({self.index})"


def _sub_alphabet_word(w: Word, gens: Sequence[int]) -> Word:
    remap = {g: i for i, g in enumerate(gens)}
    return Word(tuple(2 * remap[x >> 1] + (x & 1) for x in w.letters))


def verify_strictly_reducible(
    alphabet: Alphabet,
    base: Iterable[int | str],
    letters: Sequence[int | str],
    relators: Sequence[Word],
    budget: int = 10_000,
) -> SRResult:
    """Check the ordered family ``relators`` against ``base`` and ``letters``.

    Relators are cyclically reduced first; the conjugators are recorded. The
    nontriviality and proper-power conditions ask the normal-closure oracle
    about syllables of the earlier group ``<X_{i-1}> / <<r_1..r_{i-1}>>``.
    """
    if len(letters) != len(relators):
        raise PreconditionError("need exactly one split letter per relator")
    if budget <= 0:
        raise ConfigError("budget must be positive")

    def gid(g):
        return alphabet.index(g) if isinstance(g, str) else g

    known = {gid(g) for g in base}
    xs = [gid(g) for g in letters]
    if len(set(xs)) != len(xs) or known & set(xs):
        raise PreconditionError("split letters must be distinct and outside the base set")
    for g in known | set(xs):
        if not 0 <= g < len(alphabet):
            raise AlphabetError(f"generator {g} not in the alphabet")

    cores: list[Word] = []
    conjugators: list[Word] = []
    first_unknown: int | None = None
    for i, (x, r) in enumerate(zip(xs, relators), 1):
        alphabet.check(r.letters)
        if not len(r):
            return SRResult(SRStatus.REFUTED, 2, i, tuple(conjugators))
        c, conj = cyclic_reduce(r)
        conjugators.append(conj)
        core_word = Word(c.rep)
        if not core_word.generators() <= known | {x}:
            return SRResult(SRStatus.REFUTED, 1, i, tuple(conjugators))
        try:
            syl = syllable_decomposition(c.rep, x, known)
        except NoAlternation:
            return SRResult(SRStatus.REFUTED, 2, i, tuple(conjugators))
        gens = sorted(known)
        sub_alph = Alphabet([alphabet.names[g] for g in gens])
        earlier = [_sub_alphabet_word(w, gens) for w in cores]

        def in_closure(w: Word) -> Answer:
            return normal_closure_membership(sub_alph, earlier, _sub_alphabet_word(w, gens), budget).answer

        unknown = False
        for a, _ in syl:
            ans = in_closure(a)
            if ans is Answer.YES:
                return SRResult(SRStatus.REFUTED, 2, i, tuple(conjugators))
            if ans is Answer.UNKNOWN:
                unknown = True
        s = len(syl)
        power = False
        for p in range(1, s):
            if s % p:
                continue
            periodic: bool | None = True
            for j in range(s):
                a1, b1 = syl[j]
                a2, b2 = syl[(j + p) % s]
                if b1 != b2:
                    periodic = False
                    break
                ans = Answer.YES if a1 == a2 else in_closure(a1 * a2.inverse())
                if ans is Answer.NO:
                    periodic = False
                    break
                if ans is Answer.UNKNOWN:
                    periodic = None
            if periodic is True:
                power = True
                break
            if periodic is None:
                unknown = True
        if power:
            return SRResult(SRStatus.REFUTED, 3, i, tuple(conjugators))
        if unknown and first_unknown is None:
            first_unknown = i
        cores.append(core_word)
        known.add(x)
    if first_unknown is not None:
        return SRResult(SRStatus.UNKNOWN, None, first_unknown, tuple(conjugators))
    return SRResult(SRStatus.CERTIFIED, None, None, tuple(conjugators))


# --- text format ----------------------------------------------------------------------


def parse_subgroup(text: str) -> tuple[Alphabet, list[Word]]:
    """Parse ``basis: a b`` followed by ``gen: <word>`` lines."""
    alphabet = None
    gens: list[Word] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, colon, rest = line.partition(":")
        key = key.strip()
        if not colon:
            raise ParseError("expected 'key: value'", lineno, 1)
        if key == "basis":
            if alphabet is not None:
                raise ParseError("duplicate basis line", lineno, 1)
            try:
                alphabet = Alphabet(rest.split())
            except AlphabetError as exc:
                raise ParseError(str(exc), lineno, 1) from None
        elif key == "gen":
            if alphabet is None:
                raise ParseError("gen before basis line", lineno, 1)
            offset = line.index(":") + 1
            gens.append(parse_word(" " * offset + rest, alphabet, lineno))
        else:
            raise ParseError(f"unknown key {key!r}", lineno, 1)
    if alphabet is None:
        raise ParseError("missing basis line")
    return alphabet, gens


def load_subgroup(text: str) -> tuple[StallingsAutomaton, list[Word]]:
    alphabet, gens = parse_subgroup(text)
    return StallingsAutomaton.from_generators(alphabet, gens), gens


def format_subgroup(alphabet: Alphabet, gens: Iterable[Word]) -> str:
    lines = ["basis: " + " ".join(alphabet.names)]
    lines += ["gen: " + format_word(g, alphabet) for g in gens]
    return "\n".join(lines) + "\n"
