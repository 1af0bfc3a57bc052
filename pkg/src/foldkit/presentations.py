"""Group presentations, Tietze simplification, a three-valued normal-closure
oracle, Moldavanskii hierarchy steps and Coxeter Euler characteristics."""
from __future__ import annotations

import enum
import itertools
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm
from typing import Iterable, Sequence

from .errors import (
    AlphabetError,
    ConfigError,
    DegenerateInputError,
    NotApplicable,
    ParseError,
    PreconditionError,
)
from .homology import smith_normal_form
from .results import Answer, Check, Outcome
from .words import (
    Alphabet,
    Word,
    canonical_rotation,
    cyclic_reduce,
    exponent_sum,
    format_word,
    inverse_letters,
    parse_word,
)


@dataclass(frozen=True)
class Presentation:
    alphabet: Alphabet
    relators: tuple[Word, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "relators", tuple(self.relators))
        for r in self.relators:
            if not len(r):
                raise DegenerateInputError("relators must be nonempty after free reduction")
            self.alphabet.check(r.letters)

    @property
    def num_generators(self) -> int:
        return len(self.alphabet)

    def format_relator(self, i: int) -> str:
        return format_word(self.relators[i], self.alphabet)


def _content_lines(text: str) -> list[tuple[int, str]]:
    out = []
    for i, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            out.append((i, line))
    return out


def parse_presentation(text: str) -> Presentation:
    """Parse ``generators: a b`` followed by ``relator: <word>`` lines."""
    alphabet = None
    relators: list[Word] = []
    for lineno, line in _content_lines(text):
        key, colon, rest = line.partition(":")
        key = key.strip()
        if not colon:
            raise ParseError("expected 'key: value'", lineno, 1)
        if key == "generators":
            if alphabet is not None:
                raise ParseError("duplicate generators line", lineno, 1)
            try:
                alphabet = Alphabet(rest.split())
            except AlphabetError as exc:
                raise ParseError(str(exc), lineno, 1) from None
        elif key == "relator":
            if alphabet is None:
                raise ParseError("relator before generators line", lineno, 1)
            offset = line.index(":") + 1
            w = parse_word(" " * offset + rest, alphabet, lineno)
            if not len(w):
                raise ParseError("relator reduces to the empty word", lineno, offset + 1)
            relators.append(w)
        else:
            raise ParseError(f"unknown key {key!r}", lineno, 1)
    if alphabet is None:
        raise ParseError("missing generators line")
    return Presentation(alphabet, tuple(relators))


def serialize(p: Presentation) -> str:
    lines = ["generators: " + " ".join(p.alphabet.names)]
    lines += ["relator: " + format_word(r, p.alphabet) for r in p.relators]
    return "\n".join(lines) + "\n"


# --- abelianization and Tietze moves --------------------------------------------


def relation_matrix(ngens: int, relators: Iterable[Sequence[int]]) -> list[list[int]]:
    return [[exponent_sum(r, g) for g in range(ngens)] for r in relators]


def abelian_invariants(p: Presentation) -> tuple[int, tuple[int, ...]]:
    """``(free rank, torsion invariant factors > 1)`` of the abelianization."""
    n = p.num_generators
    m = relation_matrix(n, p.relators)
    if not m:
        return n, ()
    S, _, _ = smith_normal_form(m)
    diag = [S[i][i] for i in range(min(len(S), n))]
    nonzero = [d for d in diag if d]
    return n - len(nonzero), tuple(d for d in nonzero if d > 1)


def _substitute(rel: Sequence[int], gen: int, image: Sequence[int]) -> tuple[int, ...]:
    inv = inverse_letters(image)
    out: list[int] = []
    for x in rel:
        if x >> 1 == gen:
            out.extend(inv if x & 1 else image)
        else:
            out.append(x)
    return tuple(out)


def _cyclic_core(letters: Sequence[int]) -> tuple[int, ...]:
    w = Word(tuple(letters))
    if not len(w):
        return ()
    return cyclic_reduce(w)[0].rep


def simplify(p: Presentation, max_length: int = 10_000) -> Presentation:
    """Greedy Tietze simplification.

    Repeatedly cyclically reduces relators, drops empty and duplicate ones and
    eliminates a generator occurring exactly once in some relator. The result
    presents the same group; an empty alphabet means the group is trivial.
    """
    gens = set(range(p.num_generators))
    rels = [_cyclic_core(r.letters) for r in p.relators]
    while True:
        seen = set()
        kept = []
        for r in rels:
            if not r:
                continue
            key = min(canonical_rotation(r), canonical_rotation(inverse_letters(r)))
            if key not in seen:
                seen.add(key)
                kept.append(r)
        rels = sorted(kept, key=lambda r: (len(r), r))
        move = None
        for i, r in enumerate(rels):
            counts: dict[int, int] = {}
            for x in r:
                counts[x >> 1] = counts.get(x >> 1, 0) + 1
            once = sorted(g for g, c in counts.items() if c == 1)
            if once:
                move = (i, once[0])
                break
        if move is None:
            break
        i, g = move
        r = rels.pop(i)
        k = next(j for j, x in enumerate(r) if x >> 1 == g)
        rot = r[k:] + r[:k]
        rest = rot[1:]
        # rot = x^e rest = 1  =>  x = rest^-e
        image = inverse_letters(rest) if rot[0] & 1 == 0 else rest
        rels = [_cyclic_core(_substitute(s, g, image)) for s in rels]
        gens.discard(g)
        if sum(map(len, rels)) > max_length:
            break
    order = sorted(gens)
    remap = {g: i for i, g in enumerate(order)}
    alph = Alphabet([p.alphabet.names[g] for g in order])
    out = [Word(tuple(2 * remap[x >> 1] + (x & 1) for x in r)) for r in rels if r]
    return Presentation(alph, tuple(out))


# --- permutation representations ---------------------------------------------


def _compose(p: tuple[int, ...], q: tuple[int, ...]) -> tuple[int, ...]:
    """Apply ``p`` then ``q``."""
    return tuple(q[i] for i in p)


def _inverse_perm(p: tuple[int, ...]) -> tuple[int, ...]:
    out = [0] * len(p)
    for i, j in enumerate(p):
        out[j] = i
    return tuple(out)


def evaluate_permutation_word(images: Sequence[tuple[int, ...]], w: Sequence[int]) -> tuple[int, ...]:
    k = len(images[0]) if images else 0
    cur = tuple(range(k))
    for x in w:
        img = images[x >> 1]
        cur = _compose(cur, _inverse_perm(img) if x & 1 else img)
    return cur


def _cycle_type_representatives(k: int) -> list[tuple[int, ...]]:
    reps: dict[tuple[int, ...], tuple[int, ...]] = {}
    for p in itertools.permutations(range(k)):
        seen, lengths = set(), []
        for i in range(k):
            if i in seen:
                continue
            n, j = 0, i
            while j not in seen:
                seen.add(j)
                j = p[j]
                n += 1
            lengths.append(n)
        reps.setdefault(tuple(sorted(lengths)), p)
    return list(reps.values())


def find_permutation_representation(
    ngens: int,
    relators: Sequence[Sequence[int]],
    witness: Sequence[int] | None = None,
    max_degree: int = 5,
    cap: int = 200_000,
) -> tuple[tuple[tuple[int, ...], ...] | None, int, bool]:
    """Search for a homomorphism to a symmetric group killing ``relators``.

    With ``witness`` the image of that word must be nontrivial; without it some
    generator must have nontrivial image. Returns ``(images or None, nodes
    explored, exhausted)`` where ``exhausted`` is False when ``cap`` stopped
    the search.
    """
    used = sorted({x >> 1 for r in relators for x in r} | {x >> 1 for x in (witness or ())})
    if not used:
        return None, 0, True
    pos = {g: i for i, g in enumerate(used)}
    checks: list[list[Sequence[int]]] = [[] for _ in used]
    for r in relators:
        if r:
            checks[max(pos[x >> 1] for x in r)].append(r)
    witness_level = max(pos[x >> 1] for x in witness) if witness else None
    explored = 0
    for k in range(2, max_degree + 1):
        ident = tuple(range(k))
        perms = list(itertools.permutations(range(k)))
        images: list[tuple[int, ...]] = [ident] * ngens
        found = None

        def extend(level: int) -> bool:
            nonlocal explored, found
            choices = _cycle_type_representatives(k) if level == 0 else perms
            g = used[level]
            for p in choices:
                explored += 1
                if explored > cap:
                    return False
                images[g] = p
                if any(evaluate_permutation_word(images, r) != ident for r in checks[level]):
                    continue
                if level == witness_level and evaluate_permutation_word(images, witness) == ident:
                    continue
                if level + 1 < len(used):
                    if extend(level + 1):
                        return True
                    if explored > cap:
                        return False
                elif witness is not None or any(images[h] != ident for h in used):
                    found = tuple(images)
                    return True
            images[g] = ident
            return False

        if extend(0):
            return found, explored, True
        if explored > cap:
            return None, explored, False
    return None, explored, True


class Pi1Status(enum.Enum):
    TRIVIAL = "trivial"
    NONTRIVIAL = "nontrivial"
    UNKNOWN = "unknown"


def pi1_status(p: Presentation, perm_cap: int = 20_000) -> tuple[Pi1Status, str]:
    """Three-valued triviality test with a short reason."""
    s = simplify(p)
    if not s.num_generators:
        return Pi1Status.TRIVIAL, "presentation simplifies to the empty presentation"
    free, torsion = abelian_invariants(s)
    if free or torsion:
        parts = ["Z"] * free + [f"Z/{d}" for d in torsion]
        return Pi1Status.NONTRIVIAL, "H1 = " + " + ".join(parts)
    images, _, _ = find_permutation_representation(
        s.num_generators, [r.letters for r in s.relators], None, 5, perm_cap
    )
    if images is not None:
        return Pi1Status.NONTRIVIAL, f"nontrivial map to S{len(images[0])}"
    return Pi1Status.UNKNOWN, "no simplification or invariant decided triviality"


# --- normal closure membership --------------------------------------------------


def _check_relators(relators: Sequence[Word]) -> None:
    for r in relators:
        if not len(r):
            raise DegenerateInputError("empty relator")


@dataclass(frozen=True)
class ProductCertificate:
    """``w`` equals the product of ``conj * R[index]^sign * conj^-1`` in order."""

    factors: tuple[tuple[Word, int, int], ...]

    def product(self, relators: Sequence[Word]) -> Word:
        out: tuple[int, ...] = ()
        for conj, idx, sign in self.factors:
            out += (relators[idx] ** sign).conjugate(conj).letters
        return Word(out)

    def verify(self, relators: Sequence[Word], w: Word) -> bool:
        return self.product(relators) == w


@dataclass(frozen=True)
class AbelianCertificate:
    """A map to ``Z`` (modulus 0) or ``Z/modulus`` sending generator ``i`` to ``vector[i]``."""

    vector: tuple[int, ...]
    modulus: int

    def value(self, w: Sequence[int]) -> int:
        v = sum(self.vector[x >> 1] * (-1 if x & 1 else 1) for x in w)
        return v % self.modulus if self.modulus else v

    def verify(self, relators: Sequence[Word], w: Word) -> bool:
        return all(self.value(r) == 0 for r in relators) and self.value(w) != 0


@dataclass(frozen=True)
class PermutationCertificate:
    images: tuple[tuple[int, ...], ...]

    def verify(self, relators: Sequence[Word], w: Word) -> bool:
        ident = tuple(range(len(self.images[0])))
        return all(evaluate_permutation_word(self.images, r) == ident for r in relators) and (
            evaluate_permutation_word(self.images, w) != ident
        )


@dataclass(frozen=True)
class FreeCertificate:
    """No relators: ``w`` is a nonempty reduced word, hence nontrivial in the free group."""

    def verify(self, relators: Sequence[Word], w: Word) -> bool:
        return not relators and len(w) > 0


@dataclass(frozen=True)
class NCResult:
    answer: Answer
    certificate: object | None = None
    explored: int = 0

    def verify(self, relators: Sequence[Word], w: Word) -> bool:
        if self.certificate is None:
            return self.answer is Answer.UNKNOWN
        return self.certificate.verify(relators, w)


def abelian_separator(ngens: int, relators: Sequence[Word], w: Word) -> AbelianCertificate | None:
    """A character of the abelianization of ``F / <<R>>`` nonzero on ``w``, if one exists."""
    wv = [exponent_sum(w, g) for g in range(ngens)]
    if not any(wv):
        return None
    m = relation_matrix(ngens, relators)
    if not m:
        g = next(i for i, x in enumerate(wv) if x)
        return AbelianCertificate(tuple(int(i == g) for i in range(ngens)), 0)
    S, _, V = smith_normal_form(m)
    for i in range(ngens):
        d = S[i][i] if i < len(S) else 0
        if d == 1:
            continue
        col = tuple(V[j][i] for j in range(ngens))
        cert = AbelianCertificate(col, d)
        if cert.value(w.letters) != 0:
            return cert
    return None


def _product_search(relators: Sequence[Word], w: Word, budget: int) -> tuple[ProductCertificate | None, int]:
    """Breadth-first search from ``w`` to the empty word by inserting relator rotations."""
    moves = []
    for idx, r in enumerate(relators):
        c, conj = cyclic_reduce(r)
        core = c.rep
        for sign in (1, -1):
            base = core if sign == 1 else inverse_letters(core)
            # base = conj^-1 r^sign conj; rotation at j equals alpha^-1 base alpha
            for j in range(len(base)):
                rot = base[j:] + base[:j]
                shift = conj.letters + base[:j]
                moves.append((rot, idx, sign, shift))
    maxlen = len(w) + max((len(m[0]) for m in moves), default=0)
    start = w.letters
    parent: dict[tuple[int, ...], tuple | None] = {start: None}
    queue = deque([start])
    explored = 0
    while queue:
        v = queue.popleft()
        if not v:
            factors = []
            while parent[v] is not None:
                prev, conj, idx, sign = parent[v]
                factors.append((conj, idx, -sign))
                v = prev
            return ProductCertificate(tuple(reversed(factors))), explored
        explored += 1
        if explored > budget:
            break
        for i in range(len(v) + 1):
            prefix = v[:i]
            for rot, idx, sign, shift in moves:
                nxt = tuple(Word(prefix + rot + v[i:]).letters)
                if len(nxt) > maxlen or nxt in parent:
                    continue
                conj = Word(prefix + inverse_letters(shift))
                parent[nxt] = (v, conj, idx, sign)
                queue.append(nxt)
    return None, explored


def normal_closure_membership(
    alphabet: Alphabet,
    relators: Sequence[Word],
    w: Word,
    budget: int = 10_000,
    perm_cap: int = 200_000,
) -> NCResult:
    """Decide whether ``w`` lies in the normal closure of ``relators``.

    Yes comes with an explicit product of conjugates, No with a separating
    homomorphism; both certificates are re-verified before returning.
    ``budget`` caps the number of words expanded by the product search.
    """
    if budget <= 0:
        raise ConfigError("budget must be positive")
    relators = tuple(relators)
    _check_relators(relators)
    alphabet.check(w.letters)
    for r in relators:
        alphabet.check(r.letters)
    if not relators:
        res = NCResult(Answer.YES, ProductCertificate(())) if not len(w) else NCResult(Answer.NO, FreeCertificate())
    elif not len(w):
        res = NCResult(Answer.YES, ProductCertificate(()))
    else:
        cert = abelian_separator(len(alphabet), relators, w)
        if cert is not None:
            res = NCResult(Answer.NO, cert)
        else:
            prod, explored = _product_search(relators, w, budget)
            if prod is not None:
                res = NCResult(Answer.YES, prod, explored)
            else:
                images, n, _ = find_permutation_representation(
                    len(alphabet), [r.letters for r in relators], w.letters, 5, perm_cap
                )
                if images is not None:
                    res = NCResult(Answer.NO, PermutationCertificate(images), explored + n)
                else:
                    res = NCResult(Answer.UNKNOWN, None, explored + n)
    assert res.verify(relators, w), "certificate failed to verify"
    return res


# --- Moldavanskii hierarchy ---------------------------------------------------------


@dataclass(frozen=True)
class Substitution:
    """``t -> s^beta`` and ``x -> x s^-alpha`` applied to the relator before the step."""

    old: str
    new: str
    partner: str
    alpha: int
    beta: int
    relator: Word


@dataclass(frozen=True)
class HierarchyStep:
    parent: Presentation
    child: Presentation
    stable_letter: str
    edge_a: tuple[Word, ...]
    edge_b: tuple[Word, ...]
    substitution: Substitution | None = None
    rewritten_from: Presentation | None = field(default=None, repr=False)
    conjugator: Word = Word()
    shifts: tuple[tuple[int, int], ...] = field(default=(), repr=False)

    @property
    def base(self) -> Presentation:
        """The presentation actually rewritten (after any substitution)."""
        return self.rewritten_from or self.parent

    def back_substitute(self) -> Word:
        """Child relator with each ``x_k`` replaced by ``t^-k x t^k`` over the base alphabet."""
        t = self.base.alphabet.index(self.stable_letter)
        out: list[int] = []
        for x in self.child.relators[0].letters:
            g, k = self.shifts[x >> 1]
            tk = [2 * t + (1 if k > 0 else 0)] * abs(k)
            tk_inv = list(inverse_letters(tk))
            out += tk + [2 * g + (x & 1)] + tk_inv
        return Word(tuple(out))

    def is_valid(self) -> bool:
        if self.back_substitute() != self.base.relators[0]:
            return False
        parent_core = cyclic_reduce(self.parent.relators[0])[0].rep
        if self.substitution is None:
            if self.base.relators[0].letters != parent_core:
                return False
        else:
            mentioned = sorted({x >> 1 for x in parent_core})
            _, again = _apply_substitution(self.parent, parent_core, mentioned)
            if again != self.substitution:
                return False
            if cyclic_reduce(again.relator)[0].rep != self.base.relators[0].letters:
                return False
        n = len(self.child.alphabet)
        for tup in (self.edge_a, self.edge_b):
            for w in tup:
                if len(w) != 1 or (w.letters[0] >> 1) >= n or w.letters[0] & 1:
                    return False
        return True


def _fresh_name(alphabet: Alphabet, base: str) -> str:
    name = base + "'"
    while name in alphabet:
        name += "'"
    return name


def _apply_substitution(p: Presentation, core: tuple[int, ...], mentioned: list[int]):
    t, x = mentioned[0], mentioned[1]
    alpha = exponent_sum(core, t)
    beta = exponent_sum(core, x)
    names = list(p.alphabet.names)
    new = _fresh_name(p.alphabet, names[t])
    names[t] = new
    alph = Alphabet(names)
    s_pos = 2 * t
    s_img = [s_pos if beta > 0 else s_pos ^ 1] * abs(beta)
    x_img = [2 * x] + [s_pos ^ 1 if alpha > 0 else s_pos] * abs(alpha)
    out: list[int] = []
    for y in core:
        g = y >> 1
        img = s_img if g == t else x_img if g == x else [y & ~1]
        out.extend(inverse_letters(img) if y & 1 else img)
    rel = Word(tuple(out))
    record = Substitution(p.alphabet.names[t], new, names[x], alpha, beta, rel)
    return Presentation(alph, (rel,)), record


def moldavanskii_step(p: Presentation) -> HierarchyStep:
    """One Magnus-Moldavanskii rewriting of a one-relator presentation.

    With stable letter ``t`` of exponent sum zero, each other letter is
    rewritten as a shifted generator ``x_k = t^-k x t^k``; the child relator
    lives on the shifted generators. When no generator has exponent sum zero
    the relator is first transformed by ``t -> s^beta``, ``x -> x s^-alpha``.
    """
    if len(p.relators) != 1:
        raise PreconditionError("a hierarchy step needs exactly one relator")
    if p.num_generators < 2:
        raise NotApplicable("presentation has fewer than two generators")
    c, conj = cyclic_reduce(p.relators[0])
    core = c.rep
    mentioned = sorted({x >> 1 for x in core})
    if len(mentioned) < 2:
        raise NotApplicable("relator mentions a single generator")
    zero = [g for g in mentioned if exponent_sum(core, g) == 0]
    substitution = None
    base = Presentation(p.alphabet, (Word(core),))
    if zero:
        t = zero[0]
    else:
        base, substitution = _apply_substitution(p, core, mentioned)
        t = mentioned[0]
        core = cyclic_reduce(base.relators[0])[0].rep
        base = Presentation(base.alphabet, (Word(core),))
    letters: list[tuple[int, int, int]] = []
    e = 0
    for y in core:
        if y >> 1 == t:
            e += -1 if y & 1 else 1
        else:
            letters.append((y >> 1, -e, y & 1))
    ranges: dict[int, tuple[int, int]] = {}
    for g, k, _ in letters:
        lo, hi = ranges.get(g, (k, k))
        ranges[g] = (min(lo, k), max(hi, k))
    shifts: list[tuple[int, int]] = []
    for g in range(base.num_generators):
        if g == t:
            continue
        lo, hi = ranges.get(g, (0, 0))
        shifts.extend((g, k) for k in range(lo, hi + 1))
    index = {s: i for i, s in enumerate(shifts)}
    names = [f"{base.alphabet.names[g]}_{k}" for g, k in shifts]
    child_alph = Alphabet(names)
    rel = Word(tuple(2 * index[(g, k)] + sign for g, k, sign in letters))
    edge_a = tuple(Word((2 * index[(g, k)],)) for g, k in shifts if g in ranges and k < ranges[g][1])
    edge_b = tuple(Word((2 * index[(g, k)],)) for g, k in shifts if g in ranges and k > ranges[g][0])
    step = HierarchyStep(
        parent=p,
        child=Presentation(child_alph, (rel,)),
        stable_letter=base.alphabet.names[t],
        edge_a=edge_a,
        edge_b=edge_b,
        substitution=substitution,
        rewritten_from=base,
        conjugator=conj,
        shifts=tuple(shifts),
    )
    assert step.is_valid(), "hierarchy step failed back-substitution"
    return step


@dataclass(frozen=True)
class Hierarchy:
    steps: tuple[HierarchyStep, ...]
    terminal: Presentation
    complete: bool


def is_terminal(p: Presentation) -> bool:
    if len(p.relators) != 1:
        raise PreconditionError("hierarchy needs a one-relator presentation")
    core = cyclic_reduce(p.relators[0])[0].rep
    return p.num_generators < 2 or len({x >> 1 for x in core}) <= 1


def hierarchy(p: Presentation, depth: int = 20) -> Hierarchy:
    """Iterate hierarchy steps until the relator mentions at most one generator."""
    if depth < 0:
        raise ConfigError("depth must be non-negative")
    steps: list[HierarchyStep] = []
    cur = p
    while not is_terminal(cur):
        if len(steps) >= depth:
            return Hierarchy(tuple(steps), cur, False)
        step = moldavanskii_step(cur)
        steps.append(step)
        cur = step.child
    return Hierarchy(tuple(steps), cur, True)


# --- Coxeter diagrams ------------------------------------------------------------------


@dataclass(frozen=True)
class CoxeterDiagram:
    names: tuple[str, ...]
    edges: tuple[tuple[int, int, int], ...]

    def __post_init__(self):
        seen = set()
        for u, v, m in self.edges:
            if u == v:
                raise ValueError("loops are not allowed in a Coxeter diagram")
            key = (min(u, v), max(u, v))
            if key in seen:
                raise ValueError("parallel edges are not allowed in a Coxeter diagram")
            seen.add(key)
            if m < 2:
                raise ValueError("edge labels must be at least 2")
            if not (0 <= u < len(self.names) and 0 <= v < len(self.names)):
                raise ValueError("edge endpoint out of range")

    @property
    def num_vertices(self) -> int:
        return len(self.names)

    def subset_indices(self, subset: Iterable) -> list[int]:
        out = []
        for s in subset:
            if isinstance(s, str):
                if s not in self.names:
                    raise ValueError(f"unknown vertex {s!r}")
                out.append(self.names.index(s))
            else:
                if not 0 <= s < len(self.names):
                    raise ValueError(f"vertex {s} out of range")
                out.append(s)
        return sorted(set(out))


def parse_coxeter(text: str) -> CoxeterDiagram:
    names: list[str] = []
    edges: list[tuple[int, int, int]] = []
    pending = []
    for lineno, line in _content_lines(text):
        parts = line.split()
        if parts[0] == "vertex" and len(parts) == 2:
            if parts[1] in names:
                raise ParseError(f"duplicate vertex {parts[1]!r}", lineno, 1)
            names.append(parts[1])
        elif parts[0] == "cox-edge" and len(parts) == 4:
            pending.append((lineno, parts))
        else:
            raise ParseError("expected 'vertex <name>' or 'cox-edge <u> <v> <m>'", lineno, 1)
    for lineno, parts in pending:
        _, u, v, m = parts
        for end in (u, v):
            if end not in names:
                raise ParseError(f"unknown vertex {end!r}", lineno)
        try:
            mval = int(m)
        except ValueError:
            raise ParseError(f"bad label {m!r}", lineno, _column(parts, 3)) from None
        edges.append((names.index(u), names.index(v), mval))
    try:
        return CoxeterDiagram(tuple(names), tuple(edges))
    except ValueError as exc:
        raise ParseError(str(exc)) from None


def _column(parts: Sequence[str], k: int) -> int:
    return sum(len(p) + 1 for p in parts[:k]) + 1


def coxeter_chibar(d: CoxeterDiagram, subset: Iterable | None = None) -> Fraction:
    """``1 - |S| + sum 1/m(e)`` over the edges of the full subgraph on ``S``."""
    s = set(range(d.num_vertices)) if subset is None else set(d.subset_indices(subset))
    value = Fraction(1 - len(s))
    for u, v, m in d.edges:
        if u in s and v in s:
            value += Fraction(1, m)
    return value


def coxeter_coherence_predicate(d: CoxeterDiagram, cap: int = 1 << 20) -> tuple[Check, Fraction | None]:
    """Check ``chibar <= 0`` on every full subgraph with at least two vertices.

    Returns a ``Check`` (TRUE when all are non-positive, FALSE with the first
    witness subset in increasing bitmask order) and the witness value.
    """
    n = d.num_vertices
    if (1 << n) - n - 1 > cap:
        return Check(Outcome.BUDGET_EXCEEDED, None, 0), None
    denom = lcm(*(m for _, _, m in d.edges)) if d.edges else 1
    adj = [[0] * n for _ in range(n)]
    for u, v, m in d.edges:
        adj[u][v] = adj[v][u] = denom // m
    # scaled[S] = denom * (chibar(S) - 1) accumulated over the lowest vertex
    scaled = [0] * (1 << n)
    explored = 0
    for mask in range(1, 1 << n):
        low = (mask & -mask).bit_length() - 1
        rest = mask & (mask - 1)
        val = scaled[rest] - denom
        r = rest
        while r:
            b = (r & -r).bit_length() - 1
            val += adj[low][b]
            r &= r - 1
        scaled[mask] = val
        if rest:
            explored += 1
            if val + denom > 0:
                witness = tuple(i for i in range(n) if mask >> i & 1)
                return Check(Outcome.FALSE, witness, explored), Fraction(val + denom, denom)
    return Check(Outcome.TRUE, None, explored), None
