"""Free-group words over a signed generator alphabet.

A letter is a small int: generator ``g`` with sign +1 is ``2*g`` and with
sign -1 is ``2*g + 1``, so inversion is ``x ^ 1`` and the natural int order is
the shortlex letter order (generator id first, then +1 before -1).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .errors import AlphabetError, DegenerateInputError, NoAlternation, ParseError
from .kernels import free_reduce as _reduce


def letter(gen: int, sign: int = 1) -> int:
    return 2 * gen + (0 if sign > 0 else 1)


def gen_of(x: int) -> int:
    return x >> 1


def sign_of(x: int) -> int:
    return -1 if x & 1 else 1


def inverse_letters(letters: Sequence[int]) -> tuple[int, ...]:
    return tuple(x ^ 1 for x in reversed(letters))


@dataclass(frozen=True)
class Word:
    """A freely reduced word; construction reduces its input."""

    letters: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "letters", tuple(_reduce(self.letters)))

    def __len__(self) -> int:
        return len(self.letters)

    def __iter__(self):
        return iter(self.letters)

    def __mul__(self, other: Word) -> Word:
        return Word(self.letters + other.letters)

    def __pow__(self, k: int) -> Word:
        if k < 0:
            return self.inverse() ** (-k)
        return Word(self.letters * k)

    def inverse(self) -> Word:
        return Word(inverse_letters(self.letters))

    def conjugate(self, by: Word) -> Word:
        """``by * self * by^-1``."""
        return Word(by.letters + self.letters + inverse_letters(by.letters))

    def generators(self) -> frozenset[int]:
        return frozenset(x >> 1 for x in self.letters)


EMPTY = Word()


class Alphabet:
    """An ordered set of generator names with ids ``0..n-1``."""

    def __init__(self, names: Iterable[str]):
        names = tuple(names)
        seen = set()
        for name in names:
            if not name or any(ch.isspace() for ch in name) or "^" in name or ":" in name:
                raise AlphabetError(f"invalid generator name {name!r}")
            if name.lstrip("+-").isdigit():
                raise AlphabetError(f"generator name {name!r} is numeric")
            if name in seen:
                raise AlphabetError(f"duplicate generator name {name!r}")
            seen.add(name)
        self.names = names
        self._index = {name: i for i, name in enumerate(names)}

    def __len__(self) -> int:
        return len(self.names)

    def __iter__(self):
        return iter(self.names)

    def __eq__(self, other) -> bool:
        return isinstance(other, Alphabet) and self.names == other.names

    def __hash__(self) -> int:
        return hash(self.names)

    def __repr__(self) -> str:
        return f"Alphabet({list(self.names)!r})"

    def __contains__(self, name: str) -> bool:
        return name in self._index

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise AlphabetError(f"unknown generator {name!r}") from None

    def letter(self, name: str, sign: int = 1) -> int:
        return letter(self.index(name), sign)

    def word(self, text: str) -> Word:
        return parse_word(text, self)

    def check(self, letters: Iterable[int]) -> None:
        n = len(self.names)
        for x in letters:
            if x < 0 or (x >> 1) >= n:
                raise AlphabetError(f"letter {x} outside an alphabet of {n} generators")

    def format(self, w: Word | Sequence[int]) -> str:
        return format_word(w, self)


def parse_word(text: str, alphabet: Alphabet, line: int | None = None) -> Word:
    """Parse whitespace-separated ``g``, ``g^-1``, ``g^k`` tokens; ``1`` is the identity."""
    letters: list[int] = []
    pos = 0
    for token in text.split():
        col = text.index(token, pos) + 1
        pos = col - 1 + len(token)
        if token == "1":
            continue
        name, caret, exp = token.rpartition("^")
        if not caret:
            name, k = token, 1
        else:
            try:
                k = int(exp)
            except ValueError:
                raise ParseError(f"malformed exponent in {token!r}", line, col) from None
            if k == 0 or not name:
                raise ParseError(f"malformed token {token!r}", line, col)
        if name not in alphabet:
            raise ParseError(f"unknown generator {name!r}", line, col)
        x = alphabet.letter(name, 1 if k > 0 else -1)
        letters.extend([x] * abs(k))
    return Word(tuple(letters))


def format_word(w: Word | Sequence[int], alphabet: Alphabet) -> str:
    letters = tuple(w)
    if not letters:
        return "1"
    parts = []
    i = 0
    while i < len(letters):
        j = i
        while j < len(letters) and letters[j] == letters[i]:
            j += 1
        name = alphabet.names[letters[i] >> 1]
        k = (j - i) * sign_of(letters[i])
        parts.append(name if k == 1 else f"{name}^{k}")
        i = j
    return " ".join(parts)


def free_reduce(raw: Iterable[int], alphabet: Alphabet | None = None) -> Word:
    raw = tuple(raw)
    if alphabet is not None:
        alphabet.check(raw)
    return Word(raw)


def canonical_rotation(seq: Sequence) -> tuple:
    """Lexicographically least rotation of a sequence."""
    seq = tuple(seq)
    if not seq:
        return seq
    return min(seq[i:] + seq[:i] for i in range(len(seq)))


@dataclass(frozen=True)
class CyclicWord:
    """A nonempty cyclically reduced word, stored in canonical rotation.

    Equality and hashing use the canonical rotation only; ``rep`` keeps the
    rotation the word was built from.
    """

    letters: tuple[int, ...]
    rep: tuple[int, ...] = field(default=(), compare=False, repr=False)

    @classmethod
    def of(cls, w: Word | Sequence[int]) -> CyclicWord:
        return cyclic_reduce(w if isinstance(w, Word) else Word(tuple(w)))[0]

    def __len__(self) -> int:
        return len(self.letters)

    def __iter__(self):
        return iter(self.letters)

    def word(self) -> Word:
        return Word(self.letters)

    def inverse(self) -> CyclicWord:
        return CyclicWord.of(inverse_letters(self.letters))


def cyclic_reduce(w: Word) -> tuple[CyclicWord, Word]:
    """Split ``w = conj * core * conj^-1`` with ``core`` cyclically reduced.

    The returned cyclic word has ``rep == core``; its ``letters`` are the
    canonical rotation of ``core``.
    """
    letters = w.letters
    i, j = 0, len(letters) - 1
    while i < j and letters[i] == letters[j] ^ 1:
        i += 1
        j -= 1
    core = letters[i : j + 1]
    return CyclicWord(canonical_rotation(core), core), Word(letters[:i])


def smallest_period(seq: Sequence) -> int:
    """Least ``p`` dividing ``len(seq)`` with ``seq`` equal to its shift by ``p``."""
    n = len(seq)
    for p in range(1, n + 1):
        if n % p == 0 and all(seq[i] == seq[(i + p) % n] for i in range(n)):
            return p
    return n


def is_primitive(c: CyclicWord | Word) -> tuple[bool, CyclicWord, int]:
    """Return ``(primitive, root, k)`` with ``c == root^k`` and ``k`` maximal."""
    if isinstance(c, Word):
        c = CyclicWord.of(c)
    if not len(c):
        raise DegenerateInputError("primitivity of the empty word")
    p = smallest_period(c.letters)
    k = len(c) // p
    root = CyclicWord(canonical_rotation(c.letters[:p]), c.letters[:p])
    return k == 1, root, k


def exponent_sum(w: Iterable[int], gen: int) -> int:
    return sum(-1 if x & 1 else 1 for x in w if x >> 1 == gen)


def syllable_decomposition(
    w: Word | CyclicWord | Sequence[int], x: int, others: Iterable[int]
) -> list[tuple[Word, Word]]:
    """Split a cyclically reduced word into ``(a_1, b_1), ..., (a_s, b_s)``.

    The ``a_i`` are nonempty words in the generators ``others``, the ``b_i``
    nonempty powers of generator ``x``; the word is rotated so that it starts
    with an ``a`` syllable, and the concatenation is a rotation of ``w``.
    """
    letters = tuple(w.rep or w.letters) if isinstance(w, CyclicWord) else tuple(w)
    others = frozenset(others)
    for y in letters:
        g = y >> 1
        if g != x and g not in others:
            raise AlphabetError(f"generator {g} is neither the split letter nor in the other side")
    if letters and letters[0] == letters[-1] ^ 1:
        raise DegenerateInputError("word is not cyclically reduced")
    is_x = [y >> 1 == x for y in letters]
    if not any(is_x) or all(is_x):
        raise NoAlternation("word does not alternate between the two sides")
    n = len(letters)
    start = next(i for i in range(n) if not is_x[i] and is_x[i - 1])
    rot = letters[start:] + letters[:start]
    flags = is_x[start:] + is_x[:start]
    out: list[tuple[Word, Word]] = []
    i = 0
    while i < n:
        j = i
        while j < n and not flags[j]:
            j += 1
        k = j
        while k < n and flags[k]:
            k += 1
        out.append((Word(rot[i:j]), Word(rot[j:k])))
        i = k
    return out
