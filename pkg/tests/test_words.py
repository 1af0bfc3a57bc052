import itertools

import pytest
from hypothesis import given, strategies as st

from foldkit.errors import AlphabetError, DegenerateInputError, NoAlternation, ParseError
from foldkit.words import (
    Alphabet,
    CyclicWord,
    Word,
    cyclic_reduce,
    exponent_sum,
    format_word,
    free_reduce,
    is_primitive,
    parse_word,
    syllable_decomposition,
)

letters2 = st.lists(st.integers(0, 3), max_size=14)


def W(text, names="a b"):
    return parse_word(text, Alphabet(names.split()))


def test_free_reduce_examples(ab):
    assert W("a a^-1") == Word()
    assert W("a b b^-1 a") == W("a^2")
    assert W("a b a^-1 a b^-1 a^-1") == Word()


def test_free_reduce_rejects_foreign_letters(ab):
    with pytest.raises(AlphabetError):
        free_reduce([0, 4], ab)


def test_parse_errors(ab):
    with pytest.raises(ParseError) as info:
        parse_word("a c", ab, line=3)
    assert info.value.line == 3 and info.value.column == 3
    with pytest.raises(ParseError):
        parse_word("a^0", ab)
    with pytest.raises(ParseError):
        parse_word("a^x", ab)


def test_format_roundtrip(ab):
    w = W("a^3 b^-2 a")
    assert format_word(w, ab) == "a^3 b^-2 a"
    assert format_word(Word(), ab) == "1"
    assert W(format_word(w, ab)) == w


def test_alphabet_validation():
    for bad in (["a", "a"], ["1"], ["x^y"], ["p:"]):
        with pytest.raises(AlphabetError):
            Alphabet(bad)


def test_cyclic_reduce_examples():
    c, conj = cyclic_reduce(W("a b a^-1"))
    assert c == CyclicWord.of(W("b")) and conj == W("a")
    c, conj = cyclic_reduce(W("b a b^-1 a^-1"))
    assert c.rep == W("b a b^-1 a^-1").letters and conj == Word()
    c, conj = cyclic_reduce(W("a^2 b a^-2"))
    assert c.rep == W("b").letters and conj == W("a^2")


def test_primitivity_examples():
    prim, root, k = is_primitive(W("a b a b"))
    assert (prim, root, k) == (False, CyclicWord.of(W("a b")), 2)
    assert is_primitive(W("a b"))[0]
    prim, root, k = is_primitive(W("a a b a b"))
    assert prim and k == 1 and len(root) == 5
    with pytest.raises(DegenerateInputError):
        is_primitive(Word())


def test_exponent_sum_examples():
    al = Alphabet(["a", "t"])
    w = parse_word("t a t^-1 a^-2", al)
    assert exponent_sum(w, 0) == -1
    assert exponent_sum(w, 1) == 0
    bg = parse_word("t^-1 a t a^-1 t^-1 a^-1 t a a^-1", al)
    assert exponent_sum(bg, 1) == 0


def test_syllable_examples():
    al = Alphabet(["a", "b", "x"])
    out = syllable_decomposition(parse_word("a x a x^-1", al), 2, [0])
    assert out == [(parse_word("a", al), parse_word("x", al)), (parse_word("a", al), parse_word("x^-1", al))]
    with pytest.raises(NoAlternation):
        syllable_decomposition(parse_word("x^3", al), 2, [0])
    out = syllable_decomposition(parse_word("a b x^2 a^-1 x^-1", al), 2, [0, 1])
    assert [(format_word(a, al), format_word(b, al)) for a, b in out] == [("a b", "x^2"), ("a^-1", "x^-1")]


@given(letters2)
def test_free_reduce_idempotent(raw):
    w = Word(tuple(raw))
    assert Word(w.letters) == w
    assert len(w) <= len(raw)
    assert all(x != y ^ 1 for x, y in zip(w.letters, w.letters[1:]))


@given(letters2)
def test_conjugation_identity(raw):
    w = Word(tuple(raw))
    c, conj = cyclic_reduce(w)
    assert Word(c.rep).conjugate(conj) == w
    if len(c.rep) > 1:
        assert c.rep[0] != c.rep[-1] ^ 1


@given(letters2, letters2)
def test_exponent_sum_homomorphism(u, v):
    u, v = Word(tuple(u)), Word(tuple(v))
    for g in (0, 1):
        assert exponent_sum(u * v, g) == exponent_sum(u, g) + exponent_sum(v, g)


def _brute_primitive(c):
    n = len(c)
    for k in range(2, n + 1):
        if n % k:
            continue
        m = n // k
        for r in range(n):
            rot = c[r:] + c[:r]
            if rot == rot[:m] * k:
                return False
    return True


def test_primitivity_matches_brute_force():
    count = 0
    for n in range(1, 11):
        for seq in itertools.product(range(4), repeat=n):
            if n > 1 and any(x == y ^ 1 for x, y in zip(seq, seq[1:] + seq[:1])):
                continue
            assert is_primitive(CyclicWord(seq, seq))[0] == _brute_primitive(seq), seq
            count += 1
    assert count > 1000


@given(st.lists(st.integers(0, 5), min_size=1, max_size=12))
def test_syllables_concatenate_to_rotation(raw):
    w = Word(tuple(raw))
    if not w.letters:
        return
    c, _ = cyclic_reduce(w)
    try:
        out = syllable_decomposition(c.rep, 2, [0, 1])
    except NoAlternation:
        return
    flat = tuple(x for a, b in out for x in a.letters + b.letters)
    n = len(flat)
    assert any(flat == c.rep[i:] + c.rep[:i] for i in range(n))
    assert all(len(a) and len(b) for a, b in out)
