import pytest
from hypothesis import given
from hypothesis import strategies as st

from hitchinq.words import (
    Presentation,
    SurfacePresentation,
    Word,
    WordSyntaxError,
    abelianize,
    algebraic_intersection,
    commutator,
    concat,
    cyclic_key,
    free_reduce,
    gamma_presentation,
    intersection_pairing,
    invert,
    presentation_from_json,
)

G2 = SurfacePresentation.of_genus(2)
G3 = SurfacePresentation.of_genus(3)

syllables = st.lists(st.tuples(st.integers(0, 5), st.integers(-3, 3)), max_size=12)
words = syllables.map(Word)
homology = st.lists(st.integers(-5, 5), min_size=6, max_size=6).map(tuple)


def naive_reduce(letters):
    out = []
    for g, e in letters:
        for _ in range(abs(e)):
            s = 1 if e > 0 else -1
            if out and out[-1] == (g, -s):
                out.pop()
            else:
                out.append((g, s))
    return out


def test_free_reduce_examples():
    P = Presentation(("a", "b", "c"), ())
    assert P.format(P.parse("a b B a")) == "a a"
    assert free_reduce(Word()) == Word()
    w = P.parse("a b A B")
    assert free_reduce(w) == w and len(w) == 4


def test_invert_concat_examples():
    P = Presentation(("a", "b", "c"), ())
    assert P.format(invert(P.parse("a b"))) == "B A"
    assert concat(P.parse("a"), P.parse("A")) == Word()
    assert P.format(concat(P.parse("a b"), P.parse("B c"))) == "a c"


@given(syllables)
def test_reduction_is_free_and_canonical(s):
    w = Word(s)
    assert list(w.letters()) == naive_reduce(s)
    assert all(e != 0 for _, e in w.syllables)
    assert all(a[0] != b[0] for a, b in zip(w.syllables, w.syllables[1:]))


@given(syllables)
def test_free_reduce_idempotent(s):
    w = free_reduce(s)
    assert free_reduce(w) == w
    assert free_reduce(list(w.syllables)) == w


@given(words, words, words)
def test_concat_associative(u, v, w):
    assert concat(concat(u, v), w) == concat(u, concat(v, w))


@given(words)
def test_invert_involution(w):
    assert invert(invert(w)) == w
    assert concat(w, invert(w)) == Word()


@given(words)
def test_parse_format_round_trip(w):
    P = Presentation(tuple("abcdef"), ())
    assert P.parse(P.format(w)) == w


def test_parse_powers_and_errors():
    assert G2.parse("a1^3 B2^-2") == Word(((0, 3), (3, 2)))
    with pytest.raises(WordSyntaxError):
        G2.parse("a3")
    with pytest.raises(WordSyntaxError):
        G2.parse("a1 ^")


def test_surface_relator():
    for g in (2, 3, 4):
        P = SurfacePresentation.of_genus(g)
        assert len(P.relator) == 4 * g
        assert P.relator.cyclic_reduce() == P.relator
        assert P.names[:2] == ("a1", "b1")
    assert G2.format(G2.relator) == "a1 b1 A1 B1 a2 b2 A2 B2"


def test_gamma_and_json():
    gam = gamma_presentation()
    assert gam.format(gam.relators[0]) == "a b A B a b A B"
    assert presentation_from_json(gam.to_json()) == gam
    assert presentation_from_json(G3.to_json()) == G3


def test_abelianize_examples():
    assert abelianize(G2.parse("a1 b1 A1 B1"), G2) == (0, 0, 0, 0)
    assert abelianize(G2.parse("a1"), G2) == (1, 0, 0, 0)
    assert abelianize(G2.parse("a1 a1 B2"), G2) == (2, 0, 0, -1)
    with pytest.raises(IndexError):
        abelianize(Word.gen(7), G2)


def test_intersection_examples():
    # i(a1, b1) = +1; the pairing is antisymmetric, so i(b1, a1) = -1.
    assert algebraic_intersection(G2.parse("a1"), G2.parse("b1"), G2) == 1
    assert algebraic_intersection(G2.parse("b1"), G2.parse("a1"), G2) == -1
    assert algebraic_intersection(G2.parse("a1"), G2.parse("a1"), G2) == 0
    assert algebraic_intersection(G2.parse("a1 b2"), G2.parse("b1"), G2) == 1
    assert algebraic_intersection(G2.parse("a2"), G2.parse("a1"), G2) == 0


@given(homology, homology)
def test_intersection_antisymmetric(x, y):
    assert intersection_pairing(x, y) == -intersection_pairing(y, x)
    assert intersection_pairing(x, x) == 0


@given(homology, homology, homology, st.integers(-4, 4), st.integers(-4, 4))
def test_intersection_bilinear(x, y, z, p, q):
    lin = tuple(p * a + q * b for a, b in zip(x, y))
    assert intersection_pairing(lin, z) == p * intersection_pairing(x, z) + q * intersection_pairing(y, z)


@given(st.lists(st.tuples(st.integers(0, 5), st.integers(-2, 2)), max_size=8),
       st.lists(st.tuples(st.integers(0, 5), st.integers(-2, 2)), max_size=8))
def test_intersection_on_words_factors_through_homology(s, t):
    u, v = Word(s), Word(t)
    assert algebraic_intersection(u, v, G3) == intersection_pairing(abelianize(u, G3), abelianize(v, G3))
    # commutators are null-homologous
    assert algebraic_intersection(commutator(u, v), v, G3) == 0


@given(words, st.integers(0, 10))
def test_cyclic_key_invariant_under_rotation_and_inversion(w, k):
    seq = w.cyclic_reduce().signed()
    if seq:
        k %= len(seq)
        rot = Word.from_signed(seq[k:] + seq[:k])
        assert cyclic_key(rot) == cyclic_key(w)
    assert cyclic_key(~w) == cyclic_key(w)


def test_substitute_and_power():
    a, b = Word.gen(0), Word.gen(1)
    w = commutator(a, b)
    assert w.substitute([b, a]) == commutator(b, a)
    assert a ** 3 == Word(((0, 3),))
    assert a ** -2 == Word(((0, -2),))
