import warnings
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hitchinq.linalg import ExactMatrix, mp_dist
from hitchinq.reps import RepresentationError, rep_dist
from hitchinq.seeds import default_spec, hitchin_seed
from hitchinq.twist import (
    ConjugatedTwist,
    Substitution,
    TwistDatum,
    TwistError,
    pushforward,
    standard_twist_datum,
    twist_matrix,
    twist_rational,
    twist_real,
)
from hitchinq.words import SurfacePresentation, Word

G2 = SurfacePresentation.of_genus(2)
G3 = SurfacePresentation.of_genus(3)
SEED2 = hitchin_seed(2, 3)
SEED_SP = hitchin_seed(2, 4, default_spec(4, "sp"))

# a Dehn-twist-like automorphism of the first handle and its inverse
PHI = {"a1": "B1", "b1": "b1 a1"}
PSI = {"a1": "a1 b1", "b1": "A1"}


def conjugated(pres):
    return ConjugatedTwist(standard_twist_datum(pres, "a1"), Substitution.from_mapping(pres, PHI),
                           Substitution.from_mapping(pres, PSI))


def test_standard_datum():
    d = standard_twist_datum(G3, "a1")
    assert d.twisted == {1}
    assert d.fixed == {0, 2, 3, 4, 5}
    assert standard_twist_datum(G2, "a2").twisted == {3}
    with pytest.raises(TwistError):
        standard_twist_datum(G2, "b1")
    with pytest.raises(TwistError):
        standard_twist_datum(G2, 9)


def test_datum_validation():
    with pytest.raises(TwistError):
        TwistDatum(G2, Word.gen(0), frozenset({0, 1, 2}), frozenset({1, 3}))
    with pytest.raises(TwistError):
        TwistDatum(G2, Word.gen(0), frozenset({0, 2, 3}), frozenset())
    with pytest.raises(TwistError):
        # a2 does not meet a1
        TwistDatum(G2, Word.gen(0), frozenset({0, 1, 3}), frozenset({2}))


def test_time_zero_is_identity():
    d = standard_twist_datum(G2, "a1")
    out = twist_real(SEED2, d, 0.0)
    assert out.images == SEED2.images
    assert twist_rational(SEED2, d, ExactMatrix.identity(3)).images == SEED2.images


@settings(max_examples=100)
@given(st.floats(-1.5, 1.5), st.floats(-1.5, 1.5), st.sampled_from(["a1", "a2"]))
def test_additivity(s, t, curve):
    d = standard_twist_datum(G2, curve)
    two = twist_real(twist_real(SEED2, d, s), d, t)
    one = twist_real(SEED2, d, s + t)
    assert rep_dist(two, one) <= 1e-9


@pytest.mark.parametrize("n,kind", [(3, "sl"), (4, "sp")])
def test_real_twist_relator_and_membership(n, kind):
    rep = hitchin_seed(3, n, default_spec(n, kind))
    for curve in ("a1", "a2", "a3"):
        out = twist_real(rep, standard_twist_datum(G3, curve), 1.7)
        assert out.relator_residual() <= 1e-9
        assert all(out.membership(1e-9))


def test_real_twist_trace_invariance():
    d = standard_twist_datum(G2, "a1")
    out = twist_real(SEED2, d, 1.0)
    assert out.evaluate("a1").trace() == SEED2.evaluate("a1").trace()
    assert abs(float(out.evaluate("b1").trace() - SEED2.evaluate("b1").trace())) > 1e-3
    assert all(out.images[g] == SEED2.images[g] for g in d.fixed)


def test_twist_matrix_commutes_with_curve():
    A = SEED2.evaluate("a1")
    E = twist_matrix(SEED2, Word.gen(0), 0.8)
    Af = A.to_float()
    assert np.abs(Af @ E - E @ Af).max() <= 1e-12 * np.abs(Af).max() * np.abs(E).max()


def test_rational_twist_examples():
    d = standard_twist_datum(G2, "a1")
    A = SEED2.evaluate("a1")
    out = twist_rational(SEED2, d, A)
    assert out.exact and out.relator_ok()
    assert out["b1"] == SEED2["b1"] @ A
    with pytest.raises(TwistError):
        twist_rational(SEED2, d, SEED2["b1"])
    with pytest.raises(TwistError):
        twist_rational(SEED2, d, A.scale(2))
    with pytest.raises(RepresentationError):
        twist_rational(SEED2.to_real(), d, A)


@given(st.integers(-3, 3), st.integers(-3, 3))
def test_rational_twist_group_stability(j, k):
    # products of powers of the curve image lie in its centralizer and in the group
    d = standard_twist_datum(G2, "a2")
    A = SEED_SP.evaluate("a2")
    B = (A ** j) @ (SEED_SP.evaluate("a2 a2") ** k)
    out = twist_rational(SEED_SP, d, B)
    assert out.relator_ok()
    assert all(out.membership())
    assert out.evaluate("a2").trace() == A.trace()


def test_pushforward():
    ident = Substitution.identity(G2)
    assert pushforward(SEED2, ident).images == SEED2.images
    phi = Substitution.from_mapping(G2, PHI)
    psi = Substitution.from_mapping(G2, PSI)
    assert phi.preserves_relator() and psi.preserves_relator()
    pushed = pushforward(SEED2, phi)
    assert pushed.relator_ok()
    assert pushforward(pushed, psi).images == SEED2.images
    assert phi.then(psi).is_identity()
    bad = Substitution.from_mapping(G2, {"a1": "b1"})
    assert not bad.preserves_relator()
    with pytest.raises(RepresentationError):
        pushforward(SEED2, bad)


def test_substitution_json():
    phi = Substitution.from_mapping(G2, PHI)
    assert phi.to_json() == PHI
    assert Substitution.from_mapping(G2, phi.to_json()) == phi


def test_conjugated_twist():
    tw = conjugated(G2)
    assert G2.format(tw.curve) == "B1"
    with pytest.raises(TwistError):
        ConjugatedTwist(tw.datum, tw.substitution, tw.substitution)
    with pytest.raises(TwistError):
        bad = Substitution.from_mapping(G2, {"a1": "b1"})
        ConjugatedTwist(tw.datum, bad, bad)
    out = twist_real(SEED2, tw, 0.7)
    assert out.relator_residual() <= 1e-9
    assert out.evaluate(tw.curve).trace() == SEED2.evaluate(tw.curve).trace()
    # the conjugated twist matrix centralizes the image of the new curve
    A = SEED2.evaluate(tw.curve)
    E = twist_matrix(SEED2, tw.curve, 0.7)
    Af = A.to_float()
    assert np.abs(Af @ E - E @ Af).max() <= 1e-12 * np.abs(Af).max() * np.abs(E).max()
    assert twist_real(SEED2, tw, 0.0).images == SEED2.images


def test_conjugated_rational_twist():
    tw = conjugated(G2)
    B = SEED2.evaluate(tw.curve)  # centralizes the image of phi(a1)
    inner_B = pushforward(SEED2, tw.substitution).evaluate(tw.datum.curve)
    assert inner_B == B
    out = twist_rational(SEED2, tw, B)
    assert out.relator_ok()
    assert out.evaluate(tw.curve) == B


def test_repeated_eigenvalue_warns():
    ident = SEED2.with_images([ExactMatrix.identity(3)] * 4)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        twist_real(ident, standard_twist_datum(G2, "a1"), 0.0)
    assert any("repeated" in str(w.message) for w in caught)


def test_extended_output_is_precise():
    d = standard_twist_datum(G3, "a1")
    rep = hitchin_seed(3, 4, default_spec(4, "sp"))
    out = twist_real(rep, d, 3.0)
    back = twist_real(out, d, -3.0)
    assert mp_dist(back["b1"], rep["b1"]) <= 1e-20
    assert back["a1"] == rep["a1"]
    assert isinstance(back["b1"][0, 0], Fraction)
