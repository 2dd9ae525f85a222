import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from conftest import exact_matrices, small_fractions
from hypothesis import assume, given
from hypothesis import strategies as st

from hitchinq.linalg import (
    EigenError,
    ExactMatrix,
    Poly,
    RankDeficiencyError,
    SingularMatrixError,
    bareiss_det,
    dist,
    eigenvalues,
    exact_from_float,
    expm,
    expm_precise,
    format_fraction,
    has_distinct_eigenvalues,
    krylov_coordinates,
    mp_to_exact,
    nullspace,
    poly_eval,
    rationalize,
    rationalize_matrix,
    solve,
    to_fraction,
)
from hitchinq.seeds import LONG_REID_A, LONG_REID_B

F = Fraction


def test_basic_examples():
    assert ExactMatrix.identity(3).det() == 1
    assert LONG_REID_A.inverse() == ExactMatrix([[F(1, 3), F(-2, 3)], [0, 3]])
    assert LONG_REID_A.det() == 1
    assert ExactMatrix.diag([2, F(1, 2)]).charpoly() == Poly([1, F(-5, 2), 1])
    with pytest.raises(SingularMatrixError):
        ExactMatrix([[1, 2], [2, 4]]).inverse()


def test_scalars():
    assert to_fraction("3/6") == F(1, 2)
    assert format_fraction(F(-4, 6)) == "-2/3"
    assert format_fraction(F(3)) == "3/1"
    with pytest.raises(ValueError):
        to_fraction(float("nan"))


@given(exact_matrices(3), exact_matrices(3))
def test_det_multiplicative(A, B):
    assert (A @ B).det() == A.det() * B.det()


@given(st.integers(1, 5).flatmap(exact_matrices))
def test_cayley_hamilton(A):
    chi = A.charpoly()
    assert chi.degree == A.n and chi.coeffs[-1] == 1
    assert poly_eval(chi, A).is_zero()
    assert chi.coeffs[0] == (-1) ** A.n * A.det()
    assert -chi.coeffs[-2] == A.trace()


@given(st.integers(1, 4).flatmap(exact_matrices))
def test_inverse(A):
    assume(A.det() != 0)
    assert (A @ A.inverse()).is_identity()


@given(st.lists(st.lists(st.integers(-20, 20), min_size=4, max_size=4), min_size=4, max_size=4))
def test_bareiss_matches_float_det(rows):
    assert math.isclose(bareiss_det(rows), round(np.linalg.det(np.array(rows, dtype=float))), abs_tol=0.5)


def test_poly_eval_examples():
    A = LONG_REID_A
    assert poly_eval(Poly([0, 1]), A) == A
    assert poly_eval(Poly([1, F(-5, 2), 1]), ExactMatrix.diag([2, F(1, 2)])).is_zero()
    assert poly_eval(Poly([1, 1]), A) == ExactMatrix([[4, F(2, 3)], [0, F(4, 3)]])
    assert np.allclose(poly_eval([1, 1], A.to_float()), [[4, 2 / 3], [0, 4 / 3]])


@given(exact_matrices(3), st.lists(small_fractions, max_size=5))
def test_poly_eval_commutes(A, cs):
    assert poly_eval(Poly(cs), A).commutes_with(A)


def test_distinct_eigen_certificate():
    assert has_distinct_eigenvalues(ExactMatrix.diag([2, 3, F(1, 6)]))
    assert not has_distinct_eigenvalues(ExactMatrix.diag([2, 2, F(1, 4)]))
    assert not has_distinct_eigenvalues(ExactMatrix([[1, 1], [0, 1]]))
    assert has_distinct_eigenvalues(LONG_REID_A @ LONG_REID_B)


def test_eigenvalue_examples():
    r = eigenvalues(np.diag([3.0, 1 / 3]))
    assert np.allclose(sorted(z.real for z in r.values), [1 / 3, 3])
    assert r.real_distinct_positive
    rot = eigenvalues(np.array([[0.0, -1.0], [1.0, 0.0]]))
    assert not rot.all_real and not rot.all_positive
    assert sorted(round(z.imag) for z in rot.values) == [-1, 1]
    assert eigenvalues(LONG_REID_A @ LONG_REID_B).real_distinct_positive
    assert not eigenvalues(ExactMatrix.identity(3)).all_distinct
    assert not eigenvalues(np.diag([2.0, -0.5])).all_positive


@given(st.lists(st.floats(-5, 5), min_size=9, max_size=9))
def test_eigen_residual(vals):
    A = np.array(vals).reshape(3, 3)
    try:
        r = eigenvalues(A, 1e-9)
    except EigenError:
        return  # reported, not silent
    assert r.residual <= 1e-6
    assert math.isclose(sum(r.values).real, np.trace(A), abs_tol=1e-8)


def test_expm_examples():
    assert np.allclose(expm(np.zeros((3, 3))), np.eye(3))
    assert np.allclose(expm(np.diag([1.5, -1.5])), np.diag([math.exp(1.5), math.exp(-1.5)]), rtol=1e-14)
    var = ExactMatrix.diag([F(3, 4), F(-3, 4)])
    assert np.allclose(expm(var.to_float()), np.diag([math.exp(0.75), math.exp(-0.75)]), rtol=1e-14)


@given(st.lists(st.floats(-1, 1), min_size=16, max_size=16), st.floats(0.01, 1))
def test_expm_relative_error(vals, s):
    X = np.array(vals).reshape(4, 4)
    X *= 10 * s / max(np.linalg.norm(X, 2), 1e-12)
    ref = expm_precise(exact_from_float(X))
    assert np.linalg.norm(expm(X) - ref, 2) <= 1e-12 * np.linalg.norm(ref, 2) * 10


@given(st.lists(st.floats(-1, 1), min_size=9, max_size=9), st.floats(0.01, 1))
def test_expm_inverse_pair(vals, s):
    X = np.array(vals).reshape(3, 3)
    X *= 5 * s / max(np.linalg.norm(X, 2), 1e-12)
    assert np.abs(expm(X) @ expm(-X) - np.eye(3)).max() <= 1e-10


def test_expm_precise_beats_doubles_on_nonnormal():
    X = ExactMatrix([[1, 10 ** 6], [0, -1]])
    with mpmath.workdps(50):
        ref = mpmath.expm(mpmath.matrix([[1, 10 ** 6], [0, -1]]))
    out = expm_precise(X)
    assert abs(out[0, 1] - float(ref[0, 1])) <= 1e-15 * abs(float(ref[0, 1]))


def test_krylov_examples():
    A = np.diag([2.0, 0.5])
    assert np.allclose(krylov_coordinates(A, np.eye(2)).coeffs, [1, 0])
    assert np.allclose(krylov_coordinates(A, A).coeffs, [0, 1])
    assert np.allclose(krylov_coordinates(A, np.diag([4.0, 0.25])).coeffs, [-1, 2.5])
    with pytest.raises(RankDeficiencyError):
        krylov_coordinates(np.eye(2), np.eye(2))
    with pytest.raises(ValueError):
        krylov_coordinates(A, np.array([[0.0, 1.0], [0.0, 0.0]]))


@given(st.lists(st.floats(-3, 3), min_size=3, max_size=3), st.lists(st.floats(-2, 2), min_size=3, max_size=3))
def test_krylov_round_trip(c, diag):
    A = np.diag([1.0, 2.5, -1.5]) + np.triu(np.ones((3, 3)), 1) * 0.3
    T = sum(ck * np.linalg.matrix_power(A, k) for k, ck in enumerate(c))
    res = krylov_coordinates(A, T)
    if res.condition <= 1e8:
        P = sum(ck * np.linalg.matrix_power(A, k) for k, ck in enumerate(res.coeffs))
        assert np.abs(P - T).max() <= 1e-8


def test_rationalize_examples():
    assert rationalize(0.5, 10) == F(1, 2)
    assert rationalize(math.pi, 113) == F(355, 113)
    assert rationalize(math.e, 1) == 3
    with pytest.raises(ValueError):
        rationalize(float("inf"), 10)
    with pytest.raises(ValueError):
        rationalize(1.0, 0)


def test_rationalize_pi_is_best():
    best = min((abs(math.pi - F(round(math.pi * q), q)), q) for q in range(1, 114))
    assert F(355, 113) == F(round(math.pi * best[1]), best[1])


@given(st.floats(-100, 100, allow_nan=False), st.integers(1, 10 ** 6))
def test_rationalize_bound(x, q):
    r = rationalize(x, q)
    assert r.denominator <= q
    assert abs(F(x) - r) <= F(1, r.denominator * q)


@given(st.sampled_from([math.pi, math.e, math.sqrt(2), math.log(3), 2 ** (1 / 3)]), st.integers(1, 9))
def test_rationalize_monotone(x, k):
    errs = [abs(F(x) - rationalize(x, 10 ** j)) for j in range(k + 1)]
    assert all(b <= a for a, b in zip(errs, errs[1:]))


def test_dist_examples():
    assert dist(np.eye(2), np.eye(2)) == 0
    assert dist(np.eye(2), np.diag([1.0, 2.0])) == 1
    assert dist(LONG_REID_A, rationalize_matrix(LONG_REID_A.to_float(), 10 ** 6)) == 0
    with pytest.raises(ValueError):
        dist(np.eye(2), np.eye(3))


def test_nullspace_and_solve():
    basis = nullspace([[1, 1, 0], [0, 1, 1]], 3)
    assert len(basis) == 1
    v = basis[0]
    assert v[0] + v[1] == 0 and v[1] + v[2] == 0
    assert solve(ExactMatrix([[2, 1], [1, 3]]), [3, 4]) == [1, 1]


def test_mp_round_trip():
    with mpmath.workdps(40):
        M = mpmath.matrix([[mpmath.mpf(1) / 3, 2], [0, 3]])
        E = mp_to_exact(M)
    assert abs(E[0, 0] - F(1, 3)) < F(1, 10 ** 39)
    assert E[0, 1] == 2
