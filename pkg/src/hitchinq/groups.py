"""Target groups SL(n), Sp(2k) and split G2: membership, Lie algebras, F-map."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cache
from itertools import combinations
from typing import Union

import numpy as np

from .linalg import ExactMatrix, as_real, format_fraction, nullspace, solve, to_fraction

Matrix = Union[ExactMatrix, np.ndarray]

# Invariant alternating 3-form of the principal SL(2) acting on degree-6
# binary forms (monomial basis x^6, x^5 y, ..., y^6); its stabilizer is split G2.
G2_THREE_FORM: tuple[tuple[int, int, int, int], ...] = (
    (0, 3, 6, -1),
    (0, 4, 5, 3),
    (1, 2, 6, 3),
    (1, 3, 5, -6),
    (2, 3, 4, 15),
)


class GroupSpecError(ValueError):
    pass


def standard_symplectic_form(n: int) -> ExactMatrix:
    """Block form ``[[0, I_k], [-I_k, 0]]``."""
    if n % 2:
        raise GroupSpecError("symplectic forms need even dimension")
    k = n // 2
    rows = [[0] * n for _ in range(n)]
    for i in range(k):
        rows[i][k + i] = 1
        rows[k + i][i] = -1
    return ExactMatrix(rows)


@dataclass(frozen=True)
class GroupSpec:
    kind: str
    n: int
    J: ExactMatrix | None = None
    phi3: tuple[tuple[int, int, int, Fraction], ...] | None = None

    def __post_init__(self) -> None:
        if self.kind not in ("SL", "SP", "G2"):
            raise GroupSpecError(f"unknown group kind {self.kind!r}")
        if self.n < 1:
            raise GroupSpecError("dimension must be positive")
        if self.kind == "SP":
            if self.J is None or self.J.n != self.n or self.n % 2:
                raise GroupSpecError("SP needs an even dimension and a form J of that size")
            if self.J.T != -self.J or self.J.det() == 0:
                raise GroupSpecError("J must be alternating and nondegenerate")
        if self.kind == "G2":
            if self.n != 7:
                raise GroupSpecError("G2 lives in dimension 7")
            if not self.phi3:
                raise GroupSpecError("G2 needs a three-form table")
            object.__setattr__(
                self, "phi3", tuple(sorted((i, j, k, to_fraction(c)) for i, j, k, c in self.phi3))
            )

    @classmethod
    def sl(cls, n: int) -> GroupSpec:
        return cls("SL", n)

    @classmethod
    def sp(cls, n: int, J: ExactMatrix | None = None) -> GroupSpec:
        return cls("SP", n, J=J if J is not None else standard_symplectic_form(n))

    @classmethod
    def g2(cls, phi3=G2_THREE_FORM) -> GroupSpec:
        return cls("G2", 7, phi3=tuple(phi3))

    def to_json(self) -> dict:
        out: dict = {"kind": self.kind, "n": self.n}
        if self.J is not None:
            out["J"] = [[format_fraction(x) for x in r] for r in self.J.rows]
        if self.phi3 is not None:
            out["phi3"] = [[i, j, k, format_fraction(c)] for i, j, k, c in self.phi3]
        return out

    @classmethod
    def from_json(cls, data: dict) -> GroupSpec:
        kind = data["kind"].upper()
        n = int(data["n"])
        J = ExactMatrix(data["J"]) if data.get("J") is not None else None
        if kind == "SP" and J is None:
            J = standard_symplectic_form(n)
        phi3 = tuple(tuple(t) for t in data["phi3"]) if data.get("phi3") else None
        if kind == "G2" and phi3 is None:
            phi3 = G2_THREE_FORM
        return cls(kind, n, J=J, phi3=phi3)


# -- three-forms ---------------------------------------------------------------

def three_form_tensor(spec: GroupSpec, exact: bool = False):
    """Full antisymmetric tensor ``phi[i][j][k]`` (dict if exact, array otherwise)."""
    entries = {}
    for i, j, k, c in spec.phi3 or ():
        for (p, q, r), s in (((i, j, k), 1), ((j, k, i), 1), ((k, i, j), 1),
                             ((j, i, k), -1), ((i, k, j), -1), ((k, j, i), -1)):
            entries[(p, q, r)] = s * c
    if exact:
        return entries
    arr = np.zeros((spec.n,) * 3)
    for key, c in entries.items():
        arr[key] = float(c)
    return arr


def _three_form_residual_exact(B: ExactMatrix, spec: GroupSpec) -> Fraction:
    phi = three_form_tensor(spec, exact=True)
    worst = Fraction(0)
    for i, j, k in combinations(range(spec.n), 3):
        val = sum((c * B[p, i] * B[q, j] * B[r, k] for (p, q, r), c in phi.items()), Fraction(0))
        worst = max(worst, abs(val - phi.get((i, j, k), 0)))
    return worst


def _three_form_residual_real(B: np.ndarray, spec: GroupSpec) -> float:
    phi = three_form_tensor(spec)
    moved = np.einsum("pqr,pi,qj,rk->ijk", phi, B, B, B)
    return float(np.abs(moved - phi).max())


# -- membership ----------------------------------------------------------------

@dataclass(frozen=True)
class Membership:
    ok: bool
    residual: float
    exact: bool

    def __bool__(self) -> bool:
        return self.ok


def member(g: Matrix, spec: GroupSpec, tol: float = 1e-9, approximate: bool = False) -> Membership:
    """Group membership of ``g``.

    ``ExactMatrix`` input is tested exactly unless ``approximate`` is set,
    in which case its exactly computed residual, scaled like the float
    residual, is compared against ``tol``. Float input always uses the
    scaled residual.
    """
    if isinstance(g, ExactMatrix):
        if g.n != spec.n:
            raise ValueError("dimension mismatch")
        res = abs(g.det() - 1)
        sres = res
        scale = max(Fraction(1), max(abs(x) for r in g.rows for x in r))
        if spec.kind == "SP":
            D = g.T @ spec.J @ g - spec.J
            d = max(abs(x) for r in D.rows for x in r)
            res, sres = max(res, d), max(sres / scale ** spec.n, d / scale ** 2)
        elif spec.kind == "G2":
            d = _three_form_residual_exact(g, spec)
            res, sres = max(res, d), max(sres / scale ** spec.n, d / scale ** 3)
        else:
            sres = sres / scale ** spec.n
        if approximate:
            return Membership(float(sres) <= tol, float(sres), False)
        return Membership(res == 0, float(res), True)
    B = as_real(g)
    if B.shape[0] != spec.n:
        raise ValueError("dimension mismatch")
    scale = max(1.0, float(np.abs(B).max()))
    res = abs(np.linalg.det(B) - 1.0) / scale ** spec.n
    if spec.kind == "SP":
        J = spec.J.to_float()
        res = max(res, float(np.abs(B.T @ J @ B - J).max()) / scale**2)
    elif spec.kind == "G2":
        res = max(res, _three_form_residual_real(B, spec) / scale**3)
    return Membership(bool(res <= tol), float(res), False)


# -- Lie algebras ---------------------------------------------------------------

@cache
def lie_algebra_basis(spec: GroupSpec) -> tuple[ExactMatrix, ...]:
    n = spec.n
    if spec.kind == "SL":
        basis = []
        for i in range(n):
            for j in range(n):
                if i != j:
                    basis.append(_unit(n, [(i, j, 1)]))
        for i in range(n - 1):
            basis.append(_unit(n, [(i, i, 1), (i + 1, i + 1, -1)]))
        return tuple(basis)
    if spec.kind == "SP":
        J = spec.J
        rows = []
        # (X^T J + J X)_{rs} = sum_p X_pr J_ps + J_rp X_ps
        for r in range(n):
            for s in range(n):
                row = [Fraction(0)] * (n * n)
                for p in range(n):
                    row[p * n + r] += J[p, s]
                    row[p * n + s] += J[r, p]
                rows.append(row)
        vecs = nullspace(rows, n * n)
    else:
        phi = three_form_tensor(spec, exact=True)
        rows = []
        for i, j, k in combinations(range(n), 3):
            row = [Fraction(0)] * (n * n)
            for p in range(n):
                row[p * n + i] += phi.get((p, j, k), 0)
                row[p * n + j] += phi.get((i, p, k), 0)
                row[p * n + k] += phi.get((i, j, p), 0)
            rows.append(row)
        vecs = nullspace(rows, n * n)
        if len(vecs) != 14:
            raise GroupSpecError(f"three-form derivations have dimension {len(vecs)}, not 14")
    return tuple(ExactMatrix([v[r * n:(r + 1) * n] for r in range(n)]) for v in vecs)


def in_lie_algebra(X: ExactMatrix, spec: GroupSpec) -> bool:
    """Exact test that ``X`` lies in the Lie algebra of ``spec``."""
    if X.n != spec.n:
        raise ValueError("dimension mismatch")
    if X.trace() != 0:
        return False
    if spec.kind == "SP":
        return (X.T @ spec.J + spec.J @ X).is_zero()
    if spec.kind == "G2":
        phi = three_form_tensor(spec, exact=True)
        n = spec.n
        for i, j, k in combinations(range(n), 3):
            val = sum(X[p, i] * phi.get((p, j, k), 0) + X[p, j] * phi.get((i, p, k), 0)
                      + X[p, k] * phi.get((i, j, p), 0) for p in range(n))
            if val != 0:
                return False
    return True


def _unit(n: int, entries) -> ExactMatrix:
    rows = [[0] * n for _ in range(n)]
    for i, j, c in entries:
        rows[i][j] = c
    return ExactMatrix(rows)


@cache
def _g2_gram(spec: GroupSpec):
    basis = lie_algebra_basis(spec)
    m = len(basis)
    gram = ExactMatrix([[(basis[i] @ basis[j]).trace() for j in range(m)] for i in range(m)])
    return basis, gram, np.linalg.inv(gram.to_float())


def variation(A: Matrix, spec: GroupSpec) -> Matrix:
    """Trace-form projection of ``A`` onto the Lie algebra of ``spec``.

    SL: ``A - tr(A)/n I``; SP: ``(A - J^-1 A^T J)/2``; G2: projection onto
    the 14-dimensional derivation algebra of the three-form.
    """
    exact = isinstance(A, ExactMatrix)
    n = spec.n
    if exact and A.det() == 0 or not exact and abs(np.linalg.det(as_real(A))) == 0:
        raise ArithmeticError("variation needs an invertible matrix")
    if spec.kind == "SL":
        if exact:
            return A - ExactMatrix.identity(n).scale(A.trace() / n)
        A = as_real(A)
        return A - np.trace(A) / n * np.eye(n)
    if spec.kind == "SP":
        if exact:
            return (A - centralizer_involution(A, None, spec)).scale(Fraction(1, 2))
        J = spec.J.to_float()
        A = as_real(A)
        return (A - np.linalg.solve(J, A.T @ J)) / 2
    basis, gram, gram_inv = _g2_gram(spec)
    if exact:
        rhs = [(X @ A).trace() for X in basis]
        coef = solve(gram, rhs)
        out = ExactMatrix.zero(n)
        for c, X in zip(coef, basis):
            out = out + X.scale(c)
        return out
    A = as_real(A)
    fb = [X.to_float() for X in basis]
    coef = gram_inv @ np.array([np.trace(X @ A) for X in fb])
    return sum(c * X for c, X in zip(coef, fb))


def centralizer_involution(x: ExactMatrix, A: ExactMatrix | None, spec: GroupSpec) -> ExactMatrix:
    """``tau(x) = J^-1 x^T J``; on ``Q[A]`` it sends ``p(A)`` to ``p(A^-1)``."""
    if spec.kind != "SP":
        raise GroupSpecError("the involution is defined for symplectic groups only")
    if A is not None and not x.commutes_with(A):
        raise ValueError("x does not lie in the centralizer of A")
    return _j_inverse(spec) @ x.T @ spec.J


@cache
def _j_inverse(spec: GroupSpec) -> ExactMatrix:
    return spec.J.inverse()
