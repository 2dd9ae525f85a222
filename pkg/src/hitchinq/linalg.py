"""Exact rational and floating-point matrix kernels."""

from __future__ import annotations

import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from typing import Union

import numpy as np
import scipy.linalg

Scalar = Union[int, Fraction]


class SingularMatrixError(ArithmeticError):
    pass


class EigenError(ArithmeticError):
    pass


def to_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, np.integer)):
        return Fraction(int(x))
    if isinstance(x, str):
        return Fraction(x)
    if isinstance(x, float):
        if not math.isfinite(x):
            raise ValueError(f"non-finite value {x}")
        return Fraction(x)
    raise TypeError(f"cannot convert {type(x).__name__} to an exact scalar")


def format_fraction(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


class ExactMatrix:
    """Immutable square matrix over Q."""

    __slots__ = ("_hash", "n", "rows")

    def __init__(self, rows: Iterable[Iterable]):
        self.rows = tuple(tuple(to_fraction(x) for x in r) for r in rows)
        self.n = len(self.rows)
        if any(len(r) != self.n for r in self.rows):
            raise ValueError("matrix must be square")
        self._hash = None

    @classmethod
    def identity(cls, n: int) -> ExactMatrix:
        return cls([[1 if i == j else 0 for j in range(n)] for i in range(n)])

    @classmethod
    def zero(cls, n: int) -> ExactMatrix:
        return cls([[0] * n for _ in range(n)])

    @classmethod
    def diag(cls, entries: Sequence) -> ExactMatrix:
        n = len(entries)
        return cls([[entries[i] if i == j else 0 for j in range(n)] for i in range(n)])

    def __getitem__(self, ij: tuple[int, int]) -> Fraction:
        return self.rows[ij[0]][ij[1]]

    def __eq__(self, other) -> bool:
        return isinstance(other, ExactMatrix) and self.rows == other.rows

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(self.rows)
        return self._hash

    def __repr__(self) -> str:
        body = ", ".join("[" + ", ".join(str(x) for x in r) + "]" for r in self.rows)
        return f"ExactMatrix([{body}])"

    def __add__(self, other: ExactMatrix) -> ExactMatrix:
        return ExactMatrix([[a + b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)])

    def __sub__(self, other: ExactMatrix) -> ExactMatrix:
        return ExactMatrix([[a - b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)])

    def __neg__(self) -> ExactMatrix:
        return ExactMatrix([[-a for a in r] for r in self.rows])

    def scale(self, c: Scalar) -> ExactMatrix:
        c = to_fraction(c)
        return ExactMatrix([[c * a for a in r] for r in self.rows])

    def __matmul__(self, other: ExactMatrix) -> ExactMatrix:
        cols = list(zip(*other.rows))
        return ExactMatrix([[sum(a * b for a, b in zip(r, c)) for c in cols] for r in self.rows])

    def __pow__(self, k: int) -> ExactMatrix:
        base = self if k >= 0 else self.inverse()
        k = abs(k)
        out = ExactMatrix.identity(self.n)
        while k:
            if k & 1:
                out = out @ base
            base = base @ base
            k >>= 1
        return out

    @property
    def T(self) -> ExactMatrix:
        return ExactMatrix(zip(*self.rows))

    def trace(self) -> Fraction:
        return sum((self.rows[i][i] for i in range(self.n)), Fraction(0))

    def is_identity(self) -> bool:
        return self == ExactMatrix.identity(self.n)

    def is_zero(self) -> bool:
        return all(x == 0 for row in self.rows for x in row)

    def is_scalar(self) -> bool:
        c = self.rows[0][0]
        return self == ExactMatrix.identity(self.n).scale(c)

    def commutes_with(self, other: ExactMatrix) -> bool:
        return self @ other == other @ self

    def to_float(self) -> np.ndarray:
        return np.array([[float(x) for x in r] for r in self.rows], dtype=float)

    def max_denominator(self) -> int:
        return max(x.denominator for r in self.rows for x in r)

    def _integer_rows(self) -> tuple[list[list[int]], list[int]]:
        dens = [reduce(math.lcm, (x.denominator for x in r), 1) for r in self.rows]
        ints = [[int(x * d) for x in r] for r, d in zip(self.rows, dens)]
        return ints, dens

    def det(self) -> Fraction:
        """Fraction-free Bareiss elimination on the row-cleared integer matrix."""
        ints, dens = self._integer_rows()
        d = bareiss_det(ints)
        return Fraction(d, math.prod(dens))

    def inverse(self) -> ExactMatrix:
        n = self.n
        aug = [list(r) + [Fraction(int(i == j)) for j in range(n)] for i, r in enumerate(self.rows)]
        for col in range(n):
            piv = next((r for r in range(col, n) if aug[r][col] != 0), None)
            if piv is None:
                raise SingularMatrixError("matrix is singular")
            aug[col], aug[piv] = aug[piv], aug[col]
            p = aug[col][col]
            aug[col] = [x / p for x in aug[col]]
            for r in range(n):
                if r != col and aug[r][col] != 0:
                    f = aug[r][col]
                    aug[r] = [x - f * y for x, y in zip(aug[r], aug[col])]
        return ExactMatrix(row[n:] for row in aug)

    def charpoly(self) -> Poly:
        """``det(x I - A)``, via Berkowitz on ``L*A`` with ``L`` the common denominator."""
        L = reduce(math.lcm, (x.denominator for r in self.rows for x in r), 1)
        ints = [[int(x * L) for x in r] for r in self.rows]
        c = berkowitz(ints)  # high degree first, monic
        n = self.n
        # charpoly_A(y) = L^-n charpoly_{LA}(L y)
        coeffs = [Fraction(c[n - k], L ** (n - k)) for k in range(n + 1)]
        return Poly(coeffs)


def bareiss_det(m: list[list[int]]) -> int:
    a = [row[:] for row in m]
    n = len(a)
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            swap = next((r for r in range(k + 1, n) if a[r][k] != 0), None)
            if swap is None:
                return 0
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def berkowitz(m: list[list[int]]) -> list[int]:
    """Division-free characteristic polynomial, coefficients high degree first."""
    n = len(m)
    if n == 0:
        return [1]
    vect = [1, -m[0][0]]
    for r in range(1, n):
        R = m[r][:r]          # row r, columns < r
        C = [m[i][r] for i in range(r)]
        A = [row[:r] for row in m[:r]]
        a = m[r][r]
        # Toeplitz column: 1, -a, -R C, -R A C, ...
        col = [1, -a]
        v = C[:]
        for _ in range(r):
            col.append(-sum(x * y for x, y in zip(R, v)))
            v = [sum(A[i][j] * v[j] for j in range(r)) for i in range(r)]
        new = []
        for i in range(r + 2):
            new.append(sum(col[i - j] * vect[j] for j in range(min(i, r) + 1) if 0 <= i - j < len(col)))
        vect = new
    return vect


class Poly:
    """Polynomial over Q, coefficients low degree first."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable):
        cs = [to_fraction(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.coeffs = tuple(cs)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __eq__(self, other) -> bool:
        return isinstance(other, Poly) and self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def __repr__(self) -> str:
        return f"Poly({[str(c) for c in self.coeffs]})"

    def __call__(self, x):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def __add__(self, other: Poly) -> Poly:
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (Fraction(0),) * (n - len(self.coeffs))
        b = other.coeffs + (Fraction(0),) * (n - len(other.coeffs))
        return Poly(x + y for x, y in zip(a, b))

    def __mul__(self, other: Poly) -> Poly:
        if not self.coeffs or not other.coeffs:
            return Poly([])
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return Poly(out)

    def derivative(self) -> Poly:
        return Poly(k * c for k, c in enumerate(self.coeffs) if k)

    def divmod(self, other: Poly) -> tuple[Poly, Poly]:
        if not other.coeffs:
            raise ZeroDivisionError("polynomial division by zero")
        r = list(self.coeffs)
        q = [Fraction(0)] * max(len(r) - len(other.coeffs) + 1, 0)
        lead = other.coeffs[-1]
        while len(r) >= len(other.coeffs) and any(r):
            shift = len(r) - len(other.coeffs)
            f = r[-1] / lead
            q[shift] = f
            for i, c in enumerate(other.coeffs):
                r[i + shift] -= f * c
            r.pop()
            while r and r[-1] == 0:
                r.pop()
        return Poly(q), Poly(r)

    def monic(self) -> Poly:
        return Poly(c / self.coeffs[-1] for c in self.coeffs)


def poly_gcd(p: Poly, q: Poly) -> Poly:
    while q.coeffs:
        p, q = q, p.divmod(q)[1]
    return p.monic() if p.coeffs else p


def has_distinct_eigenvalues(A: ExactMatrix) -> bool:
    """Exact certificate: ``gcd(chi_A, chi_A') = 1``."""
    chi = A.charpoly()
    return poly_gcd(chi, chi.derivative()).degree == 0


def poly_eval(p: Poly, A):
    """Horner evaluation of ``p`` at an exact or float matrix."""
    if isinstance(A, ExactMatrix):
        n = A.n
        acc = ExactMatrix.zero(n)
        eye = ExactMatrix.identity(n)
        for c in reversed(p.coeffs):
            acc = acc @ A + eye.scale(c)
        return acc
    A = np.asarray(A, dtype=float)
    acc = np.zeros_like(A)
    for c in reversed(p.coeffs if isinstance(p, Poly) else list(p)):
        acc = acc @ A + float(c) * np.eye(A.shape[0])
    return acc


def nullspace(rows: Sequence[Sequence], ncols: int) -> list[list[Fraction]]:
    """Exact basis of ``{v : M v = 0}`` by reduced row echelon form."""
    m = [[to_fraction(x) for x in r] for r in rows]
    pivots: list[int] = []
    r = 0
    for col in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][col] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        p = m[r][col]
        m[r] = [x / p for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][col] != 0:
                f = m[i][col]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        pivots.append(col)
        r += 1
        if r == len(m):
            break
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        v = [Fraction(0)] * ncols
        v[fc] = Fraction(1)
        for i, pc in enumerate(pivots):
            v[pc] = -m[i][fc]
        basis.append(v)
    return basis


def solve(M: ExactMatrix, b: Sequence) -> list[Fraction]:
    inv = M.inverse()
    bb = [to_fraction(x) for x in b]
    return [sum(a * x for a, x in zip(row, bb)) for row in inv.rows]


# -- floating point ---------------------------------------------------------

def as_real(m) -> np.ndarray:
    if isinstance(m, ExactMatrix):
        return m.to_float()
    arr = np.asarray(m, dtype=float)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ValueError("expected a square matrix")
    if not np.all(np.isfinite(arr)):
        raise ValueError("matrix has non-finite entries")
    return arr


@dataclass(frozen=True)
class EigenReport:
    values: tuple[complex, ...]
    residual: float
    all_real: bool
    all_distinct: bool
    all_positive: bool

    @property
    def real_distinct_positive(self) -> bool:
        return self.all_real and self.all_distinct and self.all_positive


def _flags(w: list[complex], tol: float) -> tuple[bool, bool, bool]:
    # Per-eigenvalue relative tests: small eigenvalues of large matrices are
    # compared against their own size, not the matrix norm.
    all_real = all(abs(z.imag) <= tol * abs(z) for z in w)
    all_distinct = all(abs(w[i] - w[j]) > tol * max(abs(w[i]), abs(w[j]))
                       for i in range(len(w)) for j in range(i))
    all_positive = all_real and all(z.real > 0 for z in w)
    return all_real, all_distinct, all_positive


def _exact_eigenvalues(m: ExactMatrix) -> tuple[list[complex], float]:
    import mpmath

    # Working precision grows with the condition estimate |A| |A^-1|.
    big = max(max(abs(x) for x in row) for row in m.rows)
    try:
        inv = m.inverse()
        big *= max(max(abs(x) for x in row) for row in inv.rows)
    except SingularMatrixError:
        pass
    dps = 30 + 2 * max(0, int(math.log10(float(big) + 1.0)))
    with mpmath.workdps(dps):
        M = mpmath.matrix([[mpmath.mpf(x.numerator) / x.denominator for x in row] for row in m.rows])
        try:
            E, V = mpmath.eig(M)
        except ZeroDivisionError as exc:
            raise EigenError(f"eigensolver failed: {exc}") from exc
        scale = max(mpmath.mnorm(M, 1), 1)
        res = max((mpmath.norm(M * V[:, k] - E[k] * V[:, k]) / mpmath.norm(V[:, k])
                   for k in range(m.n)), default=mpmath.mpf(0)) / scale
        return [complex(z) for z in E], float(res)


def eigenvalues(m, tol: float = 1e-9) -> EigenReport:
    """Numeric eigenvalues with residual check and real/distinct/positive flags.

    Exact input is solved in multiprecision, floats in double precision.
    The reported residual is relative to the matrix norm.
    """
    if isinstance(m, ExactMatrix):
        w, res = _exact_eigenvalues(m)
    else:
        A = as_real(m)
        try:
            vals, v = np.linalg.eig(A)
        except np.linalg.LinAlgError as exc:
            raise EigenError(f"eigensolver did not converge: {exc}") from exc
        scale = max(np.linalg.norm(A, 2), 1.0)
        res = max((np.linalg.norm(A @ v[:, k] - vals[k] * v[:, k]) for k in range(len(vals))),
                  default=0.0) / scale
        w = [complex(z) for z in vals]
    if not res <= max(tol, 1e-12) * 1e3:
        raise EigenError(f"eigenpair residual {res:.3g} too large")
    all_real, all_distinct, all_positive = _flags(w, tol)
    w.sort(key=lambda z: -abs(z))
    return EigenReport(tuple(w), float(res), all_real, all_distinct, all_positive)


def expm(m) -> np.ndarray:
    """Matrix exponential (scaling and squaring with Pade approximants)."""
    A = as_real(m)
    out = scipy.linalg.expm(A)
    if not np.all(np.isfinite(out)):
        raise OverflowError("matrix exponential overflowed")
    return out


# -- multiprecision --------------------------------------------------------------
#
# Exponentials of highly non-normal matrices lose most of their digits in
# double-precision scaling and squaring. When the input is exact (or a float
# matrix taken at face value) we evaluate in mpmath at a precision that grows
# with the size of the entries and round once at the end.

def exact_from_float(m) -> ExactMatrix:
    """Exact rational matrix with the same binary values as a float matrix."""
    if isinstance(m, ExactMatrix):
        return m
    return ExactMatrix([[Fraction(float(x)) for x in row] for row in as_real(m)])


def working_dps(*mats, scale: float = 1.0) -> int:
    """Decimal digits sufficient for products and exponentials of ``mats``."""
    big = 1.0
    for m in mats:
        if isinstance(m, ExactMatrix):
            big = max(big, float(max(abs(x) for row in m.rows for x in row)))
        else:
            big = max(big, float(np.abs(as_real(m)).max()))
    return 30 + 3 * max(0, int(math.log10(big * max(abs(scale), 1.0) + 1.0)))


def to_mp(m):
    """``mpmath.matrix`` with the exact values of ``m`` at the current precision."""
    import mpmath

    if isinstance(m, ExactMatrix):
        return mpmath.matrix([[mpmath.mpf(x.numerator) / x.denominator for x in row] for row in m.rows])
    if isinstance(m, mpmath.matrix):
        return m
    return mpmath.matrix([[mpmath.mpf(float(x)) for x in row] for row in as_real(m)])


def mp_to_numpy(M) -> np.ndarray:
    out = np.array([[float(M[i, j]) for j in range(M.cols)] for i in range(M.rows)])
    if not np.all(np.isfinite(out)):
        raise OverflowError("value does not fit in double precision")
    return out


def mp_to_exact(M) -> ExactMatrix:
    """Exact dyadic rational matrix with the values of an ``mpmath.matrix``."""
    import mpmath

    def conv(x) -> Fraction:
        sign, man, exp, _ = mpmath.mpf(x)._mpf_
        v = Fraction(int(man)) * (Fraction(2) ** int(exp))
        return -v if sign else v

    return ExactMatrix([[conv(M[i, j]) for j in range(M.cols)] for i in range(M.rows)])


def mp_dist(M1, M2) -> float:
    """Entrywise max-absolute difference of two matrices, evaluated in mpmath."""
    import mpmath

    A, B = to_mp(M1), to_mp(M2)
    if (A.rows, A.cols) != (B.rows, B.cols):
        raise ValueError("dimension mismatch")
    return float(max((abs(A[i, j] - B[i, j]) for i in range(A.rows) for j in range(A.cols)),
                     default=mpmath.mpf(0)))


def expm_mp(m, t=1.0):
    """``exp(t m)`` as an ``mpmath.matrix`` at the current mpmath precision."""
    import mpmath

    return mpmath.expm(to_mp(m) * mpmath.mpf(t))


def expm_dps(m, *others, t: float = 1.0) -> int:
    """Working precision for ``exp(t m)`` and products with ``others``.

    Adds the decimal size of the largest entry of ``exp(t m)``, measured by
    a trial evaluation, so absolute errors stay small for large exponentials.
    """
    import mpmath

    base = working_dps(m, *others, scale=t)
    with mpmath.workdps(base):
        E = expm_mp(m, t)
        big = max(abs(E[i, j]) for i in range(E.rows) for j in range(E.cols))
    return base + max(0, int(mpmath.log10(big)) + 1) if big else base


def expm_precise(m, t: float = 1.0) -> np.ndarray:
    """``exp(t m)`` evaluated in multiprecision and rounded to doubles."""
    import mpmath

    with mpmath.workdps(expm_dps(m, t=t)):
        return mp_to_numpy(expm_mp(m, t))


@dataclass(frozen=True)
class KrylovResult:
    coeffs: np.ndarray
    condition: float
    residual: float


class RankDeficiencyError(ArithmeticError):
    pass


def krylov_coordinates(A, T, tol: float = 1e-8) -> KrylovResult:
    """Coefficients ``c`` with ``sum c_k A^k ~= T`` in the basis ``I, A, ..., A^{n-1}``."""
    A = as_real(A)
    T = as_real(T)
    n = A.shape[0]
    scale = max(np.abs(A).max(), 1.0) * max(np.abs(T).max(), 1.0)
    if np.abs(A @ T - T @ A).max() > tol * scale:
        raise ValueError("target does not commute with A")
    powers = [np.eye(n)]
    for _ in range(n - 1):
        powers.append(powers[-1] @ A)
    K = np.stack([p.ravel() for p in powers], axis=1)
    s = np.linalg.svd(K, compute_uv=False)
    if s[-1] <= s[0] * 1e-14:
        raise RankDeficiencyError("Krylov basis is rank deficient (repeated eigenvalues?)")
    cond = float(s[0] / s[-1])
    c, *_ = np.linalg.lstsq(K, T.ravel(), rcond=None)
    res = float(np.abs(K @ c - T.ravel()).max())
    return KrylovResult(c, cond, res)


def rationalize(x: float, max_denominator: int) -> Fraction:
    """Last continued-fraction convergent of ``x`` with denominator at most the bound.

    A convergent ``p/q`` followed by one with denominator above the bound
    satisfies ``|x - p/q| <= 1 / (q * max_denominator)``; the closest
    fraction (``Fraction.limit_denominator``) can be a semiconvergent that
    does not.
    """
    if max_denominator < 1:
        raise ValueError("max_denominator must be >= 1")
    if not isinstance(x, Fraction) and not math.isfinite(x):
        raise ValueError(f"cannot rationalize {x}")
    rest = Fraction(x)
    p0, q0, p1, q1 = 0, 1, 1, 0
    while True:
        a = math.floor(rest)
        p2, q2 = a * p1 + p0, a * q1 + q0
        if q2 > max_denominator:
            return Fraction(p1, q1)
        p0, q0, p1, q1 = p1, q1, p2, q2
        frac = rest - a
        if frac == 0:
            return Fraction(p1, q1)
        rest = 1 / frac


def rationalize_matrix(m, max_denominator: int) -> ExactMatrix:
    arr = as_real(m)
    return ExactMatrix([[rationalize(float(x), max_denominator) for x in r] for r in arr])


def dist(m1, m2) -> float:
    """Entrywise max-absolute difference."""
    if isinstance(m1, ExactMatrix) and isinstance(m2, ExactMatrix):
        if m1.n != m2.n:
            raise ValueError("dimension mismatch")
        return float(max((abs(a - b) for r, s in zip(m1.rows, m2.rows) for a, b in zip(r, s)), default=0))
    a, b = as_real(m1), as_real(m2)
    if a.shape != b.shape:
        raise ValueError("dimension mismatch")
    return float(np.abs(a - b).max()) if a.size else 0.0
