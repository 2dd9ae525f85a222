"""Exact rational points of centralizer tori near a real target.

Given exact ``A`` with distinct eigenvalues, every element of its centralizer
is a polynomial in ``A``. We round the Krylov coordinates of a root of the
target and repair the group constraint by an algebraic identity:

* SL: ``B = p(A)^n / det p(A)`` has determinant exactly one.
* SP: ``B = p(A) tau(p(A))^-1`` with ``tau(x) = J^-1 x^T J`` is exactly
  symplectic, since ``tau`` fixes ``Q[A]`` setwise and ``tau(B) = B^-1``.

Targets and errors are evaluated in multiprecision from the exact data; only
the reported error is rounded to a double.
"""

from __future__ import annotations

import math
import time
from collections.abc import Sequence
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath
import numpy as np

from .groups import GroupSpec, centralizer_involution, member, variation
from .linalg import (
    ExactMatrix,
    SingularMatrixError,
    expm_dps,
    expm_mp,
    has_distinct_eigenvalues,
    mp_dist,
    to_mp,
)


class ApproximationError(ArithmeticError):
    """No admissible element within budget; ``history`` holds the rounds tried."""

    def __init__(self, message: str, history: Sequence = ()):
        super().__init__(message)
        self.history = tuple(history)


@dataclass(frozen=True)
class ApproximationRequest:
    A: ExactMatrix
    group: GroupSpec
    t: float
    epsilon: float
    max_denominator_start: int = 1000
    schedule_growth: int = 10
    max_rounds: int = 20

    def __post_init__(self) -> None:
        if not self.epsilon > 0:
            raise ValueError("epsilon must be positive")
        if self.max_denominator_start < 1 or self.schedule_growth < 2 or self.max_rounds < 1:
            raise ValueError("schedule needs start >= 1, growth > 1 and at least one round")
        if self.A.n != self.group.n:
            raise ValueError("A does not match the group dimension")
        if not member(self.A, self.group):
            raise ValueError(f"A is not in {self.group.kind}({self.group.n}, Q)")
        if not has_distinct_eigenvalues(self.A):
            raise ValueError("A does not have distinct eigenvalues")

    def denominators(self) -> list[int]:
        return [self.max_denominator_start * self.schedule_growth ** r for r in range(self.max_rounds)]


@dataclass(frozen=True)
class RoundRecord:
    denominator: int
    error: float
    det_one: bool
    commutes: bool
    member: bool

    @property
    def exact_ok(self) -> bool:
        return self.det_one and self.commutes and self.member


@dataclass(frozen=True)
class ApproximationResult:
    B: ExactMatrix
    achieved_error: float
    denominator_used: int
    rounds: int
    history: tuple = field(default=())
    seconds: float = 0.0


# -- building blocks --------------------------------------------------------------

def _root_order(spec: GroupSpec) -> int:
    if spec.kind == "SL":
        return spec.n
    if spec.kind == "SP":
        return 2
    raise ValueError("rational centralizer approximation is implemented for SL and SP only")


def _scaled_powers(A: ExactMatrix) -> list[ExactMatrix]:
    # I, A, ..., A^(n-1), each divided by a power of two near its size so the
    # coordinates are on a common scale.
    out, P = [], ExactMatrix.identity(A.n)
    for _ in range(A.n):
        big = max(abs(x) for row in P.rows for x in row)
        e = round(math.log2(float(big))) if big else 0
        out.append(P.scale(Fraction(2) ** -e))
        P = P @ A
    return out


def _mp_fraction(x) -> Fraction:
    sign, man, exp, _ = mpmath.mpf(x)._mpf_
    v = Fraction(int(man)) * Fraction(2) ** int(exp)
    return -v if sign else v


def _coordinates(basis: list[ExactMatrix], T) -> list[Fraction]:
    # Least squares; exact up to rounding because T lies in the span.
    n = basis[0].n
    cols = [to_mp(M) for M in basis]
    K = mpmath.matrix(n * n, len(cols))
    rhs = mpmath.matrix(n * n, 1)
    for k, C in enumerate(cols):
        for i in range(n):
            for j in range(n):
                K[i * n + j, k] = C[i, j]
    for i in range(n):
        for j in range(n):
            rhs[i * n + j] = T[i, j]
    # Normal equations (mpmath's Householder QR divides by zero on columns
    # that are already reduced); doubling the digits covers the squared
    # condition number.
    with mpmath.workdps(2 * mpmath.mp.dps):
        x = mpmath.lu_solve(K, rhs)
    return [_mp_fraction(x[k]) for k in range(len(cols))]


def combine(basis: Sequence[ExactMatrix], coeffs: Sequence[Fraction]) -> ExactMatrix:
    out = ExactMatrix.zero(basis[0].n)
    for c, M in zip(coeffs, basis):
        if c:
            out = out + M.scale(c)
    return out


def norm_one(p: ExactMatrix, spec: GroupSpec) -> ExactMatrix:
    """Exact group element built from an invertible ``p`` in ``Q[A]``."""
    if spec.kind == "SL":
        d = p.det()
        if d == 0:
            raise SingularMatrixError("det p(A) = 0")
        return (p ** spec.n).scale(1 / d)
    if spec.kind == "SP":
        return p @ centralizer_involution(p, None, spec).inverse()
    raise ValueError("rational centralizer approximation is implemented for SL and SP only")


def _precision(req: ApproximationRequest, V: ExactMatrix) -> int:
    qmax = req.denominators()[-1]
    return expm_dps(V, req.A, t=req.t) + 2 * int(math.log10(qmax)) + 10


def _rounds(req: ApproximationRequest, stop_early: bool):
    spec = req.group
    root = _root_order(spec)
    V = variation(req.A, spec)
    basis = _scaled_powers(req.A)
    with mpmath.workdps(_precision(req, V)):
        target = expm_mp(V, req.t)
        c = _coordinates(basis, expm_mp(V, mpmath.mpf(req.t) / root))
        for rnd, Q in enumerate(req.denominators(), start=1):
            coeffs = [x.limit_denominator(Q) for x in c]
            try:
                B = norm_one(combine(basis, coeffs), spec)
            except SingularMatrixError:
                yield rnd, Q, None, RoundRecord(Q, math.inf, False, False, False)
                continue
            err = mp_dist(B, target)
            rec = RoundRecord(Q, err, B.det() == 1, B.commutes_with(req.A), bool(member(B, spec)))
            yield rnd, Q, B, rec
            if stop_early and err <= req.epsilon:
                return


def approximate(req: ApproximationRequest) -> ApproximationResult:
    """First round whose exact element is within ``epsilon`` of ``expm(t F(A))``."""
    start = time.perf_counter()
    history = []
    for rnd, Q, B, rec in _rounds(req, stop_early=True):
        history.append(rec)
        if B is None:
            continue
        if not rec.exact_ok:
            raise ApproximationError(f"round {rnd} produced an element violating an exact invariant", history)
        if rec.error <= req.epsilon:
            return ApproximationResult(B, rec.error, Q, rnd, tuple(history), time.perf_counter() - start)
    best = min((r.error for r in history), default=math.inf)
    raise ApproximationError(f"no element within {req.epsilon:g} after {req.max_rounds} rounds "
                             f"(best {best:.3g})", history)


def approx_sl(req: ApproximationRequest) -> ApproximationResult:
    if req.group.kind != "SL":
        raise ValueError("approx_sl needs an SL request")
    return approximate(req)


def approx_sp(req: ApproximationRequest) -> ApproximationResult:
    if req.group.kind != "SP":
        raise ValueError("approx_sp needs an SP request")
    return approximate(req)


def error_profile(req: ApproximationRequest) -> list[RoundRecord]:
    """All ``max_rounds`` rounds, without stopping at ``epsilon``."""
    return [rec for _, _, _, rec in _rounds(req, stop_early=False)]


def convergence_slope(history: Sequence[RoundRecord], floor: float = 0.0) -> float:
    """``-d log(error) / d log(denominator)`` by least squares.

    Rounds with zero error or error at or below ``floor`` are dropped; at
    least two points are needed.
    """
    pts = [(math.log(r.denominator), math.log(r.error)) for r in history
           if math.isfinite(r.error) and r.error > max(floor, 0.0)]
    if len(pts) < 2:
        raise ValueError("need at least two rounds with positive error")
    x, y = np.array(pts).T
    return float(-np.polyfit(x, y, 1)[0])


# -- certification ----------------------------------------------------------------

@dataclass(frozen=True)
class Check:
    name: str
    ok: bool
    detail: str = ""


@dataclass(frozen=True)
class CertificationReport:
    checks: tuple

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    def failures(self) -> list[str]:
        return [c.name for c in self.checks if not c.ok]

    def lines(self) -> list[str]:
        return [f"{'PASS' if c.ok else 'FAIL'} {c.name}" + (f": {c.detail}" if c.detail else "")
                for c in self.checks]

    def to_json(self) -> dict:
        return {"ok": self.ok, "checks": [{"name": c.name, "ok": c.ok, "detail": c.detail} for c in self.checks]}


def certify(result: ApproximationResult, req: ApproximationRequest) -> CertificationReport:
    """Re-verify every invariant of ``result`` from scratch."""
    B, A, spec = result.B, req.A, req.group
    checks = []
    if B.n != A.n:
        return CertificationReport((Check("dimension", False, f"{B.n} != {A.n}"),))
    det = B.det()
    checks.append(Check("det", det == 1, f"det B = {det}" if det != 1 else ""))
    checks.append(Check("commutes", B.commutes_with(A)))
    mem = member(B, spec)
    checks.append(Check("membership", bool(mem), f"residual {mem.residual:.3g}" if not mem else ""))
    V = variation(A, spec)
    with mpmath.workdps(_precision(req, V)):
        err = mp_dist(B, expm_mp(V, req.t))
    checks.append(Check("error", err <= req.epsilon, f"{err:.3g} vs epsilon {req.epsilon:g}"))
    return CertificationReport(tuple(checks))


def det_identity(A: ExactMatrix, coeffs: Sequence[Fraction]) -> bool:
    """``det p(A) == det p(A^-1)`` exactly, for ``p`` with the given coefficients."""
    Ai = A.inverse()
    p = combine([A ** k for k in range(len(coeffs))], coeffs)
    q = combine([Ai ** k for k in range(len(coeffs))], coeffs)
    return p.det() == q.det()
