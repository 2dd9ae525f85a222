"""Iterated twist-then-rationalize deformations of exact seeds.

Each stage twists the previous exact output about a curve, replaces the real
centralizer element by a nearby exact one, and records how far the exact
output drifts from the real reference. Errors from early stages are
amplified by later right multiplications, so stage budgets are shrunk by the
norms of the downstream twist matrices.
"""

from __future__ import annotations

import logging
import math
import time
from collections.abc import Sequence
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .centralizer import (
    ApproximationError,
    ApproximationRequest,
    ApproximationResult,
    approximate,
)
from .linalg import (
    EigenError,
    ExactMatrix,
    as_real,
    eigenvalues,
    has_distinct_eigenvalues,
)
from .reps import Representation, RepresentationError, rep_dist
from .twist import Twist, TwistDatum, twist_matrix, twist_rational, twist_real
from .words import SurfacePresentation, Word

log = logging.getLogger(__name__)


class PipelineError(RuntimeError):
    def __init__(self, message: str, stage: int | None = None):
        super().__init__(message if stage is None else f"stage {stage}: {message}")
        self.stage = stage


@dataclass(frozen=True)
class Stage:
    twist: Twist
    t: float

    def describe(self) -> str:
        return f"{self.twist.describe()}, t = {self.t:g}"


@dataclass(frozen=True)
class DeformationSchedule:
    """Ordered stages with a global tolerance.

    ``budgets`` are the shares of ``epsilon`` given to each stage; when
    omitted they are derived at run time from an equal split with a
    correction for downstream amplification.
    """

    stages: tuple
    epsilon: float
    budgets: tuple | None = None
    max_denominator_start: int = 1000
    schedule_growth: int = 10
    max_rounds: int = 20

    def __post_init__(self) -> None:
        object.__setattr__(self, "stages", tuple(self.stages))
        if not self.stages:
            raise ValueError("a schedule needs at least one stage")
        if not self.epsilon > 0:
            raise ValueError("epsilon must be positive")
        if self.budgets is not None:
            b = tuple(float(x) for x in self.budgets)
            if len(b) != len(self.stages) or any(not x > 0 for x in b):
                raise ValueError("one positive budget per stage required")
            if sum(b) > self.epsilon * (1 + 1e-12):
                raise ValueError("budgets exceed epsilon")
            object.__setattr__(self, "budgets", b)

    def with_epsilon(self, epsilon: float) -> DeformationSchedule:
        return DeformationSchedule(self.stages, epsilon, None, self.max_denominator_start,
                                   self.schedule_growth, self.max_rounds)


@dataclass
class StageRecord:
    index: int
    description: str
    t: float
    reference: Representation
    output: Representation
    budget: float
    centralizer_epsilon: float
    stage_error: float
    denominator: int
    rounds: int
    seconds: float
    result: ApproximationResult | None = None

    def summary(self) -> dict:
        return {"stage": self.index, "curve": self.description, "t": self.t, "budget": self.budget,
                "centralizer_epsilon": self.centralizer_epsilon, "stage_error": self.stage_error,
                "denominator": self.denominator, "rounds": self.rounds, "seconds": self.seconds}


@dataclass
class PipelineTrace:
    stages: list = field(default_factory=list)
    reference: Representation | None = None
    final_error: float = math.inf
    epsilon: float = 0.0
    attempts: int = 0
    seconds: float = 0.0

    @property
    def ok(self) -> bool:
        return (self.final_error <= self.epsilon
                and all(s.stage_error <= s.budget for s in self.stages))

    def summary(self) -> dict:
        return {"epsilon": self.epsilon, "final_error": self.final_error, "attempts": self.attempts,
                "seconds": self.seconds, "ok": self.ok, "stages": [s.summary() for s in self.stages]}


# -- budgets ------------------------------------------------------------------------

def _inf_norm(m) -> float:
    return float(np.abs(as_real(m)).sum(axis=1).max())


def _one_norm(m) -> float:
    return float(np.abs(as_real(m)).sum(axis=0).max())


def _moved(stage: Stage) -> frozenset:
    if isinstance(stage.twist, TwistDatum):
        return stage.twist.twisted
    return frozenset(range(stage.twist.presentation.rank))


def _reference_chain(seed: Representation, stages: Sequence[Stage]) -> tuple[list, list]:
    refs, norms = [seed.to_extended()], []
    for k, st in enumerate(stages):
        try:
            E = twist_matrix(refs[-1], st.twist.curve, st.t)
            norms.append(_one_norm(E))
        except OverflowError:
            norms.append(math.inf)
        try:
            refs.append(twist_real(refs[-1], st.twist, st.t))
        except (RepresentationError, ArithmeticError) as exc:
            raise PipelineError(f"real reference failed: {exc}", k) from exc
    return refs, norms


def stage_budgets(stages: Sequence[Stage], epsilon: float, norms: Sequence[float]) -> list[float]:
    """Equal split of ``epsilon``, each share divided by downstream twist norms."""
    k = len(stages)
    out = []
    for i, st in enumerate(stages):
        amp = 1.0
        for j in range(i + 1, k):
            if _moved(stages[j]) & _moved(st):
                amp *= max(1.0, norms[j])
        out.append(epsilon / k / amp)
    return out


def _local_factor(rep: Representation, stage: Stage) -> float:
    tw = stage.twist
    if isinstance(tw, TwistDatum):
        return max(max(1.0, _inf_norm(rep.images[g])) for g in tw.twisted)
    # Through a substitution every generator may move; its image words can
    # use the twisted letter several times.
    worst = max(max(1.0, _inf_norm(m)) for m in rep.images)
    uses = max(len(w) for w in tw.inverse.images)
    return worst * uses * max(1.0, max(_inf_norm(rep.evaluate(w)) for w in tw.substitution.images))


# -- run ---------------------------------------------------------------------------

def _single_pass(seed: Representation, sched: DeformationSchedule,
                 budgets: Sequence[float]) -> tuple[Representation, list]:
    current = seed
    records = []
    for k, (st, budget) in enumerate(zip(sched.stages, budgets)):
        start = time.perf_counter()
        A = current.evaluate(st.twist.curve)
        if not has_distinct_eigenvalues(A):
            raise PipelineError("curve image has repeated eigenvalues", k)
        reference = twist_real(current, st.twist, st.t)
        delta = budget / _local_factor(current, st)
        req = ApproximationRequest(A, current.group, st.t, delta, sched.max_denominator_start,
                                   sched.schedule_growth, sched.max_rounds)
        try:
            res = approximate(req)
        except ApproximationError as exc:
            raise PipelineError(str(exc), k) from exc
        current = twist_rational(current, st.twist, res.B)
        err = rep_dist(current, reference)
        records.append(StageRecord(k, st.twist.describe(), st.t, reference, current, budget, delta, err,
                                   res.denominator_used, res.rounds, time.perf_counter() - start, res))
        log.info("stage %d: error %.3g (budget %.3g), denominator %d", k, err, budget, res.denominator_used)
    return current, records


def run(seed: Representation, sched: DeformationSchedule, max_attempts: int = 4) -> tuple[Representation, PipelineTrace]:
    """Exact deformation of ``seed`` along ``sched`` within ``sched.epsilon`` of the real one.

    The real reference is the composition of real twists starting from the
    seed. If the measured final distance exceeds ``epsilon`` (the per-stage
    bound is first order only), every budget is divided by ten and the run
    repeated.
    """
    if not seed.exact:
        raise PipelineError("the seed must be exact")
    if not seed.relator_ok():
        raise PipelineError("the seed relator is not the identity")
    start = time.perf_counter()
    refs, norms = _reference_chain(seed, sched.stages)
    budgets = list(sched.budgets) if sched.budgets else stage_budgets(sched.stages, sched.epsilon, norms)
    trace = PipelineTrace(reference=refs[-1], epsilon=sched.epsilon)
    for attempt in range(1, max_attempts + 1):
        out, records = _single_pass(seed, sched, budgets)
        trace.stages, trace.attempts = records, attempt
        trace.final_error = rep_dist(out, refs[-1])
        if trace.final_error <= sched.epsilon:
            break
        log.info("final error %.3g above %.3g; tightening budgets", trace.final_error, sched.epsilon)
        budgets = [b / 10 for b in budgets]
    trace.seconds = time.perf_counter() - start
    _certify_output(out)
    if trace.final_error > sched.epsilon:
        raise PipelineError(f"final error {trace.final_error:.3g} exceeds {sched.epsilon:g} "
                            f"after {max_attempts} attempts")
    return out, trace


def _certify_output(rep: Representation) -> None:
    if not rep.exact:
        raise PipelineError("output is not exact")
    if not rep.relator_ok():
        raise PipelineError("output relator is not the identity")
    bad = [name for name, m in zip(rep.presentation.names, rep.membership()) if not m]
    if bad:
        raise PipelineError(f"output images {bad} are not in the group")


# -- diagnostics ---------------------------------------------------------------------

def default_curves(pres) -> list[Word]:
    """Standard generators plus the products ``a_i b_i``."""
    curves = [Word.gen(g) for g in range(pres.rank)]
    if isinstance(pres, SurfacePresentation):
        curves += [Word.gen(pres.a(i)) * Word.gen(pres.b(i)) for i in range(1, pres.genus + 1)]
    return curves


@dataclass(frozen=True)
class CurveDiagnostic:
    curve: str
    eigenvalues: tuple
    real: bool
    distinct: bool
    positive: bool
    note: str = ""

    @property
    def ok(self) -> bool:
        return self.real and self.distinct and self.positive


@dataclass(frozen=True)
class DiagnosticsReport:
    entries: tuple

    @property
    def counts(self) -> dict:
        e = self.entries
        return {"curves": len(e), "real": sum(x.real for x in e), "distinct": sum(x.distinct for x in e),
                "positive": sum(x.positive for x in e), "all": sum(x.ok for x in e)}

    @property
    def ok(self) -> bool:
        return all(x.ok for x in self.entries)

    def failures(self) -> list[str]:
        return [x.curve for x in self.entries if not x.ok]

    def to_json(self) -> dict:
        return {"counts": self.counts, "curves": [
            {"curve": x.curve, "real": x.real, "distinct": x.distinct, "positive": x.positive,
             "eigenvalues": [[z.real, z.imag] for z in x.eigenvalues], **({"note": x.note} if x.note else {})}
            for x in self.entries]}


def hitchin_diagnostics(rep: Representation, curves: Sequence[Word | str] | None = None,
                        tol: float = 1e-9) -> DiagnosticsReport:
    """Numeric eigenvalue flags for each curve image. Purely diagnostic."""
    pres = rep.presentation
    words = default_curves(pres) if curves is None else [pres.parse(c) if isinstance(c, str) else c
                                                          for c in curves]
    entries = []
    for w in words:
        name = pres.format(w) or "1"
        try:
            rpt = eigenvalues(rep.evaluate(w), tol)
        except EigenError as exc:
            entries.append(CurveDiagnostic(name, (), False, False, False, str(exc)))
            continue
        entries.append(CurveDiagnostic(name, rpt.values, rpt.all_real, rpt.all_distinct, rpt.all_positive))
    return DiagnosticsReport(tuple(entries))


def trace_coordinates(rep: Representation, curves: Sequence[Word | str]) -> list[tuple[Word, Fraction | float]]:
    """``(curve, tr rho(curve))``; exact for exact representations."""
    pres = rep.presentation
    out = []
    for c in curves:
        w = pres.parse(c) if isinstance(c, str) else c
        m = rep.evaluate(w)
        if isinstance(m, ExactMatrix):
            tr = m.trace()
            out.append((w, tr if rep.exact else float(tr)))
        else:
            out.append((w, float(np.trace(m))))
    return out
