"""JSON file formats.

Exact scalars are written as ``"p/q"`` strings so round trips are bit exact;
real scalars are written as floats with 17 significant digits. Words use the
presentation's text syntax.
"""

from __future__ import annotations

import json
import math
from fractions import Fraction
from pathlib import Path
from typing import Any, Union

import numpy as np

from .centralizer import (
    ApproximationRequest,
    ApproximationResult,
    CertificationReport,
    RoundRecord,
)
from .groups import GroupSpec
from .linalg import ExactMatrix, as_real, format_fraction
from .pipeline import DeformationSchedule, Stage
from .reps import Representation
from .twist import ConjugatedTwist, Substitution, TwistError, standard_twist_datum
from .words import (
    Presentation,
    SurfacePresentation,
    Word,
    WordSyntaxError,
    presentation_from_json,
)

PathLike = Union[str, Path]


class FormatError(ValueError):
    pass


def read_json(path: PathLike) -> Any:
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def write_json(path: PathLike, data: Any) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(data, fh, indent=2)
        fh.write("\n")


# -- matrices -----------------------------------------------------------------------

def _float(x: float, digits: int) -> float:
    return float(format(float(x), f".{digits}g"))


def matrix_to_json(m, exact: bool, digits: int = 17) -> list:
    if exact:
        return [[format_fraction(x) for x in row] for row in m.rows]
    return [[_float(x, digits) for x in row] for row in as_real(m)]


def _exact_scalar(x) -> Fraction:
    if isinstance(x, bool) or not isinstance(x, (str, int)):
        raise FormatError(f"exact entries must be 'p/q' strings or integers, got {x!r}")
    try:
        return Fraction(x)
    except (ValueError, ZeroDivisionError) as exc:
        raise FormatError(f"bad exact entry {x!r}") from exc


def matrix_from_json(data, exact: bool):
    if not isinstance(data, list) or not data or any(not isinstance(r, list) or len(r) != len(data) for r in data):
        raise FormatError("a matrix must be a non-empty square list of rows")
    if exact:
        return ExactMatrix([[_exact_scalar(x) for x in row] for row in data])
    try:
        arr = np.array([[float(x) for x in row] for row in data], dtype=float)
    except (TypeError, ValueError) as exc:
        raise FormatError("real entries must be numbers") from exc
    if not np.all(np.isfinite(arr)):
        raise FormatError("real entries must be finite")
    return arr


# -- representations ------------------------------------------------------------------

def rep_to_json(rep: Representation, digits: int = 17) -> dict:
    out = {
        "presentation": rep.presentation.to_json(),
        "scalar": "exact" if rep.exact else "real",
        "group": rep.group.to_json(),
        "images": {name: matrix_to_json(m, rep.exact, digits) for name, m in rep.named_images().items()},
        "tolerance": rep.tolerance,
    }
    if rep.projective:
        out["projective"] = True
    return out


def rep_from_json(data: dict) -> Representation:
    try:
        pres = presentation_from_json(data["presentation"])
        scalar = data["scalar"]
        group = GroupSpec.from_json(data["group"])
        images = data["images"]
    except KeyError as exc:
        raise FormatError(f"representation file lacks {exc.args[0]!r}") from exc
    if scalar not in ("exact", "real"):
        raise FormatError(f"scalar must be 'exact' or 'real', not {scalar!r}")
    missing = [n for n in pres.names if n not in images]
    if missing:
        raise FormatError(f"no image for generators {missing}")
    extra = [n for n in images if n not in pres.names]
    if extra:
        raise FormatError(f"images for unknown generators {extra}")
    exact = scalar == "exact"
    mats = tuple(matrix_from_json(images[n], exact) for n in pres.names)
    return Representation(pres, mats, group, exact=exact, projective=bool(data.get("projective", False)),
                          tolerance=float(data.get("tolerance", 1e-9)))


def save_rep(path: PathLike, rep: Representation, digits: int = 17) -> None:
    write_json(path, rep_to_json(rep, digits))


def load_rep(path: PathLike) -> Representation:
    return rep_from_json(read_json(path))


# -- schedules and curves ---------------------------------------------------------------

def _stage_twist(pres: SurfacePresentation, curve):
    if isinstance(curve, str):
        return standard_twist_datum(pres, curve)
    if isinstance(curve, dict):
        base = curve.get("curve", "a1")
        if "substitution" not in curve or "inverse" not in curve:
            raise FormatError("a substituted curve needs 'substitution' and 'inverse' maps")
        phi = Substitution.from_mapping(pres, curve["substitution"])
        psi = Substitution.from_mapping(pres, curve["inverse"])
        return ConjugatedTwist(standard_twist_datum(pres, base), phi, psi)
    raise FormatError(f"unrecognized curve {curve!r}")


def stages_from_json(data, pres: Presentation) -> list[Stage]:
    if not isinstance(pres, SurfacePresentation):
        raise FormatError("twist schedules need a surface presentation")
    entries = data["stages"] if isinstance(data, dict) else data
    if not isinstance(entries, list) or not entries:
        raise FormatError("a schedule is a non-empty list of stages")
    stages = []
    for k, entry in enumerate(entries):
        try:
            if not isinstance(entry, dict) or "curve" not in entry or "t" not in entry:
                raise FormatError("each stage needs 'curve' and 't'")
            stages.append(Stage(_stage_twist(pres, entry["curve"]), float(entry["t"])))
        except (FormatError, TwistError, WordSyntaxError, KeyError, ValueError, TypeError) as exc:
            raise FormatError(f"stage {k}: {exc}") from exc
    return stages


def stage_to_json(stage: Stage) -> dict:
    tw = stage.twist
    if isinstance(tw, ConjugatedTwist):
        pres = tw.presentation
        curve = {"curve": pres.format(tw.datum.curve), "substitution": tw.substitution.to_json(),
                 "inverse": tw.inverse.to_json()}
    else:
        curve = tw.presentation.format(tw.curve)
    return {"curve": curve, "t": stage.t}


def schedule_from_json(data, pres: Presentation, epsilon: float | None = None, **schedule) -> DeformationSchedule:
    stages = stages_from_json(data, pres)
    if isinstance(data, dict):
        epsilon = data.get("epsilon", epsilon) if epsilon is None else epsilon
        budgets = data.get("budgets")
        for key in ("max_denominator_start", "schedule_growth", "max_rounds"):
            if key in data and key not in schedule:
                schedule[key] = int(data[key])
    else:
        budgets = None
    if epsilon is None:
        raise FormatError("no epsilon given")
    return DeformationSchedule(tuple(stages), float(epsilon), tuple(budgets) if budgets else None, **schedule)


def curves_from_json(data, pres: Presentation) -> list[Word]:
    entries = data["curves"] if isinstance(data, dict) else data
    if not isinstance(entries, list):
        raise FormatError("a curves file is a list of words")
    out = []
    for k, c in enumerate(entries):
        if not isinstance(c, str):
            raise FormatError(f"curve {k} is not a string")
        try:
            out.append(pres.parse(c))
        except WordSyntaxError as exc:
            raise FormatError(f"curve {k}: {exc}") from exc
    return out


def traces_to_json(pres: Presentation, traces) -> list:
    out = []
    for w, v in traces:
        value = format_fraction(v) if isinstance(v, Fraction) else float(v)
        out.append({"curve": pres.format(w), "trace": value})
    return out


# -- centralizer requests --------------------------------------------------------------

def request_from_json(data: dict, **defaults) -> ApproximationRequest:
    try:
        group = GroupSpec.from_json(data["group"])
        A = matrix_from_json(data["A"], exact=True)
        t = float(data["t"])
        eps = float(data["epsilon"])
    except KeyError as exc:
        raise FormatError(f"request lacks {exc.args[0]!r}") from exc
    kw = dict(defaults)
    for key in ("max_denominator_start", "schedule_growth", "max_rounds"):
        if key in data:
            kw[key] = int(data[key])
    return ApproximationRequest(A, group, t, eps, **kw)


def request_to_json(req: ApproximationRequest) -> dict:
    return {"A": matrix_to_json(req.A, True), "group": req.group.to_json(), "t": req.t, "epsilon": req.epsilon,
            "max_denominator_start": req.max_denominator_start, "schedule_growth": req.schedule_growth,
            "max_rounds": req.max_rounds}


def _round_json(r: RoundRecord) -> dict:
    return {"denominator": r.denominator, "error": r.error if math.isfinite(r.error) else None,
            "det_one": r.det_one, "commutes": r.commutes, "member": r.member}


def result_to_json(result: ApproximationResult, report: CertificationReport | None = None) -> dict:
    out = {"B": matrix_to_json(result.B, True), "achieved_error": result.achieved_error,
           "denominator_used": result.denominator_used, "rounds": result.rounds,
           "history": [_round_json(r) for r in result.history]}
    if report is not None:
        out["certify"] = report.to_json()
    return out


def result_from_json(data: dict) -> ApproximationResult:
    history = tuple(RoundRecord(int(r["denominator"]), math.inf if r["error"] is None else float(r["error"]),
                                bool(r["det_one"]), bool(r["commutes"]), bool(r["member"]))
                    for r in data.get("history", []))
    return ApproximationResult(matrix_from_json(data["B"], exact=True), float(data["achieved_error"]),
                               int(data["denominator_used"]), int(data["rounds"]), history)
