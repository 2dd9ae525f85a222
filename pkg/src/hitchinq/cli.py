"""Command-line interface: ``hitchinq <command> ...``.

Exit status is 0 when every exact invariant certifies, 1 when one fails and
2 for unusable input. Diagnostics never change the exit status.
"""

from __future__ import annotations

import argparse
import logging
import sys
from collections.abc import Sequence

import numpy as np

from . import io
from .centralizer import ApproximationError, approximate, certify
from .config import Config, ConfigError
from .groups import GroupSpecError, member, three_form_tensor
from .linalg import as_real
from .pipeline import (
    PipelineError,
    default_curves,
    hitchin_diagnostics,
    run,
    trace_coordinates,
)
from .reps import Representation, RepresentationError
from .seeds import default_spec, hitchin_seed
from .twist import TwistError, twist_real

log = logging.getLogger("hitchinq")


class Reporter:
    def __init__(self, quiet: bool):
        self.quiet = quiet

    def __call__(self, line: str = "") -> None:
        if not self.quiet:
            print(line)


def _check_rep(rep: Representation, say: Reporter, tol: float) -> bool:
    """Relator and membership checks; exact when the representation is exact."""
    ok = True
    if rep.exact:
        rel = rep.relator_ok()
        say(f"{'PASS' if rel else 'FAIL'} relator (exact)")
    else:
        res, bound = rep.relator_residual(), rep.relator_tolerance()
        rel = res <= bound
        say(f"{'PASS' if rel else 'FAIL'} relator residual {res:.3g} (tolerance {bound:.3g})")
    ok &= rel
    for name, m in rep.named_images().items():
        mem = member(m, rep.group, tol, approximate=not rep.exact)
        if not mem:
            say(f"FAIL membership {name}: residual {mem.residual:.3g}")
        ok &= bool(mem)
    if all(member(m, rep.group, tol, approximate=not rep.exact) for m in rep.images):
        say(f"PASS membership in {rep.group.kind}({rep.n})" + (" (exact)" if rep.exact else ""))
    return bool(ok)


def _report_diagnostics(rep: Representation, say: Reporter, tol: float) -> None:
    rpt = hitchin_diagnostics(rep, tol=tol)
    c = rpt.counts
    say(f"diagnostics: {c['all']}/{c['curves']} curves real, distinct, positive")
    for name in rpt.failures():
        say(f"  not real-distinct-positive: {name}")


def _three_form_report(rep: Representation, say: Reporter) -> None:
    phi = three_form_tensor(rep.group, exact=False)
    worst = 0.0
    for m in rep.images:
        B = as_real(m)
        moved = np.einsum("pqr,pi,qj,rk->ijk", phi, B, B, B)
        worst = max(worst, float(np.abs(moved - phi).max()))
    say(f"3-form residual {worst:.3g}")


# -- commands ------------------------------------------------------------------------

def cmd_seed(args, cfg: Config, say: Reporter) -> int:
    spec = default_spec(args.n, args.group)
    rep = hitchin_seed(args.genus, args.n, spec)
    io.save_rep(args.output, rep, cfg.float_digits)
    say(f"wrote genus-{args.genus} {spec.kind}({args.n}) seed to {args.output}")
    ok = _check_rep(rep, say, cfg.tolerance)
    if spec.kind == "G2":
        _three_form_report(rep, say)
    return 0 if ok else 1


def _schedule(args, rep: Representation, cfg: Config, epsilon: float | None):
    return io.schedule_from_json(io.read_json(args.schedule), rep.presentation, epsilon, **cfg.schedule())


def _run_pipeline(rep: Representation, sched, args, cfg: Config, say: Reporter) -> int:
    if not rep.exact:
        raise RepresentationError("the rationalizing pipeline needs an exact representation")
    out, trace = run(rep, sched)
    io.save_rep(args.output, out, cfg.float_digits)
    if getattr(args, "trace", None):
        io.write_json(args.trace, trace.summary())
    for s in trace.stages:
        say(f"stage {s.index}: {s.description}, t = {s.t:g}: error {s.stage_error:.3g} "
            f"(budget {s.budget:.3g}), denominator {s.denominator}")
    say(f"final distance to the real reference {trace.final_error:.3g} (epsilon {sched.epsilon:g})")
    ok = _check_rep(out, say, cfg.tolerance)
    _report_diagnostics(out, say, cfg.diagnostics_tolerance)
    return 0 if ok and trace.ok else 1


def cmd_twist(args, cfg: Config, say: Reporter) -> int:
    rep = io.load_rep(args.rep)
    if args.real:
        stages = io.stages_from_json(io.read_json(args.schedule), rep.presentation)
        cur = rep
        for k, st in enumerate(stages):
            try:
                cur = twist_real(cur, st.twist, st.t)
            except (RepresentationError, ArithmeticError) as exc:
                raise PipelineError(str(exc), k) from exc
        cur = cur.to_real()
        io.save_rep(args.output, cur, cfg.float_digits)
        say(f"wrote real twist to {args.output}")
        return 0 if _check_rep(cur, say, cfg.tolerance) else 1
    return _run_pipeline(rep, _schedule(args, rep, cfg, args.epsilon), args, cfg, say)


def cmd_pipeline(args, cfg: Config, say: Reporter) -> int:
    rep = io.load_rep(args.seed)
    return _run_pipeline(rep, _schedule(args, rep, cfg, args.epsilon), args, cfg, say)


def cmd_rationalize(args, cfg: Config, say: Reporter) -> int:
    data = io.read_json(args.request)
    if args.epsilon is not None:
        data = {**data, "epsilon": args.epsilon}
    req = io.request_from_json(data, **cfg.schedule())
    res = approximate(req)
    report = certify(res, req)
    io.write_json(args.output, io.result_to_json(res, report))
    say(f"denominator bound {res.denominator_used} after {res.rounds} rounds, error {res.achieved_error:.3g}")
    for line in report.lines():
        say(line)
    return 0 if report.ok else 1


def cmd_verify(args, cfg: Config, say: Reporter) -> int:
    rep = io.load_rep(args.rep)
    tol = cfg.tolerance if args.tol is None else args.tol
    ok = _check_rep(rep, say, tol)
    _report_diagnostics(rep, say, cfg.diagnostics_tolerance)
    return 0 if ok else 1


def cmd_traces(args, cfg: Config, say: Reporter) -> int:
    rep = io.load_rep(args.rep)
    pres = rep.presentation
    curves = io.curves_from_json(io.read_json(args.curves), pres) if args.curves else default_curves(pres)
    data = io.traces_to_json(pres, trace_coordinates(rep, curves))
    if args.output:
        io.write_json(args.output, data)
    for entry in data:
        say(f"{entry['curve'] or '1'}\t{entry['trace']}")
    return 0


# -- parser ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hitchinq", description="Exact rational deformations of surface-group "
                                "representations by twist flows.")
    p.add_argument("--config", help="JSON file overriding default tolerances and schedules")
    p.add_argument("--quiet", action="store_true", help="print nothing; rely on the exit status")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("seed", help="write an exact seed representation")
    s.add_argument("--genus", type=int, required=True)
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--group", choices=["sl", "sp", "g2"], default="sl")
    s.add_argument("-o", "--output", required=True)
    s.set_defaults(func=cmd_seed)

    s = sub.add_parser("twist", help="apply a twist schedule, real or rationalized")
    s.add_argument("rep")
    s.add_argument("schedule")
    mode = s.add_mutually_exclusive_group(required=True)
    mode.add_argument("--real", action="store_true", help="emit the real (float) twisted representation")
    mode.add_argument("--epsilon", type=float, help="rationalize to within this distance")
    s.add_argument("-o", "--output", required=True)
    s.add_argument("--trace", help="write the per-stage trace here")
    s.set_defaults(func=cmd_twist)

    s = sub.add_parser("rationalize", help="approximate one centralizer element")
    s.add_argument("request")
    s.add_argument("--epsilon", type=float)
    s.add_argument("-o", "--output", required=True)
    s.set_defaults(func=cmd_rationalize)

    s = sub.add_parser("verify", help="check relator, membership and diagnostics")
    s.add_argument("rep")
    s.add_argument("--tol", type=float)
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("traces", help="trace coordinates of curves")
    s.add_argument("rep")
    s.add_argument("curves", nargs="?", help="JSON list of words; default generators and a_i b_i")
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_traces)

    s = sub.add_parser("pipeline", help="run the rationalizing pipeline on a seed")
    s.add_argument("seed")
    s.add_argument("schedule")
    s.add_argument("--epsilon", type=float, help="override the schedule file's epsilon")
    s.add_argument("-o", "--output", required=True)
    s.add_argument("--trace", help="write the per-stage trace here")
    s.set_defaults(func=cmd_pipeline)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING if args.quiet else logging.INFO, format="%(message)s")
    say = Reporter(args.quiet)
    try:
        cfg = Config.load(args.config)
        return args.func(args, cfg, say)
    except (PipelineError, ApproximationError, RepresentationError, ArithmeticError) as exc:
        print(f"failed: {exc}", file=sys.stderr)
        return 1
    except (io.FormatError, ConfigError, GroupSpecError, TwistError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
