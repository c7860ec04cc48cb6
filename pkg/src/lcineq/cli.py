"""Command-line front end.

Exit codes: 0 when every checked inequality holds (or is not applicable),
1 on a violation, 2 on a usage error.  Floats are printed with 12
significant digits.  Quadrature settings and run defaults may come from a
JSON file named by ``--config`` or the ``LCINEQ_CONFIG`` environment variable.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass, field, fields

from . import bounds, extremal, geometry, prob, verification
from ._quadrature import QuadratureError
from .measures import DEFAULT_QUADRATURE, DomainError, QuadratureConfig, WeightedMeasure
from .profiles import ConvexWeight, is_valid, profile_from_json

CONFIG_ENV = "LCINEQ_CONFIG"
DIGITS = 12

THEOREMS = ("hensley", "bk", "upper-lc", "upper-sc", "weighted", "power", "pnorm", "entropy")


class UsageError(Exception):
    """Bad command-line input; maps to exit code 2."""


@dataclass
class RunConfig:
    seed: int = 0
    trials: int = 1000
    tolerance: float = bounds.REL_TOL
    output_format: str = "json"
    output: str | None = None
    quadrature: QuadratureConfig = field(default_factory=lambda: DEFAULT_QUADRATURE)

    def __post_init__(self):
        if self.trials < 1:
            raise UsageError("trials must be at least 1")
        if not self.tolerance > 0:
            raise UsageError("tolerance must be positive")
        if self.output_format not in ("json", "csv"):
            raise UsageError("output format must be json or csv")


def load_config(path: str | None) -> dict:
    """Read the JSON config file from ``path`` or ``$LCINEQ_CONFIG``; missing means defaults."""
    path = path or os.environ.get(CONFIG_ENV)
    if not path:
        return {}
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read config {path!r}: {exc}") from None
    if not isinstance(data, dict):
        raise UsageError("config must be a JSON object")
    return data


def make_run_config(args) -> RunConfig:
    data = load_config(getattr(args, "config", None))
    qnames = {f.name for f in fields(QuadratureConfig)}
    qkw = {k: v for k, v in data.get("quadrature", {}).items() if k in qnames}
    try:
        quad = QuadratureConfig(**qkw)
    except (TypeError, ValueError) as exc:
        raise UsageError(f"bad quadrature config: {exc}") from None
    kw = {k: data[k] for k in ("seed", "trials", "tolerance") if k in data}
    for name in ("seed", "trials", "tolerance"):
        val = getattr(args, name, None)
        if val is not None:
            kw[name] = val
    return RunConfig(output=getattr(args, "output", None), quadrature=quad, **kw)


# --------------------------------------------------------------------------
# output


def fmt(obj):
    """Round floats to 12 significant digits; non-finite values become strings."""
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return obj
    if isinstance(obj, float):
        if math.isnan(obj):
            return "nan"
        if math.isinf(obj):
            return "inf" if obj > 0 else "-inf"
        return float(f"{obj:.{DIGITS}g}")
    if isinstance(obj, dict):
        return {str(k): fmt(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [fmt(v) for v in obj]
    if hasattr(obj, "item"):
        return fmt(obj.item())
    return obj


def dumps(obj) -> str:
    return json.dumps(fmt(obj), sort_keys=True)


def emit(text: str, cfg: RunConfig):
    if cfg.output:
        with open(cfg.output, "w", encoding="utf-8") as fh:
            fh.write(text if text.endswith("\n") else text + "\n")
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _report_code(rep) -> int:
    return 1 if rep.applicable and not rep.satisfied else 0


# --------------------------------------------------------------------------
# argument helpers


def parse_measure(text: str | None) -> WeightedMeasure:
    if text is None:
        return WeightedMeasure()
    try:
        p, lam = (float(v) for v in text.split(","))
    except ValueError:
        raise UsageError(f"--measure expects 'p,lambda', got {text!r}") from None
    return WeightedMeasure(p, lam)


def parse_weight(text: str | None, default="t^2") -> ConvexWeight:
    return ConvexWeight.parse(text or default)


def _read_profile(text: str):
    if text is None:
        raise UsageError("--profile is required")
    if text.startswith("@"):
        try:
            with open(text[1:], encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise UsageError(f"cannot read profile file: {exc}") from None
    return profile_from_json(text)


# --------------------------------------------------------------------------
# commands


def cmd_bound(args) -> int:
    cfg = make_run_config(args)
    f = _read_profile(args.profile)
    th = args.theorem
    s = args.s
    if th == "upper-sc":
        if s is None:
            if f.concavity == "log":
                raise UsageError("upper-sc needs --s")
            s = float(f.concavity)
        if not s > 0:
            raise UsageError("s must be positive")
    rep = is_valid(f, s if th == "upper-sc" else 0.0)
    if not rep:
        raise UsageError(f"profile does not satisfy the hypotheses: {rep.reason} on {rep.interval}")
    if th != "hensley" and args.h is None:
        raise UsageError(f"--h is required for {th}")
    q = cfg.quadrature
    if th == "hensley":
        out = bounds.check_hensley(f, q)
    elif th == "bk":
        out = bounds.check_bk(f, args.h, q)
    elif th == "upper-lc":
        out = bounds.check_upper_lc(f, args.h, q)
    elif th == "upper-sc":
        out = bounds.check_upper_sc(f, args.h, s, q)
    elif th == "weighted":
        out = bounds.check_weighted(f, parse_weight(args.N), parse_measure(args.measure), args.h, q)
    elif th == "power":
        out = bounds.check_power(f, args.q if args.q is not None else 2.0, args.h, q)
    elif th == "pnorm":
        out = bounds.pnorm_upper_check(f, args.exponent, args.h, q)
    else:
        out = bounds.entropy_upper_check(f, args.h, cfg=q)
    emit(dumps(out.to_dict()), cfg)
    return _report_code(out)


def cmd_verify(args) -> int:
    cfg = make_run_config(args)
    s_values = tuple(args.s) if args.s else verification.S_VALUES
    if any(not s > 0 for s in s_values):
        raise UsageError("s must be positive")
    families = ("logconcave", "sconcave") if args.family == "all" else (args.family,)
    results = []
    for fam in families:
        if fam == "logconcave":
            r = verification.logconcave_suite(cfg.trials, cfg.seed, cfg.tolerance)
        elif fam == "sconcave":
            r = verification.sconcave_suite(cfg.trials, cfg.seed, s_values, cfg.tolerance)
        else:
            r = verification.reduction_suite(cfg.trials, cfg.seed, cfg.tolerance,
                                             s_values=s_values)
        results.append(r)
    checked = sum(t.checked for r in results for t in r.tallies.values())
    bad = sum(r.violations for r in results)
    worst = min((t.worst_slack for r in results for t in r.tallies.values()), default=math.inf)
    summary = {"passed": bad == 0, "checked": checked, "violations": bad,
               "worst_relative_slack": worst, "suites": [r.to_dict() for r in results]}
    emit(dumps(summary), cfg)
    return 0 if bad == 0 else 1


def cmd_threshold(args) -> int:
    cfg = make_run_config(args)
    out = {}
    if args.theta_p is not None:
        if not args.theta_p > 1:
            raise UsageError("theta_p needs p > 1")
        out["theta_p"] = bounds.pnorm_threshold_certificate(args.theta_p, args.grid_points).to_dict()
    if args.delta_s is not None:
        if not args.delta_s > 0:
            raise UsageError("delta_s needs s > 0")
        out["delta_s"] = {"s": args.delta_s, "value": bounds.sconcave_threshold(args.delta_s)}
    if args.delta_n is not None:
        n = args.delta_n
        if n < 2:
            raise UsageError("delta_n needs n >= 2")
        out["delta_n"] = {"n": n, "value": bounds.sconcave_threshold(1.0 / (n - 1)),
                          "closed_form": -math.expm1(n * math.log(n / (n + 2.0)))}
    if not out:
        raise UsageError("give at least one of --theta-p, --delta-s, --delta-n")
    emit(dumps(out), cfg)
    return 0


def cmd_sweep(args) -> int:
    cfg = make_run_config(args)
    if args.steps < 2:
        raise UsageError("steps must be at least 2")
    obj = args.objective
    if obj == "K_u":
        for name in ("u", "V", "h"):
            if getattr(args, name) is None:
                raise UsageError(f"K_u sweep needs --{name}")
        res = extremal.sweep("K_u", steps=args.steps, N=parse_weight(args.N),
                             mu=parse_measure(args.measure), u=args.u, V=args.V, h=args.h)
    else:
        if args.delta is None:
            raise UsageError(f"{obj} sweep needs --delta")
        params = {"Delta": args.delta}
        if obj == "upper-sc":
            if args.s is None or not args.s > 0:
                raise UsageError("upper-sc sweep needs --s > 0")
            params["s"] = args.s
        res = extremal.sweep(obj, (args.xmin, args.xmax), args.steps, **params)
    summary = dict(res.summary(), direction=res.direction,
                   worst_difference=res.worst_difference, steps=int(res.x.size))
    if args.format == "json":
        table = {"x": res.x.tolist(), "value": res.value.tolist(), "summary": summary}
        emit(dumps(table), cfg)
    else:
        emit(res.to_csv(DIGITS), cfg)
        # with the table on stdout the summary goes to stderr
        stream = sys.stdout if cfg.output else sys.stderr
        stream.write(dumps(summary) + "\n")
    return 0 if res.monotone else 1


def cmd_geometry(args) -> int:
    cfg = make_run_config(args)
    q = cfg.quadrature
    if args.mode == "floating":
        if args.L is None or args.delta is None:
            raise UsageError("floating mode needs --L and --delta")
        fb = geometry.floating_radius_bounds(args.L, args.n, args.delta)
        emit(dumps({"n": args.n, "L": args.L, "delta": args.delta,
                    "r_inner": fb.r_inner, "r_outer": fb.r_outer}), cfg)
        return 0
    if args.mode == "diagonal":
        est = geometry.cube_diagonal_section(args.n, args.samples, seed=cfg.seed)
        emit(dumps({"n": args.n, "samples": args.samples, "seed": cfg.seed,
                    "value": est.value, "stderr": est.stderr}), cfg)
        return 0
    if args.h is None:
        raise UsageError("--h is required")
    body = geometry.builtin_body(args.body, args.n)
    if args.mode == "isotropic":
        slab = geometry.slab_volume(body, args.h, q)
        rep = geometry.isotropic_sandwich(args.n, args.h, slab, strict=False)
        L = math.sqrt(geometry.direction_second_moment(body, q))
        out = dict(rep.to_dict(), body=args.body, L=L)
        emit(dumps(out), cfg)
        tol = 1e-9 * L
        bad_lower = rep.slab <= bounds.BK_THRESHOLD and rep.L_lower > L + tol
        bad_upper = (rep.slab <= bounds.sconcave_threshold(1.0 / (args.n - 1))
                     and L > rep.L_upper + tol)
        return 1 if (bad_lower or bad_upper) else 0
    sw = geometry.slab_sandwich_check(body, args.h, q)
    emit(dumps(sw.to_dict()), cfg)
    return max(_report_code(sw.lower), _report_code(sw.upper))


_PRESETS = ("uniform", "laplace", "exponential", "gaussian")


def _even_variable(text, scale):
    if text in _PRESETS:
        return prob.EvenRandomVariable.preset(text, scale)
    return prob.EvenRandomVariable.from_profile(_read_profile(text))


def _tail_variable(text, scale):
    if text in ("exponential", "laplace"):
        return prob.TailVariable.exponential(1.0 / scale)
    if text in _PRESETS:
        X = prob.EvenRandomVariable.preset(text, scale)
        return prob.TailVariable.from_density(X.half_density)
    return prob.TailVariable(_read_profile(text))


def cmd_prob(args) -> int:
    cfg = make_run_config(args)
    q = cfg.quadrature
    if args.profile is None:
        raise UsageError("--profile is required")
    if args.laplace:
        if args.s is None:
            raise UsageError("--laplace needs --s")
        rep = prob.laplace_report(_even_variable(args.profile, args.scale), args.s, q)
        emit(dumps(rep.to_dict()), cfg)
        return _report_code(rep.report)
    if args.median:
        out = prob.median_report(_even_variable(args.profile, args.scale), parse_weight(args.N), q)
        emit(dumps(out), cfg)
        return 0 if out["satisfied"] else 1
    if args.h is None:
        raise UsageError("--h is required")
    if args.jensen:
        rep = prob.jensen_improved(_tail_variable(args.profile, args.scale), parse_weight(args.N),
                                   args.h, q)
    else:
        rep = prob.anticoncentration(_even_variable(args.profile, args.scale), args.h, q)
    emit(dumps(rep.to_dict()), cfg)
    return _report_code(rep.report)


# --------------------------------------------------------------------------
# parser


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(2)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="lcineq", description="Functional inequalities for decreasing "
                     "log-concave and s-concave profiles.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help=f"JSON config file (default: ${CONFIG_ENV})")
    common.add_argument("--output", help="write the result to this file instead of stdout")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("bound", parents=[common], help="evaluate one bound on one profile")
    p.add_argument("--theorem", required=True, choices=THEOREMS)
    p.add_argument("--profile", help="profile JSON, or @path to a JSON file")
    p.add_argument("--h", type=float)
    p.add_argument("--measure", help="'p,lambda' for t^-p e^(-lambda t) dt (weighted only)")
    p.add_argument("--s", type=float, help="concavity exponent (upper-sc)")
    p.add_argument("--q", type=float, help="power exponent (power)")
    p.add_argument("--N", help="weight: t^2, t3, power:1.5, cosh, cosh:0.5 (weighted)")
    p.add_argument("--exponent", type=float, default=2.0, help="norm exponent (pnorm)")
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("verify", parents=[common], help="seeded random property suite")
    p.add_argument("--family", choices=("all", "logconcave", "sconcave", "reductions"),
                   default="all")
    p.add_argument("--trials", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--s", type=float, action="append", help="s values for s-concave trials")
    p.add_argument("--tolerance", type=float)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("threshold", parents=[common], help="admissibility thresholds")
    p.add_argument("--theta-p", type=float)
    p.add_argument("--delta-s", type=float)
    p.add_argument("--delta-n", type=int)
    p.add_argument("--grid-points", type=int, default=1024)
    p.set_defaults(func=cmd_threshold)

    p = sub.add_parser("sweep", parents=[common], help="tabulate a one-parameter objective")
    p.add_argument("--objective", required=True, choices=("upper-lc", "upper-sc", "K_u"))
    p.add_argument("--delta", type=float, help="tail fraction 1 - u/V")
    p.add_argument("--s", type=float)
    p.add_argument("--xmin", type=float, default=0.0)
    p.add_argument("--xmax", type=float, default=10.0)
    p.add_argument("--steps", type=int, default=4096)
    p.add_argument("--N")
    p.add_argument("--measure")
    p.add_argument("--u", type=float)
    p.add_argument("--V", type=float)
    p.add_argument("--h", type=float)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("geometry", parents=[common], help="convex-body corollaries")
    p.add_argument("--mode", choices=("sandwich", "isotropic", "floating", "diagonal"),
                   default="sandwich")
    p.add_argument("--body", choices=geometry.BODIES, default="cube_axis")
    p.add_argument("--n", type=int, default=3)
    p.add_argument("--h", type=float)
    p.add_argument("--L", type=float)
    p.add_argument("--delta", type=float)
    p.add_argument("--samples", type=int, default=1_000_000)
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_geometry)

    p = sub.add_parser("prob", parents=[common], help="probabilistic corollaries")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--laplace", action="store_true")
    g.add_argument("--median", action="store_true")
    g.add_argument("--jensen", action="store_true")
    g.add_argument("--anticoncentration", action="store_true")
    p.add_argument("--profile", help=f"preset {_PRESETS} or profile JSON")
    p.add_argument("--scale", type=float, default=1.0)
    p.add_argument("--s", type=float)
    p.add_argument("--N")
    p.add_argument("--h", type=float)
    p.set_defaults(func=cmd_prob)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, DomainError, bounds.NotApplicableError, ValueError) as exc:
        sys.stderr.write(f"lcineq {args.command}: error: {exc}\n")
        return 2
    except QuadratureError as exc:
        sys.stderr.write(f"lcineq {args.command}: numerical failure: {exc}\n")
        return 2
    except OverflowError as exc:
        sys.stderr.write(f"lcineq {args.command}: overflow: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
