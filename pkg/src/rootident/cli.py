"""Command-line front end.

Every command writes one comma-separated table preceded by ``#`` comment
lines; the ``# config:`` line holds the full resolved configuration (seed
included), and ``rootident replay FILE`` re-runs it.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from datetime import datetime, timezone

from . import __version__
from .bounds import (COMPARE_HEADER, CURVE_HEADER, CurveConfig, compare_bounds,
                     emit_bound_curves, min_obs_eps1_zero, min_obs_three_error,
                     min_obs_two_error)
from .errors import (DivergenceError, InconsistentDataError, InvalidArgumentError, NotFoundError,
                     ZeroDerivativeError)
from .idcodes import (HISTOGRAM_HEADER, all_colorings, build_coloring_code,
                      max_pairwise_overlap, overlap_histogram)
from .idtests import ThreeErrorSpec, TwoErrorSpec
from .model import UniformRootModel
from .montecarlo import (REPORT_HEADER, achievable_n, simulation_rows,
                         verify_measure_inequalities)
from .rootfind import StepSchedule, bracket_has_root, newton_raphson, robbins_monro

EXIT_DOMAIN, EXIT_NOT_FOUND, EXIT_IO = 2, 3, 4
GRID_TOL = 1e-12
# run-time knobs that never change the artifact
_VOLATILE = ("out", "workers", "func")

BOUNDS_HEADER = ("bound", "eps", "eps1", "eps2", "delta", "lambda", "raw_value", "n_min",
                 "vacuous", "domain_note")
VERIFY_HEADER = ("record", "label", "region", "c1", "c2", "n", "trials", "count", "value",
                 "ci_lo", "ci_hi", "reference", "holds")
TRAJECTORY_HEADER = ("step", "x", "residual")
BRACKET_HEADER = ("a", "b", "f_a", "f_b", "has_root")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def parse_grid(text: str) -> list[float]:
    """``start:stop:step`` (endpoints inclusive within 1e-12) or a comma list."""
    if ":" in text:
        try:
            start, stop, step = (float(p) for p in text.split(":"))
        except ValueError:
            raise InvalidArgumentError(f"bad grid {text!r}, expected start:stop:step") from None
        if not step > 0 or stop < start:
            raise InvalidArgumentError(f"bad grid {text!r}: need step > 0 and stop >= start")
        count = math.floor((stop - start) / step + GRID_TOL) + 1
        return [round(start + k * step, 12) for k in range(count)]
    text = text.strip()
    if not text:
        return []
    try:
        return [float(p) for p in text.split(",")]
    except ValueError:
        raise InvalidArgumentError(f"bad grid {text!r}") from None


def _fmt(v):
    if v is None:
        return "na"
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    if hasattr(v, "item"):
        return _fmt(v.item())
    s = str(v)
    return s if s else "none"


def render(config: dict, columns, rows, notes=(), timestamp=True) -> str:
    buf = io.StringIO()
    buf.write(f"# rootident {__version__} {config['command']}\n")
    buf.write(f"# config: {json.dumps(config, sort_keys=True)}\n")
    buf.write(f"# seed: {config.get('seed')}\n")
    for note in notes:
        buf.write(f"# note: {note}\n")
    if timestamp:
        buf.write(f"# generated: {datetime.now(timezone.utc).isoformat(timespec='seconds')}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([_fmt(row[c]) for c in columns])
    return buf.getvalue()


def strip_timestamp(text: str) -> str:
    return "".join(l for l in text.splitlines(True) if not l.startswith("# generated:"))


def _config(args) -> dict:
    return {k: v for k, v in sorted(vars(args).items()) if k not in _VOLATILE}


def _need(args, *names):
    for name in names:
        if getattr(args, name) is None:
            raise InvalidArgumentError(f"--{name.replace('_', '-')} is required here")


def _lambdas(args):
    if args.lambda_grid is not None:
        return parse_grid(args.lambda_grid)
    _need(args, "lam")
    return [args.lam]


def cmd_bounds(args):
    _need(args, "delta")
    lams = _lambdas(args)
    if args.mode == "compare":
        _need(args, "eps", "eps1", "eps2")
        return COMPARE_HEADER, compare_bounds(args.eps, args.eps1, args.eps2, args.delta, lams), ()
    rows = []
    for lam in lams:
        if args.mode == "two-error":
            _need(args, "eps")
            res = min_obs_two_error(args.eps, args.delta, lam)
        elif args.mode == "three-error":
            _need(args, "eps1", "eps2")
            res = min_obs_three_error(args.eps1, args.eps2, args.delta, lam)
        else:
            _need(args, "eps2")
            res = min_obs_eps1_zero(args.eps2, args.delta, lam)
        rows.append({"bound": args.mode, "eps": args.eps, "eps1": args.eps1, "eps2": args.eps2,
                     "delta": args.delta, "lambda": lam, "raw_value": res.raw_value,
                     "n_min": res.n_min, "vacuous": res.vacuous, "domain_note": res.domain_note})
    return BOUNDS_HEADER, rows, ()


def cmd_curves(args):
    _need(args, "lambda_grid", "eps_ratio")
    cfg = CurveConfig(tuple(parse_grid(args.lambda_grid)), args.eps_ratio, args.eps1_ratio,
                      args.eps2_ratio)
    notes = ("n_reference = ceil(log2(n_old_raw)) clipped at 0; a plotting reference, not a bound",
             "ratios are eps/(2 delta); -1 in *_min and nan in *_raw mark undefined bounds")
    return CURVE_HEADER, emit_bound_curves(cfg), notes


def _spec(args, n):
    _need(args, "delta")
    lam = args.lam if args.lam is not None else 0.1
    if args.test == "two":
        _need(args, "eps")
        return TwoErrorSpec(args.a, args.b, args.eps, args.delta, n, lam, lam)
    _need(args, "eps1", "eps2")
    return ThreeErrorSpec(args.a, args.b, args.eps1, args.eps2, args.delta, n, lam, lam, lam)


def _sized_spec(args):
    if args.find_n:
        family = _spec(args, 1)
        n = achievable_n(family, family.budget, args.search_cap, args.trials, args.seed,
                         args.grid_points, args.confidence, args.workers)
        return _spec(args, n), (f"n chosen as the smallest achievable n <= {args.search_cap}",)
    _need(args, "n")
    return _spec(args, args.n), ()


def cmd_simulate(args):
    spec, notes = _sized_spec(args)
    rows = simulation_rows(spec, args.trials, args.seed, args.grid_points, args.confidence,
                           args.workers)
    notes += ("grid covers each region at grid_points per piece; reject tails cut at 2*delta",)
    return REPORT_HEADER, rows, notes


def cmd_verify(args):
    args.test = "three"
    spec, notes = _sized_spec(args)
    if args.c is not None:
        points = parse_grid(args.c)
    else:
        points = [spec.a, spec.a - spec.eps1, spec.a - spec.eps2 + spec.eps1, spec.a - spec.eps2]
    rows, caps = [], None
    for c in points:
        rep = verify_measure_inequalities(spec, c, args.trials, args.seed, args.confidence)
        ch = rep.check
        rows.append({"record": "measure", "label": ch.inequality, "region": ch.region, "c1": c,
                     "c2": c, "n": spec.n, "trials": ch.estimate.trials,
                     "count": ch.estimate.failures, "value": ch.estimate.p_hat,
                     "ci_lo": ch.estimate.ci_lo, "ci_hi": ch.estimate.ci_hi,
                     "reference": ch.bound, "holds": ch.holds})
        caps = rep.caps
    for cap in caps or ():
        ref = cap.closed_form / (2 * spec.delta) ** spec.n
        rows.append({"record": "cap", "label": cap.label, "region": "pair", "c1": cap.c1,
                     "c2": cap.c2, "n": spec.n, "trials": 0, "count": 0,
                     "value": cap.normalized, "ci_lo": cap.normalized, "ci_hi": cap.normalized,
                     "reference": ref, "holds": cap.measure == cap.closed_form})
    notes += ("measure rows: value = normalised measure of the required verdict on the box",
              "cap rows: value = box intersection measure / (2 delta)^n, reference = closed form")
    return VERIFY_HEADER, rows, notes


def _compile(expr):
    import sympy

    x = sympy.Symbol("x")
    try:
        e = sympy.sympify(expr, locals={"x": x})
    except (sympy.SympifyError, SyntaxError, TypeError) as exc:
        raise InvalidArgumentError(f"cannot parse expression {expr!r}") from exc
    return x, e, sympy.lambdify(x, e, "math")


def cmd_rootfind(args):
    if args.method == "robbins-monro":
        _need(args, "kappa", "delta", "steps")
        model = UniformRootModel(args.kappa, args.delta, args.seed)
        res = robbins_monro(model, args.alpha, args.x1, StepSchedule(args.step_c), args.steps,
                            trial=args.trial, record=True)
        rows = [{"step": k + 1, "x": x, "residual": x - args.kappa - args.alpha}
                for k, x in enumerate(res.trajectory)]
        return TRAJECTORY_HEADER, rows, ("residual = M(x) - alpha with M(x) = x - kappa",)
    _need(args, "f")
    x, expr, f = _compile(args.f)
    if args.method == "bracket":
        _need(args, "a", "b")
        fa, fb = float(f(args.a)), float(f(args.b))
        return BRACKET_HEADER, [{"a": args.a, "b": args.b, "f_a": fa, "f_b": fb,
                                 "has_root": bracket_has_root(f, args.a, args.b)}], ()
    if args.fprime is None:
        import sympy

        fp = sympy.lambdify(x, sympy.diff(expr, x), "math")
    else:
        fp = _compile(args.fprime)[2]
    res = newton_raphson(lambda t: float(f(t)), lambda t: float(fp(t)), args.x1, args.tol,
                         args.max_iter)
    rows = [{"step": k + 1, "x": xk, "residual": float(f(xk))} for k, xk in enumerate(res.trajectory)]
    return TRAJECTORY_HEADER, rows, (f"converged: {str(res.converged).lower()} after "
                                     f"{res.iterations} iterations",)


def cmd_idcodes(args):
    if args.exhaustive:
        code = all_colorings(args.m_prime, args.m_colors)
    else:
        _need(args, "n_codes")
        code = build_coloring_code(args.m_prime, args.m_colors, args.n_codes, args.distinct,
                                   args.seed)
    notes = (f"codes: {code.n_codes}; max pairwise overlap: {max_pairwise_overlap(code)!r}",)
    return HISTOGRAM_HEADER, overlap_histogram(code), notes


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="rootident", description="Root identification laboratory.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, seed=True):
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--confidence", type=float, default=0.99)
        sp.add_argument("--out", default="-", help="output path, '-' for stdout")
        sp.add_argument("--workers", type=int, default=1)
        for name in ("delta", "eps", "eps1", "eps2"):
            sp.add_argument(f"--{name}", type=float)
        sp.add_argument("--lambda", dest="lam", type=float)
        sp.add_argument("--lambda-grid")
        sp.add_argument("--n", type=int)
        sp.add_argument("--trials", type=int, default=100_000)

    b = sub.add_parser("bounds", help="lower bounds on the number of observations")
    common(b)
    mode = b.add_mutually_exclusive_group(required=True)
    for m in ("two-error", "three-error", "eps1-zero", "compare"):
        mode.add_argument(f"--{m}", dest="mode", action="store_const", const=m)
    b.set_defaults(func=cmd_bounds)

    c = sub.add_parser("curves", help="bound curves over a lambda grid")
    common(c)
    c.add_argument("--eps-ratio", type=float)
    c.add_argument("--eps1-ratio", type=float)
    c.add_argument("--eps2-ratio", type=float)
    c.set_defaults(func=cmd_curves)

    for name, fn in (("simulate", cmd_simulate), ("verify", cmd_verify)):
        s = sub.add_parser(name, help="Monte Carlo error report" if name == "simulate"
                           else "measure-inequality check for a three-error test")
        common(s)
        if name == "simulate":
            s.add_argument("--test", choices=("two", "three"), default="two")
        else:
            s.add_argument("--c", help="comma list of box centres (roots)")
        s.add_argument("--a", type=float, default=0.0)
        s.add_argument("--b", type=float, default=1.0)
        s.add_argument("--grid-points", type=int, default=5)
        s.add_argument("--find-n", action="store_true")
        s.add_argument("--search-cap", type=int, default=64)
        s.set_defaults(func=fn)

    r = sub.add_parser("rootfind", help="Newton-Raphson, Robbins-Monro, bracketing")
    common(r)
    r.add_argument("--method", choices=("newton", "robbins-monro", "bracket"), default="newton")
    r.add_argument("--f", help="expression in x, e.g. 'x**2 - 2'")
    r.add_argument("--fprime", help="derivative expression (default: symbolic)")
    r.add_argument("--x1", type=float, default=0.0)
    r.add_argument("--tol", type=float, default=1e-10)
    r.add_argument("--max-iter", type=int, default=50)
    r.add_argument("--a", type=float)
    r.add_argument("--b", type=float)
    r.add_argument("--kappa", type=float)
    r.add_argument("--alpha", type=float, default=0.0)
    r.add_argument("--step-c", type=float, default=1.0)
    r.add_argument("--steps", type=int)
    r.add_argument("--trial", type=int, default=0)
    r.set_defaults(func=cmd_rootfind)

    i = sub.add_parser("idcodes", help="coloring-code overlap histogram")
    common(i)
    i.add_argument("--m-prime", type=int, required=True)
    i.add_argument("--m-colors", type=int, required=True)
    i.add_argument("--n-codes", type=int)
    i.add_argument("--distinct", action=argparse.BooleanOptionalAction, default=True)
    i.add_argument("--exhaustive", action="store_true")
    i.set_defaults(func=cmd_idcodes)

    rp = sub.add_parser("replay", help="re-run the configuration recorded in an output file")
    rp.add_argument("file")
    rp.add_argument("--out", default="-")
    rp.add_argument("--workers", type=int, default=1)
    return p


_COMMANDS = {"bounds": cmd_bounds, "curves": cmd_curves, "simulate": cmd_simulate,
             "verify": cmd_verify, "rootfind": cmd_rootfind, "idcodes": cmd_idcodes}


def read_config(path: str) -> dict:
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.startswith("# config: "):
                return json.loads(line[len("# config: "):])
            if not line.startswith("#"):
                break
    raise InvalidArgumentError(f"{path} has no '# config:' header line")


def execute(args, timestamp=True) -> str:
    config = _config(args)
    columns, rows, notes = _COMMANDS[args.command](args)
    # commands may normalise arguments while running (verify pins the test kind)
    config = {**config, **_config(args)}
    return render(config, columns, rows, notes, timestamp)


def _diagnose(kind, message):
    print(f"rootident: error: {kind}: {' '.join(str(message).split())}", file=sys.stderr)


def run_command(argv=None, timestamp=True) -> int:
    try:
        args = build_parser().parse_args(argv)
        if args.command == "replay":
            out, workers = args.out, args.workers
            args = argparse.Namespace(**read_config(args.file), out=out, workers=workers)
        text = execute(args, timestamp)
    except UsageError as exc:
        _diagnose("usage", exc)
        return EXIT_DOMAIN
    except (InvalidArgumentError, InconsistentDataError) as exc:
        _diagnose(exc.kind, exc)
        return EXIT_DOMAIN
    except (NotFoundError, ZeroDerivativeError, DivergenceError) as exc:
        _diagnose(exc.kind, exc)
        return EXIT_NOT_FOUND
    except OSError as exc:
        _diagnose("io", exc)
        return EXIT_IO
    except (ValueError, ArithmeticError) as exc:
        _diagnose("invalid-argument", exc)
        return EXIT_DOMAIN
    try:
        if args.out == "-":
            sys.stdout.write(text)
        else:
            with open(args.out, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
    except OSError as exc:
        _diagnose("io", exc)
        return EXIT_IO
    return 0


def main(argv=None):
    sys.exit(run_command(argv))
