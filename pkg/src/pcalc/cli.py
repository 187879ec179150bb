"""Command-line front end: ``pcalc <subcommand> [flags]``.

Results go to standard output (or ``--output``) as JSON by default, with a
top-level ``"schema": 1`` and the truncation record ``p``, ``eps``,
``j_max`` and ``terms_used``.  Exit codes: 0 success, 1 usage error,
2 expression parse error, 3 numerical failure (diagnostic JSON on stderr).

CSV layouts:

* ``integrate --dump-terms FILE``: ``j,node,gap,term,piece``
* ``lattice --format csv``: ``j,exponent,point``
* ``solve --csv FILE`` and ``solve --format csv``: ``node,y``
* ``verify --format csv``: ``suite,passed,cases,worst,tol``
* other subcommands with ``--format csv``: ``field,value``
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from typing import Any, Callable, Optional, Sequence

import numpy as np

from . import __version__
from .checks import run_suites
from .deriv import p_derivative, p_derivative_n
from .errors import (
    DomainError,
    ExpressionError,
    LatticeMismatchError,
    NumericalError,
    UnresolvedNodeError,
)
from .expr import parse
from .integrate import p_integral, p_integral_n
from .lattice import PParam, TruncationPolicy, ray
from .variational import (
    Lagrangian,
    VariationalProblem,
    convexity_probe,
    default_probe_box,
    el_residual,
    first_variation,
    functional_value,
    solve_common_lattice,
    y_norm,
)

SCHEMA = 1

EXIT_OK, EXIT_USAGE, EXIT_PARSE, EXIT_NUMERIC = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # type: ignore[override]
        raise UsageError(message)


def _clean(obj: Any) -> Any:
    """JSON-ready copy: numpy scalars to Python, non-finite floats to strings."""
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else repr(x)
    return obj


def _dumps(obj: Any) -> str:
    return json.dumps(_clean(obj), indent=2, allow_nan=False) + "\n"


def _csv_text(header: Sequence[str], rows: Sequence[Sequence[Any]]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in row])
    return buf.getvalue()


# -- shared flags ---------------------------------------------------------------


def _common(sp: argparse.ArgumentParser, p_default: Optional[float] = None) -> None:
    if p_default is None:
        sp.add_argument("--p", type=float, required=True, help="deformation parameter in (0, 1)")
    else:
        sp.add_argument("--p", type=float, default=p_default, help="deformation parameter in (0, 1)")
    sp.add_argument("--eps", type=float, default=1e-12, help="series tail tolerance")
    sp.add_argument("--jmax", type=int, default=10_000, help="term cap per series")
    sp.add_argument("--format", choices=("json", "csv"), default="json")
    sp.add_argument("--output", help="write the result here instead of stdout")


def _variational(sp: argparse.ArgumentParser) -> None:
    _common(sp)
    sp.add_argument("--lagrangian", required=True, help="expression in t, u, v")
    sp.add_argument("--dl-du", help="closed-form partial in u")
    sp.add_argument("--dl-dv", help="closed-form partial in v")
    sp.add_argument("--fd-step", type=float, help="relative step for numeric partials")
    sp.add_argument("--a", type=float, help="left endpoint (or give --k)")
    sp.add_argument("--b", type=float, required=True, help="right endpoint")
    sp.add_argument("--k", type=int, help="set a = b**(p**k)")
    sp.add_argument("--alpha", default="auto", help="y(a); 'auto' means a")
    sp.add_argument("--beta", default="auto", help="y(b); 'auto' means b")
    sp.add_argument("--seed", type=int, default=0, help="probe sampling seed")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="pcalc", description="p-calculus and p-variational calculus toolkit")
    ap.add_argument("--version", action="version", version=f"pcalc {__version__}")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sp = sub.add_parser("deriv", help="p-derivative of f at x")
    _common(sp)
    sp.add_argument("--f", required=True, help="expression in t")
    sp.add_argument("--x", type=float, required=True)
    sp.add_argument("--n", type=int, default=1, help="derivative order")

    sp = sub.add_parser("integrate", help="definite p-integral of f over [a, b]")
    _common(sp)
    sp.add_argument("--f", required=True, help="expression in t")
    sp.add_argument("--a", type=float, required=True)
    sp.add_argument("--b", type=float, required=True)
    sp.add_argument("--n", type=int, default=1, help="iterated integral from 0 to b (a must be 0)")
    sp.add_argument("--dump-terms", metavar="FILE", help="write every series term as CSV")

    sp = sub.add_parser("lattice", help="truncated orbit of a point")
    _common(sp)
    sp.add_argument("--base", type=float, required=True)
    sp.add_argument("--direction", choices=("toward", "away"), default="toward")
    sp.add_argument("--upper", type=float, help="cutoff for an away ray with base > 1")

    sp = sub.add_parser("functional", help="value of the functional at y")
    _variational(sp)
    sp.add_argument("--y", required=True, help="expression in t")

    sp = sub.add_parser("variation", help="first variation at y in direction eta")
    _variational(sp)
    sp.add_argument("--y", required=True, help="expression in t")
    sp.add_argument("--eta", required=True, help="expression in t vanishing at a and b")

    sp = sub.add_parser("residual", help="Euler-Lagrange residual of y")
    _variational(sp)
    sp.add_argument("--y", required=True, help="expression in t")

    sp = sub.add_parser("solve", help="stationary point on a common orbit")
    _variational(sp)
    sp.add_argument("--csv", metavar="FILE", help="also write (node, y) as CSV")
    sp.add_argument("--samples", type=int, default=4096, help="convexity probe samples")

    sp = sub.add_parser("convexity", help="joint convexity probe around the boundary data")
    _variational(sp)
    sp.add_argument("--samples", type=int, default=4096)
    sp.add_argument("--tol", type=float, default=1e-8)

    sp = sub.add_parser("verify", help="run the built-in identity suites")
    _common(sp, p_default=0.5)
    sp.add_argument("--seed", type=int, default=0)
    return ap


# -- helpers --------------------------------------------------------------------


def _policy(args: argparse.Namespace) -> TruncationPolicy:
    return TruncationPolicy(eps=args.eps, j_max=args.jmax, j_min=min(8, args.jmax))


def _header(args: argparse.Namespace, terms_used: Optional[int]) -> dict[str, Any]:
    return {
        "schema": SCHEMA,
        "command": args.command,
        "p": args.p,
        "eps": args.eps,
        "j_max": args.jmax,
        "terms_used": terms_used,
    }


def _fn1(src: str) -> Callable[[float], float]:
    return parse(src, ("t",))


def _problem(args: argparse.Namespace) -> VariationalProblem:
    p = PParam(args.p)
    if args.a is None and args.k is None:
        raise UsageError("give --a or --k")
    if args.a is not None and args.k is not None:
        raise UsageError("--a and --k are mutually exclusive")
    if args.k is not None:
        if args.k < 1:
            raise UsageError("--k must be at least 1")
        a = args.b ** (p.p**args.k)
    else:
        a = args.a

    def boundary(text: str, default: float) -> float:
        if text == "auto":
            return default
        try:
            return float(text)
        except ValueError:
            raise UsageError(f"boundary value must be a number or 'auto', got {text!r}") from None

    lag = Lagrangian.from_text(
        args.lagrangian, args.dl_du, args.dl_dv, fd_step=args.fd_step
    )
    return VariationalProblem(
        lag, a, args.b, boundary(args.alpha, a), boundary(args.beta, args.b), p, _policy(args)
    )


def _problem_fields(prob: VariationalProblem) -> dict[str, Any]:
    return {
        "a": prob.a,
        "b": prob.b,
        "alpha": prob.alpha,
        "beta": prob.beta,
        "lattice_points": len(prob.lattice),
    }


# -- subcommands ----------------------------------------------------------------

Result = tuple[dict[str, Any], Optional[str]]  # JSON object, CSV override


def _cmd_deriv(args: argparse.Namespace) -> Result:
    f = _fn1(args.f)
    if args.n == 1:
        value = p_derivative(f, args.x, args.p)
    else:
        value = p_derivative_n(f, args.x, args.p, args.n)
    out = _header(args, args.n + 1)
    out.update({"x": args.x, "n": args.n, "value": value})
    return out, None


def _cmd_integrate(args: argparse.Namespace) -> Result:
    f = _fn1(args.f)
    policy = _policy(args)
    if args.n != 1:
        if args.a != 0:
            raise UsageError("iterated integrals (--n > 1) run from 0; use --a 0")
        value = p_integral_n(f, args.b, args.p, policy, args.n)
        out = _header(args, None)
        out.update({"a": args.a, "b": args.b, "n": args.n, "value": value})
        return out, None
    res = p_integral(f, args.a, args.b, args.p, policy)
    if args.dump_terms:
        rows = [(t.j, t.node, t.gap, t.term, t.piece) for t in res.terms]
        with open(args.dump_terms, "w", newline="") as fh:
            fh.write(_csv_text(("j", "node", "gap", "term", "piece"), rows))
    out = _header(args, res.terms_used)
    out.update(
        {
            "a": args.a,
            "b": args.b,
            "value": res.value,
            "tail_bound": res.tail_bound,
            "case_tag": res.case_tag,
        }
    )
    return out, None


def _cmd_lattice(args: argparse.Namespace) -> Result:
    r = ray(args.base, args.p, args.direction, _policy(args), upper=args.upper)
    out = _header(args, len(r))
    out.update(
        {
            "base": args.base,
            "direction": args.direction,
            "truncation_level": r.truncation_level,
            "exponents": r.exponents,
            "points": r.points,
        }
    )
    rows = [(j, e, x) for j, (e, x) in enumerate(zip(r.exponents, r.points))]
    return out, _csv_text(("j", "exponent", "point"), rows)


def _cmd_functional(args: argparse.Namespace) -> Result:
    prob = _problem(args)
    y = prob.grid(_fn1(args.y))
    out = _header(args, len(prob.rule.index))
    out.update(_problem_fields(prob))
    out.update({"value": functional_value(prob, y), "y_norm": y_norm(y, prob)})
    return out, None


def _cmd_variation(args: argparse.Namespace) -> Result:
    prob = _problem(args)
    y = prob.grid(_fn1(args.y))
    eta = prob.grid(_fn1(args.eta))
    out = _header(args, len(prob.rule.index))
    out.update(_problem_fields(prob))
    out.update({"value": first_variation(prob, y, eta), "eta_norm": y_norm(eta, prob)})
    return out, None


def _cmd_residual(args: argparse.Namespace) -> Result:
    prob = _problem(args)
    res = el_residual(prob, prob.grid(_fn1(args.y)))
    out = _header(args, len(prob.rule.index))
    out.update(_problem_fields(prob))
    out.update({"sup_norm": res.sup_norm, "nodes": res.nodes, "residual": res.residual})
    return out, None


def _cmd_solve(args: argparse.Namespace) -> Result:
    prob = _problem(args)
    sol = solve_common_lattice(prob, probe_samples=args.samples, seed=args.seed)
    out = _header(args, len(sol.nodes) - 1)
    out.update(_problem_fields(prob))
    out.update(
        {
            "nodes": sol.nodes,
            "values": sol.values,
            "functional": sol.functional,
            "grad_norm": sol.grad_norm,
            "iterations": sol.iterations,
            "method": sol.method,
            "convex": sol.convex,
            "label": sol.label,
        }
    )
    table = _csv_text(("node", "y"), list(zip(sol.nodes, sol.values)))
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            fh.write(table)
    return out, table


def _cmd_convexity(args: argparse.Namespace) -> Result:
    prob = _problem(args)
    box = default_probe_box(prob)
    v = convexity_probe(prob.lagrangian, box, args.samples, args.tol, args.seed)
    out = _header(args, None)
    out.update(
        {
            "box": {k: list(lim) for k, lim in box.items()},
            "samples": v.n_samples,
            "seed": args.seed,
            "convex": v.convex,
            "concave": v.concave,
            "convex_counterexample": v.convex_counterexample,
            "concave_counterexample": v.concave_counterexample,
        }
    )
    return out, None


def _cmd_verify(args: argparse.Namespace) -> Result:
    results = run_suites(args.p, args.seed, _policy(args))
    out = _header(args, None)
    out.update(
        {
            "seed": args.seed,
            "passed": all(r.passed for r in results),
            "suites": [r.as_dict() for r in results],
        }
    )
    rows = [(r.name, r.passed, r.cases, r.worst, r.tol) for r in results]
    return out, _csv_text(("suite", "passed", "cases", "worst", "tol"), rows)


def _table(results: list[dict[str, Any]]) -> str:
    lines = [f"{'suite':<18} {'result':<6} {'worst':>11} {'tol':>8}  cases"]
    for r in results:
        mark = "pass" if r["passed"] else "FAIL"
        lines.append(f"{r['name']:<18} {mark:<6} {r['worst']:>11.3e} {r['tol']:>8.0e}  {r['cases']}")
    return "\n".join(lines) + "\n"


_COMMANDS: dict[str, Callable[[argparse.Namespace], Result]] = {
    "deriv": _cmd_deriv,
    "integrate": _cmd_integrate,
    "lattice": _cmd_lattice,
    "functional": _cmd_functional,
    "variation": _cmd_variation,
    "residual": _cmd_residual,
    "solve": _cmd_solve,
    "convexity": _cmd_convexity,
    "verify": _cmd_verify,
}


def _diagnose(kind: str, exc: BaseException, **extra: Any) -> str:
    body: dict[str, Any] = {"schema": SCHEMA, "error": kind, "type": type(exc).__name__, "message": str(exc)}
    body.update(extra)
    return _dumps(body)


def run(argv: Optional[Sequence[str]] = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        args = build_parser().parse_args(argv)
        out, csv_text = _COMMANDS[args.command](args)
    except SystemExit as exc:  # --help, --version
        return int(exc.code or 0)
    except UsageError as exc:
        stderr.write(f"pcalc: error: {exc}\n")
        return EXIT_USAGE
    except ExpressionError as exc:
        stderr.write(_diagnose("parse", exc, offset=exc.offset))
        return EXIT_PARSE
    except NumericalError as exc:
        stderr.write(_diagnose("numeric", exc, details=exc.details))
        return EXIT_NUMERIC
    except (DomainError, LatticeMismatchError, UnresolvedNodeError) as exc:
        stderr.write(f"pcalc: error: {exc}\n")
        return EXIT_USAGE

    if args.format == "csv":
        text = csv_text if csv_text is not None else _csv_text(
            ("field", "value"),
            [
                (k, v if isinstance(v, str) else json.dumps(_clean(v)))
                for k, v in out.items()
                if not isinstance(v, (list, dict))
            ],
        )
    else:
        text = _dumps(out)
    if args.output:
        with open(args.output, "w", newline="") as fh:
            fh.write(text)
    else:
        stdout.write(text)

    if args.command == "verify":
        stderr.write(_table(out["suites"]))
        if not out["passed"]:
            failed = [s["name"] for s in out["suites"] if not s["passed"]]
            stderr.write(_dumps({"schema": SCHEMA, "error": "verify", "failed": failed}))
            return EXIT_NUMERIC
    return EXIT_OK


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
