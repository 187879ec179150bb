"""Deterministic identity suites behind ``pcalc verify``.

Each suite samples its cases from a seeded generator, measures the worst
discrepancy against the identity it checks and reports it next to the
tolerance.  The suites use smooth closed-form fixtures only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .deriv import p_derivative
from .integrate import (
    by_parts_residual,
    ftc_residual,
    integral_from_1,
    integral_to_1,
    p_integral,
)
from .lattice import PParam, TruncationPolicy, as_pparam
from .variational import (
    Lagrangian,
    VariationalProblem,
    el_residual,
    solve_common_lattice,
)

__all__ = ["SuiteResult", "SUITES", "run_suites"]


@dataclass(frozen=True)
class SuiteResult:
    name: str
    passed: bool
    cases: int
    worst: float
    tol: float
    note: str = ""

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "passed": self.passed,
            "cases": self.cases,
            "worst": self.worst,
            "tol": self.tol,
            "note": self.note,
        }


Fn = Callable[[float], float]

# pairs (f, g); g is nonzero on (0, 6) so quotients are defined
_PAIRS: list[tuple[str, Fn, str, Fn]] = [
    ("t^3 - 2t + 1", lambda t: t**3 - 2 * t + 1, "1 + t^2", lambda t: 1 + t * t),
    ("sin t", math.sin, "2 + cos t", lambda t: 2 + math.cos(t)),
    ("exp(t/3)", lambda t: math.exp(t / 3), "t^4 + t + 1", lambda t: t**4 + t + 1),
    ("t^2 cos t", lambda t: t * t * math.cos(t), "exp(-t)", lambda t: math.exp(-t)),
]


def _sample_x(rng: np.random.Generator) -> float:
    while True:
        x = float(rng.uniform(0.1, 5.0))
        if abs(x - 1.0) > 1e-3:
            return x


def derivative_rules(p: PParam, rng: np.random.Generator, n: int = 200) -> SuiteResult:
    """Product and quotient rules; constants and the identity map."""
    tol = 1e-10
    worst = 0.0
    for i in range(n):
        fname, f, gname, g = _PAIRS[i % len(_PAIRS)]
        x = _sample_x(rng)
        xp = x**p.p
        df, dg = p_derivative(f, x, p), p_derivative(g, x, p)

        lhs = p_derivative(lambda t: f(t) * g(t), x, p)
        a, b = g(xp) * df, f(x) * dg
        worst = max(worst, abs(lhs - (a + b)) / max(abs(lhs), abs(a), abs(b), 1e-300))

        lhs = p_derivative(lambda t: f(t) / g(t), x, p)
        num1, num2 = g(x) * df, f(x) * dg
        den = g(x) * g(xp)
        scale = (abs(num1) + abs(num2)) / abs(den)
        worst = max(worst, abs(lhs - (num1 - num2) / den) / max(abs(lhs), scale, 1e-300))

    exact = 0
    for _ in range(n):
        x = _sample_x(rng)
        c = float(rng.normal())
        exact += p_derivative(lambda t: c, x, p) == 0.0
        exact += p_derivative(lambda t: t, x, p) == 1.0
    ok = worst <= tol and exact == 2 * n
    return SuiteResult("derivative-rules", ok, 3 * n, worst, tol, f"{exact}/{2 * n} exact")


_FTC_F: list[Fn] = [lambda t: t, lambda t: t**3, math.sin, lambda t: math.exp(t / 4)]
_INTERVALS = [(1.2, 2.0), (0.3, 0.8), (0.5, 2.0)]


def ftc(p: PParam, rng: np.random.Generator, policy: TruncationPolicy) -> SuiteResult:
    tol = 1e-8
    worst = max(
        ftc_residual(F, a, b, p, policy) for F in _FTC_F for a, b in _INTERVALS
    )
    return SuiteResult("ftc", worst <= tol, len(_FTC_F) * len(_INTERVALS), worst, tol)


def by_parts(p: PParam, rng: np.random.Generator, policy: TruncationPolicy) -> SuiteResult:
    tol = 1e-8
    pairs: list[tuple[Fn, Fn]] = [(lambda t: t, lambda t: t), (lambda t: t * t, math.sin)]
    worst = max(
        by_parts_residual(f, g, a, b, p, policy) for f, g in pairs for a, b in _INTERVALS
    )
    return SuiteResult("by-parts", worst <= tol, len(pairs) * len(_INTERVALS), worst, tol)


_REGIMES = {"above-1": (1.05, 4.0), "below-1": (0.05, 0.95), "straddling": (0.1, 3.0)}


def additivity(
    p: PParam, rng: np.random.Generator, policy: TruncationPolicy, n: int = 50
) -> SuiteResult:
    """Splitting at an interior point, and reversing orientation."""
    tol = 1e-12
    worst = 0.0
    flips = 0
    total = 0
    f = lambda t: math.sin(2 * t) + t * t  # noqa: E731
    for lo, hi in _REGIMES.values():
        for _ in range(n):
            a, c, b = rng.uniform(lo, hi, 3)
            whole = p_integral(f, a, b, p, policy).value
            split = p_integral(f, a, c, p, policy).value + p_integral(f, c, b, p, policy).value
            worst = max(worst, abs(whole - split) / max(1.0, abs(whole)))
            flips += p_integral(f, b, a, p, policy).value == -whole
            total += 1
    ok = worst <= tol and flips == total
    return SuiteResult("additivity", ok, total, worst, tol, f"{flips}/{total} orientation exact")


def domination(
    p: PParam, rng: np.random.Generator, policy: TruncationPolicy, n: int = 100
) -> SuiteResult:
    """``|f| <= g`` on the lattice bounds the integrals of ``f`` by those of ``g``.

    Violations are measured beyond the truncation slack of the two series.
    """
    worst = -math.inf
    for _ in range(n):
        c1, c2 = rng.uniform(-1, 1, 2)
        k1, k2 = rng.uniform(0.5, 5, 2)
        g = lambda t, k=k2: (1 + t * t) * (1.5 + math.cos(k * t))  # noqa: E731
        f = lambda t, c1=c1, c2=c2, k=k1, g=g: g(t) * (c1 * math.sin(k * t) + c2) / 2  # noqa: E731
        a = float(rng.uniform(0.1, 0.9))
        b = float(rng.uniform(1.1, 4.0))
        x = a ** (p.p ** int(rng.integers(0, 4)))
        y = b ** (p.p ** int(rng.integers(0, 4)))

        pairs = [
            (integral_from_1(f, y, p, policy), integral_from_1(g, y, p, policy)),
            (integral_to_1(f, x, p, policy), integral_to_1(g, x, p, policy)),
            (p_integral(f, x, y, p, policy), p_integral(g, x, y, p, policy)),
        ]
        for If, Ig in pairs:
            slack = If.tail_bound + Ig.tail_bound
            worst = max(worst, abs(If.value) - Ig.value - slack)
        for Ig in (integral_from_1(g, b, p, policy), p_integral(g, a, b, p, policy)):
            worst = max(worst, -Ig.value - Ig.tail_bound)
    return SuiteResult("domination", worst <= 0.0, 5 * n, max(worst, 0.0), 0.0)


def euler_lagrange(p: PParam, rng: np.random.Generator, policy: TruncationPolicy) -> SuiteResult:
    """``y(t) = t`` against ``L = t + v^2/2`` on ``[b**(p**4), b]``, ``b = 2``."""
    b = 2.0
    a = b ** (p.p**4)
    lag = Lagrangian.from_text("t + v^2/2", "0", "v")
    prob = VariationalProblem(lag, a, b, a, b, p, policy)
    res = el_residual(prob, prob.grid(lambda t: t)).sup_norm
    sol = solve_common_lattice(prob, seed=int(rng.integers(0, 2**31)))
    err = float(np.max(np.abs(sol.values - sol.nodes)))
    ok = res <= 1e-10 and err <= 1e-8 and sol.label == "minimizer"
    return SuiteResult(
        "euler-lagrange", ok, 2, max(res, err), 1e-8,
        f"residual {res:.3e}, solver error {err:.3e}, {sol.label}",
    )


SUITES = ["derivative-rules", "ftc", "by-parts", "additivity", "domination", "euler-lagrange"]


def run_suites(
    p: float | PParam = 0.5,
    seed: int = 0,
    policy: Optional[TruncationPolicy] = None,
) -> list[SuiteResult]:
    pp = as_pparam(p)
    policy = policy or TruncationPolicy()
    # one independent stream per suite, so suites do not perturb each other
    streams = np.random.SeedSequence(seed).spawn(len(SUITES))
    rngs = [np.random.default_rng(s) for s in streams]
    return [
        derivative_rules(pp, rngs[0]),
        ftc(pp, rngs[1], policy),
        by_parts(pp, rngs[2], policy),
        additivity(pp, rngs[3], policy),
        domination(pp, rngs[4], policy),
        euler_lagrange(pp, rngs[5], policy),
    ]
