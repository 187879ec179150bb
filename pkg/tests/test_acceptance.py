"""Acceptance criteria, one test per criterion.

Each test prints a single ``criterion N: PASS|FAIL ...`` line (shown even
under output capture).  Run ``python3 tests/test_acceptance.py`` for the
lines alone.
"""

from __future__ import annotations

import math
import subprocess
import sys

import numpy as np
import pytest

from pcalc import (
    Lagrangian,
    TruncationPolicy,
    VariationalProblem,
    by_parts_residual,
    convexity_probe,
    el_residual,
    first_variation,
    ftc_residual,
    functional_value,
    fundamental_lemma_probe,
    p_derivative,
    p_integral,
    solve_common_lattice,
)
from pcalc.integrate import integral_from_1, integral_to_1, integral_zero_one

P = 0.5
POLICY = TruncationPolicy(eps=1e-12)
A4 = 2.0 ** (1.0 / 16.0)
B4 = 2.0


@pytest.fixture
def report(capsys):
    def _report(n: int, ok: bool, detail: str) -> None:
        with capsys.disabled():
            print(f"\ncriterion {n}: {'PASS' if ok else 'FAIL'}  {detail}")

    return _report


def _free_particle() -> VariationalProblem:
    lag = Lagrangian.from_text("t + v^2/2", "0", "v")
    return VariationalProblem(lag, A4, B4, A4, B4, P, POLICY)


# -- 1 -----------------------------------------------------------------------------

FIXTURES = [
    (lambda t: t**3 - 2 * t + 1, lambda t: 1 + t * t),
    (math.sin, lambda t: 2 + math.cos(t)),
    (lambda t: t * t * math.cos(t), lambda t: t**4 + t + 1),
    (lambda t: 5 * t**2 - t, lambda t: 3 + math.sin(2 * t)),
]


def criterion_1() -> tuple[bool, str]:
    rng = np.random.default_rng(1)
    worst = 0.0
    exact = 0
    for i in range(200):
        while True:
            x = float(rng.uniform(0.1, 5.0))
            if abs(x - 1.0) > 1e-6:
                break
        p = float(rng.uniform(0.1, 0.9))
        f, g = FIXTURES[i % len(FIXTURES)]
        xp = x**p
        df, dg = p_derivative(f, x, p), p_derivative(g, x, p)
        # product rule, error relative to the larger side term
        lhs = p_derivative(lambda t: f(t) * g(t), x, p)
        t1, t2 = g(xp) * df, f(x) * dg
        worst = max(worst, abs(lhs - (t1 + t2)) / max(abs(lhs), abs(t1), abs(t2)))
        # quotient rule
        lhs = p_derivative(lambda t: f(t) / g(t), x, p)
        n1, n2, den = g(x) * df, f(x) * dg, g(x) * g(xp)
        rhs = (n1 - n2) / den
        worst = max(worst, abs(lhs - rhs) / max(abs(lhs), (abs(n1) + abs(n2)) / abs(den)))
        c = float(rng.normal(scale=10))
        exact += p_derivative(lambda t: c, x, p) == 0.0
        exact += p_derivative(lambda t: t, x, p) == 1.0
    ok = worst <= 1e-10 and exact == 400
    return ok, f"worst rel err {worst:.2e} (tol 1e-10), exact const/identity {exact}/400"


def test_criterion_1_operator_identities(report):
    ok, detail = criterion_1()
    report(1, ok, detail)
    assert ok, detail


# -- 2 -----------------------------------------------------------------------------


def criterion_2() -> tuple[bool, str]:
    errs = []
    for m in range(2, 11):
        p = 1.0 - 2.0**-m
        errs.append(abs(p_derivative(lambda t: t**3, 2.0, p) - 12.0))
    mono = all(e2 < e1 for e1, e2 in zip(errs, errs[1:]))
    ok = mono and errs[-1] <= 1e-2
    return ok, f"monotone={mono}, error at m=10 {errs[-1]:.3e} (tol 1e-2)"


def test_criterion_2_classical_limit(report):
    ok, detail = criterion_2()
    report(2, ok, detail)
    assert ok, detail


# -- 3, 4 --------------------------------------------------------------------------

INTERVALS = [(1.2, 2.0), (0.3, 0.8), (0.5, 2.0)]


def criterion_3() -> tuple[bool, str]:
    Fs = [lambda t: t, lambda t: t**3, math.sin, lambda t: math.exp(t / 4)]
    worst = max(ftc_residual(F, a, b, P, POLICY) for F in Fs for a, b in INTERVALS)
    return worst <= 1e-8, f"worst FTC residual {worst:.2e} (tol 1e-8)"


def test_criterion_3_ftc(report):
    ok, detail = criterion_3()
    report(3, ok, detail)
    assert ok, detail


def criterion_4() -> tuple[bool, str]:
    pairs = [(lambda t: t, lambda t: t), (lambda t: t * t, math.sin)]
    worst = max(
        by_parts_residual(f, g, a, b, P, POLICY) for f, g in pairs for a, b in INTERVALS
    )
    return worst <= 1e-8, f"worst by-parts residual {worst:.2e} (tol 1e-8)"


def test_criterion_4_by_parts(report):
    ok, detail = criterion_4()
    report(4, ok, detail)
    assert ok, detail


# -- 5 -----------------------------------------------------------------------------


def criterion_5() -> tuple[bool, str]:
    one = lambda t: 1.0  # noqa: E731
    cases = {
        "from1 (1,2)": (p_integral(one, 1.0, 2.0, P, POLICY).value, 1.0),
        "above 1 (1.3,3.7)": (p_integral(one, 1.3, 3.7, P, POLICY).value, 2.4),
        "from0 (0,0.6)": (p_integral(one, 0.0, 0.6, P, POLICY).value, 0.6),
        "below 1 (0.2,0.7)": (p_integral(one, 0.2, 0.7, P, POLICY).value, 0.5),
        "zero-one": (integral_zero_one(one, P, POLICY).value, 1.0),
        "general (0.5,2)": (p_integral(one, 0.5, 2.0, P, POLICY).value, 1.5),
        "general (0,3)": (p_integral(one, 0.0, 3.0, P, POLICY).value, 3.0),
    }
    errs = {k: abs(v - exact) for k, (v, exact) in cases.items()}
    worst = max(errs, key=errs.get)
    ok = all(e <= 1e-12 for e in errs.values())
    return ok, f"worst |value - (b-a)| {errs[worst]:.2e} at {worst} (tol 1e-12)"


def test_criterion_5_telescoping(report):
    ok, detail = criterion_5()
    report(5, ok, detail)
    assert ok, detail


# -- 6 -----------------------------------------------------------------------------


def criterion_6() -> tuple[bool, str]:
    rng = np.random.default_rng(6)
    f = lambda t: math.cos(3 * t) + t**2 / 2  # noqa: E731
    worst = 0.0
    flips = 0
    for lo, hi in [(1.01, 5.0), (0.02, 0.98), (0.05, 4.0)]:
        for _ in range(50):
            a, b, c = (float(v) for v in rng.uniform(lo, hi, 3))
            whole = p_integral(f, a, b, P, POLICY).value
            parts = p_integral(f, a, c, P, POLICY).value + p_integral(f, c, b, P, POLICY).value
            worst = max(worst, abs(whole - parts) / max(abs(whole), 1.0))
            flips += p_integral(f, b, a, P, POLICY).value == -whole
    ok = worst <= 1e-12 and flips == 150
    return ok, f"worst additivity rel err {worst:.2e} (tol 1e-12), bit-exact orientation {flips}/150"


def test_criterion_6_additivity_orientation(report):
    ok, detail = criterion_6()
    report(6, ok, detail)
    assert ok, detail


# -- 7 -----------------------------------------------------------------------------


def criterion_7() -> tuple[bool, str]:
    rng = np.random.default_rng(7)
    violations = 0
    for _ in range(100):
        k, w = rng.uniform(0.5, 4.0, 2)
        c = rng.uniform(-1.0, 1.0, 3)
        g = lambda t, k=k: (2.0 + math.sin(k * t)) * (1.0 + t)  # noqa: E731
        # |f| <= g: f is g times a factor of modulus at most 1
        f = lambda t, g=g, w=w, c=c: g(t) * (c[0] * math.cos(w * t) + c[1] * math.sin(t) + c[2]) / 3  # noqa: E731
        a, b = float(rng.uniform(0.1, 0.95)), float(rng.uniform(1.05, 4.0))
        x = a ** (P ** int(rng.integers(0, 5)))
        y = b ** (P ** int(rng.integers(0, 5)))
        checks = [
            (integral_from_1(f, y, P, POLICY), integral_from_1(g, y, P, POLICY)),
            (integral_to_1(f, x, P, POLICY), integral_to_1(g, x, P, POLICY)),
            (p_integral(f, x, y, P, POLICY), p_integral(g, x, y, P, POLICY)),
        ]
        for If, Ig in checks:
            violations += abs(If.value) > Ig.value + If.tail_bound + Ig.tail_bound
        for Ig in (integral_from_1(g, b, P, POLICY), p_integral(g, a, b, P, POLICY)):
            violations += Ig.value < -Ig.tail_bound
    return violations == 0, f"{violations} violations in 100 samples x 5 inequalities"


def test_criterion_7_domination(report):
    ok, detail = criterion_7()
    report(7, ok, detail)
    assert ok, detail


# -- 8 -----------------------------------------------------------------------------


def criterion_8() -> tuple[bool, str]:
    prob = _free_particle()
    res = el_residual(prob, prob.grid(lambda t: t))
    return res.sup_norm <= 1e-10, f"sup |r| = {res.sup_norm:.2e} on {len(res.nodes)} nodes (tol 1e-10)"


def test_criterion_8_el_candidate(report):
    ok, detail = criterion_8()
    report(8, ok, detail)
    assert ok, detail


# -- 9 -----------------------------------------------------------------------------


def _normal_equations_oracle() -> tuple[np.ndarray, np.ndarray]:
    # sum_j w_j (t_j + v_j^2 / 2) with v_j = (y_{j+1} - y_j) / (t_{j+1} - t_j)
    # is (1/2) sum_j c_j (y_{j+1} - y_j)^2 + const, c_j = 1 / (t_j - t_{j+1}).
    t = np.array([B4 ** (P**j) for j in range(5)])
    c = 1.0 / (t[:-1] - t[1:])
    M = np.zeros((3, 3))
    rhs = np.zeros(3)
    for m in range(1, 4):
        M[m - 1, m - 1] = c[m - 1] + c[m]
        if m > 1:
            M[m - 1, m - 2] = -c[m - 1]
        else:
            rhs[0] += c[0] * B4
        if m < 3:
            M[m - 1, m] = -c[m]
        else:
            rhs[2] += c[3] * A4
    return t[1:4], np.linalg.solve(M, rhs)


def criterion_9() -> tuple[bool, str]:
    lag = Lagrangian.from_text("t + v^2/2", "0", "v")
    box = {"t": (A4, B4), "u": (-5.0, 5.0), "v": (-5.0, 5.0), "u1": (-3.0, 3.0), "v1": (-3.0, 3.0)}
    verdict = convexity_probe(lag, box, n_samples=100_000, seed=0)
    nodes, oracle = _normal_equations_oracle()
    sol = solve_common_lattice(_free_particle())
    err = float(np.max(np.abs(sol.values[1:4] - oracle)))
    node_err = float(np.max(np.abs(oracle - nodes)))
    ok = verdict.convex and err <= 1e-8 and sol.label == "minimizer"
    return ok, (
        f"probe convex={verdict.convex} (1e5 samples), solver vs oracle {err:.2e} (tol 1e-8), "
        f"oracle vs nodes {node_err:.1e}"
    )


def test_criterion_9_sufficiency_path(report):
    ok, detail = criterion_9()
    report(9, ok, detail)
    assert ok, detail


# -- 10 ----------------------------------------------------------------------------


def criterion_10() -> tuple[bool, str]:
    rng = np.random.default_rng(10)
    prob = _free_particle()
    a, b = prob.a, prob.b
    worst = 0.0
    eps = 1e-5
    for _ in range(10):
        c = rng.normal(size=4)
        d = rng.normal(size=2)
        y = prob.grid(lambda t, c=c: c[0] + c[1] * t + c[2] * t * t + c[3] * math.sin(t))
        eta = prob.grid(lambda t, d=d: (t - a) * (t - b) * (d[0] + d[1] * t))
        fd = (functional_value(prob, y + eps * eta) - functional_value(prob, y - eps * eta)) / (2 * eps)
        fv = first_variation(prob, y, eta)
        worst = max(worst, abs(fv - fd) / abs(fv))
    return worst <= 1e-6, f"worst rel diff {worst:.2e} over 10 fixtures (tol 1e-6)"


def test_criterion_10_first_variation(report):
    ok, detail = criterion_10()
    report(10, ok, detail)
    assert ok, detail


# -- 11 ----------------------------------------------------------------------------


def _ulps(x: float, y: float) -> float:
    return abs(x - y) / math.ulp(max(abs(x), abs(y)))


def criterion_11() -> tuple[bool, str]:
    rng = np.random.default_rng(11)
    a, b = 0.4, 2.0
    none_for_zero = fundamental_lemma_probe(lambda t: 0.0, a, b, P, POLICY) is None
    found = 0
    worst_ulps = 0.0
    for i in range(20):
        c, tau = float(rng.uniform(0.5, 2.0)), float(rng.uniform(0.05, 0.95))
        if i % 2:
            # zero at and above 1, so every orbit of b is silent and the
            # witness must come from the backward orbit of a
            f = lambda t, c=c, tau=tau: c * (t - tau) if t < 1.0 else 0.0  # noqa: E731
        else:
            f = lambda t, c=c, tau=tau: c if t > 1.0 + tau else -c * t  # noqa: E731
        w = fundamental_lemma_probe(f, a, b, P, POLICY)
        if w is None:
            continue
        found += 1
        j = w.j
        if w.piece.startswith("+toward"):
            gap = b ** (P**j) - b ** (P ** (j + 1))
            node = b ** (P**j)
        elif w.piece.startswith("-away"):
            gap = -(a ** (P**-j) - a ** (P ** (-j - 1)))
            node = a ** (P ** (-j - 1))
        else:
            return False, f"unexpected witness piece {w.piece}"
        closed = gap * f(node) ** 2
        worst_ulps = max(worst_ulps, _ulps(w.integral, closed), float(node != w.node) * 1e9)
    ok = none_for_zero and found == 20 and worst_ulps <= 4
    return ok, f"f=0 -> none: {none_for_zero}, witnesses {found}/20, worst {worst_ulps:.0f} ulp (tol 4)"


def test_criterion_11_fundamental_lemma(report):
    ok, detail = criterion_11()
    report(11, ok, detail)
    assert ok, detail


# -- 12 ----------------------------------------------------------------------------


def criterion_12() -> tuple[bool, str]:
    cmd = [sys.executable, "-m", "pcalc", "verify", "--p", "0.5", "--seed", "0"]
    runs = [subprocess.run(cmd, capture_output=True, check=False) for _ in range(2)]
    same = runs[0].stdout == runs[1].stdout and len(runs[0].stdout) > 0
    codes = [r.returncode for r in runs]
    ok = same and codes == [0, 0]
    return ok, f"byte-identical={same}, exit codes {codes}, {len(runs[0].stdout)} bytes"


def test_criterion_12_cli_determinism(report):
    ok, detail = criterion_12()
    report(12, ok, detail)
    assert ok, detail


if __name__ == "__main__":
    results = []
    for n in range(1, 13):
        ok, detail = globals()[f"criterion_{n}"]()
        results.append(ok)
        print(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}")
    sys.exit(0 if all(results) else 1)
