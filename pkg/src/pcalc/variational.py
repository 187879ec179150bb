"""Variational problems on ``p``-lattices.

The functional ``J[y] = int_a^b L(t, y(t^p), D_p y(t)) d_p t`` is evaluated for
functions stored on a :class:`~pcalc.lattice.PLattice`, where ``y(t^p)`` is
read off the successor of ``t`` and ``D_p y(t)`` is the difference quotient
along that successor.  Integrals use :func:`~pcalc.integrate.lattice_rule`, so
all quantities of one problem share the same nodes and truncation.

Optimisation is restricted to endpoints on a common orbit, ``a = b**(p**k)``
with ``1 < a < b``: there the functional is a finite sum with positive
weights over ``k + 1`` nodes.
"""

from __future__ import annotations

import math
from collections.abc import Mapping
from dataclasses import dataclass, field
from typing import Any, Callable, Optional, Sequence, Union

import numpy as np
from scipy.stats import qmc

from .errors import (
    ConvergenceError,
    DomainError,
    LatticeMismatchError,
)
from .expr import Expression, parse
from .integrate import QuadratureRule, lattice_rule
from .lattice import (
    DEFAULT_POLICY,
    MERGE_RTOL,
    ONE,
    PLattice,
    PParam,
    TruncationPolicy,
    as_pparam,
    common_lattice_index,
    iter_ray,
    quadrature_lattice,
)

__all__ = [
    "Lagrangian",
    "GridFunction",
    "VariationalProblem",
    "Admissibility",
    "ELResidual",
    "ConvexityVerdict",
    "SolveResult",
    "LemmaWitness",
    "admissible",
    "admissible_variation",
    "y_norm",
    "functional_value",
    "first_variation",
    "el_residual",
    "convexity_probe",
    "default_probe_box",
    "solve_common_lattice",
    "fundamental_lemma_probe",
]

_CBRT_EPS = np.cbrt(np.finfo(float).eps)


def _vcall(fn: Callable[..., Any], *args: np.ndarray) -> np.ndarray:
    """Call ``fn`` elementwise on broadcast arrays, vectorised when it can."""
    arrays = np.broadcast_arrays(*(np.asarray(a, dtype=float) for a in args))
    try:
        with np.errstate(all="ignore"):
            out = np.asarray(fn(*arrays), dtype=float)
        if out.shape == arrays[0].shape:
            return out
        if out.ndim == 0:
            return np.full(arrays[0].shape, float(out))
    except (TypeError, ValueError):
        pass
    flat = [a.ravel() for a in arrays]
    out = np.array([float(fn(*row)) for row in zip(*flat)], dtype=float)
    return out.reshape(arrays[0].shape)


def _central(fn: Callable[..., Any], args: Sequence[np.ndarray], which: int, step: float) -> np.ndarray:
    x = np.asarray(args[which], dtype=float)
    h = step * np.maximum(1.0, np.abs(x))
    xp, xm = x + h, x - h
    hi = list(args)
    lo = list(args)
    hi[which], lo[which] = xp, xm
    return (_vcall(fn, *hi) - _vcall(fn, *lo)) / (xp - xm)


@dataclass(frozen=True)
class Lagrangian:
    """``L(t, u, v)`` with optional closed-form partials in ``u`` and ``v``.

    Missing partials are taken by central differences with step
    ``fd_step * max(1, |arg|)`` (default ``fd_step = cbrt(machine eps)``).
    With ``verify=True`` supplied partials are checked against central
    differences at construction.
    """

    L: Callable[..., Any]
    dL_du: Optional[Callable[..., Any]] = None
    dL_dv: Optional[Callable[..., Any]] = None
    fd_step: Optional[float] = None
    verify: bool = False

    def __post_init__(self) -> None:
        if self.fd_step is not None and not self.fd_step > 0:
            raise DomainError(f"fd_step must be positive, got {self.fd_step!r}")
        if self.verify:
            self._verify_partials()

    @classmethod
    def from_text(
        cls,
        src: str,
        dL_du: Optional[str] = None,
        dL_dv: Optional[str] = None,
        **kwargs: Any,
    ) -> "Lagrangian":
        names = ("t", "u", "v")
        return cls(
            parse(src, names),
            parse(dL_du, names) if dL_du else None,
            parse(dL_dv, names) if dL_dv else None,
            **kwargs,
        )

    @property
    def step(self) -> float:
        return float(self.fd_step if self.fd_step is not None else _CBRT_EPS)

    def __call__(self, t: Any, u: Any, v: Any) -> np.ndarray:
        return _vcall(self.L, t, u, v)

    def du(self, t: Any, u: Any, v: Any) -> np.ndarray:
        if self.dL_du is not None:
            return _vcall(self.dL_du, t, u, v)
        return _central(self.L, (t, u, v), 1, self.step)

    def dv(self, t: Any, u: Any, v: Any) -> np.ndarray:
        if self.dL_dv is not None:
            return _vcall(self.dL_dv, t, u, v)
        return _central(self.L, (t, u, v), 2, self.step)

    def _verify_partials(self) -> None:
        pts = qmc.Halton(d=3, scramble=False).random(65)[1:]
        t = 0.5 + 1.5 * pts[:, 0]
        u = -2.0 + 4.0 * pts[:, 1]
        v = -2.0 + 4.0 * pts[:, 2]
        for name, given, which in (("dL_du", self.dL_du, 1), ("dL_dv", self.dL_dv, 2)):
            if given is None:
                continue
            exact = _vcall(given, t, u, v)
            approx = _central(self.L, (t, u, v), which, self.step)
            bad = np.abs(exact - approx) > 1e-6 * np.maximum(1.0, np.abs(exact))
            if np.any(bad):
                i = int(np.argmax(bad))
                raise DomainError(
                    f"{name} disagrees with central differences at "
                    f"(t, u, v) = ({t[i]}, {u[i]}, {v[i]}): {exact[i]} vs {approx[i]}"
                )


@dataclass(frozen=True, eq=False)
class GridFunction:
    """Real function stored on a lattice, with its limits at 0 and 1."""

    lattice: PLattice
    values: np.ndarray
    value_at_0: float = math.nan
    value_at_1: float = math.nan

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=float)
        if values.shape != self.lattice.points.shape:
            raise LatticeMismatchError(
                f"{values.shape[0]} values for {len(self.lattice)} lattice points"
            )
        object.__setattr__(self, "values", values)

    @classmethod
    def from_function(cls, f: Callable[[float], float], lattice: PLattice) -> "GridFunction":
        """Sample ``f`` at every lattice point and at 0 and 1."""

        def at(t: float) -> float:
            try:
                with np.errstate(all="ignore"):
                    return float(f(t))
            except (ArithmeticError, ValueError):
                return math.nan

        values = np.array([at(float(t)) for t in lattice.points])
        return cls(lattice, values, at(0.0), at(1.0))

    def __call__(self, t: float) -> float:
        if t == 0.0:
            return self.value_at_0
        if t == 1.0:
            return self.value_at_1
        return float(self.values[self.lattice.index(t)])

    def succ_values(self) -> np.ndarray:
        """``y(t^p)`` at every stored point."""
        succ = self.lattice.succ
        return np.where(succ == ONE, self.value_at_1, self.values[np.maximum(succ, 0)])

    def dp(self) -> np.ndarray:
        """``D_p y`` at every stored point, along the stored successor."""
        with np.errstate(all="ignore"):
            return (self.succ_values() - self.values) / (
                self.lattice.succ_points() - self.lattice.points
            )

    def is_bounded(self) -> bool:
        return bool(
            np.all(np.isfinite(self.values))
            and np.all(np.isfinite(self.dp()))
            and math.isfinite(self.value_at_1)
        )

    def _check(self, other: "GridFunction") -> None:
        if not self.lattice.same_as(other.lattice):
            raise LatticeMismatchError("grid functions live on different lattices")

    def __add__(self, other: "GridFunction") -> "GridFunction":
        self._check(other)
        return GridFunction(
            self.lattice,
            self.values + other.values,
            self.value_at_0 + other.value_at_0,
            self.value_at_1 + other.value_at_1,
        )

    def __sub__(self, other: "GridFunction") -> "GridFunction":
        return self + (-1.0) * other

    def __mul__(self, c: float) -> "GridFunction":
        c = float(c)
        return GridFunction(self.lattice, c * self.values, c * self.value_at_0, c * self.value_at_1)

    __rmul__ = __mul__

    def __neg__(self) -> "GridFunction":
        return (-1.0) * self


@dataclass(frozen=True, eq=False)
class VariationalProblem:
    """Minimise ``int_a^b L(t, y(t^p), D_p y(t)) d_p t`` with ``y(a) = alpha``,
    ``y(b) = beta``."""

    lagrangian: Lagrangian
    a: float
    b: float
    alpha: float
    beta: float
    p: PParam
    policy: TruncationPolicy = DEFAULT_POLICY
    lattice: PLattice = field(init=False, repr=False)
    rule: QuadratureRule = field(init=False, repr=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "p", as_pparam(self.p))
        if not (0 < self.a < self.b) or not math.isfinite(self.b):
            raise DomainError(f"need 0 < a < b, got a={self.a!r}, b={self.b!r}")
        if not (math.isfinite(self.alpha) and math.isfinite(self.beta)):
            raise DomainError("boundary values must be finite")
        lat = quadrature_lattice(self.a, self.b, self.p, self.policy)
        object.__setattr__(self, "lattice", lat)
        object.__setattr__(self, "rule", lattice_rule(self.a, self.b, self.p, self.policy, lat))

    @property
    def common_index(self) -> Optional[int]:
        return common_lattice_index(self.a, self.b, self.p, tol=MERGE_RTOL, policy=self.policy)

    def inside(self) -> np.ndarray:
        """Mask of the stored points lying in ``[a, b]``."""
        pts = self.lattice.points
        return (pts >= self.a * (1 - MERGE_RTOL)) & (pts <= self.b * (1 + MERGE_RTOL))

    def grid(self, f: Callable[[float], float]) -> GridFunction:
        return GridFunction.from_function(f, self.lattice)

    def _coerce(self, y: Union[GridFunction, Callable[[float], float]]) -> GridFunction:
        if isinstance(y, GridFunction):
            if not y.lattice.same_as(self.lattice):
                raise LatticeMismatchError("grid function is not stored on the problem lattice")
            return y
        return self.grid(y)


@dataclass(frozen=True)
class Admissibility:
    ok: bool
    diagnostics: Mapping[str, Any]

    def __bool__(self) -> bool:
        return self.ok


def _endpoint_check(
    y: GridFunction, prob: VariationalProblem, ya: float, yb: float, tol: float
) -> Admissibility:
    y = prob._coerce(y)
    err_a = abs(y(prob.a) - ya)
    err_b = abs(y(prob.b) - yb)
    bounded = y.is_bounded()
    ok = bool(err_a <= tol and err_b <= tol and bounded)
    return Admissibility(ok, {"err_a": err_a, "err_b": err_b, "bounded": bounded})


def admissible(y: GridFunction, prob: VariationalProblem, tol: float = 1e-10) -> Admissibility:
    """Boundary conditions hold within ``tol`` and ``y``, ``D_p y`` are finite."""
    return _endpoint_check(y, prob, prob.alpha, prob.beta, tol)


def admissible_variation(eta: GridFunction, prob: VariationalProblem, tol: float = 1e-10) -> Admissibility:
    return _endpoint_check(eta, prob, 0.0, 0.0, tol)


def y_norm(y: GridFunction, prob: VariationalProblem) -> float:
    """``sup |y| + sup |D_p y|`` over the stored points within ``[a, b]``."""
    y = prob._coerce(y)
    inside = prob.inside()
    if not np.any(inside):
        return 0.0
    return float(np.max(np.abs(y.values[inside])) + np.max(np.abs(y.dp()[inside])))


def _integrand_args(prob: VariationalProblem, y: GridFunction) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    return prob.lattice.points, y.succ_values(), y.dp()


def functional_value(prob: VariationalProblem, y: GridFunction) -> float:
    y = prob._coerce(y)
    g = prob.lagrangian(*_integrand_args(prob, y))
    return prob.rule.apply(g)


def first_variation(prob: VariationalProblem, y: GridFunction, eta: GridFunction) -> float:
    """``int (dL/du * eta(t^p) + dL/dv * D_p eta(t)) d_p t``."""
    y = prob._coerce(y)
    eta = prob._coerce(eta)
    args = _integrand_args(prob, y)
    lag = prob.lagrangian
    with np.errstate(all="ignore"):
        g = lag.du(*args) * eta.succ_values() + lag.dv(*args) * eta.dp()
    return prob.rule.apply(g)


@dataclass(frozen=True)
class ELResidual:
    nodes: np.ndarray
    residual: np.ndarray

    @property
    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.residual))) if len(self.residual) else 0.0


def el_residual(prob: VariationalProblem, y: GridFunction) -> ELResidual:
    """``dL/du - D_p[dL/dv]`` at the stored points ``t`` of ``[a, b]`` whose
    successor ``t**p`` is stored and lies in ``(a, b]``.

    The outer difference reads ``D_p y`` at ``t**p``, which involves ``y``
    one step further along the orbit.  Requiring ``t**p > a`` keeps that
    inside the interval, so on a common orbit the residual at ``b**(p**j)``
    is the gradient of the reduced functional in ``y(b**(p**(j+1)))``
    divided by the node weight.  The last stored point of a ray heading to 1
    is skipped.
    """
    y = prob._coerce(y)
    lat = prob.lattice
    args = _integrand_args(prob, y)
    lag = prob.lagrangian
    A = lag.du(*args)
    B = lag.dv(*args)
    succ_pts = lat.succ_points()
    keep = np.flatnonzero(
        (lat.succ != ONE)
        & prob.inside()
        & (succ_pts > prob.a * (1 + MERGE_RTOL))
        & (succ_pts <= prob.b * (1 + MERGE_RTOL))
    )
    if len(keep) == 0:
        raise DomainError("lattice too shallow for the Euler-Lagrange residual")
    s = lat.succ[keep]
    with np.errstate(all="ignore"):
        r = A[keep] - (B[s] - B[keep]) / (lat.points[s] - lat.points[keep])
    return ELResidual(lat.points[keep], r)


@dataclass(frozen=True)
class ConvexityVerdict:
    """Outcome of a falsification search for joint convexity/concavity.

    A counterexample is ``(t, u, v, u1, v1)``.
    """

    convex: bool
    concave: bool
    n_samples: int
    convex_counterexample: Optional[tuple[float, ...]] = None
    concave_counterexample: Optional[tuple[float, ...]] = None


_BOX_KEYS = ("t", "u", "v", "u1", "v1")


def convexity_probe(
    lagrangian: Lagrangian,
    box: Mapping[str, tuple[float, float]],
    n_samples: int = 4096,
    tol: float = 1e-8,
    seed: int = 0,
) -> ConvexityVerdict:
    """Search the box for violations of the supporting-hyperplane inequality

    ``L(t, u + u1, v + v1) - L(t, u, v) >= dL/du * u1 + dL/dv * v1``

    (and its reverse for concavity), sampling a scrambled Halton sequence.
    The slack ``tol`` is relative to ``1 + |L|`` at both points.
    """
    if n_samples < 1:
        raise DomainError("n_samples must be at least 1")
    lo = np.array([float(box[k][0]) for k in _BOX_KEYS])
    hi = np.array([float(box[k][1]) for k in _BOX_KEYS])
    if not (np.all(np.isfinite(lo)) and np.all(np.isfinite(hi)) and np.all(lo <= hi)):
        raise DomainError("probe box must be finite with lo <= hi")
    sample = qmc.Halton(d=5, scramble=True, seed=seed).random(n_samples)
    t, u, v, u1, v1 = (lo + (hi - lo) * sample).T
    base = lagrangian(t, u, v)
    moved = lagrangian(t, u + u1, v + v1)
    support = lagrangian.du(t, u, v) * u1 + lagrangian.dv(t, u, v) * v1
    slack = tol * (1.0 + np.abs(base) + np.abs(moved))
    gap = moved - base - support

    def first(mask: np.ndarray) -> Optional[tuple[float, ...]]:
        hits = np.flatnonzero(mask)
        if len(hits) == 0:
            return None
        i = hits[0]
        return (float(t[i]), float(u[i]), float(v[i]), float(u1[i]), float(v1[i]))

    cx = first(~(gap >= -slack))
    cc = first(~(gap <= slack))
    return ConvexityVerdict(cx is None, cc is None, n_samples, cx, cc)


@dataclass(frozen=True)
class SolveResult:
    y: GridFunction
    nodes: np.ndarray
    values: np.ndarray
    functional: float
    grad_norm: float
    iterations: int
    convex: bool
    concave: bool
    label: str  # "minimizer" | "stationary-only"
    method: str
    verdict: ConvexityVerdict = field(repr=False)


class _Reduced:
    """The functional on a common orbit as a function of the interior values."""

    def __init__(self, prob: VariationalProblem, k: int) -> None:
        self.prob = prob
        self.t = np.array([x for _, (_, x) in zip(range(k + 1), iter_ray(prob.b, prob.p.p, "toward"))])
        self.w = self.t[:-1] - self.t[1:]
        self.dt = self.t[1:] - self.t[:-1]

    def full(self, inner: np.ndarray) -> np.ndarray:
        return np.concatenate(([self.prob.beta], inner, [self.prob.alpha]))

    def args(self, inner: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        y = self.full(inner)
        return self.t[:-1], y[1:], (y[1:] - y[:-1]) / self.dt

    def value(self, inner: np.ndarray) -> float:
        return math.fsum(self.w * self.prob.lagrangian(*self.args(inner)))

    def grad(self, inner: np.ndarray) -> np.ndarray:
        args = self.args(inner)
        A = self.prob.lagrangian.du(*args)
        B = self.prob.lagrangian.dv(*args)
        # d/dy_m of sum_j w_j L(t_j, y_{j+1}, v_j), with w_j = -(t_{j+1} - t_j)
        return self.w[:-1] * A[:-1] - B[:-1] + B[1:]

    def hessian(self, inner: np.ndarray) -> np.ndarray:
        n = len(inner)
        H = np.empty((n, n))
        for i in range(n):
            h = _CBRT_EPS * max(1.0, abs(inner[i]))
            up, dn = inner.copy(), inner.copy()
            up[i] += h
            dn[i] -= h
            H[:, i] = (self.grad(up) - self.grad(dn)) / (up[i] - dn[i])
        return 0.5 * (H + H.T)


def _coordinate_sweep(red: _Reduced, y: np.ndarray) -> np.ndarray:
    """One nonlinear Gauss-Seidel sweep: a secant step on each gradient component."""
    y = y.copy()
    for i in range(len(y)):
        g0 = red.grad(y)[i]
        h = _CBRT_EPS * max(1.0, abs(y[i]))
        z = y.copy()
        z[i] += h
        g1 = red.grad(z)[i]
        curv = (g1 - g0) / (z[i] - y[i])
        if curv != 0 and math.isfinite(curv):
            y[i] -= g0 / curv
        else:
            y[i] -= g0
    return y


def default_probe_box(prob: VariationalProblem) -> dict[str, tuple[float, float]]:
    """Probe box around the boundary data: ``u`` spans the boundary values
    widened by their gap (at least 1), ``v`` the mean slope widened by ten
    times its size (at least 1); increments cover the same widths."""
    span = max(1.0, abs(prob.beta - prob.alpha))
    slope = (prob.beta - prob.alpha) / (prob.b - prob.a)
    vspan = max(1.0, 10.0 * abs(slope))
    return {
        "t": (prob.a, prob.b),
        "u": (min(prob.alpha, prob.beta) - span, max(prob.alpha, prob.beta) + span),
        "v": (slope - vspan, slope + vspan),
        "u1": (-span, span),
        "v1": (-vspan, vspan),
    }


def solve_common_lattice(
    prob: VariationalProblem,
    *,
    gtol: float = 1e-10,
    max_iter: int = 500,
    probe_samples: int = 4096,
    seed: int = 0,
) -> SolveResult:
    """Stationary point of the functional when ``a = b**(p**k)``, ``1 < a < b``.

    The ``k - 1`` interior values are found by damped Newton iteration on the
    gradient with a central-difference Hessian, falling back to a coordinate
    sweep when the Newton step fails.  The result is labelled a minimizer
    only when the convexity probe finds no violation on a box around the
    boundary data; otherwise it is only known to be stationary.
    """
    if not prob.a > 1.0:
        raise DomainError("solve_common_lattice needs 1 < a < b")
    k = prob.common_index
    if k is None:
        raise DomainError(f"a={prob.a!r} is not on the orbit of b={prob.b!r}")
    red = _Reduced(prob, k)
    verdict = convexity_probe(prob.lagrangian, default_probe_box(prob), probe_samples, seed=seed)

    # start from values linear in the orbit index, not in t
    y = np.array([prob.beta + (prob.alpha - prob.beta) * j / k for j in range(1, k)])
    it = 0
    method = "none"
    g = red.grad(y) if k > 1 else np.zeros(0)
    gnorm = float(np.max(np.abs(g))) if k > 1 else 0.0
    while k > 1 and gnorm > gtol:
        if it >= max_iter:
            raise ConvergenceError(
                "Newton iteration did not reach the gradient tolerance",
                grad_norm=gnorm,
                iterations=it,
            )
        it += 1
        step_ok = False
        try:
            d = np.linalg.solve(red.hessian(y), -g)
            if np.all(np.isfinite(d)):
                lam = 1.0
                g2 = float(np.linalg.norm(g))
                while lam > 1e-10:
                    trial = y + lam * d
                    gt = red.grad(trial)
                    if np.linalg.norm(gt) < (1.0 - 1e-4 * lam) * g2:
                        y, g = trial, gt
                        step_ok = True
                        method = "newton" if method in ("none", "newton") else method
                        break
                    lam *= 0.5
        except np.linalg.LinAlgError:
            pass
        if not step_ok:
            y = _coordinate_sweep(red, y)
            g = red.grad(y)
            method = "coordinate"
        gnorm = float(np.max(np.abs(g)))
        if not math.isfinite(gnorm):
            raise ConvergenceError("gradient became non-finite", iterations=it)

    full = red.full(y)
    values = np.full(len(prob.lattice), prob.alpha)
    for tj, yj in zip(red.t, full):
        values[prob.lattice.index(tj)] = yj
    sol = GridFunction(prob.lattice, values, prob.alpha, prob.alpha)
    label = "minimizer" if verdict.convex else "stationary-only"
    return SolveResult(
        sol,
        red.t.copy(),
        full,
        red.value(y),
        gnorm,
        it,
        verdict.convex,
        verdict.concave,
        label,
        method,
        verdict,
    )


@dataclass(frozen=True)
class LemmaWitness:
    """A node where a single-node test function isolates ``w * f(node)**2``."""

    node: float
    j: int
    piece: str
    integral: float
    closed_form: float


def fundamental_lemma_probe(
    f: Callable[[float], float],
    a: float,
    b: float,
    p: Union[PParam, float],
    policy: Optional[TruncationPolicy] = None,
    tol: float = 0.0,
) -> Optional[LemmaWitness]:
    """Look for a node exposing ``f != 0`` through ``int_a^b f(t) h(t^p) d_p t``.

    For each quadrature node ``x`` (orbit of ``b`` first, then of ``a``, then
    the orbit of ``p``; ascending index), ``h`` is ``f(x)`` at ``x**p`` and 0
    elsewhere, so the integral reduces to the node's weight times ``f(x)**2``.
    Returns the first node where its magnitude exceeds ``tol``, else ``None``.
    """
    pp = as_pparam(p)
    policy = policy or DEFAULT_POLICY
    if not 0 < a < b:
        raise DomainError(f"need 0 < a < b, got a={a!r}, b={b!r}")
    lat = quadrature_lattice(a, b, pp, policy)
    rule = lattice_rule(a, b, pp, policy, lat)
    fvals = np.array([float(f(float(t))) for t in lat.points])
    # a node may carry several entries (overlapping rays); their weights add
    net: dict[int, list[float]] = {}
    for i, w in zip(rule.index, rule.weight):
        net.setdefault(int(i), []).append(float(w))

    def rank(e: int) -> tuple[int, int]:
        piece = rule.piece[e]
        if piece.endswith(f"({float(b)!r})"):
            group = 0
        elif piece.endswith(f"({float(a)!r})"):
            group = 1
        else:
            group = 2
        return group, e

    for e in sorted(range(len(rule.index)), key=rank):
        i = int(rule.index[e])
        s = int(lat.succ[i])
        if s == ONE:
            continue
        h = np.zeros(len(lat))
        h[s] = fvals[i]
        hs = np.where(lat.succ == ONE, 0.0, h[np.maximum(lat.succ, 0)])
        integral = rule.apply(fvals * hs)
        if abs(integral) > tol:
            closed = math.fsum(net[i]) * fvals[i] ** 2
            return LemmaWitness(float(lat.points[i]), int(rule.j[e]), rule.piece[e], integral, closed)
    return None
