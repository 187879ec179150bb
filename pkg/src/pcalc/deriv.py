"""The ``p``-difference operator and its limits at 0 and 1.

``D_p f(x) = (f(x**p) - f(x)) / (x**p - x)`` for ``x > 0``, ``x != 1``.  At the
fixed points of ``x -> x**p`` the operator is only defined as a limit, which
:func:`p_derivative_boundary` evaluates numerically.
"""

from __future__ import annotations

from typing import Callable, Literal, Union

from .errors import ConvergenceError, DomainError
from .lattice import PParam, as_pparam

__all__ = [
    "RealFunction",
    "p_derivative",
    "p_derivative_boundary",
    "p_derivative_n",
    "NEAR_ONE",
]

RealFunction = Callable[[float], float]

#: below this distance from 1 the difference quotient is replaced by its limit
NEAR_ONE = 1e-8

_REL_TOL = 1e-9
_MAX_STEPS = 40


def _eval(f: RealFunction, x: float) -> float:
    return float(f(x))


def p_derivative(f: RealFunction, x: float, p: Union[PParam, float]) -> float:
    """``(f(x**p) - f(x)) / (x**p - x)``.

    ``x == 0`` and ``|x - 1| < NEAR_ONE`` are delegated to
    :func:`p_derivative_boundary`.
    """
    pp = as_pparam(p)
    x = float(x)
    if x == 0.0:
        return p_derivative_boundary(f, 0, pp)
    if not x > 0:
        raise DomainError(f"p_derivative needs x >= 0, got {x!r}")
    if abs(x - 1.0) < NEAR_ONE:
        return p_derivative_boundary(f, 1, pp)
    xp = x**pp.p
    return (_eval(f, xp) - _eval(f, x)) / (xp - x)


def _richardson(d0: float, d1: float, d2: float) -> float:
    # quadratic extrapolation to h = 0 from steps h, h/2, h/4
    return (8.0 * d2 - 6.0 * d1 + d0) / 3.0


def _agree(u: float, v: float) -> bool:
    return abs(u - v) <= _REL_TOL * max(1.0, abs(u), abs(v))


def _limit_at_one(f: RealFunction, pp: PParam, h0: float, side: int) -> tuple[float, list[float]]:
    d: list[float] = []
    ext: list[float] = []
    h = h0
    for _ in range(_MAX_STEPS):
        x = 1.0 + side * h
        xp = x**pp.p
        d.append((_eval(f, xp) - _eval(f, x)) / (xp - x))
        if len(d) >= 3:
            ext.append(_richardson(d[-3], d[-2], d[-1]))
            if len(ext) >= 2 and _agree(ext[-1], ext[-2]):
                return ext[-1], ext
        h *= 0.5
    raise ConvergenceError(
        "p-derivative limit at 1 did not converge",
        last_extrapolants=ext[-2:],
    )


def _zero_exponents(p: float, count: int = 3) -> list[float]:
    # With s = x**p the quotient is the divided difference f[x, s], so for f
    # smooth at 0 its error is a series in s**i * x**j = s**(i + j/p),
    # i + j >= 1.  Returns the smallest distinct exponents.
    found: list[float] = []
    for e in sorted(i + j / p for i in range(count + 1) for j in range(count + 1) if i + j >= 1):
        if not found or e > found[-1] * (1 + 1e-9):
            found.append(e)
    return found[:count]


def _limit_at_zero(f: RealFunction, pp: PParam, h0: float) -> float:
    # Sample at s = x**p = h0 / 2**k and remove the leading error terms by
    # Richardson extrapolation with the exponents above.  A geometric
    # sequence in x itself would leave an error decaying like x**p.
    gammas = _zero_exponents(pp.p)
    prev_row: list[float] = []
    ext: list[float] = []
    s = h0
    for _ in range(_MAX_STEPS):
        x = s ** (1.0 / pp.p)
        row = [(_eval(f, s) - _eval(f, x)) / (s - x)]
        for m in range(min(len(prev_row), len(gammas))):
            r = 2.0 ** gammas[m]
            row.append((r * row[m] - prev_row[m]) / (r - 1.0))
        prev_row = row
        if len(row) > len(gammas):
            ext.append(row[-1])
            if len(ext) >= 2 and _agree(ext[-1], ext[-2]):
                return ext[-1]
        s *= 0.5
    raise ConvergenceError(
        "p-derivative limit at 0 did not converge", last_extrapolants=ext[-2:]
    )


def p_derivative_boundary(
    f: RealFunction,
    at: Literal[0, 1],
    p: Union[PParam, float],
    h0: float = 0.1,
) -> float:
    """Numerical limit of :func:`p_derivative` as ``x -> 0+`` or ``x -> 1``.

    At 1 the quotient is sampled at ``1 +- h0 / 2**k`` on both sides and each
    side is Richardson-extrapolated over its last three samples; the sides
    must agree.  At 0 the samples are taken where ``x**p = h0 / 2**k`` and
    extrapolated over the exponents of the error in ``x**p``.  Successive extrapolants must agree to 1e-9 relative within
    40 halvings, otherwise :class:`~pcalc.errors.ConvergenceError` is raised.
    """
    pp = as_pparam(p)
    if not 0 < h0 < 1:
        raise DomainError(f"h0 must lie in (0, 1), got {h0!r}")
    if at == 0:
        return _limit_at_zero(f, pp, h0)
    if at != 1:
        raise DomainError(f"boundary point must be 0 or 1, got {at!r}")
    right, rext = _limit_at_one(f, pp, h0, +1)
    left, lext = _limit_at_one(f, pp, h0, -1)
    if not _agree(left, right):
        raise ConvergenceError(
            "one-sided p-derivative limits at 1 differ",
            left=left,
            right=right,
            last_extrapolants=[lext[-1], rext[-1]],
        )
    return 0.5 * (left + right)


def p_derivative_n(
    f: RealFunction, x: float, p: Union[PParam, float], n: int
) -> float:
    """``n``-fold ``p``-derivative at ``x`` from the ``n + 1`` nodes ``x**(p**j)``."""
    pp = as_pparam(p)
    if n < 0:
        raise DomainError(f"derivative order must be non-negative, got {n}")
    x = float(x)
    if n == 0:
        return _eval(f, x)
    if n == 1:
        return p_derivative(f, x, pp)
    if x == 0.0 or abs(x - 1.0) < NEAR_ONE:
        return p_derivative(lambda s: p_derivative_n(f, s, pp, n - 1), x, pp)
    if not x > 0:
        raise DomainError(f"p_derivative_n needs x >= 0, got {x!r}")

    nodes = [x ** (pp.p**j) for j in range(n + 1)]
    if any(abs(t - 1.0) < NEAR_ONE for t in nodes[1:]):
        return p_derivative(lambda s: p_derivative_n(f, s, pp, n - 1), x, pp)
    # divided-difference table along the orbit
    table = [_eval(f, t) for t in nodes]
    for level in range(1, n + 1):
        table = [
            (table[j + 1] - table[j]) / (nodes[j + 1] - nodes[j])
            for j in range(n + 1 - level)
        ]
    return table[0]

