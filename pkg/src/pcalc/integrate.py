"""Definite ``p``-integrals as truncated series on lattice orbits.

Three base series are used, each over the orbit of a point ``c``:

* toward 1, ``c > 1``:  ``sum_j (c^{p^j} - c^{p^{j+1}}) f(c^{p^j})``  (integral over (1, c])
* toward 1, ``c < 1``:  the negated sum, the integral over [c, 1)
* toward 0, ``c < 1``:  ``sum_j (c^{p^-j} - c^{p^-j-1}) f(c^{p^-j-1})``  (integral over (0, c])

and the integral over (0, 1) combines the two series of the point ``p``.  A
general integral is the difference of integrals from 0 (or from 1 when both
endpoints exceed 1).  When the endpoints lie on a common orbit the infinite
tails cancel exactly and the integral is a finite sum.

Series are truncated by a tail test on the terms: after ``j_min`` terms, the
first term whose geometric tail estimate ``|t_J| / (1 - r)`` (``r`` the ratio
of the last two term magnitudes) drops below ``eps`` is omitted and the sum
stops; an integral made of several series splits ``eps`` evenly among them.
Partial sums are accumulated with :func:`math.fsum`.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable, NamedTuple, Optional, Sequence, Union

import numpy as np

from .deriv import p_derivative
from .errors import DivergenceError, DomainError, NonFiniteValueError, TruncationError
from .lattice import (
    DEFAULT_POLICY,
    MERGE_RTOL,
    PLattice,
    PParam,
    TruncationPolicy,
    as_pparam,
    common_lattice_index,
    iter_ray,
    quadrature_lattice,
    ray,
)

__all__ = [
    "Term",
    "IntegralResult",
    "QuadratureRule",
    "integral_from_1",
    "integral_to_1",
    "integral_from_0",
    "integral_zero_one",
    "p_integral",
    "p_integral_n",
    "lattice_rule",
    "ftc_residual",
    "by_parts_residual",
]

RealFunction = Callable[[float], float]


class Term(NamedTuple):
    piece: str
    j: int
    node: float
    gap: float  # signed weight of the node
    term: float


@dataclass(frozen=True)
class IntegralResult:
    value: float
    terms_used: int
    tail_bound: float
    case_tag: str
    terms: tuple[Term, ...] = ()

    def __float__(self) -> float:
        return self.value


@dataclass(frozen=True)
class _Piece:
    kind: str  # "toward" | "away"
    base: float
    sign: int
    k: Optional[int] = None  # number of terms when the sum is finite

    @property
    def label(self) -> str:
        return f"{'+' if self.sign > 0 else '-'}{self.kind}({self.base!r})"


def _finite_or_raise(term: float, node: float, rising: int, j: int) -> None:
    if math.isfinite(term):
        return
    if rising >= 3:
        raise DivergenceError(
            "series diverges: term magnitudes grow without bound",
            node=node,
            index=j,
        )
    raise NonFiniteValueError("integrand is not finite at a lattice node", node=node, index=j)


def _series(
    f: RealFunction, piece: _Piece, p: float, policy: TruncationPolicy, eps: float
) -> tuple[list[Term], float]:
    """Terms of one base series and the magnitude of its first omitted term."""
    toward = piece.kind == "toward"
    rows: list[Term] = []
    it = iter_ray(piece.base, p, "toward" if toward else "away")
    _, x_prev = next(it)
    prev_mag = -1.0
    rising = 0
    recent: list[float] = []
    j = 0
    while True:
        if piece.k is not None and j >= piece.k:
            return rows, 0.0
        if j >= policy.j_max:
            raise TruncationError(
                "term cap reached before the series tail converged",
                j_max=policy.j_max,
                last_term=rows[-1].term if rows else None,
            )
        _, x_next = next(it)
        node = x_prev if toward else x_next
        gap = piece.sign * (x_prev - x_next)
        term = gap * float(f(node))
        mag = abs(term)
        _finite_or_raise(term, node, rising, j)
        if piece.k is None and j >= policy.j_min:
            if prev_mag > 0:
                r = mag / prev_mag
            else:
                r = 0.0 if mag == 0.0 else math.inf
            tail = mag / (1.0 - r) if r < 1.0 else math.inf
            if tail < eps:
                return rows, mag
        rows.append(Term(piece.label, j, node, gap, term))
        rising = rising + 1 if mag > prev_mag else 0
        recent.append(mag)
        if len(recent) > 16:
            recent.pop(0)
        if (
            piece.k is None
            and j >= policy.j_max // 2
            and len(recent) == 16
            and all(u <= v for u, v in zip(recent, recent[1:]))
            and recent[0] > policy.eps
        ):
            raise DivergenceError(
                "series diverges: last 16 term magnitudes are non-decreasing",
                index=j,
                node=node,
            )
        prev_mag = mag
        x_prev = x_next
        j += 1


def _sum_pieces(
    f: RealFunction,
    pieces: Sequence[_Piece],
    p: float,
    policy: TruncationPolicy,
    case_tag: str,
) -> IntegralResult:
    rows: list[Term] = []
    tail = 0.0
    pieces = [q for q in pieces if q.base != 1.0]
    # the tail budget is shared by the infinite series
    eps = policy.eps / max(1, sum(q.k is None for q in pieces))
    for piece in pieces:
        r, t = _series(f, piece, p, policy, eps)
        rows.extend(r)
        tail += t
    value = math.fsum(row.term for row in rows)
    return IntegralResult(value, len(rows), tail, case_tag, tuple(rows))


def _zero_one_pieces(p: float) -> list[_Piece]:
    return [_Piece("away", p, +1), _Piece("toward", p, -1)]


def _from_zero_pieces(x: float, p: float) -> list[_Piece]:
    if x == 0.0:
        return []
    if x < 1.0:
        return [_Piece("away", x, +1)]
    pieces = _zero_one_pieces(p)
    if x > 1.0:
        pieces.append(_Piece("toward", x, +1))
    return pieces


def _negate(pieces: Sequence[_Piece]) -> list[_Piece]:
    return [_Piece(q.kind, q.base, -q.sign, q.k) for q in pieces]


def _pieces(a: float, b: float, p: float, policy: TruncationPolicy) -> tuple[list[_Piece], str]:
    """Series decomposition of the integral over [a, b], ``0 <= a < b``."""
    k = common_lattice_index(a, b, p, tol=MERGE_RTOL, policy=policy) if a > 0 else None
    if a >= 1.0:
        if k is not None:
            return [_Piece("toward", b, +1, k)], "from1"
        return [_Piece("toward", b, +1), _Piece("toward", a, -1)], "from1"
    if b < 1.0:
        if k is not None:
            return [_Piece("away", b, +1, k)], "from0"
        pieces = [_Piece("away", b, +1)]
        if a > 0.0:
            pieces.append(_Piece("away", a, -1))
        return pieces, "from0"
    return _from_zero_pieces(b, p) + _negate(_from_zero_pieces(a, p)), "general"


def integral_from_1(
    f: RealFunction,
    b: float,
    p: Union[PParam, float],
    policy: Optional[TruncationPolicy] = None,
) -> IntegralResult:
    """Integral of ``f`` over ``(1, b]`` for ``b >= 1``."""
    pp = as_pparam(p)
    if not b >= 1.0:
        raise DomainError(f"integral_from_1 needs b >= 1, got {b!r}")
    return _sum_pieces(f, [_Piece("toward", float(b), +1)], pp.p, policy or DEFAULT_POLICY, "from1")


def integral_to_1(
    f: RealFunction,
    b: float,
    p: Union[PParam, float],
    policy: Optional[TruncationPolicy] = None,
) -> IntegralResult:
    """Integral of ``f`` over ``[b, 1)`` for ``0 < b < 1``."""
    pp = as_pparam(p)
    if not 0.0 < b < 1.0:
        raise DomainError(f"integral_to_1 needs 0 < b < 1, got {b!r}")
    return _sum_pieces(f, [_Piece("toward", float(b), -1)], pp.p, policy or DEFAULT_POLICY, "to1")


def integral_from_0(
    f: RealFunction,
    b: float,
    p: Union[PParam, float],
    policy: Optional[TruncationPolicy] = None,
) -> IntegralResult:
    """Integral of ``f`` over ``(0, b]`` for ``0 <= b < 1``."""
    pp = as_pparam(p)
    if not 0.0 <= b < 1.0:
        raise DomainError(f"integral_from_0 needs 0 <= b < 1, got {b!r}")
    return _sum_pieces(f, _from_zero_pieces(float(b), pp.p), pp.p, policy or DEFAULT_POLICY, "from0")


def integral_zero_one(
    f: RealFunction,
    p: Union[PParam, float],
    policy: Optional[TruncationPolicy] = None,
) -> IntegralResult:
    """Integral over (0, 1): the bi-infinite series on the orbit of ``p``.

    Terms with orbit index ``j < 0`` (nodes toward 0) are reported with that
    negative index.
    """
    pp = as_pparam(p)
    res = _sum_pieces(f, _zero_one_pieces(pp.p), pp.p, policy or DEFAULT_POLICY, "zero-one")
    rows = tuple(
        t._replace(j=-(t.j + 1)) if t.piece.startswith("+away") else t
        for t in res.terms
    )
    return IntegralResult(res.value, res.terms_used, res.tail_bound, "zero-one", rows)


def p_integral(
    f: RealFunction,
    a: float,
    b: float,
    p: Union[PParam, float],
    policy: Optional[TruncationPolicy] = None,
) -> IntegralResult:
    """Definite ``p``-integral of ``f`` over ``[a, b]`` for ``a, b >= 0``.

    ``a > b`` returns the negated integral over ``[b, a]`` (bit-exactly).
    """
    pp = as_pparam(p)
    policy = policy or DEFAULT_POLICY
    a, b = float(a), float(b)
    if not (a >= 0.0 and b >= 0.0) or not (math.isfinite(a) and math.isfinite(b)):
        raise DomainError(f"p_integral needs finite a, b >= 0, got a={a!r}, b={b!r}")
    if a == b:
        return IntegralResult(0.0, 0, 0.0, "general")
    if a > b:
        res = p_integral(f, b, a, pp, policy)
        rows = tuple(t._replace(gap=-t.gap, term=-t.term) for t in res.terms)
        return IntegralResult(-res.value, res.terms_used, res.tail_bound, res.case_tag, rows)
    pieces, tag = _pieces(a, b, pp.p, policy)
    return _sum_pieces(f, pieces, pp.p, policy, tag)


def p_integral_n(
    f: RealFunction,
    b: float,
    p: Union[PParam, float],
    policy: Optional[TruncationPolicy] = None,
    n: int = 1,
) -> float:
    """``n``-fold iterated integral from 0, evaluated at ``b``.

    Inner iterates are recomputed at every node of the outer series, so the
    cost grows geometrically in ``n``.
    """
    pp = as_pparam(p)
    policy = policy or DEFAULT_POLICY
    if n < 0:
        raise DomainError(f"integral order must be non-negative, got {n}")
    if n > 3:
        warnings.warn(
            f"iterated p-integral of order {n} re-evaluates nested series at every node",
            RuntimeWarning,
            stacklevel=2,
        )
    if n == 0:
        return float(f(b))

    def inner(x: float) -> float:
        return p_integral_n(f, x, pp, policy, n - 1)

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        return p_integral(inner, 0.0, b, pp, policy).value


@dataclass(frozen=True)
class QuadratureRule:
    """Signed weights on the points of a lattice reproducing the integral
    over ``[a, b]`` with the lattice's own truncation.

    The last stored point of a ray heading to 1 takes 1 as its successor, so
    the weights of each such ray telescope exactly to its span.
    """

    lattice: PLattice
    index: np.ndarray
    weight: np.ndarray
    piece: tuple[str, ...]
    j: np.ndarray

    def apply(self, values: np.ndarray) -> float:
        """Integral of the lattice function with the given point values."""
        values = np.asarray(values, dtype=float)
        return math.fsum(self.weight * values[self.index])

    def terms(self, values: np.ndarray) -> np.ndarray:
        return self.weight * np.asarray(values, dtype=float)[self.index]


def lattice_rule(
    a: float,
    b: float,
    p: Union[PParam, float],
    policy: Optional[TruncationPolicy] = None,
    lattice: Optional[PLattice] = None,
) -> QuadratureRule:
    """Quadrature rule of the integral over ``[a, b]``, ``0 < a <= b``, on
    :func:`~pcalc.lattice.quadrature_lattice` (or the given superset)."""
    pp = as_pparam(p)
    policy = policy or DEFAULT_POLICY
    if lattice is None:
        lattice = quadrature_lattice(a, b, pp, policy)
    idx: list[int] = []
    wts: list[float] = []
    labels: list[str] = []
    js: list[int] = []
    pieces = [] if a == b else _pieces(float(a), float(b), pp.p, policy)[0]
    for piece in pieces:
        if piece.base == 1.0:
            continue
        toward = piece.kind == "toward"
        if piece.k is not None:
            pts = [x for _, (_, x) in zip(range(piece.k + 1), iter_ray(piece.base, pp.p, piece.kind))]
        else:
            pts = list(ray(piece.base, pp, piece.kind, policy).points)
            if toward:
                pts.append(1.0)
        for j in range(len(pts) - 1):
            node = pts[j] if toward else pts[j + 1]
            idx.append(lattice.index(node))
            wts.append(piece.sign * (pts[j] - pts[j + 1]))
            labels.append(piece.label)
            js.append(j)
    return QuadratureRule(
        lattice,
        np.array(idx, dtype=int),
        np.array(wts, dtype=float),
        tuple(labels),
        np.array(js, dtype=int),
    )


def ftc_residual(
    F: RealFunction,
    a: float,
    b: float,
    p: Union[PParam, float],
    policy: Optional[TruncationPolicy] = None,
) -> float:
    """``|integral of D_p F over [a, b] - (F(b) - F(a))|``."""
    pp = as_pparam(p)
    lhs = p_integral(lambda t: p_derivative(F, t, pp), a, b, pp, policy).value
    return abs(lhs - (float(F(b)) - float(F(a))))


def by_parts_residual(
    f: RealFunction,
    g: RealFunction,
    a: float,
    b: float,
    p: Union[PParam, float],
    policy: Optional[TruncationPolicy] = None,
) -> float:
    """Residual of ``p``-integration by parts on ``[a, b]``:

    ``| int f D_p g - (f(b) g(b) - f(a) g(a) - int g(t^p) D_p f(t)) |``
    """
    pp = as_pparam(p)
    lhs = p_integral(lambda t: float(f(t)) * p_derivative(g, t, pp), a, b, pp, policy).value
    rest = p_integral(
        lambda t: float(g(t**pp.p)) * p_derivative(f, t, pp), a, b, pp, policy
    ).value
    rhs = float(f(b)) * float(g(b)) - float(f(a)) * float(g(a)) - rest
    return abs(lhs - rhs)
