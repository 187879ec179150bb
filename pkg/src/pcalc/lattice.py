"""Point sets generated by the map ``t -> t**p``.

For ``0 < p < 1`` the orbit ``t, t**p, t**(p**2), ...`` of any ``t > 0``
converges to the fixed point 1; the backward orbit ``t**(p**-j)`` runs to 0
when ``t < 1`` and to infinity when ``t > 1``.  Every operator in the package
samples functions on such orbits.

Ray points are computed as ``base ** e_j`` with the exponent ``e_j``
accumulated multiplicatively (``e_{j+1} = e_j * p``), never by re-powering
the previous point.  The same generator is shared with :mod:`pcalc.integrate`
so both produce bit-identical nodes.
"""

from __future__ import annotations

import math
from collections.abc import Iterator, Sequence
from dataclasses import dataclass, field
from typing import Literal, Optional, Union

import numpy as np

from .errors import DomainError, UnresolvedNodeError

__all__ = [
    "PParam",
    "TruncationPolicy",
    "LatticeRay",
    "PLattice",
    "as_pparam",
    "iter_ray",
    "ray",
    "union_lattice",
    "quadrature_lattice",
    "common_lattice_index",
    "ONE",
    "MERGE_RTOL",
]

Direction = Literal["toward", "away"]

#: successor marker for the last stored point of a ray heading to 1
ONE = -1

#: relative tolerance for identifying points produced by different rays;
#: eps-relative merging would fuse genuinely distinct points near 1
MERGE_RTOL = 16 * np.finfo(float).eps


@dataclass(frozen=True)
class PParam:
    """Deformation parameter ``p`` in the open interval (0, 1)."""

    p: float

    def __post_init__(self) -> None:
        p = float(self.p)
        if not (0.0 < p < 1.0):
            raise DomainError(f"p must lie in (0, 1), got {self.p!r}")
        object.__setattr__(self, "p", p)

    def __float__(self) -> float:
        return self.p


def as_pparam(p: Union[PParam, float]) -> PParam:
    return p if isinstance(p, PParam) else PParam(p)


@dataclass(frozen=True)
class TruncationPolicy:
    """Where the infinite lattice series are cut.

    ``eps`` is the tail tolerance, ``j_max`` caps the number of terms per
    ray and ``j_min`` is the number of terms taken before any tail test.
    """

    eps: float = 1e-12
    j_max: int = 10_000
    j_min: int = 8

    def __post_init__(self) -> None:
        if not (self.eps > 0 and math.isfinite(self.eps)):
            raise DomainError(f"eps must be positive, got {self.eps!r}")
        if self.j_min < 0 or self.j_max < 1 or self.j_min > self.j_max:
            raise DomainError(
                f"need 0 <= j_min <= j_max and j_max >= 1, got {self.j_min}, {self.j_max}"
            )


DEFAULT_POLICY = TruncationPolicy()


def iter_ray(base: float, p: float, direction: Direction = "toward") -> Iterator[tuple[float, float]]:
    """Yield ``(exponent, point)`` pairs ``(p**(+-j), base**(p**(+-j)))``, j = 0, 1, ..."""
    e = 1.0
    while True:
        yield e, base**e
        if direction == "toward":
            e *= p
        else:
            e /= p


@dataclass(frozen=True)
class LatticeRay:
    base: float
    p: PParam
    direction: Direction
    exponents: np.ndarray = field(repr=False)
    points: np.ndarray = field(repr=False)

    @property
    def truncation_level(self) -> int:
        return len(self.points) - 1

    def __len__(self) -> int:
        return len(self.points)


def ray(
    base: float,
    p: Union[PParam, float],
    direction: Direction = "toward",
    policy: Optional[TruncationPolicy] = None,
    upper: Optional[float] = None,
) -> LatticeRay:
    """Truncated orbit of ``base`` under ``t -> t**p`` (or its inverse).

    A toward-1 ray stops at the first index ``J >= j_min`` with
    ``|point[J] - 1| < eps * max(1, base)``; an away ray with ``base < 1``
    stops likewise against 0.  An away ray with ``base > 1`` is unbounded
    and needs ``upper``: it stops before the first point above it.
    """
    pp = as_pparam(p)
    policy = policy or DEFAULT_POLICY
    base = float(base)
    if not base > 0 or not math.isfinite(base):
        raise DomainError(f"ray base must be a positive real, got {base!r}")
    if direction not in ("toward", "away"):
        raise DomainError(f"unknown ray direction {direction!r}")
    if base == 1.0:
        return LatticeRay(base, pp, direction, np.array([1.0]), np.array([1.0]))
    if direction == "away" and base > 1.0 and upper is None:
        raise DomainError("an away ray with base > 1 needs an upper cutoff")

    limit = 1.0 if direction == "toward" else 0.0
    tol = policy.eps * max(1.0, base)
    exps: list[float] = []
    pts: list[float] = []
    for j, (e, x) in enumerate(iter_ray(base, pp.p, direction)):
        if upper is not None and direction == "away" and base > 1.0:
            if x > upper or not math.isfinite(x):
                break
            exps.append(e)
            pts.append(x)
            if j >= policy.j_max:
                break
            continue
        if x == 0.0:
            # underflow: the previous point already sits at the accumulation point
            break
        exps.append(e)
        pts.append(x)
        if (j >= policy.j_min and abs(x - limit) < tol) or j >= policy.j_max:
            break
    return LatticeRay(base, pp, direction, np.array(exps), np.array(pts))


@dataclass(frozen=True)
class PLattice:
    """Sorted, deduplicated point set with its successor structure.

    ``succ[i]`` is the index of ``points[i] ** p`` or :data:`ONE` when that
    power is the accumulation point 1 (the last stored point of a ray heading
    to 1).  The accumulation points 0 and 1 are never stored as points.
    """

    points: np.ndarray
    succ: np.ndarray
    p: PParam
    policy: TruncationPolicy = DEFAULT_POLICY

    def __len__(self) -> int:
        return len(self.points)

    def __contains__(self, t: float) -> bool:
        try:
            self.index(t)
        except UnresolvedNodeError:
            return False
        return True

    def index(self, t: float) -> int:
        """Index of the stored point equal to ``t`` up to :data:`MERGE_RTOL`."""
        pts = self.points
        i = int(np.searchsorted(pts, t))
        best = None
        for k in (i - 1, i):
            if 0 <= k < len(pts) and abs(pts[k] - t) <= MERGE_RTOL * abs(t):
                if best is None or abs(pts[k] - t) < abs(pts[best] - t):
                    best = k
        if best is None:
            raise UnresolvedNodeError(f"{t!r} is not a stored lattice point")
        return best

    def succ_points(self) -> np.ndarray:
        """``points[i] ** p`` as stored, with 1.0 where the successor is 1."""
        return np.where(self.succ == ONE, 1.0, self.points[np.maximum(self.succ, 0)])

    def same_as(self, other: "PLattice") -> bool:
        return self is other or (
            self.p == other.p
            and len(self.points) == len(other.points)
            and bool(np.array_equal(self.points, other.points))
            and bool(np.array_equal(self.succ, other.succ))
        )


def _chain(base: float, pp: PParam, policy: TruncationPolicy, with_away: bool) -> list[float]:
    """Points of ``[base]_p`` in succession order, optionally preceded by the
    backward orbit of ``base < 1`` down toward 0."""
    chain = list(ray(base, pp, "toward", policy).points)
    if with_away and base < 1.0:
        away = ray(base, pp, "away", policy).points
        chain = list(away[:0:-1]) + chain
    return chain


def _merge(chains: Sequence[Sequence[float]], pp: PParam, policy: TruncationPolicy) -> PLattice:
    raw: list[float] = []
    raw_succ: list[int] = []
    for chain in chains:
        if len(chain) == 1 and chain[0] == 1.0:
            continue
        start = len(raw)
        raw.extend(chain)
        raw_succ.extend(range(start + 1, start + len(chain)))
        raw_succ.append(ONE)
    if not raw:
        return PLattice(np.empty(0), np.empty(0, dtype=int), pp, policy)

    values = np.array(raw)
    order = np.argsort(values, kind="stable")
    group = np.empty(len(raw), dtype=int)
    reps: list[int] = []
    for pos, r in enumerate(order):
        if reps and abs(values[r] - values[reps[-1]]) <= MERGE_RTOL * abs(values[r]):
            group[r] = len(reps) - 1
            if r < reps[-1]:
                reps[-1] = r
        else:
            group[r] = len(reps)
            reps.append(r)

    succ = np.full(len(reps), ONE, dtype=int)
    for r, s in enumerate(raw_succ):
        if s != ONE:
            succ[group[r]] = group[s]
    points = values[reps]
    return PLattice(points, succ, pp, policy)


def union_lattice(
    a: float,
    b: float,
    p: Union[PParam, float],
    policy: Optional[TruncationPolicy] = None,
) -> PLattice:
    """``[a]_p`` united with ``[b]_p``, truncated per ``policy``."""
    pp = as_pparam(p)
    policy = policy or DEFAULT_POLICY
    if not (0 < a <= b):
        raise DomainError(f"union_lattice needs 0 < a <= b, got a={a!r}, b={b!r}")
    chains = [_chain(b, pp, policy, False)]
    if a != b:
        chains.append(_chain(a, pp, policy, False))
    return _merge(chains, pp, policy)


def quadrature_lattice(
    a: float,
    b: float,
    p: Union[PParam, float],
    policy: Optional[TruncationPolicy] = None,
) -> PLattice:
    """Every point a ``p``-integral over ``[a, b]`` samples, plus successors.

    Contains ``[a, b]_p``; endpoints below 1 contribute their backward orbit
    toward 0, and an interval straddling 1 adds the bi-infinite orbit of
    ``p`` itself used by the integral over (0, 1).
    """
    pp = as_pparam(p)
    policy = policy or DEFAULT_POLICY
    if not (0 < a <= b):
        raise DomainError(f"quadrature_lattice needs 0 < a <= b, got a={a!r}, b={b!r}")
    k = common_lattice_index(a, b, pp, tol=MERGE_RTOL, policy=policy)
    chains = []
    for c in (b, a):
        chains.append(_chain(c, pp, policy, with_away=(c < 1.0 and k is None)))
    if a < 1.0 <= b or (a < 1.0 and b == 1.0):
        chains.append(_chain(pp.p, pp, policy, with_away=True))
    return _merge(chains, pp, policy)


def common_lattice_index(
    a: float,
    b: float,
    p: Union[PParam, float],
    tol: float = 1e-12,
    policy: Optional[TruncationPolicy] = None,
) -> Optional[int]:
    """Smallest ``k >= 1`` with ``a == b**(p**k)`` (``1 < a < b``) or
    ``a == b**(p**-k)`` (``0 < a < b < 1``) to relative tolerance ``tol``.

    Returns ``None`` when no such ``k <= j_max`` exists, including ``a == b``
    and intervals containing 1.
    """
    pp = as_pparam(p)
    policy = policy or DEFAULT_POLICY
    if not (0 < a < b):
        return None
    if a > 1.0:
        direction: Direction = "toward"
    elif b < 1.0:
        direction = "away"
    else:
        return None
    for k, (_, x) in enumerate(iter_ray(b, pp.p, direction)):
        if k == 0:
            continue
        if abs(a - x) <= tol * a:
            return k
        # both orbits move monotonically away from b; once past a, give up
        if x < a * (1 - tol) or k >= policy.j_max or x == 0.0:
            return None
    return None  # pragma: no cover
