"""Lattice integrals: which series each interval uses and what the terms
look like."""

from __future__ import annotations

import math

from pcalc import p_derivative, p_integral

p = 0.5
for a, b in ((1.5, 3.0), (0.2, 0.7), (0.0, 1.0), (0.4, 2.0)):
    r = p_integral(math.exp, a, b, p)
    print(f"[{a}, {b}]  case={r.case_tag:<8} value={r.value:.15f}  terms={r.terms_used}")

# integrating the difference quotient recovers the function
F = lambda t: t**3  # noqa: E731
val = p_integral(lambda t: p_derivative(F, t, p), 0.5, 2.0, p).value
print(f"\nint D_p t^3 over [0.5, 2] = {val:.13f}  (F(2) - F(0.5) = {F(2.0) - F(0.5)})")

# the first few terms of a general-case integral, per series
r = p_integral(math.sin, 0.4, 2.0, p)
print("\nfirst terms of int sin over [0.4, 2]:")
seen: dict[str, int] = {}
for t in r.terms:
    if seen.get(t.piece, 0) < 3:
        seen[t.piece] = seen.get(t.piece, 0) + 1
        print(f"  {t.piece:<14} j={t.j:<3} node={t.node:.6f} gap={t.gap:+.6f} term={t.term:+.3e}")
print("fsum of all terms equals the value:", math.fsum(t.term for t in r.terms) == r.value)
