"""Difference quotients along t -> t**p, and how they approach the
classical derivative as p -> 1."""

from __future__ import annotations

import math

from pcalc import p_derivative, p_derivative_boundary, p_derivative_n

# D_p t^2 = t^p + t, so at 16 with p = 1/2 the value is 4 + 16
print("D_p t^2 at 16, p=0.5:", p_derivative(lambda t: t * t, 16.0, 0.5))

# the second derivative at 16 is 7/6
print("D_p^2 t^2 at 16, p=0.5:", p_derivative_n(lambda t: t * t, 16.0, 0.5, 2), "vs", 7 / 6)

# 0 and 1 are fixed by the node map; the operator is extended by limits there
print("limit at 1 of D_p sin:", p_derivative_boundary(math.sin, 1, 0.5), "vs cos(1) =", math.cos(1.0))
print("limit at 0 of D_p exp:", p_derivative_boundary(math.exp, 0, 0.5))

print("\nD_p t^3 at 2 as p -> 1 (classical value 12):")
for m in range(1, 9):
    p = 1 - 2.0**-m
    print(f"  p = {p:.6f}  D_p = {p_derivative(lambda t: t**3, 2.0, p):.10f}")
