"""The free-particle problem L = t + v^2/2 on a common orbit of 2: the
stationary path is y(t) = t, and convexity makes it a minimizer."""

from __future__ import annotations

import numpy as np

from pcalc import (
    Lagrangian,
    VariationalProblem,
    el_residual,
    first_variation,
    functional_value,
    solve_common_lattice,
)

p, b = 0.5, 2.0
a = b ** (p**4)
lag = Lagrangian.from_text("t + v^2/2", "0", "v")
prob = VariationalProblem(lag, a, b, a, b, p)

sol = solve_common_lattice(prob)
print(f"label={sol.label} method={sol.method} iterations={sol.iterations} grad={sol.grad_norm:.1e}")
for t, y in zip(sol.nodes, sol.values):
    print(f"  t={t:.12f}  y={y:.12f}  y-t={y - t:+.1e}")

print("EL residual of y=t:", el_residual(prob, prob.grid(lambda t: t)).sup_norm)

eta = prob.grid(lambda t: (t - a) * (b - t))
print("first variation at the solution:", first_variation(prob, sol.y, eta))
base = functional_value(prob, sol.y)
for s in (0.5, -0.5, 2.0):
    print(f"  J(y + {s:+}*eta) - J(y) = {functional_value(prob, sol.y + s * eta) - base:+.3e}")

# a concave Lagrangian has the same stationary path but no minimizer claim
neg = VariationalProblem(Lagrangian.from_text("-v^2"), a, b, a, b, p)
sol = solve_common_lattice(neg)
print(f"\n-v^2: label={sol.label} concave={sol.concave} max|y-t|={np.max(np.abs(sol.values - sol.nodes)):.1e}")
