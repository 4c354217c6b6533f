"""Time-dependent Pauli channel with eigenvalues driven to zero in stages.

lambda_1 = lambda_2 = 1 - t collapse at t1 = 1 (the map keeps only the
dephased part), and lambda_3 is driven to zero at t2 = 2 (everything is
depolarized).  Each collapse has its own CPTP limit projection, and the
composite propagators stay CPTP, so the evolution is CP-divisible even
though no bounded generator exists at the collapse times.
"""

import numpy as np

from markovlens import (
    composite_propagator,
    constant,
    cp_divisibility_verdict,
    limit_projector,
    make_grid,
    piecewise_linear,
    preset_pauli_channel,
    rank_profile,
)
from markovlens.operator_core import PAULI_X, PAULI_Z
from markovlens.superop import apply, is_cptp

lam12 = piecewise_linear([(0, 1), (1, 0), (3, 0)])
lam3 = piecewise_linear([(0, 1), (1, 1), (2, 0), (3, 0)])
family = preset_pauli_channel(lambdas=[lam12, lam12, lam3], t_max=3.0)
grid = make_grid(3.0, 400)

profile = rank_profile(family, grid)
print("breakpoints:", [f"{b:.6f}" for b in profile.breakpoints])

pi1 = limit_projector(family, profile.breakpoints[0])
pi2 = limit_projector(family, profile.breakpoints[1])

x = np.array([[0.1, 0.7 + 0.2j], [0.7 - 0.2j, 0.9]])
print("\nfirst projector kills the coherences:")
print("  Pi_1(sigma_x) =", np.round(apply(pi1, PAULI_X), 12).tolist())
print("  Pi_1(X) =\n", np.round(apply(pi1, x), 10))
print("  (X + sigma_3 X sigma_3)/2 =\n",
      np.round(0.5 * (x + PAULI_Z @ x @ PAULI_Z), 10))

print("\nsecond projector depolarizes completely:")
print("  Pi_2(X) =\n", np.round(apply(pi2, x), 10))
print("  Tr(X)/2 * I =\n", np.round(np.eye(2) * np.trace(x) / 2, 10))

# composite propagator across both collapses is CPTP on the whole space
v = composite_propagator(family, 2.7, 2.3, list(profile.breakpoints))
print("\ncomposite propagator at (2.3 -> 2.7):",
      "CPTP" if is_cptp(v.v) else "not CPTP",
      f"(full-space TP residual {v.tp_full_residual:.1e})")

verdict = cp_divisibility_verdict(family, grid)
print("verdict:", verdict.status.value)
