"""Relaxation to an equilibrium state in finite time.

Lambda_t rho = (1 - F(t)) rho + F(t) omega Tr(rho) reaches omega exactly
when F hits 1.  Divisibility demands the system then stays at omega;
CP-divisibility additionally demands F was monotone on the way there.
The second run lets F dip back down after t*, which destroys divisibility.
"""

import numpy as np

from markovlens import (
    cp_divisibility_verdict,
    limit_projector,
    make_grid,
    piecewise_linear,
    preset_equilibrium_relaxation,
    rank_profile,
)
from markovlens.superop import apply

rng = np.random.default_rng(2)
w = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
omega = w @ w.conj().T
omega /= np.trace(omega).real
print("equilibrium state omega:\n", np.round(omega, 6))

monotone = piecewise_linear([(0, 0), (1, 1), (2, 1)])
family = preset_equilibrium_relaxation(omega, monotone, t_max=2.0)
grid = make_grid(2.0, 400)

profile = rank_profile(family, grid)
t_star = profile.breakpoints[0]
print(f"\nrank collapses 4 -> 1 at t* = {t_star:.6f}")

pi_star = limit_projector(family, t_star)
rho = np.array([[0.95, 0.05j], [-0.05j, 0.05]])
print("Pi_{t*}(rho) =\n", np.round(apply(pi_star, rho), 8))
print("omega Tr(rho) =\n", np.round(omega * np.trace(rho), 8))

print("\nmonotone driving:",
      cp_divisibility_verdict(family, grid).status.value)

# now let the interaction 'revive' after equilibrium was reached
dipping = piecewise_linear([(0, 0), (1, 1), (1.5, 0.8), (2, 1)])
revived = preset_equilibrium_relaxation(omega, dipping, t_max=2.0)
verdict = cp_divisibility_verdict(revived, grid)
print("dipping driving: ", verdict.status.value)
if verdict.first_violation_time is not None:
    print(f"kernel inclusion first fails at t = {verdict.first_violation_time:.4f}")
else:
    print(f"worst propagator Choi eigenvalue {verdict.worst_choi_min_eig:.3e}")
