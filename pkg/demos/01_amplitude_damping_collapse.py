"""Damped qubit whose decay amplitude hits zero at a finite time.

G(t) = cos(t), clipped to 0 from t* = pi/2 on.  The map stays CPTP the
whole way, but at t* its image collapses onto the ground state and the
time-local rate blows up.  The family is still CP-divisible: the limit
propagator at the collapse is the CPTP projection X -> P0 Tr(X).
"""

import numpy as np

from markovlens import (
    canonical_gkls,
    cp_divisibility_verdict,
    generator_from_family,
    limit_projector,
    make_grid,
    preset_amplitude_damping,
    rank_profile,
)
from markovlens import cosine_clipped
from markovlens.errors import SingularGeneratorError
from markovlens.operator_core import GROUND_PROJECTOR
from markovlens.superop import apply

T_STAR = np.pi / 2
family = preset_amplitude_damping(g=cosine_clipped(1.0, T_STAR), t_max=np.pi)
grid = make_grid(np.pi, 400)

# --- where does the map lose rank? ---------------------------------------
profile = rank_profile(family, grid)
print("rank along the evolution:", sorted(set(int(r) for r in profile.ranks)))
print(f"detected collapse time: {profile.breakpoints[0]:.8f}  (pi/2 = {T_STAR:.8f})")

# --- the dissipation rate diverges on approach ----------------------------
print("\n  t      gamma(t)    2*tan(t)")
for t in (0.5, 1.0, 1.3, 1.5, 1.55):
    rates = canonical_gkls(generator_from_family(family, t, h=1e-3)).rates
    print(f"  {t:4.2f}   {rates[0]:9.4f}   {2 * np.tan(t):9.4f}")
try:
    generator_from_family(family, T_STAR)
except SingularGeneratorError as err:
    print(f"at t* the generator is singular: {err}")

# --- the limit propagator is the ground-state projection ------------------
pi_star = limit_projector(family, profile.breakpoints[0])
rho = np.array([[0.62, 0.3 - 0.1j], [0.3 + 0.1j, 0.38]])
print("\nPi_{t*} applied to a state:\n", np.round(apply(pi_star, rho), 10))
print("P0 Tr(rho):\n", np.round(GROUND_PROJECTOR * np.trace(rho), 10))

# --- and the full pipeline agrees ------------------------------------------
verdict = cp_divisibility_verdict(family, grid)
print("\nverdict:", verdict.status.value)
print("worst propagator Choi eigenvalue:", f"{verdict.worst_choi_min_eig:.2e}")
print("note: after t* the rate profile is irrelevant; the system sits in the "
      "ground state forever.")
