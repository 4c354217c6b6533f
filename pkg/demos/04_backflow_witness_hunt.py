"""Hunting information backflow with trace-norm witnesses.

The amplitude-damped qubit with rate gamma(t) = sin(t) is CPTP for all
times but the rate goes negative on (pi, 2pi).  Distinguishability of
state pairs revives there: the BLP flow turns positive, ancilla witnesses
see it too, and a random scan locates it without being told where to look.
A CP-divisible family, by contrast, stays quiet for every witness tried.
"""

import numpy as np

from markovlens import (
    blp_sigma,
    cosine_clipped,
    embed_delta,
    exp_decay,
    helstrom_witness,
    preset_amplitude_damping,
    sinusoidal,
    witness_scan,
)
from markovlens.operator_core import PAULI_X

times = np.linspace(0.0, 2 * np.pi, 400)
backflow_family = preset_amplitude_damping(gamma=sinusoidal(1.0, 1.0),
                                           t_max=2 * np.pi)

# --- a hand-picked state pair already sees the revival ---------------------
rho_plus = 0.5 * (np.eye(2) + PAULI_X)
rho_minus = 0.5 * (np.eye(2) - PAULI_X)
rec = blp_sigma(backflow_family, rho_plus, rho_minus, times)
print("BLP flow for the +/- x pair:")
print(f"  norm at t=0:    {rec.norms[0]:.6f}")
print(f"  norm at t=pi:   {rec.norms[200]:.6f}")
print(f"  max d/dt ||.||: {rec.max_backflow:.4f} at t = {rec.max_backflow_time:.3f}")

# --- an entangled witness with an ancilla ----------------------------------
omega = np.zeros(4, dtype=complex)
omega[0] = omega[3] = 1 / np.sqrt(2)
x = np.outer(omega, omega.conj()) - np.eye(4) / 4
rec_anc = helstrom_witness(backflow_family, x, "d", times)
print(f"\nancilla witness backflow: {rec_anc.max_backflow:.4f} "
      f"at t = {rec_anc.max_backflow_time:.3f}")

# --- the traceless embedding onto the enlarged ancilla ---------------------
delta = embed_delta(x, np.eye(2) / 2)
rec_delta = helstrom_witness(backflow_family, delta, "d_plus_1", times)
print("norm-split check at a few times "
      "(enlarged-ancilla norm minus |Tr X|):")
for k in (0, 100, 300):
    print(f"  t={times[k]:5.3f}:  {rec_delta.norms[k] - abs(np.trace(x)):.8f}"
          f"  vs  {rec_anc.norms[k]:.8f}")

# --- blind randomized search ------------------------------------------------
best = witness_scan(backflow_family, times, ancilla_kind="d", n_samples=48,
                    n_refine=6, seed=7)
print(f"\nscan over 48 random witnesses: max backflow {best.max_backflow:.4f} "
      f"at t = {best.max_backflow_time:.3f}")

quiet_family = preset_amplitude_damping(g=cosine_clipped(1.0, np.pi / 2),
                                        t_max=np.pi)
quiet_times = np.linspace(0.0, np.pi, 400)
quiet = witness_scan(quiet_family, quiet_times, ancilla_kind="d",
                     n_samples=48, n_refine=6, seed=7)
print(f"same scan on the CP-divisible clipped family: {quiet.max_backflow:.2e} "
      "(no violation found; scans never certify divisibility)")

decaying = witness_scan(
    preset_amplitude_damping(g=exp_decay(0.5), t_max=2 * np.pi),
    times, ancilla_kind="d_plus_1", n_samples=16, n_refine=2, seed=7)
print(f"constant-rate damping, enlarged ancilla:  {decaying.max_backflow:.2e}")
