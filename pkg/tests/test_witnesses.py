import numpy as np
import pytest

from markovlens import signals as sg
from markovlens.dynamics import preset_amplitude_damping, preset_pauli_channel
from markovlens.operator_core import PAULI_X, hermitianize, trace_norm
from markovlens.witnesses import (
    blp_sigma,
    enlarged_ancilla_witness,
    embed_delta,
    helstrom_witness,
    witness_scan,
)

from conftest import random_density, random_hermitian


def ad_exp(t_max=3.0):
    return preset_amplitude_damping(g=sg.exp_decay(0.5), t_max=t_max)


def ad_sin(t_max=2 * np.pi):
    return preset_amplitude_damping(gamma=sg.sinusoidal(1.0, 1.0), t_max=t_max)


def test_blp_equal_states_is_zero(rng):
    rho = random_density(rng, 2)
    rec = blp_sigma(ad_exp(), rho, rho.copy(), np.linspace(0, 3, 60))
    assert np.allclose(rec.norms, 0.0, atol=1e-13)
    assert rec.max_backflow <= 1e-12


def test_blp_amplitude_damping_closed_form():
    rho1 = 0.5 * (np.eye(2) + PAULI_X)
    rho2 = 0.5 * (np.eye(2) - PAULI_X)
    times = np.linspace(0, 3, 120)
    rec = blp_sigma(ad_exp(), rho1, rho2, times)
    assert np.allclose(rec.norms, 2 * np.exp(-times / 2), atol=1e-12)
    assert rec.max_backflow < 0  # strictly decreasing trajectory
    assert len(rec.derivatives) == len(times) - 2


def test_blp_detects_backflow_for_negative_rates():
    rho1 = 0.5 * (np.eye(2) + PAULI_X)
    rho2 = 0.5 * (np.eye(2) - PAULI_X)
    times = np.linspace(0, 2 * np.pi, 240)
    rec = blp_sigma(ad_sin(), rho1, rho2, times)
    # ||Lambda_t sigma_x||_1 = 2 exp(-(1-cos t)/2) rises where sin t < 0
    assert rec.max_backflow > 1e-2
    assert np.pi < rec.max_backflow_time < 2 * np.pi


def test_blp_is_helstrom_special_case(rng):
    rho1 = random_density(rng, 2)
    rho2 = random_density(rng, 2)
    times = np.linspace(0, 3, 50)
    rec_blp = blp_sigma(ad_exp(), rho1, rho2, times)
    rec_hel = helstrom_witness(ad_exp(), rho1 - rho2, "none", times)
    assert np.max(np.abs(rec_blp.norms - rec_hel.norms)) < 1e-12


def test_helstrom_zero_witness():
    rec = helstrom_witness(ad_exp(), np.zeros((4, 4)), "d", np.linspace(0, 3, 40))
    assert np.allclose(rec.norms, 0.0)


def test_helstrom_entangled_witness_monotone():
    omega = np.zeros(4, dtype=complex)
    omega[0] = omega[3] = 1 / np.sqrt(2)
    x = np.outer(omega, omega.conj())
    times = np.linspace(0, 3, 100)
    rec = helstrom_witness(ad_exp(), x, "d", times)
    assert rec.norms[0] == pytest.approx(1.0, abs=1e-12)
    assert np.all(np.diff(rec.norms) <= 1e-12)


def test_helstrom_dimension_check():
    with pytest.raises(ValueError, match="inconsistent"):
        helstrom_witness(ad_exp(), np.zeros((3, 3)), "d", np.linspace(0, 1, 10))


def test_helstrom_detects_ancilla_backflow():
    omega = np.zeros(4, dtype=complex)
    omega[0] = omega[3] = 1 / np.sqrt(2)
    x = np.outer(omega, omega.conj()) - np.eye(4) / 4
    times = np.linspace(0, 2 * np.pi, 240)
    rec = helstrom_witness(ad_sin(), x, "d", times)
    assert rec.max_backflow > 1e-3
    assert np.pi < rec.max_backflow_time < 2 * np.pi


def test_embed_delta_traceless_block():
    rng = np.random.default_rng(4)
    x = random_hermitian(rng, 4)
    rho_s = random_density(rng, 2)
    delta = embed_delta(x, rho_s)
    assert delta.shape == (6, 6)
    assert abs(np.trace(delta)) == 0.0
    assert np.allclose(delta[:4, :4], x)
    assert np.allclose(delta[4:, 4:], -np.trace(x) * rho_s)


def test_embed_delta_traceless_input_pads():
    rng = np.random.default_rng(5)
    x = random_hermitian(rng, 4)
    x -= np.trace(x) / 4 * np.eye(4)
    delta = embed_delta(x, random_density(rng, 2))
    assert np.allclose(delta[4:, 4:], 0.0, atol=1e-14)


def test_embed_delta_maximally_entangled_block():
    omega = np.zeros(4, dtype=complex)
    omega[0] = omega[3] = 1 / np.sqrt(2)
    x = np.outer(omega, omega.conj())
    delta = embed_delta(x, np.eye(2) / 2)
    assert np.allclose(delta[4:, 4:], -0.5 * np.eye(2) / 1.0 * 1.0, atol=1e-14)
    assert abs(np.trace(delta)) == 0.0


def test_delta_norm_splitting_identity(rng):
    fam = ad_exp()
    times = np.linspace(0, 3, 40)
    for _ in range(10):
        x = random_hermitian(rng, 4)
        rho_s = random_density(rng, 2)
        rec_x = helstrom_witness(fam, x, "d", times)
        rec_d = helstrom_witness(fam, embed_delta(x, rho_s), "d_plus_1", times)
        assert np.max(np.abs(rec_d.norms - rec_x.norms
                             - abs(np.trace(x)))) < 1e-9


def test_enlarged_pair_equal_states_zero(rng):
    rho = random_density(rng, 6)
    rec = enlarged_ancilla_witness(ad_exp(), rho, rho.copy(), np.linspace(0, 3, 30))
    assert np.allclose(rec.norms, 0.0, atol=1e-12)


def test_enlarged_pair_from_embedding_matches_helstrom(rng):
    fam = ad_exp()
    times = np.linspace(0, 3, 40)
    x = random_hermitian(rng, 4)
    delta = embed_delta(x, random_density(rng, 2))
    w, v = np.linalg.eigh(delta)
    pos = (v * np.clip(w, 0, None)) @ v.conj().T
    neg = (v * np.clip(-w, 0, None)) @ v.conj().T
    c = float(np.trace(pos).real)
    rec_pair = enlarged_ancilla_witness(fam, pos / c, neg / c, times)
    rec_x = helstrom_witness(fam, x, "d", times)
    assert np.max(np.abs(c * rec_pair.norms - rec_x.norms
                         - abs(np.trace(x)))) < 1e-9


def test_enlarged_pair_nonincreasing_for_cp_divisible(rng):
    fam = ad_exp()
    times = np.linspace(0, 3, 100)
    rho1 = random_density(rng, 6)
    rho2 = random_density(rng, 6)
    rec = enlarged_ancilla_witness(fam, rho1, rho2, times)
    spacing = float(times[1] - times[0])
    assert rec.max_backflow <= 1e-6 + 10 * spacing ** 2


def test_trajectory_invariances(rng):
    fam = ad_exp()
    times = np.linspace(0, 3, 30)
    x = random_hermitian(rng, 4)
    base = helstrom_witness(fam, x, "d", times)
    flipped = helstrom_witness(fam, -x, "d", times)
    assert np.allclose(base.norms, flipped.norms, atol=1e-12)
    scaled = helstrom_witness(fam, 2.5 * x, "d", times)
    assert np.allclose(scaled.norms, 2.5 * base.norms, atol=1e-11)


def test_scan_identity_family_quiet():
    fam = preset_pauli_channel(gammas=[sg.constant(0.0)] * 3, t_max=1.0)
    times = np.linspace(0, 1, 60)
    for seed in (0, 1, 7):
        rec = witness_scan(fam, times, ancilla_kind="d", n_samples=8,
                           n_refine=2, seed=seed)
        assert abs(rec.max_backflow) <= 1e-10


def test_scan_finds_known_violation():
    times = np.linspace(0, 2 * np.pi, 200)
    rec = witness_scan(ad_sin(), times, ancilla_kind="d", n_samples=64,
                       n_refine=4, seed=1)
    assert rec.max_backflow > 1e-3
    assert np.pi < rec.max_backflow_time < 2 * np.pi
    assert trace_norm(hermitianize(rec.witness)) == pytest.approx(1.0, abs=1e-9)


def test_scan_clipped_family_no_violation():
    fam = preset_amplitude_damping(g=sg.cosine_clipped(1.0, np.pi / 2),
                                   t_max=np.pi)
    times = np.linspace(0, np.pi, 150)
    rec = witness_scan(fam, times, ancilla_kind="d", n_samples=32, n_refine=2,
                       seed=5)
    assert rec.max_backflow <= 1e-6


def test_scan_deterministic():
    times = np.linspace(0, 2 * np.pi, 80)
    a = witness_scan(ad_sin(), times, ancilla_kind="none", n_samples=6,
                     n_refine=3, seed=42)
    b = witness_scan(ad_sin(), times, ancilla_kind="none", n_samples=6,
                     n_refine=3, seed=42)
    assert np.array_equal(a.witness, b.witness)
    assert a.max_backflow == b.max_backflow


def test_scan_refinement_monotone_under_grid_refinement():
    coarse = np.linspace(0, 2 * np.pi, 60)
    fine = np.linspace(0, 2 * np.pi, 240)
    rec_c = witness_scan(ad_sin(), coarse, ancilla_kind="none", n_samples=12,
                         n_refine=0, seed=8)
    rec_f = witness_scan(ad_sin(), fine, ancilla_kind="none", n_samples=12,
                         n_refine=0, seed=8)
    fd_tol = 10 * float(coarse[1] - coarse[0]) ** 2
    assert rec_f.max_backflow >= rec_c.max_backflow - fd_tol


def test_kink_flagging_on_clip():
    fam = preset_amplitude_damping(g=sg.cosine_clipped(1.0, np.pi / 2),
                                   t_max=np.pi)
    rho1 = 0.5 * (np.eye(2) + PAULI_X)
    rho2 = 0.5 * (np.eye(2) - PAULI_X)
    times = np.linspace(0, np.pi, 100)
    rec = blp_sigma(fam, rho1, rho2, times)
    assert any(abs(t - np.pi / 2) < 0.1 for t in rec.kink_times)
