import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fibertrap.atom import CESIUM, alpha_imag, recoil_energy
from fibertrap.constants import C, HBAR, KB, NM
from fibertrap.errors import DomainError, NotATrapError
from fibertrap.potentials import vdw_pair
from fibertrap.trap import (AxialProfile, TrapReport, axial_profile, bound_states,
                            ground_state_average, trap_depth, trap_frequency)

M = CESIUM.mass_kg


def make_profile(U, half_width, intensity=None, axis="x"):
    s = np.linspace(-half_width, half_width, len(U))
    I = np.zeros_like(U) if intensity is None else intensity
    return AxialProfile(axis, s, U, I, U, np.zeros_like(U))


def harmonic(omega, half_width=60 * NM, points=2001):
    s = np.linspace(-half_width, half_width, points)
    return make_profile(0.5 * M * omega**2 * s**2, half_width)


# --- synthetic oracles ----------------------------------------------------------

def test_harmonic_oscillator_spectrum():
    w = 2 * np.pi * 1e6
    bs = bound_states(harmonic(w), M)
    ref = HBAR * w * (np.arange(5) + 0.5)
    assert np.allclose(bs.energies, ref, rtol=5e-3)
    assert np.allclose(np.diff(bs.energies), HBAR * w, rtol=5e-3)


def test_harmonic_trap_frequency_exact():
    w = 2 * np.pi * 1e6
    assert trap_frequency(harmonic(w), M) == pytest.approx(w, rel=1e-3)


def test_infinite_well_spectrum():
    L = 100 * NM
    prof = make_profile(np.zeros(2001), L / 2)
    bs = bound_states(prof, M)
    nu = np.arange(5) + 1
    ref = HBAR**2 * np.pi**2 * nu**2 / (2 * M * L**2)
    assert np.allclose(bs.energies, ref, rtol=5e-3)


def test_wavefunction_normalization_and_nodes():
    prof = harmonic(2 * np.pi * 5e5)
    bs = bound_states(prof, M)
    dx = prof.spacing
    for v in range(5):
        psi = bs.wavefunctions[:, v]
        assert np.sum(psi**2) * dx == pytest.approx(1.0, rel=1e-12)
        core = psi[np.abs(psi) > 1e-6 * np.abs(psi).max()]
        assert np.count_nonzero(np.diff(np.sign(core)) != 0) == v
    overlap = bs.wavefunctions.T @ bs.wavefunctions * dx
    assert np.allclose(overlap, np.eye(5), atol=1e-10)


def test_depth_of_double_well_barrier():
    s = np.linspace(-1, 1, 1001)
    U = s**2 - s**4                     # barrier 1/4 at |s| = 1/sqrt(2)
    d = trap_depth(make_profile(U, 1.0))
    assert d.has_barrier and not d.at_window_edge
    assert d.depth == pytest.approx(0.25, rel=1e-5)
    assert d.barrier_left == pytest.approx(-d.barrier_right)


@settings(max_examples=30, deadline=None)
@given(st.floats(min_value=-1e-26, max_value=1e-26))
def test_depth_invariant_under_offset(c):
    s = np.linspace(-1, 1, 1001)
    U = 1e-27 * (s**2 - s**4)
    base = trap_depth(make_profile(U, 1.0)).depth
    assert trap_depth(make_profile(U + c, 1.0)).depth == pytest.approx(base, rel=1e-6)


def test_monotone_profile_has_zero_depth():
    s = np.linspace(-1, 1, 101)
    d = trap_depth(make_profile(-np.abs(s), 1.0))
    assert d.depth == 0.0 and not d.has_barrier
    # a confining profile is bounded by the window edges, which are flagged
    d = trap_depth(make_profile(s**2, 1.0))
    assert d.depth == pytest.approx(1.0) and d.at_window_edge


def test_negative_curvature_is_not_a_trap():
    s = np.linspace(-1e-7, 1e-7, 101)
    with pytest.raises(NotATrapError):
        trap_frequency(make_profile(-s**2, 1e-7), M)


def test_ground_state_average():
    s = np.linspace(-1, 1, 201)
    I = s**2
    prof = make_profile(s**2, 1.0, intensity=I)
    delta = np.zeros_like(s)
    delta[prof.center] = 1 / np.sqrt(prof.spacing)
    mean_i, gam = ground_state_average(prof, delta, 1e-40)
    assert mean_i == 0.0 and gam == 0.0
    flat = np.full_like(s, 1 / np.sqrt(2.0))
    mean_i, gam = ground_state_average(prof, flat, 4 * HBAR)
    assert mean_i == pytest.approx(np.sum(I) * prof.spacing / 2)
    assert gam == pytest.approx(mean_i)
    doubled = make_profile(s**2, 1.0, intensity=2 * I)
    assert ground_state_average(doubled, flat, 1.0)[1] == pytest.approx(2 * gam / (4 * HBAR))
    with pytest.raises(DomainError):
        ground_state_average(prof, flat[:-1], 1.0)


def test_profile_validation():
    with pytest.raises(DomainError):
        AxialProfile("x", np.array([0.0, 1.0, 2.0]), *[np.zeros(3)] * 4)
    with pytest.raises(DomainError):
        AxialProfile("x", np.array([-1.0, 1.0]), *[np.zeros(2)] * 4)
    with pytest.raises(DomainError):
        AxialProfile("x", np.array([1.0, 0.0, -1.0]), *[np.zeros(3)] * 4)


def test_coarse_grid_is_rejected():
    with pytest.raises(DomainError):
        bound_states(harmonic(2 * np.pi * 1e6, half_width=60 * NM, points=21), M)


def test_report_round_trip_and_validation():
    rep = TrapReport(*([1.0] * 16), levels_x=[0.0, 1.0], levels_y=[0.0, 2.0])
    assert TrapReport.from_dict(rep.to_dict()) == rep
    bad = rep.to_dict()
    bad["extra"] = 1.0
    with pytest.raises(DomainError):
        TrapReport.from_dict(bad)
    bad = rep.to_dict()
    bad["tau_coh"] = "x"
    with pytest.raises(DomainError):
        TrapReport.from_dict(bad)
    bad = rep.to_dict()
    del bad["gamma"]
    with pytest.raises(DomainError):
        TrapReport.from_dict(bad)


# --- baseline geometry ------------------------------------------------------------

def test_clearance_is_enforced(baseline_mode, vdw_model):
    g = baseline_mode.geometry
    with pytest.raises(DomainError):
        axial_profile(baseline_mode, CESIUM, vdw_model, "x", half_width=g.separation / 2 - 5 * NM)
    with pytest.raises(DomainError):
        axial_profile(baseline_mode, CESIUM, vdw_model, "z")


def test_baseline_report_values(baseline_trap):
    rep, _, _ = baseline_trap
    s = rep.summary()
    assert s["omega_x_over_2pi_kHz"] == pytest.approx(1441, rel=0.05)
    assert s["omega_y_over_2pi_kHz"] == pytest.approx(438, rel=0.05)
    assert s["delta_x_nm"] == pytest.approx(5.1, rel=0.05)
    assert s["delta_y_nm"] == pytest.approx(9.3, rel=0.05)
    assert s["spacing_x_uK"] == pytest.approx(69, rel=0.10)
    assert s["spacing_y_uK"] == pytest.approx(21, rel=0.10)
    assert s["U_D_mK"] == pytest.approx(0.7, rel=0.15)
    assert s["gamma_x_per_s"] == pytest.approx(0.17, rel=0.20)
    assert s["gamma_y_per_s"] == pytest.approx(0.05, rel=0.25)
    assert s["tau_coh_s"] == pytest.approx(5.8, rel=0.20)
    assert s["tau_trap_h"] == pytest.approx(4.8, rel=0.25)


def test_baseline_report_consistency(baseline_trap, baseline_mode, vdw_model):
    rep, profiles, states = baseline_trap
    assert rep.tau_trap == rep.U_D / (2 * rep.E_rec * rep.gamma)
    assert rep.tau_coh == 1 / rep.gamma
    assert rep.gamma == max(rep.gamma_x, rep.gamma_y)
    assert rep.U_D == min(rep.depth_x, rep.depth_y) == rep.depth_y
    assert rep.depth_x > rep.depth_y
    assert rep.E_rec == recoil_energy(CESIUM, baseline_mode.geometry.wavelength)
    assert rep.U_min == vdw_pair(baseline_mode.geometry, vdw_model, 0.0, 0.0)
    for ax in "xy":
        prof = profiles[ax]
        assert np.array_equal(prof.U, prof.U[::-1])
        assert states[ax].all_bound
    w = 2 * np.pi * C / baseline_mode.geometry.wavelength
    kappa = alpha_imag(CESIUM, w)
    _, gx = ground_state_average(profiles["x"], states["x"].wavefunctions[:, 0], kappa)
    assert gx == rep.gamma_x


def test_curvature_matches_level_spacing(baseline_trap):
    rep, _, _ = baseline_trap
    for w, spacing in [(rep.omega_x, rep.spacing_omega_x), (rep.omega_y, rep.spacing_omega_y)]:
        assert abs(w - spacing) / w < 0.15


def test_grid_doubling_convergence(baseline_trap, baseline_mode, vdw_model):
    rep, _, _ = baseline_trap
    for ax, ref in [("x", rep.levels_x), ("y", rep.levels_y)]:
        fine = axial_profile(baseline_mode, CESIUM, vdw_model, ax, points=4001)
        e = bound_states(fine, M, k=2).energies
        assert np.allclose(e, ref[:2], rtol=1e-3)


def test_u_min_below_zero_and_depth_units(baseline_trap):
    rep, _, _ = baseline_trap
    assert rep.U_min < 0
    assert rep.summary()["U_D_mK"] == pytest.approx(rep.U_D / KB * 1e3)
