import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fibertrap.arraymode import eval_field
from fibertrap.atom import CESIUM, AtomSpecies, alpha_imag, alpha_imaginary_frequency, alpha_real
from fibertrap.constants import C, EPS0, HBAR, KB, NM
from fibertrap.errors import DomainError
from fibertrap.numerics import FUSED_SILICA, QuadratureSpec, integrate_adaptive
from fibertrap.potentials import (SILICA_DIELECTRIC, DielectricModel, VdwModel,
                                  optical_potential, scattering_rate, total_potential,
                                  vdw_kernel, vdw_pair, vdw_single)

RADIUS = 200 * NM


@pytest.fixture(scope="module")
def bare_model():
    """Model without a radial table (direct evaluation only)."""
    return VdwModel(CESIUM, SILICA_DIELECTRIC, RADIUS)


# --- dielectric ---------------------------------------------------------------

def test_dielectric_model_properties():
    d = SILICA_DIELECTRIC
    xi = np.geomspace(1e12, 1e19, 100)
    eps = d.permittivity(xi)
    assert np.all(np.diff(eps) < 0)
    assert d.permittivity(0.0) == pytest.approx(d.static)
    assert d.static > 1
    assert d.permittivity(1e22) == pytest.approx(1.0, abs=1e-8)
    # static value equals n^2 of the Sellmeier model in the long-wavelength limit
    assert d.static == pytest.approx(1 + FUSED_SILICA.strengths().sum())
    with pytest.raises(DomainError):
        DielectricModel((-1.0,), (1e15,))


# --- response function --------------------------------------------------------

def test_kernel_sign_and_vacuum_limit():
    n = np.arange(6)[:, None]
    beta = np.geomspace(1e5, 1.5e9, 40)[None, :]     # beta_int * a up to 300
    G = vdw_kernel(n, 1e15, beta, RADIUS, SILICA_DIELECTRIC)
    assert np.all(G < 0)
    tiny = DielectricModel((1e-12,), (1e15,))
    small = beta[:, :20]                               # beta_int * a <= 5
    assert np.all(np.abs(vdw_kernel(n, 0.0, small, RADIUS, tiny)) < 1e-10)


def test_kernel_spot_value_against_mpmath():
    eps2 = DielectricModel((1.0,), (1e15,))          # eps(0) = 2
    G = vdw_kernel(0, 0.0, 1.0 / RADIUS, RADIUS, eps2)
    x = mp.mpf(1)
    I, Ip = mp.besseli(0, x), mp.besseli(1, x)
    K, Kp = mp.besselk(0, x), -mp.besselk(1, x)
    ref = (2 - 1) * I * Ip / (I * Kp - 2 * Ip * K)
    assert G == pytest.approx(float(ref), rel=1e-13)


@settings(max_examples=40, deadline=None)
@given(st.integers(min_value=0, max_value=30), st.floats(min_value=0.05, max_value=50.0),
       st.floats(min_value=0.0, max_value=1e17))
def test_kernel_factored_form(n, x, xi):
    """G_n = -(I_n/K_n) chi p / (1 + chi p), p = x I_n' K_n (Wronskian identity)."""
    from scipy import special
    G = vdw_kernel(n, xi, x / RADIUS, RADIUS, SILICA_DIELECTRIC)
    chi = SILICA_DIELECTRIC.susceptibility(xi)
    p = x * special.ivp(n, x) * special.kv(n, x)
    assert 0 < p < 0.5
    ref = -(special.iv(n, x) / special.kv(n, x)) * chi * p / (1 + chi * p)
    assert G == pytest.approx(ref, rel=1e-10)


def test_xi_integral_table_matches_quadrature(bare_model):
    p = np.array([0.0, 1e-4, 0.01, 0.13, 0.37, 0.4999])
    ref = bare_model.xi_integral_direct(p)
    assert np.allclose(bare_model.xi_integral(p), ref, rtol=1e-10, atol=1e-12 * ref.max())


# --- single-fiber potential -------------------------------------------------------

def test_planar_limit():
    d = SILICA_DIELECTRIC
    f = lambda xi: alpha_imaginary_frequency(CESIUM, xi) * (d.permittivity(xi) - 1) / (
        d.permittivity(xi) + 1)
    c3 = HBAR / (16 * np.pi**2 * EPS0) * integrate_adaptive(
        f, 0.0, np.inf, QuadratureSpec(rel_tol=1e-12, scale=2e15))
    a, z = 2e-6, 10 * NM
    v = VdwModel(CESIUM, d, a).direct(a + z)
    assert v / (-c3 / z**3) == pytest.approx(1.0, abs=0.01)


def test_vdw_negative_and_increasing(bare_model):
    r = RADIUS * np.array([1.1, 1.5, 2.0, 3.0, 4.0])
    v = np.array([bare_model.direct(x) for x in r])
    assert np.all(v < 0)
    assert np.all(np.diff(v) > 0)


def test_vdw_near_surface_slope(bare_model):
    gaps = np.array([5.0, 8.0, 12.0, 20.0]) * NM
    v = np.array([bare_model.direct(RADIUS + g) for g in gaps])
    slope = np.polyfit(np.log(gaps), np.log(-v), 1)[0]
    assert slope == pytest.approx(-3.0, abs=0.3)


def test_vdw_domain(bare_model):
    with pytest.raises(DomainError):
        bare_model(RADIUS)
    with pytest.raises(DomainError):
        bare_model.direct(0.5 * RADIUS)


def test_vdw_scales_with_polarizability(bare_model):
    doubled = AtomSpecies("x2", CESIUM.mass_kg, 1, CESIUM.lines)      # g_a 2 -> 1
    other = VdwModel(doubled, SILICA_DIELECTRIC, RADIUS)
    r = RADIUS + 30 * NM
    assert other.direct(r) == pytest.approx(2 * bare_model.direct(r), rel=1e-8)


@pytest.mark.slow
def test_table_agrees_with_direct(vdw_model):
    rng = np.random.default_rng(11)
    gaps = np.exp(rng.uniform(np.log(1.5 * NM), np.log(1500 * NM), 8))
    for g in gaps:
        r = RADIUS + g
        assert vdw_model(r) == pytest.approx(vdw_model.direct(r), rel=1e-3)
    assert vdw_single(vdw_model, RADIUS + 50 * NM) == vdw_model(RADIUS + 50 * NM)
    gaps_t, vals = vdw_model.table
    assert len(gaps_t) == 400 and gaps_t[0] == pytest.approx(1 * NM)
    assert gaps_t[-1] == pytest.approx(10 * RADIUS)


def test_table_fallback_outside_range():
    m = VdwModel(CESIUM, SILICA_DIELECTRIC, RADIUS)
    m.build_table(gap_min=20 * NM, gap_max=60 * NM, points=12)
    r = RADIUS + 100 * NM
    assert m(r) == m.direct(r)
    inside = m(RADIUS + 35 * NM)
    assert inside == pytest.approx(m.direct(RADIUS + 35 * NM), rel=1e-3)


# --- pair and total potentials ------------------------------------------------------

@pytest.mark.slow
def test_vdw_pair_symmetry_and_midpoint(baseline_geometry, vdw_model):
    g = baseline_geometry
    mid = vdw_pair(g, vdw_model, 0.0, 0.0)
    assert mid == pytest.approx(2 * vdw_model(g.radius + g.separation / 2), rel=1e-14)
    assert mid < 0 and abs(mid) / KB < 0.07e-3
    x, y = 80e-9, 130e-9
    v = vdw_pair(g, vdw_model, x, y)
    for sx, sy in [(-1, 1), (1, -1), (-1, -1)]:
        assert vdw_pair(g, vdw_model, sx * x, sy * y) == pytest.approx(v, rel=1e-12)
    with pytest.raises(DomainError):
        vdw_pair(g, vdw_model, g.center_x, 0.0)


def test_optical_potential_properties(baseline_mode):
    g = baseline_mode.geometry
    assert optical_potential(baseline_mode, CESIUM, 0.0, 0.0) == 0.0
    xs = np.linspace(-g.center_x + g.radius, g.center_x - g.radius, 31)
    X, Y = np.meshgrid(xs, np.linspace(-g.radius, g.radius, 11))
    u = optical_potential(baseline_mode, CESIUM, X, Y)
    assert np.all(u >= 0)
    u2 = optical_potential(baseline_mode.scaled(np.sqrt(2)), CESIUM, X, Y)
    assert np.allclose(u2, 2 * u, rtol=1e-13, atol=0)


def test_optical_potential_sign_flips_with_alpha(baseline_mode):
    # a single blue line puts 780 nm on its red side: alpha > 0, attractive potential
    from fibertrap.atom import SpectralLine
    red = AtomSpecies("red-detuned", CESIUM.mass_kg, 2, (SpectralLine(600.0, 3e7, 4),))
    w = 2 * np.pi * C / baseline_mode.geometry.wavelength
    x, y = 100e-9, 50e-9
    u_cs = optical_potential(baseline_mode, CESIUM, x, y)
    u_red = optical_potential(baseline_mode, red, x, y)
    assert u_red < 0 < u_cs
    assert u_red / u_cs == pytest.approx(alpha_real(red, w) / alpha_real(CESIUM, w), rel=1e-13)


def test_scattering_rate_properties(baseline_mode):
    assert scattering_rate(baseline_mode, CESIUM, 0.0, 0.0) == 0.0
    w = 2 * np.pi * C / baseline_mode.geometry.wavelength
    ratio = alpha_imag(CESIUM, w) / (HBAR * abs(alpha_real(CESIUM, w)))
    for x, y in [(50e-9, 20e-9), (-120e-9, 80e-9), (0.0, 150e-9)]:
        gam = scattering_rate(baseline_mode, CESIUM, x, y)
        u = optical_potential(baseline_mode, CESIUM, x, y)
        assert gam > 0 and gam / u == pytest.approx(ratio, rel=1e-12)
        assert scattering_rate(baseline_mode.scaled(2.0), CESIUM, x, y) == pytest.approx(4 * gam)


@pytest.mark.slow
def test_total_potential(baseline_mode, vdw_model):
    s0 = total_potential(baseline_mode, CESIUM, vdw_model, 0.0, 0.0)
    assert s0.U_opt == 0 and s0.U == s0.U_vdW < 0
    assert s0.Gamma_sc == 0 and s0.x_nm == 0
    pts = total_potential(baseline_mode, CESIUM, vdw_model, np.array([60e-9, -60e-9]),
                          np.array([40e-9, -40e-9]))
    assert pts[0].U == pytest.approx(pts[1].U, rel=1e-10)
    assert pts[0].U == pytest.approx(pts[0].U_opt + pts[0].U_vdW)
    assert abs(pts[0].U_vdW) < 0.05 * pts[0].U_opt
    assert pts[0].U_mK == pytest.approx(pts[0].U / KB * 1e3)


@pytest.mark.slow
def test_y_axis_barrier_and_linearity(baseline_mode, vdw_model):
    ys = np.linspace(0, 3 * RADIUS, 301)
    U = np.array([s.U for s in total_potential(baseline_mode, CESIUM, vdw_model,
                                               np.zeros_like(ys), ys)])
    i = int(np.argmax(U))
    assert 0 < i < len(ys) - 1 and U[-1] < U[i]
    U2 = np.array([s.U for s in total_potential(baseline_mode.scaled(np.sqrt(2)), CESIUM,
                                                vdw_model, np.zeros_like(ys), ys)])
    vdw = np.array([s.U_vdW for s in total_potential(baseline_mode, CESIUM, vdw_model,
                                                     np.zeros_like(ys), ys)])
    assert np.allclose(U2 - vdw, 2 * (U - vdw), rtol=1e-12, atol=1e-40)
