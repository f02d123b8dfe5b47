"""Odd E_z-sine guided array mode of two identical parallel fibers.

The fields are expanded in circular harmonics about each fiber axis. Fiber 1
sits at x = -(a + d/2), fiber 2 at x = +(a + d/2); both local polar angles
are measured counterclockwise from +x. Fiber-2 coefficients follow from
fiber 1 through X_m2 = (-1)^m X_m1.

Internally the exterior unknowns are carried as ``G~_m = K_m(w) G_m`` and
``H~_m = Z0 K_m(w) H_m`` (the field each harmonic produces on its own
fiber surface). This keeps the boundary-matching matrix well conditioned
near cutoff, where K_m(w) spans hundreds of decades across m.
"""

from dataclasses import dataclass, field, replace

import numpy as np
from scipy import special

from .constants import NM, Z0
from .errors import ConvergenceError, DegenerateModeError, DomainError
from .numerics import (FUSED_SILICA, QuadratureSpec, integrate_adaptive,
                       log_bessel_i, log_bessel_k, sellmeier_index)
from .numerics.roots import scan_sign_changes

__all__ = [
    "FiberPairGeometry", "ArrayModeSolution", "FieldVector", "DispersionMatrix",
    "transverse_params", "coupling_coefficients", "dispersion_matrix",
    "dispersion_value", "solve_beta", "solve_coefficients", "solve_mode",
    "eval_field", "boundary_residual", "mode_power", "normalize_to_power",
    "single_fiber_beta",
]

N_MAX_SEQUENCE = (9, 11, 13, 15, 17, 19)
BETA_TOL = 1e-9
RESIDUAL_TOL = 1e-3
ROOT_XTOL = 1e-13           # absolute, in beta/k
NULL_RATIO = 1e-8           # sigma_min / sigma_max accepted as a true root
DEGENERATE_RATIO = 1e-6     # second-smallest sigma below this -> degenerate


@dataclass(frozen=True)
class FiberPairGeometry:
    """Two identical fibers; all lengths in meters."""

    radius: float
    separation: float
    wavelength: float
    n_fiber: float
    n_clad: float = 1.0

    def __post_init__(self):
        if self.radius <= 0 or self.wavelength <= 0:
            raise DomainError("radius and wavelength must be positive")
        if self.separation < 0:
            raise DomainError("separation must be non-negative")
        if not self.n_fiber > self.n_clad >= 1:
            raise DomainError("need n_fiber > n_clad >= 1")

    @classmethod
    def from_nm(cls, a_nm, d_nm, lambda_nm, n_fiber=None, n_clad=1.0):
        """Build from nanometers; ``n_fiber=None`` uses fused-silica Sellmeier."""
        if n_fiber is None:
            n_fiber = float(sellmeier_index(FUSED_SILICA, lambda_nm * 1e-3))
        return cls(a_nm * NM, d_nm * NM, lambda_nm * NM, float(n_fiber), float(n_clad))

    @property
    def k(self):
        return 2 * np.pi / self.wavelength

    @property
    def center_distance(self):
        return self.separation + 2 * self.radius

    @property
    def center_x(self):
        """x coordinate of fiber 2's axis (fiber 1 is at minus this)."""
        return self.radius + self.separation / 2

    @property
    def V(self):
        return self.k * self.radius * np.sqrt(self.n_fiber**2 - self.n_clad**2)

    def describe(self):
        return {
            "a_nm": self.radius / NM, "d_nm": self.separation / NM,
            "lambda_nm": self.wavelength / NM, "n_fiber": self.n_fiber,
            "n_clad": self.n_clad,
        }


@dataclass(frozen=True)
class FieldVector:
    """Complex envelopes; components broadcast over the evaluation points."""

    Ex: np.ndarray
    Ey: np.ndarray
    Ez: np.ndarray
    Hx: np.ndarray
    Hy: np.ndarray
    Hz: np.ndarray
    on_surface: np.ndarray = None

    @property
    def intensity(self):
        """|E|^2 in (V/m)^2."""
        return abs(self.Ex) ** 2 + abs(self.Ey) ** 2 + abs(self.Ez) ** 2

    @property
    def poynting_z(self):
        """Time-averaged axial Poynting density (1/2) Re[E x H*]_z, W/m^2."""
        return 0.5 * np.real(self.Ex * np.conj(self.Hy) - self.Ey * np.conj(self.Hx))


@dataclass(frozen=True)
class ArrayModeSolution:
    """Propagation constant and harmonic coefficients of the mode.

    ``G_tilde``/``H_tilde`` are the scaled exterior unknowns (V/m); ``E``/``F``
    the interior coefficients in V/m and A/m. ``power`` is None until the
    solution has been normalized.
    """

    geometry: FiberPairGeometry
    beta: float
    n_max: int
    status: str = "guided"
    G_tilde: np.ndarray = None
    H_tilde: np.ndarray = None
    E: np.ndarray = None
    F: np.ndarray = None
    power: float = None
    diagnostics: dict = field(default_factory=dict, compare=False)

    @property
    def guided(self):
        return self.status == "guided"

    @property
    def beta_over_k(self):
        return self.beta / self.geometry.k

    @property
    def h(self):
        return transverse_params(self.geometry, self.beta)[0]

    @property
    def q(self):
        return transverse_params(self.geometry, self.beta)[1]

    @property
    def has_coefficients(self):
        return self.G_tilde is not None

    @property
    def G(self):
        """Physical exterior E_z coefficients G_n1 (V/m)."""
        w = self.q * self.geometry.radius
        return self.G_tilde * np.exp(-log_bessel_k(np.arange(self.n_max + 1), w))

    @property
    def H(self):
        """Physical exterior H_z coefficients H_n1 (A/m)."""
        w = self.q * self.geometry.radius
        return self.H_tilde / Z0 * np.exp(-log_bessel_k(np.arange(self.n_max + 1), w))

    def scaled(self, factor):
        """Copy with every coefficient multiplied by ``factor``."""
        power = None if self.power is None else self.power * factor**2
        return replace(self, G_tilde=self.G_tilde * factor, H_tilde=self.H_tilde * factor,
                       E=self.E * factor, F=self.F * factor, power=power)


@dataclass(frozen=True)
class DispersionMatrix:
    """Row-scaled boundary-matching matrix.

    Rows: first equation for n = 0..N, then the second. Columns: G~_0..G~_N,
    then H~_0..H~_N. ``row_scale`` and ``col_scale`` map back to the
    unscaled equations: ``raw = matrix / row_scale[:, None] / col_scale``,
    where raw acts on the physical (G_n, Z0 H_n).
    """

    matrix: np.ndarray
    row_scale: np.ndarray
    col_scale: np.ndarray
    n_max: int

    def deflated(self):
        """Drop the G~_0 column and the (second equation, n=0) row.

        G~_0 multiplies sin(0) and couples to nothing else; keeping it would
        add the single-fiber TM_0n roots as spurious zeros of the determinant.
        """
        n1 = self.n_max + 1
        rows = np.r_[0:n1, n1 + 1:2 * n1]
        return self.matrix[np.ix_(rows, np.arange(1, 2 * n1))]


def transverse_params(geometry, beta):
    """(h, q) = (sqrt(k^2 n_f^2 - beta^2), sqrt(beta^2 - k^2 n_0^2))."""
    k = geometry.k
    hi = (k * geometry.n_fiber) ** 2
    lo = (k * geometry.n_clad) ** 2
    b2 = beta * beta
    span = hi - lo
    if b2 > hi * (1 + 1e-15) or b2 < lo * (1 - 1e-15):
        raise DomainError("beta outside the guided window [k n0, k nf]")
    h2 = min(max(hi - b2, 0.0), span)
    q2 = min(max(b2 - lo, 0.0), span)
    return np.sqrt(h2), np.sqrt(q2)


def coupling_coefficients(n, m, qW):
    """(f_nm, g_nm) coupling fiber-2 harmonics into fiber-1 harmonics."""
    if np.any(np.asarray(qW) <= 0):
        raise DomainError("qW must be positive")
    n = np.asarray(n)
    m = np.asarray(m)
    kp = special.kv(m + n, qW)
    km = special.kv(np.abs(m - n), qW)
    f = np.where(n > 0, kp + km, special.kv(m, qW))
    g = km - kp
    return f, g


def _surface_data(geometry, beta, n_max):
    a = geometry.radius
    h, q = transverse_params(geometry, beta)
    if h <= 0 or q <= 0:
        raise DomainError("beta must lie strictly inside the guided window")
    u, w, qW = h * a, q * a, q * geometry.center_distance
    n = np.arange(n_max + 1)
    ext = np.arange(-1, n_max + 2)
    logK = log_bessel_k(np.abs(ext), w)
    logI = log_bessel_i(np.abs(ext), w)
    # K_n'/(w K_n), I_n'/(w I_n) from neighbour ratios
    kr = -(np.exp(logK[:-2] - logK[1:-1]) + np.exp(logK[2:] - logK[1:-1])) / (2 * w)
    ir = (np.exp(logI[:-2] - logI[1:-1]) + np.exp(logI[2:] - logI[1:-1])) / (2 * w)
    jr = special.jvp(n, u) / (u * special.jv(n, u))
    logK_w = logK[1:-1]
    logI_w = logI[1:-1]

    nn, mm = np.meshgrid(n, n, indexing="ij")
    base = logI_w[:, None] - logK_w[None, :]
    kp = np.exp(base + log_bessel_k(nn + mm, qW))
    km = np.exp(base + log_bessel_k(np.abs(mm - nn), qW))
    Cg = km - kp                       # I_n(w) g_nm / K_m(w)
    Df = km + kp                       # I_n(w) f_nm / K_m(w)
    Df[0, :] = km[0, :]                # f_0m = K_m(qW)
    return dict(u=u, w=w, qW=qW, n=n, kr=kr, ir=ir, jr=jr, Cg=Cg, Df=Df,
                logK_w=logK_w, h=h, q=q)


def _raw_matrix(geometry, beta, s):
    n = s["n"]
    N1 = len(n)
    u, w = s["u"], s["w"]
    kb = geometry.k / beta
    nf2, n02 = geometry.n_fiber**2, geometry.n_clad**2
    eye = np.eye(N1)
    AG = eye + s["Cg"]
    AH = eye + s["Df"]
    pre = n * (1 / u**2 + 1 / w**2)
    jr, kr, ir = s["jr"], s["kr"], s["ir"]
    M = np.empty((2 * N1, 2 * N1))
    M[:N1, :N1] = pre[:, None] * AG
    M[:N1, N1:] = -kb * (np.diag(jr + kr) + (jr + ir)[:, None] * s["Df"])
    M[N1:, :N1] = -kb * (np.diag(nf2 * jr + n02 * kr) + (nf2 * jr + n02 * ir)[:, None] * s["Cg"])
    M[N1:, N1:] = pre[:, None] * AH
    return M


def dispersion_matrix(geometry, beta, n_max):
    """Boundary-matching matrix of the mode at ``beta``, rows scaled to unit max-norm."""
    s = _surface_data(geometry, beta, n_max)
    M = _raw_matrix(geometry, beta, s)
    row = np.abs(M).max(axis=1)
    row[row == 0] = 1.0
    row_scale = 1.0 / row
    col_scale = np.exp(np.concatenate([s["logK_w"], s["logK_w"]]))
    return DispersionMatrix(M * row_scale[:, None], row_scale, col_scale, n_max)


def dispersion_value(geometry, beta, n_max):
    """Determinant of the deflated, row-scaled matrix; zero at a mode."""
    return float(np.linalg.det(dispersion_matrix(geometry, beta, n_max).deflated()))


def _singular_values(geometry, beta, n_max):
    return np.linalg.svd(dispersion_matrix(geometry, beta, n_max).deflated(), compute_uv=False)


def _beta_roots(geometry, n_max, lo, hi, points):
    """Validated roots of the dispersion determinant in beta/k on (lo, hi)."""
    k = geometry.k
    grid = np.linspace(lo, hi, points)

    def det(bk):
        return dispersion_value(geometry, bk * k, n_max)

    from scipy.optimize import brentq
    _, brackets = scan_sign_changes(det, grid)
    roots = []
    for x0, x1 in brackets:
        r = x0 if x0 == x1 else brentq(det, x0, x1, xtol=ROOT_XTOL, rtol=1e-15)
        sv = _singular_values(geometry, r * k, n_max)
        # sign flips across J_n(u) = 0 poles give large sigma_min; reject
        if sv[-1] <= NULL_RATIO * sv[0]:
            roots.append(r)
    return roots


def _raw_beta(geometry, n_max, window=None, points=400):
    nf, n0 = geometry.n_fiber, geometry.n_clad
    eps = 1e-6 * (nf - n0)
    if window is None:
        window = (n0 + eps, nf - eps)
    roots = _beta_roots(geometry, n_max, *window, points)
    return max(roots) if roots else None


def solve_beta(geometry, n_max=None, points=400):
    """Propagation constant of the fundamental odd E_z-sine array mode.

    With ``n_max=None`` the truncation order steps through 9, 11, ..., 19 and
    stops once beta/k is stable to 1e-9 and the tangential boundary residual
    is below 1e-3. Returns a solution with ``status="below-cutoff"`` (and
    ``beta`` NaN) when no guided root exists.
    """
    k = geometry.k
    if n_max is not None:
        bk = _raw_beta(geometry, n_max, points=points)
        if bk is None:
            return ArrayModeSolution(geometry, float("nan"), n_max, status="below-cutoff")
        return ArrayModeSolution(geometry, bk * k, n_max)

    history = []
    prev = None
    residual = None
    for N in N_MAX_SEQUENCE:
        if prev is None:
            bk = _raw_beta(geometry, N, points=points)
            if bk is None:
                return ArrayModeSolution(geometry, float("nan"), N, status="below-cutoff",
                                         diagnostics={"n_max_history": history})
        else:
            width = max(1e-4 * (prev - geometry.n_clad), 1e-10)
            lo = max(prev - width, geometry.n_clad * (1 + 1e-12))
            hi = min(prev + width, geometry.n_fiber * (1 - 1e-12))
            bk = _raw_beta(geometry, N, window=(lo, hi), points=9)
            if bk is None:
                bk = _raw_beta(geometry, N, points=points)
            if bk is None:
                raise ConvergenceError("mode lost while increasing N_max",
                                       diagnostics={"n_max_history": history})
        history.append((N, bk))
        if prev is not None and abs(bk - prev) / bk < BETA_TOL:
            sol = solve_coefficients(geometry, bk * k, N)
            residual = boundary_residual(sol)
            if residual < RESIDUAL_TOL:
                return replace(sol, diagnostics={**sol.diagnostics, "n_max_history": history,
                                                 "boundary_residual": residual,
                                                 "converged": True})
        prev = bk
    sol = solve_coefficients(geometry, history[-1][1] * k, history[-1][0])
    residual = boundary_residual(sol)
    return replace(sol, diagnostics={**sol.diagnostics, "n_max_history": history,
                                     "boundary_residual": residual, "converged": False})


def solve_coefficients(geometry, beta, n_max):
    """Null vector of the dispersion matrix and the implied interior coefficients.

    The null vector has unit norm in the scaled unknowns with its largest
    entry positive.
    """
    s = _surface_data(geometry, beta, n_max)
    dm = dispersion_matrix(geometry, beta, n_max)
    _, sv, vt = np.linalg.svd(dm.deflated())
    if sv[-2] < DEGENERATE_RATIO * sv[0]:
        raise DegenerateModeError(
            f"no isolated null direction: sigma = {sv[-1]:.3e}, {sv[-2]:.3e}")
    v = vt[-1]
    v = v * np.sign(v[np.argmax(np.abs(v))])
    N1 = n_max + 1
    G_t = np.concatenate([[0.0], v[:n_max]])
    H_t = v[n_max:]
    J = special.jv(s["n"], s["u"])
    A = G_t + s["Cg"] @ G_t
    B = (H_t + s["Df"] @ H_t) / Z0
    E = A / J
    F = B / J
    residual = float(np.linalg.norm(dm.deflated() @ v) / np.linalg.norm(dm.deflated(), 2))
    assert len(G_t) == N1
    return ArrayModeSolution(
        geometry, float(beta), n_max, G_tilde=G_t, H_tilde=H_t, E=E, F=F,
        diagnostics={"singular_values": (float(sv[-1]), float(sv[-2]), float(sv[0])),
                     "null_residual": residual})


def solve_mode(geometry, power=None, n_max=None):
    """Solve beta and coefficients; optionally normalize to ``power`` (W)."""
    sol = solve_beta(geometry, n_max=n_max)
    if not sol.guided:
        return sol
    if not sol.has_coefficients:
        diag = sol.diagnostics
        sol = solve_coefficients(geometry, sol.beta, sol.n_max)
        sol = replace(sol, diagnostics={**sol.diagnostics, **diag})
    if power is not None:
        sol = normalize_to_power(sol, power)
    return sol


# --- field evaluation -------------------------------------------------------

def _local(geometry, x, y, j):
    xc = geometry.center_x if j == 2 else -geometry.center_x
    dx = x - xc
    return np.hypot(dx, y), np.arctan2(y, dx)


def _rowdot(A, v):
    """A @ v with a summation order that depends only on each row's values."""
    return (A * v).sum(axis=1)


def _exterior_terms(sol, r, phi, sign):
    """d/dx, d/dy and values of one fiber's exterior sums at points (r, phi)."""
    N = sol.n_max
    q = sol.q
    w = q * sol.geometry.radius
    n = np.arange(N + 1)
    ext = np.arange(-1, N + 2)
    x = q * r[:, None]
    logK_w = log_bessel_k(n, w)
    # K_{n+s}(q r) / K_n(w) for s = -1, 0, +1
    logKr = log_bessel_k(np.abs(ext)[None, :], x)
    K0 = np.exp(logKr[:, 1:-1] - logK_w)
    Km = np.exp(logKr[:, :-2] - logK_w)
    Kp = np.exp(logKr[:, 2:] - logK_w)
    dK = -(Km + Kp) / 2            # K_n'(qr)/K_n(w)
    nK = (Kp - Km) / 2             # n K_n(qr)/(qr) / K_n(w)
    par = sign ** n
    G = sol.G_tilde * par
    Hs = sol.H_tilde / Z0 * par
    sin_n = np.sin(n * phi[:, None])
    cos_n = np.cos(n * phi[:, None])
    c, s_ = np.cos(phi)[:, None], np.sin(phi)[:, None]
    Ez = _rowdot(K0 * sin_n, G)
    Hz = _rowdot(K0 * cos_n, Hs)
    dr_E = q * _rowdot(dK * sin_n, G)
    dphi_E = q * _rowdot(nK * cos_n, G)          # (1/r) d/dphi
    dr_H = q * _rowdot(dK * cos_n, Hs)
    dphi_H = -q * _rowdot(nK * sin_n, Hs)
    c, s_ = c[:, 0], s_[:, 0]
    return (Ez, Hz, c * dr_E - s_ * dphi_E, s_ * dr_E + c * dphi_E,
            c * dr_H - s_ * dphi_H, s_ * dr_H + c * dphi_H)


def _interior_terms(sol, r, phi, sign):
    N = sol.n_max
    h = sol.h
    n = np.arange(N + 1)
    x = h * r[:, None]
    J = special.jv(np.arange(-1, N + 2)[None, :], x)
    J0 = J[:, 1:-1]
    dJ = (J[:, :-2] - J[:, 2:]) / 2
    nJ = (J[:, :-2] + J[:, 2:]) / 2        # n J_n(hr)/(hr)
    par = sign ** n
    E = sol.E * par
    F = sol.F * par
    sin_n = np.sin(n * phi[:, None])
    cos_n = np.cos(n * phi[:, None])
    c, s_ = np.cos(phi), np.sin(phi)
    Ez = _rowdot(J0 * sin_n, E)
    Hz = _rowdot(J0 * cos_n, F)
    dr_E = h * _rowdot(dJ * sin_n, E)
    dphi_E = h * _rowdot(nJ * cos_n, E)
    dr_H = h * _rowdot(dJ * cos_n, F)
    dphi_H = -h * _rowdot(nJ * sin_n, F)
    return (Ez, Hz, c * dr_E - s_ * dphi_E, s_ * dr_E + c * dphi_E,
            c * dr_H - s_ * dphi_H, s_ * dr_H + c * dphi_H)


def _assemble(sol, Ez, Hz, dEx, dEy, dHx, dHy, inside):
    g = sol.geometry
    beta, k = sol.beta, g.k
    h, q = transverse_params(g, beta)
    n2 = np.where(inside, g.n_fiber**2, g.n_clad**2)
    kappa2 = np.where(inside, h * h, -q * q)
    pre = 1j * beta / kappa2
    Ex = pre * (dEx + k * Z0 / beta * dHy)
    Ey = pre * (dEy - k * Z0 / beta * dHx)
    Hx = pre * (dHx - k * n2 / (Z0 * beta) * dEy)
    Hy = pre * (dHy + k * n2 / (Z0 * beta) * dEx)
    return Ex, Ey, Ez + 0j, Hx, Hy, Hz + 0j


# Fiber-2 sums at (x, y) equal the fiber-1 sums at (-x, y) times these signs,
# for (E_z, H_z, dE_z/dx, dE_z/dy, dH_z/dx, dH_z/dy). Evaluating them this way
# makes every x-odd quantity vanish exactly on the y axis.
_MIRROR = (-1.0, 1.0, 1.0, -1.0, -1.0, 1.0)


def _eval_region(sol, x, y, region):
    """Fields at flattened points, forcing 'inside1', 'inside2' or 'outside'."""
    g = sol.geometry
    if region == "outside":
        n = len(x)
        both = _exterior_terms(sol, *_local(g, np.concatenate([x, -x]),
                                             np.concatenate([y, y]), 1), 1)
        comps = [t[:n] + m * t[n:] for t, m in zip(both, _MIRROR)]
        inside = np.zeros(x.shape, bool)
    elif region == "inside1":
        comps = _interior_terms(sol, *_local(g, x, y, 1), 1)
        inside = np.ones(x.shape, bool)
    else:
        comps = [m * t for t, m in zip(_interior_terms(sol, *_local(g, -x, y, 1), 1), _MIRROR)]
        inside = np.ones(x.shape, bool)
    return _assemble(sol, *comps, inside)


def eval_field(solution, x, y):
    """Complex field envelopes at transverse point(s) ``(x, y)`` in meters.

    Points exactly on a fiber surface are evaluated from the exterior
    expansion and flagged in ``on_surface``.
    """
    if not solution.has_coefficients:
        raise DomainError("solution has no coefficients")
    x, y = np.broadcast_arrays(np.asarray(x, float), np.asarray(y, float))
    shape = x.shape
    xf, yf = x.ravel(), y.ravel()
    a = solution.geometry.radius
    r1, _ = _local(solution.geometry, xf, yf, 1)
    r2, _ = _local(solution.geometry, xf, yf, 2)
    on_surface = (r1 == a) | (r2 == a)
    regions = {"inside1": r1 < a, "inside2": r2 < a}
    regions["outside"] = ~(regions["inside1"] | regions["inside2"])
    out = [np.zeros(xf.shape, complex) for _ in range(6)]
    for name, mask in regions.items():
        if np.any(mask):
            vals = _eval_region(solution, xf[mask], yf[mask], name)
            for o, v in zip(out, vals):
                o[mask] = v
    return FieldVector(*(o.reshape(shape) for o in out), on_surface=on_surface.reshape(shape))


def boundary_residual(solution, angles=32):
    """Largest relative jump of tangential E_z, H_z, E_phi, H_phi across r_1 = a.

    E jumps are relative to the largest tangential E on the sampled circle,
    H jumps to the largest tangential H.
    """
    g = solution.geometry
    phi = 2 * np.pi * (np.arange(angles) + 0.5) / angles
    x = -g.center_x + g.radius * np.cos(phi)
    y = g.radius * np.sin(phi)
    fin = _eval_region(solution, x, y, "inside1")
    fout = _eval_region(solution, x, y, "outside")

    def tangential(f):
        Ex, Ey, Ez, Hx, Hy, Hz = f
        Ephi = -np.sin(phi) * Ex + np.cos(phi) * Ey
        Hphi = -np.sin(phi) * Hx + np.cos(phi) * Hy
        return (Ez, Ephi), (Hz, Hphi)

    e_in, h_in = tangential(fin)
    e_out, h_out = tangential(fout)
    res = 0.0
    for inner, outer in ((e_in, e_out), (h_in, h_out)):
        scale = max(np.max(np.abs(c)) for c in inner + outer)
        for ci, co in zip(inner, outer):
            res = max(res, float(np.max(np.abs(ci - co)) / scale))
    return res


# --- power --------------------------------------------------------------------

def _quadrant_power(solution, spec, x_max, y_max):
    """Integral of S_z over 0 <= x <= x_max, 0 <= y <= y_max."""
    g = solution.geometry
    a, xc = g.radius, g.center_x

    def inner(y):
        pts = []
        if y < a:
            c = np.sqrt(a * a - y * y)
            pts = [xc - c, xc + c]

        def fx(x):
            return eval_field(solution, x, np.full_like(x, y)).poynting_z
        return integrate_adaptive(fx, 0.0, x_max, spec, points=pts)

    def fy(ys):
        return np.array([inner(y) for y in ys])

    return integrate_adaptive(fy, 0.0, y_max, spec, points=[a])


def mode_power(solution, spec=None, full_plane=False):
    """Guided power (1/2) Re integral of [E x H*]_z over the plane, in watts.

    Integrates one quadrant and multiplies by 4 (the axial Poynting density
    is even in x and y); the plane is truncated where q r = 40.
    """
    spec = spec or QuadratureSpec(rel_tol=1e-9)
    g = solution.geometry
    R = 40.0 / solution.q
    x_max = g.center_x + R
    if not full_plane:
        P = 4 * _quadrant_power(solution, spec, x_max, R)
    else:
        P = _full_plane_power(solution, spec, x_max, R)
    if not P > 0:
        raise ConvergenceError("non-positive mode power", estimate=P)
    return float(P)


def _full_plane_power(solution, spec, x_max, y_max):
    g = solution.geometry
    a, xc = g.radius, g.center_x

    def inner(y):
        pts = []
        if abs(y) < a:
            c = np.sqrt(a * a - y * y)
            pts = [-xc - c, -xc + c, xc - c, xc + c]

        def fx(x):
            return eval_field(solution, x, np.full_like(x, y)).poynting_z
        return integrate_adaptive(fx, -x_max, x_max, spec, points=pts)

    def fy(ys):
        return np.array([inner(y) for y in ys])

    return integrate_adaptive(fy, -y_max, y_max, spec, points=[-a, a])


def normalize_to_power(solution, target, spec=None):
    """Rescale coefficients so that the mode carries ``target`` watts."""
    if target <= 0:
        raise DomainError("target power must be positive")
    if not solution.has_coefficients or not np.any(solution.G_tilde) and not np.any(solution.H_tilde):
        raise DomainError("cannot normalize a zero-field solution")
    current = solution.power if solution.power is not None else mode_power(solution, spec)
    out = solution.scaled(np.sqrt(target / current))
    return replace(out, power=float(target))


# --- single fiber (independent check of the large-separation limit) -----------

def single_fiber_beta(radius, wavelength, n_fiber, n_clad=1.0, points=2000):
    """beta of the HE11 mode of one step-index fiber (standard eigenvalue equation)."""
    from scipy.optimize import brentq
    k = 2 * np.pi / wavelength

    def F(bk):
        beta = bk * k
        h = np.sqrt(k * k * n_fiber**2 - beta**2)
        q = np.sqrt(beta**2 - (k * n_clad) ** 2)
        u, w = h * radius, q * radius
        Jt = special.jvp(1, u) / (u * special.jv(1, u))
        Kt = special.kvp(1, w) / (w * special.kv(1, w))
        return ((Jt + Kt) * (n_fiber**2 * Jt + n_clad**2 * Kt)
                - (1 / u**2 + 1 / w**2) ** 2 * bk**2)

    eps = 1e-9
    grid = np.linspace(n_clad + eps, n_fiber - eps, points)
    vals = F(grid)
    roots = [brentq(F, grid[i], grid[i + 1], xtol=1e-15)
             for i in range(points - 1) if np.sign(vals[i]) != np.sign(vals[i + 1])
             and np.isfinite(vals[i]) and np.isfinite(vals[i + 1])]
    # discard pole crossings
    roots = [r for r in roots if abs(F(r)) < 1e-6]
    return max(roots) * k if roots else None
