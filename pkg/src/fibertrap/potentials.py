"""Optical dipole, van der Waals and total potentials of the atom.

The cylinder van der Waals potential is

    V(r) = hbar/(4 pi^3 eps0) sum_n int_0^inf dbeta_int
           [beta_int^2 K_n'^2(beta_int r) + (beta_int^2 + n^2/r^2) K_n^2(beta_int r)]
           int_0^inf dxi alpha(i xi) G_n(i xi, beta_int).

With the Wronskian I_n K_n' - I_n' K_n = -1/x the response function factors
as G_n = -(I_n/K_n)(x) * chi p / (1 + chi p), x = beta_int a, chi = eps(i xi) - 1,
p = x I_n'(x) K_n(x) in (0, 1/2). The xi integral then depends on p alone;
it is tabulated once per (species, dielectric) as a Chebyshev interpolant.
"""

from dataclasses import dataclass

import numpy as np
from numpy.polynomial import chebyshev as cheb
from scipy.interpolate import CubicSpline

from .arraymode import eval_field
from .atom import alpha_imag, alpha_imaginary_frequency, alpha_real
from .constants import C, EPS0, HBAR, KB, NM
from .errors import ConvergenceError, DomainError
from .numerics import (FUSED_SILICA, QuadratureSpec, bessel_i, bessel_i_prime,
                       bessel_k, bessel_k_prime, integrate_adaptive,
                       log_bessel_i, log_bessel_k)

__all__ = [
    "DielectricModel", "PotentialSample", "VdwModel", "SILICA_DIELECTRIC",
    "optical_potential", "scattering_rate", "vdw_kernel", "vdw_single",
    "vdw_pair", "total_potential",
]

HARMONIC_TOL = 1e-6
P_MAX = 0.5


@dataclass(frozen=True)
class DielectricModel:
    """eps(i xi)/eps0 = 1 + sum_i B_i w_i^2 / (w_i^2 + xi^2)."""

    strengths: tuple
    frequencies: tuple        # rad/s

    def __post_init__(self):
        if any(b <= 0 for b in self.strengths) or any(w <= 0 for w in self.frequencies):
            raise DomainError("oscillator strengths and frequencies must be positive")

    @classmethod
    def from_sellmeier(cls, model):
        return cls(tuple(model.strengths()), tuple(model.resonance_frequencies()))

    def susceptibility(self, xi):
        """eps(i xi)/eps0 - 1."""
        xi = np.asarray(xi, dtype=float)[..., None]
        b = np.array(self.strengths)
        w = np.array(self.frequencies)
        return np.sum(b * w**2 / (w**2 + xi**2), axis=-1)

    def permittivity(self, xi):
        return 1.0 + self.susceptibility(xi)

    @property
    def static(self):
        return 1.0 + sum(self.strengths)


SILICA_DIELECTRIC = DielectricModel.from_sellmeier(FUSED_SILICA)


@dataclass(frozen=True)
class PotentialSample:
    """Potentials (J) and scattering rate (1/s) at one point (x, y in nm)."""

    x_nm: float
    y_nm: float
    U_opt: float
    U_vdW: float
    U: float
    Gamma_sc: float

    @property
    def U_mK(self):
        return self.U / KB * 1e3


def _omega(mode):
    return 2 * np.pi * C / mode.geometry.wavelength


def optical_potential(mode, species, x, y):
    """U_opt = -alpha |E|^2 / 4 in joules."""
    alpha = alpha_real(species, _omega(mode))
    return -0.25 * alpha * eval_field(mode, x, y).intensity


def scattering_rate(mode, species, x, y):
    """Gamma_sc = kappa |E|^2 / (4 hbar) in 1/s."""
    kappa = alpha_imag(species, _omega(mode))
    return kappa * eval_field(mode, x, y).intensity / (4 * HBAR)


def vdw_kernel(n, xi, beta_int, radius, dielectric):
    """Cylinder response G_n(i xi, beta_int), relative-permittivity form.

    Evaluated directly from I_n, K_n and their derivatives; use for moderate
    ``beta_int * radius`` (the products overflow past ~700).
    """
    if np.any(np.asarray(beta_int) <= 0) or np.any(np.asarray(xi) < 0):
        raise DomainError("need beta_int > 0 and xi >= 0")
    x = beta_int * radius
    eps = dielectric.permittivity(xi)
    I, Ip = bessel_i(n, x), bessel_i_prime(n, x)
    K, Kp = bessel_k(n, x), bessel_k_prime(n, x)
    den = I * Kp - eps * Ip * K
    if np.any(den == 0):
        raise DomainError("vanishing denominator in G_n")
    return (eps - 1.0) * I * Ip / den


def _log_ratio_terms(n, x):
    """log I_n(x), log K_n(x) and p = x I_n'(x) K_n(x) for array n, x."""
    logI = log_bessel_i(n, x)
    logK = log_bessel_k(n, x)
    logIm = log_bessel_i(np.abs(n - 1), x)
    logIp = log_bessel_i(n + 1, x)
    p = 0.5 * x * (np.exp(logIm + logK) + np.exp(logIp + logK))
    return logI, logK, p


class VdwModel:
    """Single-cylinder van der Waals potential V(r) for one atom and material.

    Parameters
    ----------
    species : AtomSpecies
    dielectric : DielectricModel
    radius : float
        Fiber radius in meters.
    spec : QuadratureSpec, optional
        Tolerances for the beta_int integral.
    """

    def __init__(self, species, dielectric, radius, spec=None, cheb_degree=48):
        self.species = species
        self.dielectric = dielectric
        self.radius = radius
        self.spec = spec or QuadratureSpec(rel_tol=1e-9)
        self._xi_scale = float(np.min([ln.omega for ln in species.lines]))
        nodes = cheb.chebpts2(cheb_degree + 1) * (P_MAX / 2) + P_MAX / 2
        vals = self.xi_integral_direct(nodes)
        self._phi = cheb.Chebyshev.fit(nodes, vals, cheb_degree, domain=[0, P_MAX])
        self._table = None

    def xi_integral_direct(self, p):
        """Phi(p) = int_0^inf alpha(i xi) chi p / (1 + chi p) dxi by quadrature."""
        p = np.atleast_1d(np.asarray(p, dtype=float))

        def f(xi):
            chi = self.dielectric.susceptibility(xi)[:, None]
            al = alpha_imaginary_frequency(self.species, xi)[:, None]
            return al * chi * p / (1 + chi * p)

        spec = QuadratureSpec(rel_tol=1e-12, scale=self._xi_scale)
        return integrate_adaptive(f, 0.0, np.inf, spec)

    def xi_integral(self, p):
        """Phi(p) from the Chebyshev table, 0 <= p <= 1/2."""
        return self._phi(np.clip(p, 0.0, P_MAX))

    def _beta_integrand(self, r, n):
        a = self.radius
        nn = n[None, :]
        w = np.where(n == 0, 1.0, 2.0)

        def f(beta):
            b = beta[:, None]
            logI_a, logK_a, p = _log_ratio_terms(nn, b * a)
            L = log_bessel_k(nn, b * r)
            Lm = log_bessel_k(np.abs(nn - 1), b * r)
            Lp = log_bessel_k(nn + 1, b * r)
            dk = 0.5 * (np.exp(Lm - L) + np.exp(Lp - L))     # -K_n'/K_n
            bracket = b**2 * dk**2 + b**2 + nn**2 / r**2
            mag = np.exp(2 * L + logI_a - logK_a)
            return -w * bracket * mag * self.xi_integral(p)

        return f

    def _harmonics_needed(self, r):
        return int(np.ceil(np.log(1e7) / (2 * np.log(r / self.radius)))) + 10

    def direct(self, r):
        """V(r) in joules by direct summation and quadrature, r > radius."""
        a = self.radius
        if r <= a:
            raise DomainError("van der Waals potential requires r > a")
        n_max = self._harmonics_needed(r)
        spec = QuadratureSpec(rel_tol=self.spec.rel_tol, abs_tol=self.spec.abs_tol,
                              max_subdivisions=self.spec.max_subdivisions,
                              scale=1.0 / (r - a))
        for _ in range(8):
            n = np.arange(n_max + 1)
            terms = integrate_adaptive(self._beta_integrand(r, n), 0.0, np.inf, spec)
            total = terms.sum()
            if abs(terms[-1]) <= HARMONIC_TOL * abs(total):
                return HBAR / (4 * np.pi**3 * EPS0) * total
            n_max = int(n_max * 1.5) + 1
        raise ConvergenceError("harmonic sum did not converge",
                               estimate=HBAR / (4 * np.pi**3 * EPS0) * total,
                               diagnostics={"n_max": n_max, "last_term": terms[-1]})

    def build_table(self, gap_min=1 * NM, gap_max=None, points=400, workers=1):
        """Tabulate V on a log grid in r - a and switch :meth:`__call__` to it."""
        a = self.radius
        gap_max = gap_max or 10 * a
        gaps = np.geomspace(gap_min, gap_max, points)
        rs = a + gaps
        if workers > 1:
            from concurrent.futures import ProcessPoolExecutor
            with ProcessPoolExecutor(workers) as pool:
                vals = np.array(list(pool.map(self.direct, rs)))
        else:
            vals = np.array([self.direct(r) for r in rs])
        self._table = (gaps, vals,
                       CubicSpline(np.log(gaps), np.log(-vals)))
        return rs, vals

    @property
    def table(self):
        """(gaps, values) of the radial table, or None."""
        return None if self._table is None else self._table[:2]

    def __call__(self, r):
        """V(r) in joules; array input, table-interpolated where possible."""
        r = np.asarray(r, dtype=float)
        if np.any(r <= self.radius):
            raise DomainError("van der Waals potential requires r > a")
        flat = r.ravel()
        out = np.empty_like(flat)
        gap = flat - self.radius
        if self._table is not None:
            gaps, _, spline = self._table
            inside = (gap >= gaps[0]) & (gap <= gaps[-1])
            out[inside] = -np.exp(spline(np.log(gap[inside])))
        else:
            inside = np.zeros(flat.shape, bool)
        for i in np.flatnonzero(~inside):
            out[i] = self.direct(flat[i])
        return out.reshape(r.shape)[()]

    def __getstate__(self):
        return self.__dict__

    def __setstate__(self, state):
        self.__dict__.update(state)


def vdw_single(model, r):
    """Van der Waals potential of one fiber at distance ``r`` from its axis."""
    return model(r)


def _fiber_distances(geometry, x, y):
    xc = geometry.center_x
    return np.hypot(x + xc, y), np.hypot(x - xc, y)


def vdw_pair(geometry, model, x, y):
    """U_vdW = V(r_1) + V(r_2); points inside a fiber raise DomainError."""
    x, y = np.broadcast_arrays(np.asarray(x, float), np.asarray(y, float))
    r1, r2 = _fiber_distances(geometry, x, y)
    if np.any(r1 <= geometry.radius) or np.any(r2 <= geometry.radius):
        raise DomainError("point inside or on a fiber")
    return model(r1) + model(r2)


def total_potential(mode, species, model, x, y):
    """PotentialSample at one point (meters), or a list for array input."""
    xa, ya = np.broadcast_arrays(np.atleast_1d(np.asarray(x, float)),
                                 np.atleast_1d(np.asarray(y, float)))
    field = eval_field(mode, xa, ya)
    omega = _omega(mode)
    u_opt = -0.25 * alpha_real(species, omega) * field.intensity
    gam = alpha_imag(species, omega) * field.intensity / (4 * HBAR)
    u_vdw = vdw_pair(mode.geometry, model, xa, ya)
    samples = [PotentialSample(float(xi / NM), float(yi / NM), float(uo), float(uv),
                               float(uo + uv), float(g))
               for xi, yi, uo, uv, g in zip(xa.ravel(), ya.ravel(), u_opt.ravel(),
                                            u_vdw.ravel(), gam.ravel())]
    return samples[0] if np.ndim(x) == 0 and np.ndim(y) == 0 else samples
