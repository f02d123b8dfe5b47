"""Scalar ground-state polarizability of an alkali atom from a line table."""

import json
from dataclasses import dataclass, field

import numpy as np

from .constants import AMU, AU_POLARIZABILITY, C, EPS0, HBAR
from .errors import DomainError

__all__ = [
    "SpectralLine", "AtomSpecies", "CESIUM", "load_species",
    "alpha_real", "alpha_imag", "alpha_imaginary_frequency", "recoil_energy",
    "to_atomic_units", "from_atomic_units",
]


@dataclass(frozen=True)
class SpectralLine:
    """Transition from the ground level to an excited level j.

    ``gamma`` is the excited-level linewidth in rad/s; ``None`` means use
    ``A_per_s`` (natural width when the level decays only on this line).
    """

    lambda_nm: float
    A_per_s: float
    g_upper: int
    gamma: float = None

    def __post_init__(self):
        if self.lambda_nm <= 0 or self.A_per_s <= 0:
            raise DomainError("line wavelength and A coefficient must be positive")
        if self.g_upper < 1:
            raise DomainError("statistical weight must be >= 1")
        if self.gamma is not None and self.gamma < 0:
            raise DomainError("linewidth must be non-negative")

    @property
    def omega(self):
        return 2 * np.pi * C / (self.lambda_nm * 1e-9)

    @property
    def width(self):
        return self.A_per_s if self.gamma is None else self.gamma


@dataclass(frozen=True)
class AtomSpecies:
    name: str
    mass_kg: float
    g_a: int
    lines: tuple = field(default_factory=tuple)

    def __post_init__(self):
        if self.mass_kg <= 0 or self.g_a < 1:
            raise DomainError("mass must be positive and g_a >= 1")
        if not self.lines:
            raise DomainError("species needs at least one spectral line")

    def _arrays(self):
        w = np.array([ln.omega for ln in self.lines])
        a = np.array([ln.A_per_s for ln in self.lines])
        g = np.array([ln.g_upper for ln in self.lines]) / self.g_a
        gam = np.array([ln.width for ln in self.lines])
        return w, a, g, gam

    def with_linewidths(self, gammas):
        """Copy with explicit per-line widths (rad/s)."""
        lines = tuple(SpectralLine(ln.lambda_nm, ln.A_per_s, ln.g_upper, gm)
                      for ln, gm in zip(self.lines, gammas))
        return AtomSpecies(self.name, self.mass_kg, self.g_a, lines)


CESIUM = AtomSpecies(
    name="cesium",
    mass_kg=2.2069e-25,
    g_a=2,
    lines=(
        SpectralLine(852.113, 3.276e7, 4),
        SpectralLine(894.347, 2.87e7, 2),
        SpectralLine(455.528, 1.88e6, 4),
        SpectralLine(459.317, 8e5, 2),
    ),
)


def load_species(path):
    """Read a species table from JSON.

    Keys: ``mass_kg``, ``g_a``, ``lines`` (each with ``lambda_nm``,
    ``A_per_s``, ``g_upper`` and optionally ``gamma_rad_per_s``); ``name``
    is optional.
    """
    with open(path) as fh:
        raw = json.load(fh)
    allowed = {"name", "mass_kg", "g_a", "lines"}
    unknown = set(raw) - allowed
    if unknown:
        raise DomainError(f"unknown species keys: {sorted(unknown)}")
    lines = []
    for entry in raw["lines"]:
        extra = set(entry) - {"lambda_nm", "A_per_s", "g_upper", "gamma_rad_per_s"}
        if extra:
            raise DomainError(f"unknown line keys: {sorted(extra)}")
        lines.append(SpectralLine(float(entry["lambda_nm"]), float(entry["A_per_s"]),
                                  int(entry["g_upper"]), entry.get("gamma_rad_per_s")))
    return AtomSpecies(raw.get("name", str(path)), float(raw["mass_kg"]),
                       int(raw["g_a"]), tuple(lines))


def alpha_real(species, omega):
    """Real scalar polarizability at angular frequency ``omega`` (C m^2/V)."""
    omega = np.asarray(omega, dtype=float)
    if np.any(omega < 0):
        raise DomainError("omega must be non-negative")
    w, a, g, gam = species._arrays()
    om = omega[..., None]
    den = (w**2 - om**2) ** 2 + gam**2 * om**2
    if np.any(den == 0):
        raise DomainError("omega on an undamped resonance")
    terms = g * a * (1 - om**2 / w**2) / den
    return 2 * np.pi * EPS0 * C**3 * terms.sum(axis=-1)


def alpha_imag(species, omega):
    """Imaginary scalar polarizability (C m^2/V); non-negative."""
    omega = np.asarray(omega, dtype=float)
    if np.any(omega < 0):
        raise DomainError("omega must be non-negative")
    w, a, g, gam = species._arrays()
    om = omega[..., None]
    den = (w**2 - om**2) ** 2 + gam**2 * om**2
    if np.any(den == 0):
        raise DomainError("omega on an undamped resonance")
    terms = g * a * gam * om / w**2 / den
    return 2 * np.pi * EPS0 * C**3 * terms.sum(axis=-1)


def alpha_imaginary_frequency(species, xi):
    """Polarizability at imaginary frequency i*xi, damping dropped.

    alpha(i xi) = 2 pi eps0 c^3 sum_j (g_j/g_a) A_ja / (w_ja^2 (w_ja^2 + xi^2)),
    which is positive and decreasing in xi.
    """
    xi = np.asarray(xi, dtype=float)
    if np.any(xi < 0):
        raise DomainError("xi must be non-negative")
    w, a, g, _ = species._arrays()
    terms = g * a / (w**2 * (w**2 + xi[..., None] ** 2))
    return 2 * np.pi * EPS0 * C**3 * terms.sum(axis=-1)


def recoil_energy(species, wavelength):
    """(hbar k)^2 / 2M for a photon of vacuum ``wavelength`` (m), in joules."""
    if wavelength <= 0:
        raise DomainError("wavelength must be positive")
    k = 2 * np.pi / wavelength
    return (HBAR * k) ** 2 / (2 * species.mass_kg)


def to_atomic_units(alpha_si):
    return alpha_si / AU_POLARIZABILITY


def from_atomic_units(alpha_au):
    return alpha_au * AU_POLARIZABILITY
