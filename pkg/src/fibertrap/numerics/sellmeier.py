"""Sellmeier refractive-index models."""

from dataclasses import dataclass

import numpy as np

from ..errors import DomainError

__all__ = ["SellmeierModel", "FUSED_SILICA", "sellmeier_index"]


@dataclass(frozen=True)
class SellmeierModel:
    """n^2 = 1 + sum_i B_i lam^2 / (lam^2 - lam_i^2), wavelengths in micrometers."""

    terms: tuple
    window_um: tuple = (0.21, 3.71)
    name: str = ""

    def __post_init__(self):
        for b, lam in self.terms:
            if b <= 0 or lam <= 0:
                raise DomainError("Sellmeier strengths and resonances must be positive")

    def index(self, wavelength_um):
        return sellmeier_index(self, wavelength_um)

    def resonance_frequencies(self):
        """Angular resonance frequencies 2 pi c / lam_i in rad/s."""
        from ..constants import C
        return np.array([2 * np.pi * C / (lam * 1e-6) for _, lam in self.terms])

    def strengths(self):
        return np.array([b for b, _ in self.terms])


# Malitson, JOSA 55, 1205 (1965), 20 C
FUSED_SILICA = SellmeierModel(
    terms=((0.6961663, 0.0684043), (0.4079426, 0.1162414), (0.8974794, 9.896161)),
    window_um=(0.21, 3.71),
    name="fused silica (Malitson)",
)


def sellmeier_index(model, wavelength_um):
    """Refractive index at ``wavelength_um`` (micrometers)."""
    lam = np.asarray(wavelength_um, dtype=float)
    lo, hi = model.window_um
    if np.any((lam < lo) | (lam > hi)):
        raise DomainError(f"wavelength outside the model window {model.window_um} um")
    lam2 = lam * lam
    n2 = np.ones_like(lam2)
    for b, res in model.terms:
        den = lam2 - res * res
        if np.any(np.abs(den) < 1e-14):
            raise DomainError("wavelength at a Sellmeier resonance")
        n2 = n2 + b * lam2 / den
    n = np.sqrt(n2)
    return n[()] if n.ndim == 0 else n
