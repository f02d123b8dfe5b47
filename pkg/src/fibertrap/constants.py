"""Physical constants (CODATA 2018, via scipy) and unit helpers."""

from scipy import constants as _c

C = _c.c
HBAR = _c.hbar
KB = _c.k
EPS0 = _c.epsilon_0
MU0 = _c.mu_0
Z0 = (MU0 / EPS0) ** 0.5
AMU = _c.atomic_mass

# atomic unit of polarizability, C m^2 / V
AU_POLARIZABILITY = _c.physical_constants["atomic unit of electric polarizability"][0]

NM = 1e-9


def to_mK(energy):
    """Energy in joules to temperature-equivalent millikelvin."""
    return energy / KB * 1e3


def to_uK(energy):
    return energy / KB * 1e6
