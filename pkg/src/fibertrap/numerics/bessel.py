"""Cylindrical Bessel functions of integer order.

Ordinary values come from :mod:`scipy.special`. The ``log_*`` variants stay
finite where the functions themselves over- or underflow (large order, small
argument), switching to the Debye uniform expansion when the exponentially
scaled scipy routines leave the double range.
"""

import numpy as np
from scipy import special

from ..errors import DomainError

__all__ = [
    "bessel_j", "bessel_j_prime",
    "bessel_i", "bessel_i_prime",
    "bessel_k", "bessel_k_prime",
    "log_bessel_i", "log_bessel_k",
]


def _check_order(n):
    n = np.asarray(n)
    if np.any(n < 0):
        raise DomainError("Bessel order must be non-negative")
    return n


def _check_k_arg(x):
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0):
        raise DomainError("K_n(x) requires x > 0")
    return x


def bessel_j(n, x):
    """J_n(x) for integer n >= 0."""
    return special.jv(_check_order(n), x)


def bessel_j_prime(n, x):
    return special.jvp(_check_order(n), x)


def bessel_i(n, x):
    """I_n(x). Overflows to ``inf`` past x ~ 713; use :func:`log_bessel_i` there."""
    return special.iv(_check_order(n), x)


def bessel_i_prime(n, x):
    return special.ivp(_check_order(n), x)


def bessel_k(n, x):
    """K_n(x), x > 0."""
    return special.kv(_check_order(n), _check_k_arg(x))


def bessel_k_prime(n, x):
    return special.kvp(_check_order(n), _check_k_arg(x))


# Debye polynomials u_k(t), k = 0..4
def _debye_u(t):
    t2 = t * t
    u1 = t * (3.0 - 5.0 * t2) / 24.0
    u2 = t2 * (81.0 - 462.0 * t2 + 385.0 * t2 * t2) / 1152.0
    u3 = t * t2 * (30375.0 - 369603.0 * t2 + 765765.0 * t2**2
                   - 425425.0 * t2**3) / 414720.0
    u4 = t2 * t2 * (4465125.0 - 94121676.0 * t2 + 349922430.0 * t2**2
                     - 446185740.0 * t2**3 + 185910725.0 * t2**4) / 39813120.0
    return u1, u2, u3, u4


def _debye(nu, x, kind):
    z = x / nu
    s = np.sqrt(1.0 + z * z)
    t = 1.0 / s
    eta = s + np.log(z / (1.0 + s))
    u1, u2, u3, u4 = _debye_u(t)
    if kind == "i":
        series = 1.0 + u1 / nu + u2 / nu**2 + u3 / nu**3 + u4 / nu**4
        return (nu * eta - 0.5 * np.log(2.0 * np.pi * nu) - 0.5 * np.log(s)
                + np.log(series))
    series = 1.0 - u1 / nu + u2 / nu**2 - u3 / nu**3 + u4 / nu**4
    return (-nu * eta + 0.5 * np.log(np.pi / (2.0 * nu)) - 0.5 * np.log(s)
            + np.log(series))


def log_bessel_i(n, x):
    """log I_n(x) for n >= 0, x > 0, finite for any order/argument."""
    n = _check_order(n).astype(float)
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0):
        raise DomainError("log I_n(x) requires x > 0")
    n, x = np.broadcast_arrays(n, x)
    with np.errstate(divide="ignore", over="ignore", under="ignore"):
        scaled = special.ive(n, x)
        out = np.log(scaled) + x
    bad = ~np.isfinite(out) | (scaled < 1e-290)
    if np.any(bad):
        # ive(0, x) is never tiny for finite x, so bad entries have n >= 1
        out = np.array(out, copy=True)
        out[bad] = _debye(n[bad], x[bad], "i")
    return out[()] if out.ndim == 0 else out


def log_bessel_k(n, x):
    """log K_n(x) for n >= 0, x > 0, finite for any order/argument."""
    n = _check_order(n).astype(float)
    x = _check_k_arg(x)
    n, x = np.broadcast_arrays(n, x)
    with np.errstate(divide="ignore", over="ignore", under="ignore"):
        scaled = special.kve(n, x)
        out = np.log(scaled) - x
    bad = ~np.isfinite(out) | (scaled > 1e290)
    if np.any(bad):
        out = np.array(out, copy=True)
        # order 0 never overflows for x > 0; bad entries have n >= 1
        out[bad] = _debye(n[bad], x[bad], "k")
    return out[()] if out.ndim == 0 else out
