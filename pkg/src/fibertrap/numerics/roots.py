"""Sign-change root bracketing on a grid with Brent refinement."""

import numpy as np
from scipy.optimize import brentq

from ..errors import DomainError, EvaluationError

__all__ = ["find_bracketed_roots", "scan_sign_changes"]


def _checked(f):
    def wrapped(x):
        v = float(f(x))
        if not np.isfinite(v):
            raise EvaluationError(f"non-finite function value at x={x!r}", abscissa=x)
        return v
    return wrapped


def scan_sign_changes(f, grid):
    """Return ``(values, brackets)`` for ``f`` sampled on ``grid``.

    Grid points where ``f`` is exactly zero are returned as degenerate
    brackets ``(x, x)``.
    """
    g = _checked(f)
    grid = np.asarray(grid, dtype=float)
    values = np.array([g(x) for x in grid])
    brackets = []
    for i in range(len(grid) - 1):
        if values[i] == 0.0:
            brackets.append((grid[i], grid[i]))
        elif values[i] * values[i + 1] < 0:
            brackets.append((grid[i], grid[i + 1]))
    if len(grid) and values[-1] == 0.0:
        brackets.append((grid[-1], grid[-1]))
    return values, brackets


def find_bracketed_roots(f, interval, grid_points=64, tol=1e-12):
    """All sign-change roots of ``f`` on ``interval``, ascending.

    ``tol`` is the final bracket width. A function with no sign change on
    the grid yields an empty list.
    """
    lo, hi = interval
    if grid_points < 2:
        raise DomainError("grid_points must be >= 2")
    if not lo < hi:
        raise DomainError("interval must satisfy lo < hi")
    g = _checked(f)
    _, brackets = scan_sign_changes(g, np.linspace(lo, hi, grid_points))
    roots = []
    for x0, x1 in brackets:
        roots.append(x0 if x0 == x1 else brentq(g, x0, x1, xtol=tol, rtol=1e-15))
    return sorted(roots)
