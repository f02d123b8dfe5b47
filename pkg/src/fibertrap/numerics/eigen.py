"""Lowest eigenpairs of a symmetric tridiagonal matrix."""

import numpy as np
from scipy.linalg import eigh_tridiagonal

from ..errors import DomainError

__all__ = ["eigs_tridiag"]


def eigs_tridiag(diagonal, off_diagonal, k):
    """The ``k`` smallest eigenvalues and unit-norm eigenvectors.

    Returns ``(values, vectors)`` with ``vectors[:, i]`` paired to
    ``values[i]``, ascending. The sign of each vector is fixed so that its
    first entry of magnitude above 1e-12 is positive.
    """
    d = np.asarray(diagonal, dtype=float)
    e = np.asarray(off_diagonal, dtype=float)
    if e.shape != (max(len(d) - 1, 0),):
        raise DomainError("off-diagonal must have length len(diagonal) - 1")
    if not 1 <= k <= len(d):
        raise DomainError(f"k={k} outside 1..{len(d)}")
    if len(d) == 1:
        return d.copy(), np.ones((1, 1))
    w, v = eigh_tridiagonal(d, e, select="i", select_range=(0, k - 1))
    v = v / np.linalg.norm(v, axis=0)
    for i in range(v.shape[1]):
        lead = np.flatnonzero(np.abs(v[:, i]) > 1e-12)
        if len(lead) and v[lead[0], i] < 0:
            v[:, i] = -v[:, i]
    return w, v
