"""Special functions, quadrature, root finding and eigensolvers."""

from .bessel import (bessel_i, bessel_i_prime, bessel_j, bessel_j_prime,
                     bessel_k, bessel_k_prime, log_bessel_i, log_bessel_k)
from .eigen import eigs_tridiag
from .quadrature import QuadratureSpec, integrate_adaptive
from .roots import find_bracketed_roots, scan_sign_changes
from .sellmeier import FUSED_SILICA, SellmeierModel, sellmeier_index
