"""Independent reference computations for the test suite.

Nothing here imports phaseshift: the Phase-theta iteration is built as
explicit 2x2 matrices on span{|t>, |t_perp>}, and averages use quadrature.
"""
import math

import numpy as np
from scipy import integrate


def two_level_failure(theta, eps):
    """Failure probability of U R_s U^+ R_t U |s> with a 2x2 rotation U."""
    a = math.sqrt(1.0 - eps)
    b = math.sqrt(eps)
    # basis (|t>, |t_perp>); U|s> = a|t> + b|t_perp>, with |s> := |t>
    u = np.array([[a, -b], [b, a]], dtype=complex)
    ph = np.exp(1j * theta)
    r = np.diag([ph, 1.0])           # phase on the first basis vector (t, and s for U_0)
    s = np.array([1.0, 0.0], dtype=complex)
    final = u @ r @ u.conj().T @ r @ u @ s
    return 1.0 - abs(final[0]) ** 2


def mean_zero_cos(beta, alpha):
    val, _ = integrate.quad(lambda e: 1.0 - 1.0 / (2.0 * (1.0 - e)), beta, alpha,
                            epsabs=1e-14, epsrel=1e-13)
    return val / (alpha - beta)
