"""Independent reference computations used to pin expected test values.

Everything here deliberately avoids the code paths it checks: permanents by
direct expansion, matrix exponentials by scaled Taylor summation, the Bessel
function by an arbitrary-precision ascending series, and random-matrix
surrogate spectra straight from their definitions.
"""

import mpmath
import numpy as np


def permanent_naive(a):
    """Permanent by recursive first-row expansion, O(N!)."""
    a = np.asarray(a, dtype=complex)
    n = a.shape[0]
    if n == 0:
        return 1.0 + 0.0j
    if n == 1:
        return complex(a[0, 0])
    total = 0.0 + 0.0j
    rest = a[1:, :]
    cols = list(range(n))
    for j in range(n):
        minor = rest[:, cols[:j] + cols[j + 1:]]
        total += a[0, j] * permanent_naive(minor)
    return total


def expm_taylor(a, scaling_steps=None):
    """Matrix exponential by scaling-and-squaring Taylor summation."""
    a = np.asarray(a, dtype=complex)
    norm = np.linalg.norm(a, ord=np.inf)
    s = scaling_steps if scaling_steps is not None else max(0, int(np.ceil(np.log2(max(norm, 1e-30)))) + 4)
    b = a / (2**s)
    out = np.eye(a.shape[0], dtype=complex)
    term = np.eye(a.shape[0], dtype=complex)
    for k in range(1, 60):
        term = term @ b / k
        out = out + term
        if np.abs(term).max() < 1e-20:
            break
    for _ in range(s):
        out = out @ out
    return out


def bessel_j1_series(z, dps=40):
    """Ascending series for J1 summed to convergence in arbitrary precision."""
    with mpmath.workdps(dps):
        q = mpmath.mpf(z) / 2
        term = q
        total = q
        k = 1
        while True:
            term *= -(q * q) / (k * (k + 1))
            total += term
            if abs(term) < mpmath.mpf(10) ** (-dps):
                break
            k += 1
        return float(total)


def poisson_surrogate_phases(dim, rng):
    """Sorted i.i.d. uniform phases on (-pi, pi]: uncorrelated-level statistics."""
    return np.sort(rng.uniform(-np.pi, np.pi, dim))


def goe_surrogate_levels(dim, rng):
    """Sorted eigenvalues of a symmetrized real Gaussian matrix."""
    g = rng.standard_normal((dim, dim))
    return np.linalg.eigvalsh((g + g.T) / 2.0)


def binomial_band(p, shots, z=3.0):
    """Central z-sigma band for an empirical frequency."""
    half = z * np.sqrt(p * (1 - p) / shots)
    return p - half, p + half
