"""Statistical pipeline for scattering-submatrix elements.

Collects the real and imaginary parts of an N x N block of the mode-evolution
matrix across a disorder ensemble, standardizes the pooled sample, and tests
it for normality.  The normality test and the normal quantile function are
implemented locally: the W statistic with Royston's coefficient and p-value
approximations (valid for 3 <= n <= 5000), and the quantile function as the
standard rational minimax approximation (relative error far below 1e-9).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from photonrotor.linalg import eig_unitary


@dataclass
class SampleSet:
    """Pooled real samples plus a record of where they came from."""

    values: np.ndarray
    source: dict = field(default_factory=dict)

    @property
    def n(self):
        return len(self.values)


def collect_submatrix_elements(ensemble, m, n_sub, rows=None, cols=None, parts="pooled"):
    """Entries of the n_sub x n_sub block of U_S(m) pooled across the ensemble.

    Default block: the first ``n_sub`` modes on both sides.  ``parts`` selects
    "pooled" (real and imaginary parts interleaved per member, 2 n_sub^2 |E|
    samples), "real", or "imag".  Deterministic given the ensemble.
    """
    rows = np.arange(n_sub) if rows is None else np.asarray(rows, dtype=int)
    cols = np.arange(n_sub) if cols is None else np.asarray(cols, dtype=int)
    if parts not in ("pooled", "real", "imag"):
        raise ValueError(f"parts must be pooled|real|imag, got {parts!r}")
    chunks = []
    for f in ensemble:
        matrix = getattr(f, "matrix", f)
        dec = eig_unitary(matrix)
        # exp(i m arg(lam)) keeps the modulus exactly 1 for large powers
        powers = np.exp(1j * m * np.angle(dec.eigenvalues))
        v = dec.eigenvectors
        block = (v[rows, :] * powers[None, :]) @ v.conj().T[:, cols]
        if parts in ("pooled", "real"):
            chunks.append(block.real.ravel())
        if parts in ("pooled", "imag"):
            chunks.append(block.imag.ravel())
    values = np.concatenate(chunks)
    source = {
        "m": int(m),
        "n_sub": int(n_sub),
        "rows": [int(r) for r in rows],
        "cols": [int(c) for c in cols],
        "parts": parts,
        "ensemble_size": len(list(ensemble)),
        "master_seed": getattr(ensemble, "master_seed", None),
    }
    return SampleSet(values=values, source=source)


def standardize(sample):
    """Shift to mean 0 and scale to unit variance (n-1 denominator)."""
    values = sample.values if hasattr(sample, "values") else np.asarray(sample, dtype=float)
    if len(values) < 2:
        raise ValueError("standardize needs at least 2 samples")
    sd = values.std(ddof=1)
    if sd == 0:
        raise ValueError("standardize rejects zero-variance samples")
    out = (values - values.mean()) / sd
    source = dict(getattr(sample, "source", {}))
    source["standardized"] = True
    return SampleSet(values=out, source=source)


# --- normal quantile function (rational approximation, AS 241 PPND16) --------

_PPND_A = [3.3871328727963666080e0, 1.3314166789178437745e2, 1.9715909503065514427e3,
           1.3731693765509461125e4, 4.5921953931549871457e4, 6.7265770927008700853e4,
           3.3430575583588128105e4, 2.5090809287301226727e3]
_PPND_B = [1.0, 4.2313330701600911252e1, 6.8718700749205790830e2, 5.3941960214247511077e3,
           2.1213794301586595867e4, 3.9307895800092710610e4, 2.8729085735721942674e4,
           5.2264952788528545610e3]
_PPND_C = [1.42343711074968357734e0, 4.63033784615654529590e0, 5.76949722146069140550e0,
           3.64784832476320460504e0, 1.27045825245236838258e0, 2.41780725177450611770e-1,
           2.27238449892691845833e-2, 7.74545014278341407640e-4]
_PPND_D = [1.0, 2.05319162663775882187e0, 1.67638483018380384940e0, 6.89767334985100004550e-1,
           1.48103976427480074590e-1, 1.51986665636164571966e-2, 5.47593808499534494600e-4,
           1.05075007164441684324e-9]
_PPND_E = [6.65790464350110377720e0, 5.46378491116411436990e0, 1.78482653991729133580e0,
           2.96560571828504891230e-1, 2.65321895265761230930e-2, 1.24266094738807843860e-3,
           2.71155556874348757815e-5, 2.01033439929228813265e-7]
_PPND_F = [1.0, 5.99832206555887937690e-1, 1.36929880922735805310e-1, 1.48753612908506148525e-2,
           7.86869131145613259100e-4, 1.84631831751005468180e-5, 1.42151175831644588870e-7,
           2.04426310338993978564e-15]


def _poly(coeffs, x):
    out = coeffs[-1]
    for c in reversed(coeffs[:-1]):
        out = out * x + c
    return out


def normal_quantile(p):
    """Inverse standard-normal CDF."""
    p = float(p)
    if not 0.0 < p < 1.0:
        raise ValueError(f"normal_quantile needs p in (0, 1), got {p}")
    q = p - 0.5
    if abs(q) <= 0.425:
        r = 0.180625 - q * q
        return q * _poly(_PPND_A, r) / _poly(_PPND_B, r)
    r = p if q < 0 else 1.0 - p
    r = math.sqrt(-math.log(r))
    if r <= 5.0:
        r -= 1.6
        val = _poly(_PPND_C, r) / _poly(_PPND_D, r)
    else:
        r -= 5.0
        val = _poly(_PPND_E, r) / _poly(_PPND_F, r)
    return -val if q < 0 else val


def _normal_cdf_upper(z):
    return 0.5 * math.erfc(z / math.sqrt(2.0))


# --- Shapiro-Wilk, Royston (1995) approximation -------------------------------

_SW_C1 = [0.0, 0.221157, -0.147981, -2.071190, 4.434685, -2.706056]
_SW_C2 = [0.0, 0.042981, -0.293762, -1.752461, 5.682633, -3.582633]


def _sw_weights(n):
    if n == 3:
        return np.array([-math.sqrt(0.5), 0.0, math.sqrt(0.5)])
    m = np.array([normal_quantile((i - 0.375) / (n + 0.25)) for i in range(1, n + 1)])
    ssq = float(m @ m)
    rsn = 1.0 / math.sqrt(n)
    a_n = _poly(_SW_C1, rsn) + m[-1] / math.sqrt(ssq)
    if n > 5:
        a_n1 = _poly(_SW_C2, rsn) + m[-2] / math.sqrt(ssq)
        phi = (ssq - 2.0 * m[-1] ** 2 - 2.0 * m[-2] ** 2) / (1.0 - 2.0 * a_n**2 - 2.0 * a_n1**2)
        a = m / math.sqrt(phi)
        a[-1], a[-2] = a_n, a_n1
        a[0], a[1] = -a_n, -a_n1
    else:
        phi = (ssq - 2.0 * m[-1] ** 2) / (1.0 - 2.0 * a_n**2)
        a = m / math.sqrt(phi)
        a[-1] = a_n
        a[0] = -a_n
    return a


def _sw_p_value(w, n):
    if n == 3:
        p = (6.0 / math.pi) * (math.asin(math.sqrt(w)) - math.asin(math.sqrt(0.75)))
        return min(max(p, 0.0), 1.0)
    one_minus = max(1.0 - w, 1e-300)
    if n <= 11:
        gamma = -2.273 + 0.459 * n
        arg = gamma - math.log(one_minus)
        if arg <= 0:
            return 0.0
        g = -math.log(arg)
        mu = 0.5440 - 0.39978 * n + 0.025054 * n**2 - 0.0006714 * n**3
        sigma = math.exp(1.3822 - 0.77857 * n + 0.062767 * n**2 - 0.0020322 * n**3)
    else:
        g = math.log(one_minus)
        u = math.log(n)
        mu = -1.5861 - 0.31082 * u - 0.083751 * u**2 + 0.0038915 * u**3
        sigma = math.exp(-0.4803 - 0.082676 * u + 0.0030302 * u**2)
    return _normal_cdf_upper((g - mu) / sigma)


@dataclass
class NormalityReport:
    w_statistic: float
    p_value: float
    n: int
    alpha: float
    verdict: bool                   # True: consistent with normal at level alpha
    subsampled_from: int | None = None

    def as_dict(self):
        return {"W": self.w_statistic, "p": self.p_value, "n": self.n,
                "alpha": self.alpha,
                "verdict": "normal" if self.verdict else "not normal",
                "subsampled_from": self.subsampled_from}


def shapiro_wilk(sample, alpha=0.05, max_n=5000, subsample_seed=0):
    """Shapiro-Wilk normality test (Royston approximation, 3 <= n <= 5000).

    Samples larger than ``max_n`` are reduced by a seeded uniform draw and the
    report records the original size.  The p-value transform is approximate;
    downstream checks should compare verdicts, not p-values.
    """
    values = sample.values if hasattr(sample, "values") else np.asarray(sample, dtype=float)
    values = np.asarray(values, dtype=float)
    subsampled_from = None
    if len(values) > max_n:
        rng = np.random.default_rng(subsample_seed)
        subsampled_from = len(values)
        values = rng.choice(values, size=max_n, replace=False)
    n = len(values)
    if n < 3 or n > 5000:
        raise ValueError(f"shapiro_wilk needs 3 <= n <= 5000, got {n}")
    x = np.sort(values)
    if x[-1] - x[0] == 0:
        raise ValueError("shapiro_wilk rejects zero-range samples")
    a = _sw_weights(n)
    ssd = float(np.sum((x - x.mean()) ** 2))
    w = float((a @ x) ** 2 / ssd)
    w = min(w, 1.0)
    p = float(_sw_p_value(w, n))
    return NormalityReport(w_statistic=w, p_value=p, n=n, alpha=alpha,
                           verdict=p > alpha, subsampled_from=subsampled_from)


@dataclass
class QQSeries:
    theoretical: np.ndarray
    sample: np.ndarray


def qq_points(sample):
    """Sorted samples against standard-normal quantiles at (i - 0.5)/n."""
    values = sample.values if hasattr(sample, "values") else np.asarray(sample, dtype=float)
    n = len(values)
    if n < 2:
        raise ValueError("qq_points needs at least 2 samples")
    theo = np.array([normal_quantile((i - 0.5) / n) for i in range(1, n + 1)])
    return QQSeries(theoretical=theo, sample=np.sort(values))


def element_histogram(sample, bins):
    """Normalized density histogram over the sample range; (edges, density)."""
    values = sample.values if hasattr(sample, "values") else np.asarray(sample, dtype=float)
    if len(values) == 0:
        raise ValueError("element_histogram needs a non-empty sample")
    bins = int(bins)
    if bins < 2:
        raise ValueError("element_histogram needs bins >= 2")
    density, edges = np.histogram(values, bins=bins, density=True)
    return edges, density
