"""Multi-photon configuration space, permanents, and output probabilities.

A configuration is a tuple of per-mode occupation numbers.  Output amplitudes
of non-interacting photons are permanents of scattering submatrices built by
replicating rows (input occupations) and columns (output occupations) of the
mode-evolution matrix; probabilities carry the inverse factorial weights of
both configurations.  The independent cross-check is a symbolic evolution in
the full bosonic Fock basis that never touches permanent code.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from photonrotor.linalg import NumericalFailure, TOL

_INT64_MAX = 2**63 - 1


def hilbert_dim(modes, photons):
    """Number of configurations of N photons in M modes, C(M+N-1, N)."""
    modes, photons = int(modes), int(photons)
    if modes < 1:
        raise ValueError("hilbert_dim needs modes >= 1")
    if photons < 0:
        raise ValueError("hilbert_dim needs photons >= 0")
    dim = math.comb(modes + photons - 1, photons)
    if dim > _INT64_MAX:
        raise ValueError(f"hilbert_dim overflows 64-bit: C({modes + photons - 1},{photons})")
    return dim


@dataclass
class ConfigurationSpace:
    """All occupation vectors of N photons in M modes, lexicographic order."""

    modes: int
    photons: int
    configurations: list

    _index: dict | None = field(default=None, repr=False, compare=False)
    _occupations: np.ndarray | None = field(default=None, repr=False, compare=False)

    @property
    def dim(self):
        return len(self.configurations)

    def index(self, config):
        if self._index is None:
            self._index = {c: k for k, c in enumerate(self.configurations)}
        return self._index[tuple(config)]

    @property
    def occupations(self):
        """dim x M integer matrix of occupation numbers."""
        if self._occupations is None:
            self._occupations = np.array(self.configurations, dtype=np.int64)
        return self._occupations


def enumerate_configurations(modes, photons, budget=2_000_000):
    """Complete, duplicate-free configuration list in ascending lexicographic order."""
    dim = hilbert_dim(modes, photons)
    if dim > budget:
        raise ValueError(f"configuration space of size {dim} exceeds budget {budget}")
    configs = []
    occ = [0] * modes

    def fill(mode, remaining):
        if mode == modes - 1:
            occ[mode] = remaining
            configs.append(tuple(occ))
            return
        for n in range(remaining + 1):
            occ[mode] = n
            fill(mode + 1, remaining - n)
        occ[mode] = 0

    fill(0, photons)
    return ConfigurationSpace(modes=modes, photons=photons, configurations=configs)


def _replicated_indices(config):
    return np.repeat(np.arange(len(config)), np.asarray(config, dtype=np.int64))


@dataclass
class ScatteringSubmatrix:
    matrix: np.ndarray
    input_config: tuple
    output_config: tuple


def submatrix(u, input_config, output_config):
    """N x N scattering submatrix: rows from input modes, columns from output modes.

    Row i is replicated n_i(input) times and column j is replicated
    n_j(output) times, in ascending mode order.
    """
    input_config = tuple(int(n) for n in input_config)
    output_config = tuple(int(n) for n in output_config)
    if sum(input_config) != sum(output_config):
        raise ValueError("input and output configurations carry different photon numbers")
    rows = _replicated_indices(input_config)
    cols = _replicated_indices(output_config)
    u = np.asarray(u, dtype=complex)
    return ScatteringSubmatrix(matrix=u[np.ix_(rows, cols)],
                               input_config=input_config, output_config=output_config)


def permanent_ryser(a):
    """Permanent by Ryser's inclusion-exclusion with Gray-code subset updates.

    O(2^N N); exact up to floating accumulation.  Guarded at N <= 30, well past
    desk scale.  The empty matrix has permanent 1.
    """
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"permanent needs a square matrix, got {a.shape}")
    n = a.shape[0]
    if n == 0:
        return 1.0 + 0.0j
    if n > 30:
        raise ValueError(f"permanent_ryser guarded at N <= 30, got {n}")
    total = 0.0 + 0.0j
    row_sums = np.zeros(n, dtype=complex)
    gray = 0
    sign = 1.0  # (-1)^|S|, |S| parity flips on every Gray step
    for k in range(1, 1 << n):
        g = k ^ (k >> 1)
        bit = g ^ gray
        col = bit.bit_length() - 1
        if g & bit:
            row_sums += a[:, col]
        else:
            row_sums -= a[:, col]
        gray = g
        sign = -sign
        total += sign * np.prod(row_sums)
    return complex(total * (-1.0) ** n)


def _factorial_product(config):
    out = 1
    for n in config:
        out *= math.factorial(n)
    return out


def amplitude(u, input_config, output_config):
    """Transition amplitude between two configurations after the mode map ``u``.

    Per[ submatrix ] / sqrt(prod_j n_j(out)! * prod_i n_i(in)!); the input
    factor reduces to 1 for the usual zero/one input occupations.
    """
    sub = submatrix(u, input_config, output_config)
    norm = math.sqrt(_factorial_product(sub.input_config)
                     * _factorial_product(sub.output_config))
    return permanent_ryser(sub.matrix) / norm


@dataclass
class ProbabilityTable:
    """Output distribution over a configuration space at stroboscopic time m."""

    space: ConfigurationSpace
    probs: np.ndarray
    m: int | None = None
    input_config: tuple | None = None

    def prob(self, config):
        return float(self.probs[self.space.index(config)])


def _check_normalization(probs, label):
    total = float(probs.sum())
    if abs(total - 1.0) > TOL.prob_norm_fail:
        raise NumericalFailure(f"{label} sums to {total!r}, off by more than "
                               f"{TOL.prob_norm_fail:.1e}", abs(total - 1.0))
    return total


def probability_table(u, input_config, space, m=None):
    """|amplitude|^2 for every configuration; total probability checked to 1."""
    input_config = tuple(int(n) for n in input_config)
    if sum(input_config) != space.photons or len(input_config) != space.modes:
        raise ValueError("input configuration does not match the configuration space")
    probs = np.empty(space.dim)
    for k, config in enumerate(space.configurations):
        probs[k] = abs(amplitude(u, input_config, config)) ** 2
    _check_normalization(probs, "probability table")
    return ProbabilityTable(space=space, probs=probs, m=m, input_config=input_config)


def mean_photon_number(table, mode):
    """Mean occupation of one mode under an output distribution."""
    return float(table.space.occupations[:, mode] @ table.probs)


def mean_photon_profile(table):
    """Mean occupation of every mode; sums to the photon number."""
    return table.space.occupations.T @ table.probs


def exact_sampler(table, rng, shots):
    """Draw i.i.d. configurations by cumulative-sum inversion."""
    shots = int(shots)
    if shots < 0:
        raise ValueError("exact_sampler needs shots >= 0")
    if shots == 0:
        return []
    cum = np.cumsum(table.probs)
    cum /= cum[-1]
    idx = np.searchsorted(cum, rng.random(shots), side="right")
    return [table.space.configurations[i] for i in idx]


def fock_evolution_oracle(u, input_config, space, budget=5000):
    """Output distribution via symbolic evolution in the full Fock basis.

    Each occupied input mode contributes a factor sum_j u[i, j] a_j^dag; the
    product is expanded monomial by monomial (creation operators commute, so
    normal ordering is immediate) and amplitudes are read off against the
    normalized number states.  Independent of all permanent code paths.
    """
    if space.dim > budget:
        raise ValueError(f"fock_evolution_oracle budget exceeded: {space.dim} > {budget}")
    input_config = tuple(int(n) for n in input_config)
    if sum(input_config) != space.photons or len(input_config) != space.modes:
        raise ValueError("input configuration does not match the configuration space")
    u = np.asarray(u, dtype=complex)
    modes = space.modes
    poly = {(0,) * modes: 1.0 + 0.0j}
    for i, n_i in enumerate(input_config):
        for _ in range(n_i):
            nxt = {}
            for occ, coef in poly.items():
                for j in range(modes):
                    amp = u[i, j]
                    if amp == 0:
                        continue
                    key = occ[:j] + (occ[j] + 1,) + occ[j + 1:]
                    nxt[key] = nxt.get(key, 0.0 + 0.0j) + coef * amp
            poly = nxt
    in_norm = math.sqrt(_factorial_product(input_config))
    probs = np.zeros(space.dim)
    for occ, coef in poly.items():
        gamma = coef * math.sqrt(_factorial_product(occ)) / in_norm
        probs[space.index(occ)] = abs(gamma) ** 2
    _check_normalization(probs, "fock oracle table")
    return ProbabilityTable(space=space, probs=probs, input_config=input_config)
