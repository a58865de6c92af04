"""Construction of the disordered kicked-rotor photonic circuit.

One drive period applies a pattern of local phase shifters (diagonal unitary
``U1``) followed by a nearest-neighbour multiport beamsplitter (``U2``); the
one-period evolution is ``F = U2 @ U1``.  Static phase disorder defines an
ensemble of such operators indexed by a reproducible per-member RNG stream.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from photonrotor.linalg import assert_unitary, matrix_power


@dataclass(frozen=True)
class ModelParams:
    """Circuit parameters.

    M        number of modes (>= 2)
    theta    beamsplitter angle in radians (kick strength)
    Phi      harmonic trap strength in radians
    W        disorder half-width in radians; phase offsets are uniform on [-W, W]
    boundary "periodic" (default; the beamsplitter couples mode M back to 1)
             or "open"
    T, hbar  fixed to 1; kept as explicit fields so quasienergies are plain angles
    """

    M: int
    theta: float
    Phi: float
    W: float
    boundary: str = "periodic"
    T: float = 1.0
    hbar: float = 1.0

    def __post_init__(self):
        if self.M < 2:
            raise ValueError("ModelParams.M must be >= 2")
        if self.W < 0:
            raise ValueError("ModelParams.W must be >= 0")
        if self.boundary not in ("periodic", "open"):
            raise ValueError(f"ModelParams.boundary must be periodic|open, got {self.boundary!r}")
        if self.T != 1.0 or self.hbar != 1.0:
            raise ValueError("ModelParams fixes T = hbar = 1")


@dataclass(frozen=True)
class DisorderRealization:
    """One draw of the M phase offsets, reproducible from (seed, index)."""

    deltas: np.ndarray
    seed: int
    index: int


@dataclass
class FloquetOperator:
    """One-period unitary together with the parameters that built it."""

    params: ModelParams
    realization: DisorderRealization
    matrix: np.ndarray


@dataclass
class FloquetEnsemble:
    members: list = field(default_factory=list)
    master_seed: int = 0

    def __len__(self):
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    @property
    def params(self):
        return self.members[0].params


def phase_profile(params):
    """Quadratic on-site phase profile, (4 Phi / M^2) (j - M/2)^2 for j = 1..M.

    The vertex sits at mode j = M/2 and the profile reaches Phi at j = M.
    """
    j = np.arange(1, params.M + 1, dtype=float)
    return (4.0 * params.Phi / params.M**2) * (j - params.M / 2.0) ** 2


def disorder_rng(master_seed, index):
    """Per-realization generator; stream `index` of `master_seed`.

    SeedSequence(entropy=master_seed, spawn_key=(index,)) is the documented
    spawning construction, so member streams are independent and identical
    under any parallel schedule.
    """
    ss = np.random.SeedSequence(entropy=int(master_seed), spawn_key=(int(index),))
    return np.random.default_rng(ss)


def sample_disorder(params, master_seed, index):
    """Draw the M i.i.d. uniform phase offsets on [-W, W] for member `index`."""
    rng = disorder_rng(master_seed, index)
    deltas = rng.uniform(-params.W, params.W, params.M)
    return DisorderRealization(deltas=deltas, seed=int(master_seed), index=int(index))


def build_u1(params, realization):
    """Diagonal phase-shifter unitary with entries exp(-i (phi_j + delta_j))."""
    phases = phase_profile(params) + realization.deltas
    return np.diag(np.exp(-1j * phases))


def _adjacency_open(M):
    a = np.zeros((M, M))
    idx = np.arange(M - 1)
    a[idx, idx + 1] = 1.0
    a[idx + 1, idx] = 1.0
    return a


def build_u2(params):
    """Beamsplitter unitary exp(-i theta A) for the nearest-neighbour chain.

    Periodic boundary: A is circulant, so the exponential is evaluated exactly
    in the plane-wave basis with eigenvalues 2 cos(2 pi s / M) and eigenvectors
    exp(-i 2 pi s j / M)/sqrt(M).  Open boundary: dense symmetric
    eigendecomposition of the tridiagonal adjacency matrix.
    """
    M, theta = params.M, params.theta
    if params.boundary == "periodic":
        s = np.arange(M)
        lam = np.exp(-1j * theta * 2.0 * np.cos(2.0 * np.pi * s / M))
        v = np.exp(-2j * np.pi * np.outer(np.arange(M), s) / M) / np.sqrt(M)
        u2 = (v * lam) @ v.conj().T
    else:
        w, p = np.linalg.eigh(_adjacency_open(M))
        u2 = (p * np.exp(-1j * theta * w)) @ p.T
    return u2


def build_floquet(params, realization, u2=None):
    """One-period unitary F = U2 @ U1 (phases first, then beamsplitter).

    ``u2`` can be passed in to amortise the beamsplitter construction across
    an ensemble (it does not depend on the disorder).
    """
    if u2 is None:
        u2 = build_u2(params)
    phases = phase_profile(params) + realization.deltas
    # U2 @ diag(e^{-i phases}) without forming the diagonal matrix
    f = u2 * np.exp(-1j * phases)[None, :]
    assert_unitary(f, label="Floquet operator")
    return FloquetOperator(params=params, realization=realization, matrix=f)


def build_ensemble(params, master_seed, count, threads=1):
    """Build `count` members with realization indices 0..count-1.

    Member w is a deterministic function of (master_seed, w); the ensemble is
    identical whether built serially or with a thread pool.
    """
    count = int(count)
    if count < 1:
        raise ValueError("build_ensemble needs count >= 1")
    u2 = build_u2(params)

    def one(w):
        return build_floquet(params, sample_disorder(params, master_seed, w), u2=u2)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            members = list(ex.map(one, range(count)))
    else:
        members = [one(w) for w in range(count)]
    return FloquetEnsemble(members=members, master_seed=int(master_seed))


def stroboscopic_unitary(f, m):
    """Mode-evolution matrix after m periods, F^m."""
    return matrix_power(f.matrix, m)
