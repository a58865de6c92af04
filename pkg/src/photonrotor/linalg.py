"""Dense complex linear algebra: products, powers, unitary eigenproblems,
Haar-random unitaries, and the raw binary matrix format used by the CLI cache.

Everything works on plain ``numpy`` arrays of ``complex128``; LAPACK (through
numpy/scipy) does the heavy lifting.  Correctness is pinned by residual
tolerances collected in :data:`TOL` rather than by algorithm choice.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.linalg import schur


class NumericalFailure(RuntimeError):
    """A numerical tolerance was violated (worst residual in ``args[1]``)."""

    def __init__(self, message, worst=None):
        super().__init__(message, worst)
        self.worst = worst


@dataclass(frozen=True)
class Tolerances:
    """Fixed numerical tolerances used across the package (64-bit floats)."""

    unitarity: float = 1e-10          # max |U^dag U - I| for anything flagged unitary
    eig_residual: float = 1e-9        # per-pair ||U v - lam v|| relative to ||U||_F
    eig_modulus: float = 1e-8         # | |lam| - 1 | for unitary input
    eig_vectors: float = 1e-8         # unitarity defect of the eigenvector matrix
    reconstruction: float = 1e-8      # max-norm of U - V diag(lam) V^dag
    prob_norm_warn: float = 1e-8      # probability tables should sum to 1 this well
    prob_norm_fail: float = 1e-6      # beyond this, raise NumericalFailure
    degeneracy_gap: float = 1e-10     # quasienergy gaps below this are flagged


TOL = Tolerances()


def unitarity_defect(u):
    """Max-norm of U^dag U - I."""
    u = np.asarray(u)
    n = u.shape[-1]
    return float(np.abs(u.conj().T @ u - np.eye(n)).max())


def assert_unitary(u, tol=None, label="matrix"):
    defect = unitarity_defect(u)
    tol = TOL.unitarity if tol is None else tol
    if defect > tol:
        raise NumericalFailure(f"{label} is not unitary: defect {defect:.3e} > {tol:.3e}", defect)


def multiply(a, b):
    """Matrix product with an explicit dimension check."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.ndim != 2 or b.ndim != 2 or a.shape[1] != b.shape[0]:
        raise ValueError(f"dimension mismatch: {a.shape} x {b.shape}")
    return a @ b


def matrix_power(u, m):
    """m-th power of a square matrix, m >= 0."""
    u = np.asarray(u, dtype=complex)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        raise ValueError(f"matrix_power needs a square matrix, got {u.shape}")
    m = int(m)
    if m < 0:
        raise ValueError("matrix_power needs m >= 0")
    return np.linalg.matrix_power(u, m)


@dataclass
class EigenDecomposition:
    """Spectrum of a unitary matrix with an orthonormal eigenvector basis.

    ``eigenvectors[:, k]`` belongs to ``eigenvalues[k]``.  Within a degenerate
    cluster the basis is orthonormal but its internal ordering carries no
    meaning.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def dim(self):
        return len(self.eigenvalues)


def eig_unitary(u):
    """Full eigendecomposition of a unitary matrix.

    Uses the complex Schur form (for a normal matrix the triangular factor is
    diagonal up to roundoff), which guarantees an orthonormal eigenbasis even
    across degenerate clusters.  Residuals are checked against :data:`TOL`.

    Raises
    ------
    ValueError
        if the input is not unitary to tolerance.
    NumericalFailure
        if the eigensolver output violates the residual tolerances.
    """
    u = np.asarray(u, dtype=complex)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        raise ValueError(f"eig_unitary needs a square matrix, got {u.shape}")
    defect = unitarity_defect(u)
    if defect > 100 * TOL.unitarity:
        raise ValueError(f"eig_unitary input is not unitary: defect {defect:.3e}")
    t, z = schur(u, output="complex")
    lam = np.diagonal(t).copy()
    norm_u = np.linalg.norm(u)
    resid = u @ z - z * lam[None, :]
    worst = float(np.linalg.norm(resid, axis=0).max())
    if worst > TOL.eig_residual * norm_u:
        raise NumericalFailure(
            f"eigen residual {worst:.3e} exceeds {TOL.eig_residual:.1e} * ||U||_F", worst)
    moduli = np.abs(lam)
    worst_mod = float(np.abs(moduli - 1.0).max())
    if worst_mod > TOL.eig_modulus:
        raise NumericalFailure(
            f"unitary eigenvalue modulus off by {worst_mod:.3e}", worst_mod)
    vec_defect = unitarity_defect(z)
    if vec_defect > TOL.eig_vectors:
        raise NumericalFailure(
            f"eigenvector basis not orthonormal: defect {vec_defect:.3e}", vec_defect)
    return EigenDecomposition(eigenvalues=lam, eigenvectors=z)


def haar_unitary(m, rng):
    """Draw an m x m unitary from the Haar measure (CUE).

    A complex Ginibre matrix is QR-factorised and the phases of diag(R) are
    absorbed into Q; without that phase fix the QR output is not Haar.
    """
    m = int(m)
    if m < 1:
        raise ValueError("haar_unitary needs m >= 1")
    z = (rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m))) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    q = q * (d / np.abs(d))
    return q


# --- raw matrix format: <rows x cols> complex128, row-major, little-endian
#     interleaved (re, im) pairs, plus a JSON sidecar {rows, cols, kind}.

def save_matrix(path, matrix, kind="general"):
    """Write ``path``.bin and ``path``.json for a complex matrix."""
    path = Path(path)
    a = np.ascontiguousarray(np.asarray(matrix, dtype=complex), dtype="<c16")
    if a.ndim == 1:
        a = a.reshape(-1, 1)
    path.with_suffix(".bin").write_bytes(a.tobytes(order="C"))
    sidecar = {"rows": int(a.shape[0]), "cols": int(a.shape[1]), "kind": kind}
    path.with_suffix(".json").write_text(json.dumps(sidecar, sort_keys=True) + "\n")


def load_matrix(path):
    """Read a matrix written by :func:`save_matrix`; returns (array, kind)."""
    path = Path(path)
    sidecar = json.loads(path.with_suffix(".json").read_text())
    rows, cols = int(sidecar["rows"]), int(sidecar["cols"])
    raw = path.with_suffix(".bin").read_bytes()
    a = np.frombuffer(raw, dtype="<c16").reshape(rows, cols).astype(complex)
    if sidecar.get("kind") == "unitary":
        assert_unitary(a, label=str(path))
    return a, sidecar.get("kind", "general")
