"""Ensemble cache: one serialized unitary per member plus an index file.

The cache key is a hash of (params, master_seed, count); eigendecompositions
are stored alongside the unitaries when available since they dominate the
runtime of repeated analyses.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
from pathlib import Path

import numpy as np

from photonrotor.linalg import load_matrix, save_matrix
from photonrotor.model import (
    DisorderRealization,
    FloquetEnsemble,
    FloquetOperator,
    ModelParams,
)
from photonrotor.spectral import QuasienergySpectrum


def params_dict(params):
    return dataclasses.asdict(params)


def ensemble_key(params, master_seed, count):
    """Stable hex key for a cached ensemble."""
    payload = json.dumps({"params": params_dict(params), "master_seed": int(master_seed),
                          "count": int(count)}, sort_keys=True)
    return hashlib.sha256(payload.encode()).hexdigest()[:16]


def _member_stem(directory, index):
    return Path(directory) / f"member_{index:04d}"


def save_ensemble(cache_dir, ensemble):
    """Write every member unitary and the ensemble index file."""
    params = ensemble.params
    key = ensemble_key(params, ensemble.master_seed, len(ensemble))
    directory = Path(cache_dir) / key
    directory.mkdir(parents=True, exist_ok=True)
    for f in ensemble:
        stem = _member_stem(directory, f.realization.index)
        save_matrix(stem, f.matrix, kind="unitary")
        save_matrix(str(stem) + "_deltas", f.realization.deltas.astype(complex),
                    kind="general")
    index = {"params": params_dict(params), "master_seed": int(ensemble.master_seed),
             "count": len(ensemble), "format": 1}
    (directory / "ensemble.json").write_text(json.dumps(index, sort_keys=True) + "\n")
    return directory


def load_ensemble(cache_dir, params, master_seed, count):
    """Return the cached ensemble, or None on any mismatch."""
    key = ensemble_key(params, master_seed, count)
    directory = Path(cache_dir) / key
    index_path = directory / "ensemble.json"
    if not index_path.exists():
        return None
    index = json.loads(index_path.read_text())
    if index.get("params") != params_dict(params) or index.get("count") != int(count):
        return None
    members = []
    for w in range(int(count)):
        stem = _member_stem(directory, w)
        if not stem.with_suffix(".bin").exists():
            return None
        matrix, _ = load_matrix(stem)
        deltas, _ = load_matrix(str(stem) + "_deltas")
        realization = DisorderRealization(deltas=deltas.ravel().real,
                                          seed=int(master_seed), index=w)
        members.append(FloquetOperator(params=params, realization=realization,
                                       matrix=matrix))
    return FloquetEnsemble(members=members, master_seed=int(master_seed))


def save_spectrum(cache_dir, params, master_seed, count, index, spec):
    key = ensemble_key(params, master_seed, count)
    directory = Path(cache_dir) / key
    directory.mkdir(parents=True, exist_ok=True)
    stem = _member_stem(directory, index)
    save_matrix(str(stem) + "_xis", spec.xis.astype(complex), kind="general")
    save_matrix(str(stem) + "_vecs", spec.overlaps, kind="unitary")


def load_spectrum(cache_dir, params, master_seed, count, index):
    key = ensemble_key(params, master_seed, count)
    stem = _member_stem(Path(cache_dir) / key, index)
    if not Path(str(stem) + "_xis.bin").exists():
        return None
    xis, _ = load_matrix(str(stem) + "_xis")
    vecs, _ = load_matrix(str(stem) + "_vecs")
    return QuasienergySpectrum(xis=xis.ravel().real, overlaps=vecs)
