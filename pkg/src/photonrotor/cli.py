"""Command-line front end.

Subcommands: rstats | sff | dynamics | otoc | gaussianity | classical | sample.
Each run resolves its configuration (CLI flags > JSON config file > defaults),
writes delimited data plus a rendered figure into the output directory, and
finishes with a manifest listing every data file with its content hash.
Exit codes: 0 success, 2 configuration error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import hashlib
import json
import sys
import time
from pathlib import Path

import numpy as np

from photonrotor import __version__
from photonrotor.fock import (
    amplitude,
    enumerate_configurations,
    exact_sampler,
    hilbert_dim,
    mean_photon_profile,
    probability_table,
)
from photonrotor.gaussianity import (
    collect_submatrix_elements,
    element_histogram,
    qq_points,
    shapiro_wilk,
    standardize,
)
from photonrotor.linalg import NumericalFailure, haar_unitary
from photonrotor.model import ModelParams, build_ensemble, build_floquet, sample_disorder
from photonrotor.otoc import otoc_2, otoc_2n, otoc_4, sff_otoc_consistency
from photonrotor.rotor import RotorState, kbar, orbit
from photonrotor.spectral import (
    ensemble_eigenphases,
    heisenberg_time,
    mean_ratio,
    ratio_histogram,
    sff_2n,
    sff_goe_analytic,
    spacing_ratios,
)
from photonrotor import storage


# --- configuration ------------------------------------------------------------

_MODEL_DEFAULTS = {
    "modes": 300,
    "theta": 7.4 / (16 * (np.pi / 4)),
    "phi": np.pi / 4,
    "disorder": 2 / (16 * (np.pi / 4)),
    "boundary": "periodic",
    "count": 100,
    "master_seed": 1,
    "threads": 1,
}

_COMMAND_DEFAULTS = {
    "rstats": {"bins": 32, "sweep_thetas": None, "sweep_ws": None},
    "sff": {"n_points": 1, "m_max": None},
    "dynamics": {"photons": 2, "input": None, "m_max": None, "baseline": "haar"},
    "otoc": {"input": None, "output": None, "photons": 2, "m_max": 50,
             "consistency": False},
    "gaussianity": {"n_sub": 5, "m": 300, "parts": "pooled", "alpha": 0.05,
                    "bins": 41, "control": "none"},
    "classical": {"kbars": None, "orbits": 50, "steps": 500, "x0_min": -np.pi,
                  "x0_max": np.pi},
    "sample": {"photons": 2, "input": None, "m": 12, "shots": 1000},
}


class ConfigError(ValueError):
    pass


def _parse_config_list(value, kind=float):
    if value is None:
        return None
    if isinstance(value, str):
        value = [v for v in value.replace(",", " ").split() if v]
    return [kind(v) for v in value]


def _parse_occupations(value, modes, photons, field_name):
    """Occupation vector from a list or dash-separated string; default fills
    one photon into each of the first `photons` modes."""
    if value is None:
        if photons > modes:
            raise ConfigError(f"{field_name}: {photons} photons exceed {modes} modes")
        occ = [1] * photons + [0] * (modes - photons)
        return tuple(occ)
    if isinstance(value, str):
        value = value.split("-")
    occ = tuple(int(v) for v in value)
    if len(occ) != modes:
        raise ConfigError(f"{field_name} must list {modes} occupations, got {len(occ)}")
    if any(n < 0 for n in occ):
        raise ConfigError(f"{field_name} carries a negative occupation")
    return occ


def resolve_config(args):
    """Merge defaults, the JSON config file, and explicit CLI flags."""
    cfg = dict(_MODEL_DEFAULTS)
    cfg.update(_COMMAND_DEFAULTS[args.command])
    if args.config:
        path = Path(args.config)
        if not path.exists():
            raise ConfigError(f"config file not found: {path}")
        try:
            loaded = json.loads(path.read_text())
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config file is not valid JSON: {exc}") from exc
        unknown = set(loaded) - set(cfg)
        if unknown:
            raise ConfigError(f"unknown config fields: {sorted(unknown)}")
        cfg.update(loaded)
    for key, value in vars(args).items():
        if key in cfg and value is not None:
            cfg[key] = value
    return cfg


def model_params(cfg):
    try:
        return ModelParams(M=int(cfg["modes"]), theta=float(cfg["theta"]),
                           Phi=float(cfg["phi"]), W=float(cfg["disorder"]),
                           boundary=str(cfg["boundary"]))
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def get_ensemble(cfg, params=None):
    """Build (or fetch from the cache) the disorder ensemble for `cfg`."""
    params = model_params(cfg) if params is None else params
    seed, count = int(cfg["master_seed"]), int(cfg["count"])
    if count < 1:
        raise ConfigError("count must be >= 1")
    cache_dir = cfg.get("cache")
    if cache_dir:
        cached = storage.load_ensemble(cache_dir, params, seed, count)
        if cached is not None:
            return cached, True
    ensemble = build_ensemble(params, seed, count, threads=int(cfg["threads"]))
    if cache_dir:
        storage.save_ensemble(cache_dir, ensemble)
    return ensemble, False


# --- output helpers -----------------------------------------------------------

def _fmt(x):
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return str(x)


def write_csv(path, header, rows):
    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(x) for x in row) + "\n")
    return Path(path)


def write_json(path, payload):
    def default(obj):
        if isinstance(obj, (np.floating, np.integer)):
            return obj.item()
        if isinstance(obj, np.ndarray):
            return obj.tolist()
        raise TypeError(f"not JSON serializable: {type(obj)}")

    with open(path, "w") as fh:
        json.dump(payload, fh, sort_keys=True, indent=2, default=default)
        fh.write("\n")
    return Path(path)


def _sha256(path):
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def write_manifest(out_dir, command, cfg, data_files, figure_files, started):
    manifest = {
        "command": command,
        "config": {k: (v if not isinstance(v, np.ndarray) else list(v))
                   for k, v in cfg.items()},
        "version": __version__,
        "wall_clock_s": round(time.time() - started, 3),
        "outputs": [{"path": Path(p).name, "sha256": _sha256(p),
                     "bytes": Path(p).stat().st_size} for p in data_files],
        "figures": [Path(p).name for p in figure_files],
    }
    return write_json(Path(out_dir) / "manifest.json", manifest)


def _maybe_figures(cfg):
    return not cfg.get("no_figures", False)


# --- subcommands ----------------------------------------------------------------

def run_rstats(cfg, out):
    from photonrotor import plots

    data, figures = [], []
    if cfg["sweep_thetas"] and cfg["sweep_ws"]:
        thetas = _parse_config_list(cfg["sweep_thetas"])
        ws = _parse_config_list(cfg["sweep_ws"])
        grid = np.empty((len(ws), len(thetas)))
        rows = []
        for a, w_val in enumerate(ws):
            for b, theta in enumerate(thetas):
                point = dict(cfg, theta=theta, disorder=w_val)
                ensemble, _ = get_ensemble(point)
                grid[a, b] = mean_ratio(ensemble, threads=int(cfg["threads"]))
                rows.append((theta, w_val, grid[a, b]))
        data.append(write_csv(out / "sweep.csv", ["theta", "W", "mean_r"], rows))
        if _maybe_figures(cfg):
            figures.append(plots.render_sweep_map(np.array(thetas), np.array(ws), grid,
                                                  out / "rstats_sweep.png"))
        summary = {"sweep": True, "points": len(rows)}
    else:
        params = model_params(cfg)
        ensemble, cached = get_ensemble(cfg, params)
        phases = ensemble_eigenphases(ensemble, threads=int(cfg["threads"]))
        pooled = np.concatenate([spacing_ratios(x).ratios for x in phases])
        mean_r = float(np.mean([spacing_ratios(x).ratios.mean() for x in phases]))
        tau_h = heisenberg_time(phases)
        data.append(write_csv(out / "rstats.csv", ["r"], ((r,) for r in pooled)))
        edges, density = ratio_histogram(ensemble, int(cfg["bins"]),
                                         threads=int(cfg["threads"]))
        summary = {"mean_r": mean_r, "tau_H": tau_h, "cached_ensemble": cached,
                   "params": storage.params_dict(params)}
        if _maybe_figures(cfg):
            figures.append(plots.render_ratio_histogram(edges, density, mean_r,
                                                        out / "rstats.png"))
    data.append(write_json(out / "summary.json", summary))
    return data, figures


def run_sff(cfg, out):
    from photonrotor import plots

    params = model_params(cfg)
    ensemble, cached = get_ensemble(cfg, params)
    threads = int(cfg["threads"])
    phases = ensemble_eigenphases(ensemble, threads=threads)
    tau_h = heisenberg_time(phases)
    m_max = int(cfg["m_max"]) if cfg["m_max"] else int(np.ceil(4.2 * tau_h))
    n_points = int(cfg["n_points"])
    series = sff_2n(ensemble, n_points, m_max, threads=threads, phases_list=phases)
    goe_ref = sff_goe_analytic(series.times, params.M, tau_h)
    data = [write_csv(out / "sff.csv", ["m", "R2N", "goe_ref"],
                      zip(series.times, series.values, goe_ref))]
    summary = {"tau_H": tau_h, "n_points": n_points, "m_max": m_max,
               "cached_ensemble": cached, "params": storage.params_dict(params),
               "note": "goe_ref is the analytic two-point curve"}
    data.append(write_json(out / "summary.json", summary))
    figures = []
    if _maybe_figures(cfg):
        figures.append(plots.render_sff(series.times, series.values, goe_ref,
                                        params.M, tau_h, out / "sff.png"))
    return data, figures


def _dynamics_tables(u_step, input_config, space, m_max):
    dim = u_step.shape[0]
    u = np.eye(dim, dtype=complex)
    mean_rows, prob_rows = [], []
    for m in range(m_max + 1):
        if m > 0:
            u = u @ u_step
        table = probability_table(u, input_config, space, m=m)
        mean_rows.append(mean_photon_profile(table))
        prob_rows.append(table.probs.copy())
    return np.array(mean_rows), np.array(prob_rows)


def run_dynamics(cfg, out):
    from photonrotor import plots

    params = model_params(cfg)
    photons = int(cfg["photons"])
    if hilbert_dim(params.M, photons) > 200_000:
        raise ConfigError(f"Hilbert dimension {hilbert_dim(params.M, photons)} "
                          "too large for dynamics tables")
    input_config = _parse_occupations(cfg["input"], params.M, photons, "input")
    if sum(input_config) != photons:
        raise ConfigError("input occupations do not sum to the photon number")
    m_max = int(cfg["m_max"]) if cfg["m_max"] else params.M
    space = enumerate_configurations(params.M, photons)
    realization = sample_disorder(params, int(cfg["master_seed"]), 0)
    f = build_floquet(params, realization)
    data, figures = [], []
    config_labels = ["-".join(str(n) for n in c) for c in space.configurations]

    def emit(tag, u_step):
        mean_n, probs = _dynamics_tables(u_step, input_config, space, m_max)
        suffix = "" if tag == "rotor" else f"_{tag}"
        data.append(write_csv(out / f"dynamics{suffix}.csv", ["m", "l", "mean_n"],
                              ((m, l + 1, mean_n[m, l])
                               for m in range(m_max + 1) for l in range(params.M))))
        data.append(write_csv(out / f"probs{suffix}.csv", ["m", "config", "P"],
                              ((m, config_labels[k], probs[m, k])
                               for m in range(m_max + 1) for k in range(space.dim))))
        if _maybe_figures(cfg):
            figures.append(plots.render_dynamics(mean_n, out / f"dynamics{suffix}.png"))
            figures.append(plots.render_probs(probs, out / f"probs{suffix}.png"))

    emit("rotor", f.matrix)
    if cfg["baseline"] == "haar":
        rng = np.random.default_rng(np.random.SeedSequence(
            entropy=int(cfg["master_seed"]), spawn_key=(0xABCD,)))
        emit("haar", haar_unitary(params.M, rng))
    elif cfg["baseline"] != "none":
        raise ConfigError(f"baseline must be haar|none, got {cfg['baseline']!r}")
    data.append(write_json(out / "summary.json", {
        "params": storage.params_dict(params), "photons": photons,
        "input": list(input_config), "m_max": m_max,
        "hilbert_dim": space.dim}))
    return data, figures


def run_otoc(cfg, out):
    from photonrotor import plots

    params = model_params(cfg)
    photons = int(cfg["photons"])
    input_config = _parse_occupations(cfg["input"], params.M, photons, "input")
    output_config = _parse_occupations(cfg["output"], params.M, photons, "output")
    m_max = int(cfg["m_max"])
    realization = sample_disorder(params, int(cfg["master_seed"]), 0)
    f = build_floquet(params, realization)
    order = 2 * photons
    in_modes = [i for i, n in enumerate(input_config) for _ in range(n)]
    out_modes = [j for j, n in enumerate(output_config) for _ in range(n)]
    rows = []
    u = np.eye(params.M, dtype=complex)
    values, perm_values = [], []
    for m in range(m_max + 1):
        if m > 0:
            u = u @ f.matrix
        if photons == 1:
            value = otoc_2(f, in_modes[0], out_modes[0], m, u=u)
        elif photons == 2 and output_config[out_modes[0]] == 1:
            value = otoc_4(f, in_modes[0], in_modes[1], out_modes[0], out_modes[1],
                           m, u=u)
        else:
            value = otoc_2n(f, input_config, output_config, m, u=u).value
        perm = abs(amplitude(u, input_config, output_config)) ** 2
        rows.append((m, order, value, perm))
        values.append(value)
        perm_values.append(perm)
    data = [write_csv(out / "otoc.csv", ["m", "order", "value", "permanent_path_value"],
                      rows)]
    figures = []
    if _maybe_figures(cfg):
        figures.append(plots.render_otoc(np.arange(m_max + 1), np.array(values),
                                         np.array(perm_values), order,
                                         out / "otoc.png"))
    summary = {"params": storage.params_dict(params), "order": order,
               "input": list(input_config), "output": list(output_config)}
    if cfg["consistency"]:
        ensemble, _ = get_ensemble(cfg, params)
        report = sff_otoc_consistency(ensemble, m_max)
        summary["consistency"] = dataclasses.asdict(report)
    data.append(write_json(out / "summary.json", summary))
    return data, figures


def run_gaussianity(cfg, out):
    from photonrotor import plots

    params = model_params(cfg)
    ensemble, cached = get_ensemble(cfg, params)
    n_sub = int(cfg["n_sub"])
    if n_sub > params.M:
        raise ConfigError("n_sub exceeds the number of modes")
    m = int(cfg["m"])
    raw = collect_submatrix_elements(ensemble, m, n_sub, parts=str(cfg["parts"]))
    std = standardize(raw)
    report = shapiro_wilk(std, alpha=float(cfg["alpha"]))
    qq = qq_points(std)
    edges, density = element_histogram(std, int(cfg["bins"]))
    centers = 0.5 * (edges[:-1] + edges[1:])
    data = [
        write_csv(out / "qq.csv", ["theoretical", "sample"],
                  zip(qq.theoretical, qq.sample)),
        write_csv(out / "hist.csv", ["bin_center", "density"], zip(centers, density)),
        write_json(out / "normality.json", dict(report.as_dict(), m=m,
                                                params=storage.params_dict(params),
                                                source=raw.source,
                                                cached_ensemble=cached)),
    ]
    figures = []
    if _maybe_figures(cfg):
        figures.append(plots.render_element_histogram(edges, density,
                                                      out / "gaussianity_hist.png"))
        figures.append(plots.render_qq(qq.theoretical, qq.sample,
                                       out / "gaussianity_qq.png"))
    if cfg["control"] == "haar":
        rng = np.random.default_rng(np.random.SeedSequence(
            entropy=int(cfg["master_seed"]), spawn_key=(0x4AA2,)))
        controls = [haar_unitary(params.M, rng) for _ in range(len(ensemble))]
        raw_c = collect_submatrix_elements(controls, 1, n_sub, parts=str(cfg["parts"]))
        report_c = shapiro_wilk(standardize(raw_c), alpha=float(cfg["alpha"]))
        data.append(write_json(out / "normality_haar.json", report_c.as_dict()))
    elif cfg["control"] != "none":
        raise ConfigError(f"control must be haar|none, got {cfg['control']!r}")
    return data, figures


def run_classical(cfg, out):
    from photonrotor import plots

    kbars = _parse_config_list(cfg["kbars"])
    if not kbars:
        kbars = [kbar(float(cfg["theta"]), float(cfg["phi"]))]
    n_orbits = int(cfg["orbits"])
    steps = int(cfg["steps"])
    if n_orbits < 1 or steps < 0:
        raise ConfigError("classical needs orbits >= 1 and steps >= 0")
    rng = np.random.default_rng(np.random.SeedSequence(
        entropy=int(cfg["master_seed"]), spawn_key=(0xC1A55,)))
    data, figures = [], []
    for kick in kbars:
        traces = []
        for _ in range(n_orbits):
            x0 = rng.uniform(float(cfg["x0_min"]), float(cfg["x0_max"]))
            k0 = rng.uniform(-np.pi, np.pi)
            traces.append(orbit(RotorState(X=x0, k=k0), kick, steps).as_array())
        tag = f"{kick:g}".replace(".", "p").replace("-", "m")
        if n_orbits == 1:
            rows = ((n, arr[n, 0], arr[n, 1])
                    for arr in traces for n in range(steps + 1))
            data.append(write_csv(out / f"orbit_K{tag}.csv", ["n", "X", "k"], rows))
        else:
            rows = ((idx, n, arr[n, 0], arr[n, 1])
                    for idx, arr in enumerate(traces) for n in range(steps + 1))
            data.append(write_csv(out / f"orbit_K{tag}.csv", ["orbit", "n", "X", "k"],
                                  rows))
        if _maybe_figures(cfg):
            figures.append(plots.render_portrait(traces, kick,
                                                 out / f"classical_K{tag}.png"))
    summary = {"kbars": list(kbars), "orbits": n_orbits, "steps": steps,
               "hbar_eff": 1.0 / float(cfg["modes"])}
    data.append(write_json(out / "summary.json", summary))
    return data, figures


def run_sample(cfg, out):
    params = model_params(cfg)
    photons = int(cfg["photons"])
    input_config = _parse_occupations(cfg["input"], params.M, photons, "input")
    m = int(cfg["m"])
    shots = int(cfg["shots"])
    space = enumerate_configurations(params.M, photons)
    realization = sample_disorder(params, int(cfg["master_seed"]), 0)
    f = build_floquet(params, realization)
    u = np.linalg.matrix_power(f.matrix, m)
    table = probability_table(u, input_config, space, m=m)
    rng = np.random.default_rng(np.random.SeedSequence(
        entropy=int(cfg["master_seed"]), spawn_key=(0x5A3B1E,)))
    draws = exact_sampler(table, rng, shots)
    path = Path(out) / "samples.txt"
    with open(path, "w") as fh:
        for config in draws:
            fh.write("-".join(str(n) for n in config) + "\n")
    data = [path, write_json(Path(out) / "summary.json",
                             {"params": storage.params_dict(params), "m": m,
                              "shots": shots, "input": list(input_config),
                              "hilbert_dim": space.dim})]
    return data, []


_RUNNERS = {
    "rstats": run_rstats,
    "sff": run_sff,
    "dynamics": run_dynamics,
    "otoc": run_otoc,
    "gaussianity": run_gaussianity,
    "classical": run_classical,
    "sample": run_sample,
}


def build_parser():
    parser = argparse.ArgumentParser(prog="photonrotor", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _RUNNERS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="JSON config file (flat keys)")
        p.add_argument("--seed", dest="master_seed", type=int,
                       help="master seed for all RNG streams")
        p.add_argument("--out", default="out", help="output directory")
        p.add_argument("--threads", type=int, help="worker threads over members")
        p.add_argument("--cache", help="ensemble cache directory")
        p.add_argument("--no-figures", dest="no_figures", action="store_true",
                       default=None, help="skip figure rendering")
        p.add_argument("--modes", type=int)
        p.add_argument("--theta", type=float)
        p.add_argument("--phi", type=float)
        p.add_argument("--disorder", type=float)
        p.add_argument("--boundary", choices=["periodic", "open"])
        p.add_argument("--count", type=int, help="ensemble size")
        for key, default in _COMMAND_DEFAULTS[name].items():
            flag = "--" + key.replace("_", "-")
            if isinstance(default, bool):
                p.add_argument(flag, action="store_true", default=None)
            elif key in ("sweep_thetas", "sweep_ws", "kbars", "input", "output"):
                p.add_argument(flag, help="list (comma/space or dash separated)")
            elif isinstance(default, int):
                p.add_argument(flag, type=int)
            elif isinstance(default, float):
                p.add_argument(flag, type=float)
            else:
                p.add_argument(flag)
    return parser


def main(argv=None):
    started = time.time()
    args = build_parser().parse_args(argv)
    try:
        cfg = resolve_config(args)
        cfg["cache"] = args.cache
        cfg["no_figures"] = bool(args.no_figures)
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        data, figures = _RUNNERS[args.command](cfg, out)
        write_manifest(out, args.command, cfg, data, figures, started)
    except (ConfigError, ValueError, KeyError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except NumericalFailure as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
