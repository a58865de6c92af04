import numpy as np
import pytest

from photonrotor.model import ModelParams, build_ensemble, build_floquet, sample_disorder
from photonrotor.spectral import (
    MEAN_RATIO_GOE,
    MEAN_RATIO_POISSON,
    bessel_j1,
    heisenberg_time,
    mean_ratio,
    quasienergies,
    ratio_histogram,
    sff_2n,
    sff_2n_power,
    sff_goe_analytic,
    spacing_ratios,
)

from _oracles import bessel_j1_series, goe_surrogate_levels, poisson_surrogate_phases

PHI = np.pi / 4


def small_operator(seed=0, M=24, theta=0.55, W=0.25):
    p = ModelParams(M=M, theta=theta, Phi=PHI, W=W)
    return build_floquet(p, sample_disorder(p, seed, 0))


def test_quasienergies_identity():
    spec = quasienergies(np.eye(6))
    assert np.allclose(spec.xis, 0.0)


def test_quasienergies_diagonal_phases():
    phases = np.array([0.5, -0.5, 0.5, 2.2])
    spec = quasienergies(np.diag(np.exp(-1j * phases)))
    assert np.allclose(np.sort(spec.xis), np.sort(phases))
    assert np.all(spec.xis[:-1] <= spec.xis[1:])
    assert np.all((spec.xis > -np.pi) & (spec.xis <= np.pi))


def test_quasienergies_overlap_normalization():
    spec = quasienergies(small_operator())
    norms = np.sum(np.abs(spec.overlaps) ** 2, axis=0)
    assert np.abs(norms - 1.0).max() < 1e-8


def test_quasienergies_trace_reconstruction():
    f = small_operator(seed=4)
    spec = quasienergies(f)
    u = np.eye(f.params.M, dtype=complex)
    for m in range(0, 51):
        if m > 0:
            u = u @ f.matrix
        rebuilt = np.sum(np.exp(-1j * spec.xis * m))
        assert abs(rebuilt - np.trace(u)) < 1e-8 * max(1.0, abs(np.trace(u)))


def test_spacing_ratios_equally_spaced():
    ratios = spacing_ratios(np.linspace(-1.0, 1.0, 20)).ratios
    assert np.allclose(ratios, 1.0)


def test_spacing_ratios_direct_formula():
    out = spacing_ratios(np.array([0.0, 1.0, 4.0]))
    assert np.allclose(out.ratios, [1.0 / 3.0])


def test_spacing_ratios_counts_and_range():
    rng = np.random.default_rng(0)
    xis = np.sort(rng.uniform(-np.pi, np.pi, 100))
    out = spacing_ratios(xis)
    assert len(out.ratios) == 98
    assert np.all((out.ratios >= 0) & (out.ratios <= 1))


def test_spacing_ratios_degenerate_flagged():
    out = spacing_ratios(np.array([0.0, 0.0, 0.0, 1.0]))
    assert out.ratios[0] == 1.0
    assert out.degenerate[0]


def test_poisson_surrogate_mean_ratio():
    rng = np.random.default_rng(123)
    vals = [spacing_ratios(poisson_surrogate_phases(300, rng)).ratios.mean()
            for _ in range(1000)]
    assert abs(np.mean(vals) - MEAN_RATIO_POISSON) < 0.01


def test_goe_surrogate_mean_ratio():
    rng = np.random.default_rng(7)
    vals = [spacing_ratios(goe_surrogate_levels(300, rng)).ratios.mean()
            for _ in range(100)]
    assert abs(np.mean(vals) - MEAN_RATIO_GOE) < 0.01


def test_mean_ratio_equal_spacings_single_member():
    phases = np.linspace(-3.0, 3.0, 16)
    f = np.diag(np.exp(-1j * phases))
    assert abs(mean_ratio([f]) - 1.0) < 1e-12


def test_mean_ratio_threads_agree():
    p = ModelParams(M=20, theta=0.6, Phi=PHI, W=0.3)
    ens = build_ensemble(p, 3, 6)
    assert mean_ratio(ens, threads=1) == mean_ratio(ens, threads=3)


def test_ratio_histogram_normalized():
    p = ModelParams(M=40, theta=0.5, Phi=PHI, W=0.2)
    ens = build_ensemble(p, 5, 4)
    edges, density = ratio_histogram(ens, 16)
    widths = np.diff(edges)
    assert abs(np.sum(density * widths) - 1.0) < 1e-12


def test_ratio_histogram_goe_level_repulsion():
    rng = np.random.default_rng(2)
    members = [np.diag(np.exp(-1j * goe_surrogate_levels(200, rng) * 0.01))
               for _ in range(30)]
    edges, density = ratio_histogram(members, 10)
    assert density[0] < density[4]  # vanishing density at r -> 0


def test_sff_at_time_zero_is_dim_power():
    f = small_operator(seed=9, M=18)
    for n in (1, 2, 3):
        series = sff_2n([f], n, 3)
        assert abs(series.values[0] - 18 ** (2 * n)) < 1e-6


def test_sff_single_member_by_hand():
    phases = np.array([0.1, 1.0, -2.0])
    f = np.diag(np.exp(-1j * phases))
    series = sff_2n([f], 1, 1)
    expected = abs(np.sum(np.exp(-1j * phases))) ** 2
    assert abs(series.values[1] - expected) < 1e-12


def test_sff_factorization_per_member():
    f = small_operator(seed=11)
    r2 = sff_2n([f], 1, 20).values
    r4 = sff_2n([f], 2, 20).values
    assert np.allclose(r4, r2**2, rtol=1e-10)


def test_sff_spectral_vs_power_paths():
    f = small_operator(seed=12, M=16)
    spectral = sff_2n([f], 1, 50).values
    power = sff_2n_power([f], 1, 50).values
    assert np.abs(spectral - power).max() < 1e-6 * np.abs(power).max()


def test_sff_values_nonnegative():
    p = ModelParams(M=24, theta=0.6, Phi=PHI, W=0.3)
    ens = build_ensemble(p, 8, 5)
    assert np.all(sff_2n(ens, 2, 60).values >= 0)


def test_heisenberg_time_equally_spaced():
    M = 40
    xis = -np.pi + 2 * np.pi * (np.arange(M) + 0.5) / M
    tau = heisenberg_time(xis)
    # M levels filling the circle: mean sorted spacing 2 pi / M
    assert abs(tau - M) < 1e-9


def test_heisenberg_time_scaling():
    xis = np.sort(np.random.default_rng(3).uniform(-0.5, 0.5, 50))
    assert abs(heisenberg_time(xis * 2) - heisenberg_time(xis) / 2) < 1e-9


def test_bessel_j1_small_values():
    assert bessel_j1(0.0) == 0.0
    assert abs(bessel_j1(1e-8) - 0.5e-8) < 1e-20  # leading series term z/2


def test_bessel_j1_reference_value():
    assert abs(bessel_j1(1.0) - 0.44005058574493355) < 1e-12


def test_bessel_j1_odd():
    assert bessel_j1(-2.5) == -bessel_j1(2.5)


def test_bessel_j1_against_series_oracle():
    zs = np.concatenate([np.linspace(0.01, 12, 121), np.linspace(12.01, 40, 141)])
    for z in zs:
        assert abs(bessel_j1(z) - bessel_j1_series(z)) < 1e-11


def test_sff_goe_analytic_boundary_and_asymptote():
    dim, tau_h = 300, 100.0
    at_tau = sff_goe_analytic(np.array([tau_h]), dim, tau_h)[0]
    r = tau_h * bessel_j1(4 * dim) / (2 * dim * tau_h)
    expected = dim * (2.0 - np.log(3.0)) + dim**2 * r**2
    assert abs(at_tau - expected) < 1e-9
    eps = 1e-12 * tau_h
    below, above = sff_goe_analytic(np.array([tau_h - eps, tau_h + eps]), dim, tau_h)
    assert abs(below - above) < 1e-8
    far = sff_goe_analytic(np.array([1e6]), dim, tau_h)[0]
    assert abs(far - dim) < 0.01 * dim


def test_sff_goe_analytic_starts_at_dim_squared():
    vals = sff_goe_analytic(np.array([0.0]), 50, 30.0)
    assert abs(vals[0] - 2500.0) < 1e-9


def test_sff_goe_analytic_rejects_bad_tau():
    with pytest.raises(ValueError):
        sff_goe_analytic(np.arange(3), 10, 0.0)
