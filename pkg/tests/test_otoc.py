import numpy as np
import pytest

from photonrotor.fock import enumerate_configurations, fock_evolution_oracle, probability_table
from photonrotor.linalg import haar_unitary
from photonrotor.model import ModelParams, build_ensemble, build_floquet, sample_disorder
from photonrotor.otoc import (
    brute_force_average_two,
    diagonal_ensemble_profile,
    diagonal_ensemble_single,
    diagonal_ensemble_two,
    otoc_2,
    otoc_2n,
    otoc_4,
    q_average,
    sff_otoc_consistency,
    time_average_mean_photon,
    time_average_photon_profile,
)
from photonrotor.spectral import quasienergies

PHI = np.pi / 4


def rotor(M=10, theta=0.6, W=0.3, seed=0):
    p = ModelParams(M=M, theta=theta, Phi=PHI, W=W)
    return build_floquet(p, sample_disorder(p, seed, 0))


def test_otoc_2_initial_delta():
    f = rotor()
    assert otoc_2(f, 3, 3, 0) == pytest.approx(1.0)
    assert otoc_2(f, 3, 5, 0) == pytest.approx(0.0)


def test_otoc_2_row_unitarity():
    f = rotor(seed=1)
    total = sum(otoc_2(f, 2, j, 7) for j in range(f.params.M))
    assert total == pytest.approx(1.0, abs=1e-10)


def test_otoc_2_equals_single_photon_probability():
    f = rotor(M=6, seed=2)
    space = enumerate_configurations(6, 1)
    from photonrotor.model import stroboscopic_unitary

    u = stroboscopic_unitary(f, 4)
    table = probability_table(u, (0, 0, 1, 0, 0, 0), space)
    for j in range(6):
        out = tuple(1 if k == j else 0 for k in range(6))
        assert otoc_2(f, 2, j, 4) == pytest.approx(table.prob(out), abs=1e-12)


def test_otoc_4_initial_values():
    f = rotor(seed=3)
    assert otoc_4(f, 1, 4, 1, 4, 0) == pytest.approx(1.0)
    assert otoc_4(f, 1, 4, 2, 5, 0) == pytest.approx(0.0)


def test_otoc_4_equals_two_by_two_permanent():
    from photonrotor.fock import permanent_ryser, submatrix
    from photonrotor.model import stroboscopic_unitary

    f = rotor(M=8, seed=4)
    u = stroboscopic_unitary(f, 5)
    i, j, r, s = 0, 3, 2, 6
    inp = tuple(1 if k in (i, j) else 0 for k in range(8))
    out = tuple(1 if k in (r, s) else 0 for k in range(8))
    per = permanent_ryser(submatrix(u, inp, out).matrix)
    assert otoc_4(f, i, j, r, s, 5) == pytest.approx(abs(per) ** 2, abs=1e-12)


def test_otoc_2n_reduces_to_low_orders():
    f = rotor(M=7, seed=5)
    v2 = otoc_2n(f, (0, 1, 0, 0, 0, 0, 0), (0, 0, 0, 1, 0, 0, 0), 6)
    assert v2.value == pytest.approx(otoc_2(f, 1, 3, 6), abs=1e-12)
    v4 = otoc_2n(f, (1, 1, 0, 0, 0, 0, 0), (0, 0, 1, 0, 1, 0, 0), 6)
    assert v4.value == pytest.approx(otoc_4(f, 0, 1, 2, 4, 6), abs=1e-12)


def test_otoc_2n_matches_fock_oracle():
    u = haar_unitary(6, np.random.default_rng(6))
    space = enumerate_configurations(6, 3)
    inp = (1, 1, 1, 0, 0, 0)
    oracle = fock_evolution_oracle(u, inp, space)
    for out in [(1, 1, 1, 0, 0, 0), (0, 0, 1, 1, 1, 0), (2, 0, 0, 1, 0, 0), (0, 3, 0, 0, 0, 0)]:
        val = otoc_2n(u, inp, out, 1, u=u)
        assert val.value == pytest.approx(oracle.prob(out), abs=1e-9)


def test_otoc_2n_guard():
    with pytest.raises(ValueError):
        otoc_2n(np.eye(12), (1,) * 12, (1,) * 12, 1, u=np.eye(12))


def test_sff_otoc_consistency_reports_both_sides():
    p = ModelParams(M=16, theta=0.55, Phi=PHI, W=0.25)
    ens = build_ensemble(p, 5, 8)
    report = sff_otoc_consistency(ens, 0)
    assert report.otoc_value == pytest.approx(1.0 / p.M, abs=1e-12)
    assert report.sff_over_m2 == pytest.approx(1.0, abs=1e-12)
    assert report.mode_averaged


def test_sff_otoc_consistency_plateau_within_factor_two():
    p = ModelParams(M=24, theta=0.55, Phi=PHI, W=0.25)
    ens = build_ensemble(p, 6, 40)
    m = 12 * p.M  # deep in the plateau
    report = sff_otoc_consistency(ens, m)
    assert 0.5 < report.ratio < 2.0


def test_time_average_identity_operator():
    f_id = np.eye(8)
    profile = time_average_photon_profile(f_id, (0, 0, 0, 1, 0, 0, 0, 0), 20)
    assert profile[3] == pytest.approx(1.0)
    assert profile.sum() == pytest.approx(1.0)


def test_time_average_single_period_is_instantaneous():
    f = rotor(M=9, seed=7)
    inp = tuple(1 if k == 2 else 0 for k in range(9))
    out = time_average_mean_photon(f, inp, 5, 1)
    assert out.value == pytest.approx(otoc_2(f, 2, 5, 0), abs=1e-12)
    assert out.horizon == 1


def test_time_average_two_photons_matches_tables():
    f = rotor(M=5, seed=8)
    inp = (1, 1, 0, 0, 0)
    profile = time_average_photon_profile(f, inp, 4)
    space = enumerate_configurations(5, 2)
    from photonrotor.fock import mean_photon_profile
    from photonrotor.model import stroboscopic_unitary

    acc = np.zeros(5)
    for m in range(4):
        table = probability_table(stroboscopic_unitary(f, m), inp, space)
        acc += mean_photon_profile(table)
    assert np.abs(profile - acc / 4).max() < 1e-12


def test_diagonal_ensemble_single_delta_for_diagonal_operator():
    phases = np.linspace(0.1, 2.0, 6)
    spec = quasienergies(np.diag(np.exp(-1j * phases)))
    pred = diagonal_ensemble_single(spec, 2, 2)
    assert pred.value == pytest.approx(1.0)
    off = diagonal_ensemble_single(spec, 2, 4)
    assert off.value == pytest.approx(0.0, abs=1e-12)


def test_diagonal_ensemble_single_completeness():
    f = rotor(M=12, seed=9)
    spec = quasienergies(f)
    profile = diagonal_ensemble_profile(spec, 4)
    assert profile.sum() == pytest.approx(1.0, abs=1e-9)


def test_single_particle_time_average_converges_to_prediction():
    f = rotor(M=30, theta=0.58, W=0.2, seed=10)
    spec = quasienergies(f)
    i = 3
    inp = tuple(1 if k == i else 0 for k in range(30))
    profile = time_average_photon_profile(f, inp, 50 * 30)
    prediction = diagonal_ensemble_profile(spec, i)
    assert np.abs(profile - prediction).max() / prediction.max() < 0.02


def test_diagonal_ensemble_two_identity_limit():
    # spectrum without degeneracies but diagonal in the mode basis: stationary
    # probabilities equal the instantaneous ones
    phases = np.linspace(0.05, 2.9, 7)
    u = np.diag(np.exp(-1j * phases))
    spec = quasienergies(u)
    i, j, r, s = 1, 4, 1, 4
    pred = diagonal_ensemble_two(spec, i, j, r, s)
    assert pred.value == pytest.approx(1.0, abs=1e-10)
    miss = diagonal_ensemble_two(spec, 1, 4, 2, 3)
    assert miss.value == pytest.approx(0.0, abs=1e-12)


def test_diagonal_ensemble_two_matches_brute_force_haar():
    rng = np.random.default_rng(20260810)
    u = haar_unitary(8, rng)
    spec = quasienergies(u)
    i, j = 0, 1
    horizon = 50 * 8
    for (r, s) in [(0, 1), (2, 5), (3, 3), (6, 7)]:
        pred = diagonal_ensemble_two(spec, i, j, r, s)
        brute = brute_force_average_two(u, i, j, r, s, horizon)
        assert abs(pred.value - brute) / brute < 0.05


def test_diagonal_ensemble_two_sums_to_one():
    rng = np.random.default_rng(3)
    u = haar_unitary(8, rng)
    spec = quasienergies(u)
    total = 0.0
    for r in range(8):
        for s in range(r, 8):
            total += diagonal_ensemble_two(spec, 0, 1, r, s).value
    assert abs(total - 1.0) < 1e-6


def test_diagonal_ensemble_two_collision_correction_needed_for_sum():
    rng = np.random.default_rng(4)
    u = haar_unitary(8, rng)
    spec = quasienergies(u)
    total = sum(diagonal_ensemble_two(spec, 0, 1, r, s, collision_correction=False).value
                for r in range(8) for s in range(r, 8))
    assert total > 1.0 + 1e-3  # resonant double counting inflates the sum


def test_diagonal_ensemble_scaling_with_dim():
    # stationary two-photon probabilities shrink like 1/M^2
    values = []
    for dim, seed in [(8, 0), (16, 1), (32, 2)]:
        u = haar_unitary(dim, np.random.default_rng(seed))
        spec = quasienergies(u)
        values.append(diagonal_ensemble_two(spec, 0, 1, 2, 3).value * dim**2)
    ratio_a = values[1] / values[0]
    ratio_b = values[2] / values[1]
    assert 1 / 1.5 < ratio_a < 1.5
    assert 1 / 1.5 < ratio_b < 1.5


def test_diagonal_ensemble_gauge_invariance():
    f = rotor(M=9, seed=11)
    spec = quasienergies(f)
    pred = diagonal_ensemble_two(spec, 0, 2, 3, 5).value
    gauged = quasienergies(f)
    rng = np.random.default_rng(5)
    gauged.overlaps = gauged.overlaps * np.exp(1j * rng.uniform(0, 2 * np.pi, 9))[None, :]
    pred_gauged = diagonal_ensemble_two(gauged, 0, 2, 3, 5).value
    assert pred == pytest.approx(pred_gauged, rel=1e-10)


def test_diagonal_ensemble_degeneracy_flag():
    u = np.diag(np.exp(-1j * np.array([0.5, 0.5, 1.5, 2.5])))
    spec = quasienergies(u)
    pred = diagonal_ensemble_single(spec, 0, 0)
    assert pred.degenerate


def test_time_average_envelope():
    f = rotor(M=12, seed=12)
    inp = tuple(1 if k == 0 else 0 for k in range(12))
    from photonrotor.model import stroboscopic_unitary

    instant = [abs(stroboscopic_unitary(f, m)[0, 5]) ** 2 for m in range(30)]
    avg = time_average_mean_photon(f, inp, 5, 30).value
    assert min(instant) - 1e-12 <= avg <= max(instant) + 1e-12


def test_q_average_resonant_cases():
    xis = np.array([0.3, 0.3, 1.1, 2.0])
    assert q_average(xis, (0,), (1,), 17) == pytest.approx(1.0)
    # four-index resonant pairing alpha=beta, lambda=rho with alpha != lambda
    assert q_average(xis, (0, 2), (0, 2), 9) == pytest.approx(1.0)


def test_q_average_generic_decay_bound():
    xis = np.array([0.0, 1.234])
    for horizon in (10, 100, 1000):
        val = q_average(xis, (0,), (1,), horizon)
        bound = 2.0 / (horizon * abs(1 - np.exp(1j * (xis[0] - xis[1]))))
        assert abs(val) <= bound + 1e-12


def test_q_average_matches_explicit_sum():
    xis = np.array([0.2, -0.9, 2.2])
    horizon = 57
    phase = xis[0] + xis[2] - 2 * xis[1]
    explicit = np.mean(np.exp(-1j * phase * np.arange(horizon)))
    assert q_average(xis, (0, 2), (1, 1), horizon) == pytest.approx(explicit, abs=1e-12)
