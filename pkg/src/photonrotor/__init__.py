"""Disordered photonic kicked-rotor circuits and their chaos/sampling diagnostics.

The package builds stroboscopic single-particle unitaries for a periodically
kicked chain of optical modes (phase shifters + multiport beamsplitter),
extracts quasienergy statistics and spectral form factors, evaluates
multi-photon output probabilities through matrix permanents, and runs the
statistical pipeline that tests scattering submatrices for complex-Gaussian
behaviour.
"""

from photonrotor.linalg import (
    NumericalFailure,
    TOL,
    EigenDecomposition,
    eig_unitary,
    haar_unitary,
    matrix_power,
    multiply,
    unitarity_defect,
)
from photonrotor.model import (
    DisorderRealization,
    FloquetEnsemble,
    FloquetOperator,
    ModelParams,
    build_ensemble,
    build_floquet,
    build_u1,
    build_u2,
    phase_profile,
    sample_disorder,
    stroboscopic_unitary,
)
from photonrotor.spectral import (
    QuasienergySpectrum,
    SffSeries,
    SpacingRatios,
    bessel_j1,
    heisenberg_time,
    mean_ratio,
    quasienergies,
    ratio_histogram,
    sff_2n,
    sff_goe_analytic,
    spacing_ratios,
)
from photonrotor.fock import (
    ConfigurationSpace,
    ProbabilityTable,
    amplitude,
    enumerate_configurations,
    exact_sampler,
    fock_evolution_oracle,
    hilbert_dim,
    mean_photon_number,
    permanent_ryser,
    probability_table,
    submatrix,
)
from photonrotor.otoc import (
    DiagonalEnsemblePrediction,
    TimeAverage,
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
from photonrotor.gaussianity import (
    NormalityReport,
    SampleSet,
    collect_submatrix_elements,
    element_histogram,
    normal_quantile,
    qq_points,
    shapiro_wilk,
    standardize,
)
from photonrotor.rotor import (
    OrbitTrace,
    RotorState,
    chirikov_step,
    chirikov_step_back,
    kbar,
    orbit,
    step_jacobian,
    to_position_chart,
    wrap_angle,
)

__version__ = "0.1.0"
