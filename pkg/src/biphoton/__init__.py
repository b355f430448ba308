"""Simulation and analysis toolkit for generalized two-photon quantum
interference: bi-photon spectral amplitudes, nonlocal coincidence
interferograms, photon-counting statistics, fringe fitting and joint
spectral intensity reconstruction."""

from .core import (
    C,
    BiphotonAmplitude,
    EmptySupportError,
    FrequencyGrid,
    GridMismatchError,
    OutOfDomainError,
    SampledAmplitude,
    SourceParams,
    SpectralFilter,
    energy_matched_idler,
    evaluate_amplitude,
    gaussian_from_setup,
    grid_for_filters,
    grid_for_gaussian,
    jsi,
    jsi_correlation,
    marginal_spectrum,
    omega_from_wavelength,
    sample_on_grid,
    two_photon_coherence_length,
    wavelength_from_omega,
)
from .detector import (
    DetectorConfig,
    JitterModel,
    SourceBudget,
    accidentals,
    independent_hom_dip,
    pair_probability_from_car,
    rate_to_counts,
    subtract_accidentals,
    synth_counts,
)
from .fitting import (
    DipFit,
    EnvelopeFit,
    EnvelopeResult,
    FitConvergenceError,
    FringeFit,
    InsufficientDataError,
    NoPeriodError,
    fit_dip,
    fit_fringe,
    fringe_period,
    ridge_slope,
    visibility_envelope,
)
from .interferometer import (
    Axis,
    DelayConfig,
    Interferogram,
    coincidence_rate,
    gamma,
    gamma_lattice,
    gaussian_envelope,
    hom_fringe_analytic,
    hom_generalized,
    read_interferogram_csv,
    scan_1d,
    scan_2d,
    sinc,
    sinc_envelope,
    symmetrized_gamma,
    write_interferogram_csv,
)
from .reconstruction import (
    AliasingError,
    DelayLattice,
    JsiEstimate,
    nyquist_step,
    reconstruct_jsi,
    roundtrip_error,
)

__version__ = "0.1.0"
