"""Detect real signals in bounded, noisy samples through their Walsh spectrum."""

__version__ = "0.1.0"

from .walsh import (
    Distribution,
    RealSignal,
    WalshSpectrum,
    bias,
    empirical_distribution,
    fwht,
    inverse_fwht,
    l2_norm_sq,
    naive_wht,
    sei,
    top_coefficients,
)
from .channel import (
    BinaryChannel,
    CapacityResult,
    asym_capacity_approx,
    asym_channel,
    asym_mi_closed_form,
    binary_entropy,
    blahut_arimoto,
    bsc_capacity_exact,
    bsc_capacity_extremal,
    entropy_taylor,
    mutual_information,
)
from .distinguisher import (
    HypothesisPair,
    TrialReport,
    decide_symmetric,
    decide_vs_uniform,
    monte_carlo_error,
    required_samples_symmetric,
    required_samples_vs_uniform,
    theoretical_error_gaussian,
)
from .sources import SignalSource, exact_distribution, planted_bias, sample, uniform_noise
from .sampler import (
    DetectionConfig,
    DetectionReport,
    classic_sei_condition,
    classical_detect,
    detect,
    generic_condition,
    generic_threshold_n1,
    l2_condition,
    repeat_experiment,
)
