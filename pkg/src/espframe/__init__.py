"""Sparse time-frequency analysis with enveloped-sinusoid tight frames.

The frame atoms are cyclic time shifts and modulations of a small set of
complex envelopes, which makes the whole (very overcomplete) analysis and
synthesis pair diagonal in the Fourier domain. On top of that sit an
FFT-based split-augmented-Lagrangian solver for L1-regularized coefficient
inference, an STFT comparator with the same operator interface, and
pole/resonance estimation utilities.
"""

from .envelopes import (
    Envelope,
    EnvelopeSet,
    exponential_set,
    gaussian_set,
    load_custom,
    parseval_normalize,
    save_envelopes,
)
from .estimation import (
    ResonanceEstimate,
    estimate_time_constant,
    find_resonance_peak,
    resonance_estimate,
)
from .experiments import (
    ConfigError,
    build_frame,
    build_signal,
    load_config,
    run_denoise,
    run_estimate,
    run_sweep,
)
from .frame import EspFrame, MipImage, analysis_direct, mip
from .prony import PoleEstimate, PronyConfig, prony_estimate, select_pole
from .signals import (
    QualityReport,
    Signal,
    add_white_noise,
    quality_report,
    read_signal_csv,
    read_signal_wav,
    reconstructed_snr,
    relative_error,
    sparsity,
    write_signal_csv,
    write_signal_wav,
)
from .solver import (
    ReweightSpec,
    SolveConfig,
    SolveResult,
    SolverDivergence,
    lambda_max,
    mu_auto,
    soft_threshold,
    solve_bp,
    solve_bpd,
    time_shift_weights,
)
from .stft import StftFrame
from .synth import (
    ResonanceSpec,
    pole,
    resonant_impulse_response,
    single_atom_signal,
    transfer_residues,
)
from .tensorio import (
    read_coeff_tensor,
    read_stft_coeffs,
    write_esp_coeffs,
    write_history_csv,
    write_mip_csv,
    write_mip_png,
    write_stft_coeffs,
)

__version__ = "0.1.0"

__all__ = [
    "Envelope",
    "EnvelopeSet",
    "exponential_set",
    "gaussian_set",
    "load_custom",
    "parseval_normalize",
    "save_envelopes",
    "ResonanceEstimate",
    "estimate_time_constant",
    "find_resonance_peak",
    "resonance_estimate",
    "ConfigError",
    "build_frame",
    "build_signal",
    "load_config",
    "run_denoise",
    "run_estimate",
    "run_sweep",
    "EspFrame",
    "MipImage",
    "analysis_direct",
    "mip",
    "PoleEstimate",
    "PronyConfig",
    "prony_estimate",
    "select_pole",
    "QualityReport",
    "Signal",
    "add_white_noise",
    "quality_report",
    "read_signal_csv",
    "read_signal_wav",
    "reconstructed_snr",
    "relative_error",
    "sparsity",
    "write_signal_csv",
    "write_signal_wav",
    "ReweightSpec",
    "SolveConfig",
    "SolveResult",
    "SolverDivergence",
    "lambda_max",
    "mu_auto",
    "soft_threshold",
    "solve_bp",
    "solve_bpd",
    "time_shift_weights",
    "StftFrame",
    "ResonanceSpec",
    "pole",
    "resonant_impulse_response",
    "single_atom_signal",
    "transfer_residues",
    "read_coeff_tensor",
    "read_stft_coeffs",
    "write_esp_coeffs",
    "write_history_csv",
    "write_mip_csv",
    "write_mip_png",
    "write_stft_coeffs",
    "__version__",
]
