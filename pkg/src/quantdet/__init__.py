"""quantdet: weak-target detection from coarsely quantized MIMO radar data.

Library layout:

* :mod:`quantdet.signal_model`  -- scenes, steering/waveform structure, synthesis
* :mod:`quantdet.quantizer`     -- threshold sets and Gaussian bin statistics
* :mod:`quantdet.detectors`     -- closed-form Rao test, unquantized GLRT
* :mod:`quantdet.perf_theory`   -- Fisher information and asymptotic ROC theory
* :mod:`quantdet.optimizer`     -- swarm design of detection-optimal thresholds
* :mod:`quantdet.montecarlo`    -- reproducible trial engine, ROC / SNR sweeps
* :mod:`quantdet.experiment`    -- flat config files
* :mod:`quantdet.selftest`      -- built-in sanity battery
* :mod:`quantdet.cli`           -- the ``quantdet`` command
"""

from .detectors import (
    DetectorOutcome,
    ZeroSignalError,
    decide,
    glrt_unquantized,
    rao_statistic,
    run_detector,
    score_components,
)
from .experiment import ConfigError, ExperimentSpec, load_config, parse_config, save_config, serialize_config
from .montecarlo import (
    GlrtDetector,
    RaoDetector,
    RocCurve,
    SweepPoint,
    TrialConfig,
    empirical_threshold,
    estimate_roc,
    pd_vs_snr,
    run_trials,
    subseed,
)
from .optimizer import (
    PsoConfig,
    PsoResult,
    canonical_grid,
    objective,
    optimize_thresholds,
    read_checkpoint,
    write_checkpoint,
)
from .perf_theory import (
    FisherInfo,
    chi2_quantile,
    fisher_information,
    noncentrality,
    noncentrality_unquantized,
    theoretical_pd,
)
from .quantizer import (
    BinStats,
    DegenerateBinError,
    QuantizedObservation,
    ThresholdSet,
    bin_derivatives,
    bin_probability,
    bin_stats_table,
    quantize,
)
from .selftest import CheckResult, run_selftest
from .signal_model import (
    EffectiveSignal,
    Hypothesis,
    SceneConfig,
    effective_signal,
    lfm_waveform,
    steering_matrix,
    stream_rng,
    synthesize_observation,
    trial_counter,
)
from .special import marcum_q1, noncentral_chi2_2_cdf, noncentral_chi2_2_sf, qfunc

__version__ = "0.1.0"

__all__ = [
    "BinStats",
    "CheckResult",
    "ConfigError",
    "DegenerateBinError",
    "DetectorOutcome",
    "EffectiveSignal",
    "ExperimentSpec",
    "FisherInfo",
    "GlrtDetector",
    "Hypothesis",
    "PsoConfig",
    "PsoResult",
    "QuantizedObservation",
    "RaoDetector",
    "RocCurve",
    "SceneConfig",
    "SweepPoint",
    "ThresholdSet",
    "TrialConfig",
    "ZeroSignalError",
    "bin_derivatives",
    "bin_probability",
    "bin_stats_table",
    "canonical_grid",
    "chi2_quantile",
    "decide",
    "effective_signal",
    "empirical_threshold",
    "estimate_roc",
    "fisher_information",
    "glrt_unquantized",
    "lfm_waveform",
    "load_config",
    "marcum_q1",
    "noncentral_chi2_2_cdf",
    "noncentral_chi2_2_sf",
    "noncentrality",
    "noncentrality_unquantized",
    "objective",
    "optimize_thresholds",
    "parse_config",
    "pd_vs_snr",
    "qfunc",
    "quantize",
    "rao_statistic",
    "read_checkpoint",
    "run_detector",
    "run_selftest",
    "run_trials",
    "save_config",
    "score_components",
    "serialize_config",
    "steering_matrix",
    "stream_rng",
    "subseed",
    "synthesize_observation",
    "theoretical_pd",
    "trial_counter",
    "write_checkpoint",
]
