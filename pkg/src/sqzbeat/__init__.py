"""Squeezed-light beat-note detection: Monte-Carlo simulator and analytic budgets."""

from .budgets import (
    NoiseBudget,
    SqueezingLevels,
    classical_noise_limit,
    heterodyne_budget,
    opo_squeezing_spectrum,
    phase_jitter_penalty,
    predicted_reduction,
    straightforward_phase_floor,
)
from .config import (
    ConfigError,
    ExperimentConfig,
    config_hash,
    from_dict,
    list_presets,
    preset_config,
    to_dict,
    validate_config,
)
from .dsp import (
    BandSpec,
    DegenerateSubtractionError,
    DspError,
    FilterSpec,
    SpectrumEstimate,
    apply_filter_chain,
    chain_response,
    compensate_spectrum,
    cross_spectrum,
    demodulate,
    postprocess,
    welch_psd,
)
from .fields import (
    BandError,
    FieldRealization,
    FrequencyGrid,
    QuadraturePair,
    SqueezerSpec,
    apply_loss,
    apply_squeezer,
    epr_identity_residual,
    make_vacuum_field,
    quadrature_series,
)
from .interferometer import (
    BeamSpec,
    DetectorSpec,
    PhaseSignalSpec,
    PhotocurrentTrace,
    PickoffSpec,
    balanced_detect,
    classical_phase_variance,
    compose_beam,
    linearized_output,
    straightforward_variant,
    unsqueezed_shot_psd,
)
from .runner import RunSummary, run, run_preset

__version__ = "0.1.0"
