"""EKF tag-population estimation with CUSUM change detection for framed-slotted ALOHA."""

from .aloha import (
    FrameResult,
    Magnitude,
    PopulationSchedule,
    ScheduleEvent,
    evolve_population,
    frame_duration_ms,
    run_frame,
    run_frame_gaussian,
)
from .analysis import (
    Region,
    RegionReport,
    StabilityParams,
    check_phi_condition,
    classify_region_dynamic,
    classify_region_static,
    dynamic_bounds,
    epsilon_k,
    pseudo_cov_bounds,
    relative_error,
)
from .config import ConfigError, ExperimentConfig, load_config, parse_config
from .cusum import CusumConfig, CusumState, cusum_step, default_cusum_config, normalized_innovation, phi_select
from .estimator import (
    CorrectionRecord,
    EstimatorState,
    FramePrediction,
    TuningParams,
    compute_r,
    correct,
    idle_probability,
    idle_probability_exact,
    kalman_gain,
    lambda_max,
    load_variance,
    measurement_jacobian,
    measurement_noise_variance,
    predict,
)
from .output import COLUMNS, emit
from .runner import RunSummary, TraceRow, run_dynamic, run_experiment, run_static, summarize

__version__ = "0.1.0"
