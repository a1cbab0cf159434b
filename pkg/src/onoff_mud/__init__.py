"""On-off random access multiuser detection as sparsity-pattern recovery."""

from .channel import (
    Bernoulli,
    ChannelInstance,
    Deterministic,
    draw_instance,
    generate_codebook,
    mar_of,
    snr_min_of,
    snr_of,
)
from .power import (
    PowerProfile,
    constant_profile,
    exponential_profile,
    gamma_const,
    gamma_opt,
    gamma_robust,
    min_sinr,
    robust_profile,
    technical_condition,
)
from .detectors import (
    DetectionResult,
    lasso_detect,
    ml_detect,
    omp_detect,
    seqomp_detect,
    sud_detect,
)
from .calibration import NullModel, null_tail, threshold_from_pfa
from .montecarlo import (
    AggregateResult,
    ExperimentSpec,
    find_crossing,
    run_experiment,
    run_trial,
)

__version__ = "0.1.0"
