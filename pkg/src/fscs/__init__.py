"""Frequency-selective compressed sensing.

Hartley dictionaries and uniform sub-Nyquist samplers, the afCS/fCS
acquisition metric, and LASSO reconstruction of a wanted frequency band.
"""

from ._errors import (
    ConfigError,
    DegenerateAcquisitionError,
    InvalidArgumentError,
    NonConvergenceError,
)
from .acquisition import (
    NormalizedSystem,
    SensingMatrix,
    compose_and_normalize,
    normalize_columns,
    observe,
    uniform_sensing_matrix,
)
from .dictionary import (
    BandIndexSet,
    Dictionary,
    band_indices,
    band_subdictionary,
    build_dht_dictionary,
    cas,
    column_frequency,
    expand_tone,
)
from .experiment import (
    ExperimentConfig,
    SuccessMap,
    TrialOutcome,
    afcs_sweep,
    load_config,
    parse_config,
    run_trial,
    success_map,
)
from .fcs_metric import (
    AfcsResult,
    TestMatrix,
    afcs,
    atomic_fcs,
    draw_test_matrix,
    filtering_cs,
    projection_onto_column,
)
from .reconstruction import (
    LassoConfig,
    SparseSolution,
    kkt_residual,
    lasso_objective,
    reconstruct_band,
    snr_db,
    soft_threshold,
    solve_lasso,
)
from .signal_model import (
    PROBLEMS,
    CaseSpec,
    FilteringProblem,
    TimeGrid,
    Tone,
    draw_random_case,
    make_time_grid,
    synth_case,
    synth_tone,
)

__version__ = "0.1.0"
