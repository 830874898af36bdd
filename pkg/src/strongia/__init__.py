"""Strong interference alignment on the 3-user single-antenna channel.

Simulation library for SIC-assisted interference alignment over finite
symbol extensions: seeded extended-channel generation, aligned precoder
construction and verification, MMSE/zero-forcing receivers, the
strong-interference decision with linear fallback, and Monte Carlo
sum-rate experiments.

User, stream, and slot indices are 0-based throughout the library;
1-based user labels appear only in serialized output (CSV columns,
CLI link names).
"""

from .channel import (
    AlignmentOperator,
    ExtendedChannel,
    ExtensionConfig,
    GainModel,
    alignment_operator,
    apply_gain_boost,
    draw_channel,
    dump_channels,
    load_channels,
)
from .errors import (
    ConfigError,
    DegenerateChannelError,
    IllConditionedError,
    InvalidInputError,
    ShapeError,
    SingularChannelError,
    StrongIAError,
)
from .experiments import (
    ExperimentConfig,
    SweepRow,
    dof_region_contains,
    estimate_dof_slope,
    run_sweep,
    write_csv,
    write_summary,
)
from .numerics import (
    Subspace,
    Tolerance,
    column_subset,
    column_subset_residual,
    orthonormal_basis,
    smallest_eigvecs,
    subspace_equal,
    subspace_residual,
)
from .precoding import (
    AlignmentReport,
    InfeasibilityReport,
    PrecoderSet,
    balanced_generator,
    build_precoders,
    build_tx3_precoder,
    demonstrate_linear_infeasibility,
    derive_tx2_tx1_precoders,
    verify_alignment,
)
from .receivers import (
    CombinerResult,
    PowerAllocation,
    ZfFilter,
    interference_covariance,
    mmse_combiner,
    sinr_for_combiner,
    stream_rates_zf,
    zf_filter,
)
from .strong_ia import (
    LINEAR_FALLBACK,
    STRONG_IA,
    SchemeResult,
    StrongDecision,
    cross_decode_rate,
    evaluate_condition,
    own_decode_rate,
    run_linear_fallback,
    run_strong_ia,
    sic_subtract,
)

__version__ = "0.1.0"
