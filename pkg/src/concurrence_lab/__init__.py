"""Local measurement of bipartite pure-state entanglement by simulation.

The I-concurrence ``C = sqrt(2 (1 - Tr rho_A**2))`` of a pure composite
state is recovered from projection probabilities on one subsystem alone,
after two-level rotations ``U(k, l)`` and ``V(k, l)`` realised with beam
splitters and phase shifters.
"""

__version__ = "0.1.0"

from .exceptions import *  # noqa: E402,F401,F403
from .measurement import (  # noqa: E402
    EXACT,
    ProbabilityDistribution,
    ShotRecord,
    estimate_probabilities,
    projection_probabilities,
    sample_counts,
)
from .optics import OpticalElement, OpticalSetup, compile_setup, emit_netlist, setup_unitary  # noqa: E402
from .oracle import (  # noqa: E402
    HaarSeed,
    exact_concurrence,
    exact_purity,
    random_haar_state,
    random_mixed_state,
    wootters_concurrence,
)
from .protocol import (  # noqa: E402
    MeasurementPlan,
    ProtocolStatistics,
    Setup,
    concurrence,
    plan,
    purity_from_stats,
    reconstruct_offdiagonals,
    run_plan,
    statistics,
)
from .report import simulate  # noqa: E402
from .rotations import (  # noqa: E402
    PairRotation,
    UnitaryMatrix,
    apply_rotation,
    build_U,
    build_V,
    compose_disjoint,
)
from .state import (  # noqa: E402
    DensityMatrix,
    MixedBipartiteState,
    PureBipartiteState,
    load_state,
    normalize,
    partial_trace,
    reduced_density,
)
from .estimator import LocalConcurrenceEstimator  # noqa: E402
