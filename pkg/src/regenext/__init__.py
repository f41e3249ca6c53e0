"""regenext: order-statistics asymptotics for regenerative processes.

Simulates regenerative Markov chains cycle-by-cycle, evaluates the compound
approximation for the distribution of the q-th largest value over n steps,
and measures how closely the two agree.
"""

from .core import (
    AUX_STREAM_OFFSET,
    DEFAULT_CYCLE_CAP,
    NEG_INF,
    CycleCapExceeded,
    CycleRecord,
    make_stream,
    read_cycles_csv,
    simulate_cycle,
    write_cycles_csv,
)
from .extremes import (
    CompositionSet,
    approx_cdf,
    as_cluster_vector,
    binomial_oracle,
    enumerate_J,
    gamma,
    gamma_bruteforce,
)
from .models import (
    ConstantStep,
    GeometricJump,
    IidBlock,
    Lindley,
    ParetoStep,
    ParetoTail,
    PhantomProfile,
    PrescribedBeta,
    ReflectedWalk,
    VSequence,
    build_vsequence,
    closed_form_profile,
    geometric_jump_profile,
    iid_block_beta,
    iid_block_model,
    iid_block_profile,
    lindley_profile,
    model_from_dict,
    model_to_dict,
    path_top_q,
    prescribed_beta_model,
    reflected_walk_profile,
    sample_cycle_batch,
)
from .montecarlo import (
    ClusterSizeEstimate,
    ComparisonReport,
    EstimatedProfile,
    OrderStatSample,
    TailEquivalenceTable,
    compare,
    estimate_profile,
    reflected_walk_cluster_estimate,
    simulate_order_stats,
    sup_distance,
    tail_equivalence_check,
)

__version__ = "0.1.0"
