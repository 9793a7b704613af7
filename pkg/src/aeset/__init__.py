"""Numerical toolkit for absolutely entangled sets of pure quantum states."""

__version__ = "0.1.0"

from .constructions import (
    AminReport,
    AminTable,
    SpherePoints,
    amin_table,
    critical_a_search,
    n5_symmetric_set,
    sphere_points_general_position,
    star_amin,
    star_amin_general_n,
    star_state_count,
    star_states,
    tetra_states,
)
from .core import (
    Partition,
    PureState,
    StateSet,
    entanglement_entropy,
    haar_random_state,
    haar_random_state_set,
    load_state_set,
    save_state_set,
    subsystem_entropies,
    triangularize,
)
from .criterion import (
    CriterionVerdict,
    check_ordering,
    detects,
    scan_permutations,
    scan_subsets,
)
from .errors import AesetError
from .optimizer import (
    OptimizationResult,
    OptimizerConfig,
    minimize_total_entropy,
    total_entropy,
    unitary_from_params,
)
from .rng import RunSeed
from .separability import (
    Unitary,
    disentangling_unitary,
    haar_random_unitary,
    is_fully_product,
    is_product_bipartite,
)
from .volume import (
    VolumeEstimate,
    block_sums,
    estimate_volume,
    estimate_volume_lower,
    necessary_condition_chain,
    saturation_threshold,
)
