"""Random phylogenetic trees under the Yule and uniform models.

Generation, the Sackin / Colless / F balance statistics, exact rational
oracles for small n, Monte Carlo moment estimation at large n, and
samplers for the limiting laws (the bivariate Yule fixed point and the
Airy distribution).
"""

from .errors import CapExceededError
from .exact import (
    ExactMoments,
    JointPMF,
    exact_moments,
    expected_root_min_catalan,
    expected_sqrt_subtree_sum,
    joint_pmf,
    k_pmf,
    khat_limit_pmf,
    khat_pmf,
    khat_pmf_at,
    mean_colless_yule,
    mean_sackin_yule,
    t_min,
)
from .limits import (
    ExcursionPath,
    LimitMomentsYule,
    TollVector,
    airy_moments,
    apply_fixed_point_step,
    dyck_path,
    excursion_path,
    limit_moments_yule,
    sample_airy_dyck,
    sample_airy_dycks,
    sample_airy_excursion,
    sample_airy_excursions,
    sample_limit_pair,
    sample_limit_pairs,
    sample_limit_via_n,
    toll_vector,
)
from .models import (
    ModelKind,
    SplitDistribution,
    catalan_asymptotic,
    catalan_asymptotic_log,
    catalan_number,
    catalan_split,
    double_factorial_odd,
    generate,
    permutation_split,
    split_distribution,
    uniform_split,
    yule_split,
)
from .montecarlo import (
    MomentsReport,
    TestReport,
    convergence_table,
    estimate_moments,
    np_test,
)
from .stats import (
    TreeStats,
    colless,
    f_stat,
    min_split_sum,
    random_ancestor_subtree_size,
    sackin,
    tree_stats,
)
from .trees import (
    NewickError,
    PhyloTree,
    SearchTreeShape,
    ShapeEntry,
    ShapeTable,
    emit_newick,
    enumerate_shapes,
    leaf_counts,
    leaf_depths,
    parse_newick,
    phi_map,
)

__version__ = "0.1.0"
