"""Per-subtree mode, anti-mode and top-k leaf colors, with suffix-tree applications."""
from .baselines import (
    HistogramTable,
    RangeModeIndex,
    ResourceGuardError,
    ba1_all_modes,
    ba2_all_modes,
    ba3_all_modes,
    brute_all_modes,
    build_range_mode,
    range_mode_query,
)
from .dag import SinkColoredDag, bmm_via_dm, build_bmm_dag, dm_query
from .forest import SingleColorForest, SingleColorTree, build_leaf_lists, build_single_color_tree, split_forest
from .lca import LcaIndex, LevelAncestorIndex, build_lca, build_level_ancestor, child_toward, lca
from .modes import (
    AntiModeTable,
    ModeTable,
    TopKTable,
    count_colors,
    node_colored_modes,
    scm_all_modes,
    scm_anti_modes,
    scm_top_k,
)
from .retrieval import DocRetrievalIndex, build_retrieval_index, cqs, dr1, dr_bottom1, dr_topk, upm_mine
from .suffix import DocumentCollection, GeneralizedSuffixTree, build_gst, spell
from .tree import (
    ContractionMap,
    LeafColoredTree,
    TreeFormatError,
    contract_unary_paths,
    leaf_order,
    parse_tree,
    random_tree,
    read_tree,
    serialize_tree,
)

__version__ = "0.1.0"
