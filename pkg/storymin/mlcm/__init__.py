# isort: skip_file

from .instance import (
    ROOT,
    Edge,
    LayerTree,
    MlcmInstance,
    Node,
    Solution,
    is_tree_consistent,
    lca,
    tree_signature,
    validate_instance,
)
from .crossings import count_crossings, crossings_per_gap, gap_crossings
from .textio import dump_instance, dump_solution, parse_instance, parse_solution
from .transform import MergeMap, TransformTrace, build_instance, merge_layers
