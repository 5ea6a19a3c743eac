# isort: skip_file

from .graph import (
    MaxCutGraph,
    build_maxcut,
    cut_consistency,
    cut_to_solution,
    dump_maxcut,
    solution_to_cut,
)
from .separation import (
    OddCycleInequality,
    TransitivityCut,
    separate_odd_cycles,
    separate_transitivity,
)
