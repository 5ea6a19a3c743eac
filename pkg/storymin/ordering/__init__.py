# isort: skip_file

from .model import (
    CrossingTerm,
    OrderingModel,
    Parity,
    TransitivityTriple,
    TreeEquality,
    VariableIndex,
    build_model,
    decode_assignment,
    dump_model,
    encode_solution,
    objective_value,
    transitivity_witness,
)
from .reduce import ReducedModel, VariableClasses, identify_variables
