"""Battery thermal management (BTMS) constrained multi-objective benchmark suite."""

from .polynomial import Polynomial, eval_poly, grad_poly, parse_poly, serialize_poly
from .suite import (
    EvaluationResult,
    ProblemDescriptor,
    build_suite,
    evaluate,
    export_problem,
    get_problem,
    import_problem,
    random_point,
    repair_to_box,
)

__version__ = "0.1.0"
