"""PTaCL-style three-valued attribute-based access control.

Targets decide whether a policy applies to a request of attribute pairs and
may come out undecided when attributes are missing; policies compose
decisions over the same three-valued carrier and evaluate to decision sets;
the conservative resolver grants access only for the certain {allow}.  The
:mod:`ptacl.analysis` module classifies targets and policies by how well
they resist attribute-hiding attacks, and :mod:`ptacl.syntax` provides the
textual formats used by the CLI and the HTTP decision point.
"""

from .analysis import (
    GuaranteeClass,
    HidingWitness,
    MonotonicityClass,
    MonotonicityKind,
    SubsetMode,
    check_monotonic_semantic,
    classify_policy_guarantee,
    classify_target,
    find_hiding_attacks,
)
from .errors import BudgetExceededError, ParseError, PtaclError, SourceSpan
from .policies import (
    AccessDecision,
    CombineMode,
    DecisionOp,
    DecisionSet,
    Policy,
    desugar_policy,
    eval_list_fold,
    eval_nary_fast,
    eval_policy,
    naive_product,
    resolve,
)
from .syntax import (
    parse_policy,
    parse_request,
    parse_target,
    print_policy,
    print_request,
    print_target,
)
from .targets import (
    Request,
    Target,
    build_universe,
    desugar_target,
    eval_target,
    targets_equivalent,
)
from .tri import TriValue

__version__ = "0.1.0"

__all__ = [
    "AccessDecision",
    "BudgetExceededError",
    "CombineMode",
    "DecisionOp",
    "DecisionSet",
    "GuaranteeClass",
    "HidingWitness",
    "MonotonicityClass",
    "MonotonicityKind",
    "ParseError",
    "Policy",
    "PtaclError",
    "Request",
    "SourceSpan",
    "SubsetMode",
    "Target",
    "TriValue",
    "build_universe",
    "check_monotonic_semantic",
    "classify_policy_guarantee",
    "classify_target",
    "desugar_policy",
    "desugar_target",
    "eval_list_fold",
    "eval_nary_fast",
    "eval_policy",
    "eval_target",
    "find_hiding_attacks",
    "naive_product",
    "parse_policy",
    "parse_request",
    "parse_target",
    "print_policy",
    "print_request",
    "print_target",
    "resolve",
    "targets_equivalent",
    "__version__",
]
