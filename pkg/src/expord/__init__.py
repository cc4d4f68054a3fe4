"""Exact comparison of finite statistical experiments.

The library decides and certifies order relations between experiments
(Blackwell garbling, weighted garbling, conditional informativeness), turns
the certificates into value-of-information bounds with an exact falsifier,
and evaluates finite-horizon stopping problems over hidden Markov states.
All arithmetic is rational and all verdicts come with machine-checkable
evidence.
"""

from .beliefs import (
    CouplingCertificate,
    CouplingVerification,
    HullMembershipCertificate,
    PosteriorAtom,
    PosteriorDistribution,
    check_weighted_beliefs,
    coupling_from_certificate,
    coupling_to_weight,
    hull_membership,
    posteriors,
    separating_functional,
    verify_coupling,
)
from .dynamics import (
    BeliefSet,
    EtaResult,
    MarkovChain,
    MergingReport,
    StoppingProblem,
    belief_set,
    counterexample,
    eta_limit,
    eta_step,
    full_simplex,
    iid_chain,
    markov_chain,
    merging_horizon,
    regular_prior_check,
    stationary_distribution,
    stopping_value,
    update,
)
from .experiments import (
    DecisionProblem,
    Experiment,
    Prior,
    Weight,
    apply_weight,
    decision_problem,
    dilute,
    make_weight,
    prior,
    regularize,
    residual_experiment,
    uniform_prior,
    unit_weight,
    validate_experiment,
    weight_check,
)
from .numerics import (
    EQ,
    GE,
    INFEASIBLE,
    LE,
    OPTIMAL,
    UNBOUNDED,
    InvalidInput,
    LinearProgram,
    LpOutcome,
    Rational,
    RationalLike,
    as_rational,
    dual_program,
    farkas_verifies,
    format_rational,
    linear_program,
    parse_rational,
    ray_verifies,
    solution_feasible,
    solve,
)
from .order import (
    ConditionalExperiment,
    GarblingCertificate,
    OrderError,
    SizeInterval,
    VerificationResult,
    check_blackwell,
    check_weighted,
    compose,
    from_conditional,
    min_size,
    mix_certificates,
    size_interval,
    to_conditional,
    verify_certificate,
)
from .value import (
    BoundReport,
    PolicyTable,
    falsify_bound,
    mixed_strategy_payoff,
    policy_payoff,
    random_decision_problem,
    residual_for,
    value,
    value_null,
    verify_bound,
)

__version__ = "0.1.0"

__all__ = [
    "EQ",
    "GE",
    "INFEASIBLE",
    "LE",
    "OPTIMAL",
    "UNBOUNDED",
    "BeliefSet",
    "BoundReport",
    "ConditionalExperiment",
    "CouplingCertificate",
    "CouplingVerification",
    "DecisionProblem",
    "EtaResult",
    "Experiment",
    "GarblingCertificate",
    "HullMembershipCertificate",
    "InvalidInput",
    "LinearProgram",
    "LpOutcome",
    "MarkovChain",
    "MergingReport",
    "OrderError",
    "PolicyTable",
    "PosteriorAtom",
    "PosteriorDistribution",
    "Prior",
    "Rational",
    "RationalLike",
    "as_rational",
    "SizeInterval",
    "StoppingProblem",
    "VerificationResult",
    "Weight",
    "apply_weight",
    "belief_set",
    "check_blackwell",
    "check_weighted",
    "check_weighted_beliefs",
    "compose",
    "counterexample",
    "coupling_from_certificate",
    "coupling_to_weight",
    "decision_problem",
    "dilute",
    "dual_program",
    "eta_limit",
    "eta_step",
    "falsify_bound",
    "farkas_verifies",
    "format_rational",
    "from_conditional",
    "full_simplex",
    "hull_membership",
    "iid_chain",
    "linear_program",
    "make_weight",
    "markov_chain",
    "merging_horizon",
    "min_size",
    "mix_certificates",
    "mixed_strategy_payoff",
    "parse_rational",
    "policy_payoff",
    "posteriors",
    "prior",
    "random_decision_problem",
    "ray_verifies",
    "regular_prior_check",
    "regularize",
    "residual_experiment",
    "residual_for",
    "separating_functional",
    "size_interval",
    "solution_feasible",
    "solve",
    "stationary_distribution",
    "stopping_value",
    "to_conditional",
    "uniform_prior",
    "unit_weight",
    "update",
    "validate_experiment",
    "value",
    "value_null",
    "verify_bound",
    "verify_certificate",
    "verify_coupling",
    "weight_check",
]
