"""Decision-problem values and the payoff characterization of the order.

The value of an experiment for a decision problem is the expected payoff of
the best signal-contingent action plan.  A weighted-garbling certificate of
size beta yields the guarantee

    V(P') >= (1/beta) V(P) + (1 - 1/beta) V(null)

for every decision problem, and the guarantee is not merely sound but
complete: when the order fails at size beta, an explicitly violating
decision problem can be constructed from the dual of a Blackwell
feasibility LP on the diluted experiment.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from .experiments import (
    DecisionProblem,
    Experiment,
    Prior,
    dilute,
    residual_experiment,
)
from .numerics import INFEASIBLE, OPTIMAL, InvalidInput, RationalLike, as_rational
from .order import GarblingCertificate, blackwell_outcome, verify_certificate


@dataclass(frozen=True)
class PolicyTable:
    """A deterministic action plan: one action per signal."""

    signals: tuple[str, ...]
    actions: tuple[str, ...]
    indices: tuple[int, ...]

    def __post_init__(self) -> None:
        if not (len(self.signals) == len(self.actions) == len(self.indices)):
            raise InvalidInput("policy rows must align signals with actions")

    def action_index(self, signal_position: int) -> int:
        return self.indices[signal_position]


def _check_compatible(problem: DecisionProblem, experiment: Experiment) -> None:
    if problem.n_states != experiment.n_states:
        raise InvalidInput("decision problem and experiment state sets differ")


def policy_payoff(
    problem: DecisionProblem, experiment: Experiment, policy: PolicyTable
) -> Fraction:
    """Expected payoff of a fixed signal-contingent plan."""
    _check_compatible(problem, experiment)
    if policy.signals != experiment.signals:
        raise InvalidInput("policy is indexed by a different signal set")
    total = Fraction(0)
    for t in range(problem.n_states):
        weight = problem.prior.weights[t]
        if weight == 0:
            continue
        for j in range(experiment.n_signals):
            action = policy.indices[j]
            total += weight * experiment.matrix[t][j] * problem.payoffs[action][t]
    return total


def value(problem: DecisionProblem, experiment: Experiment) -> tuple[Fraction, PolicyTable]:
    """Optimal expected payoff and an optimal deterministic policy.

    Each signal is treated separately: the optimal plan maximizes
    sum_t u(a, t) pi(s|t) mu(t) signal by signal, ties broken toward the
    lowest action index.
    """
    _check_compatible(problem, experiment)
    total = Fraction(0)
    chosen: list[int] = []
    for j in range(experiment.n_signals):
        best: Fraction | None = None
        best_action = 0
        for a in range(problem.n_actions):
            score = sum(
                (
                    problem.payoffs[a][t]
                    * experiment.matrix[t][j]
                    * problem.prior.weights[t]
                    for t in range(problem.n_states)
                ),
                Fraction(0),
            )
            if best is None or score > best:
                best = score
                best_action = a
        total += best
        chosen.append(best_action)
    policy = PolicyTable(
        signals=experiment.signals,
        actions=tuple(problem.actions[a] for a in chosen),
        indices=tuple(chosen),
    )
    return total, policy


def value_null(problem: DecisionProblem) -> Fraction:
    """Value of acting on the prior alone."""
    return max(
        sum(
            (problem.payoffs[a][t] * problem.prior.weights[t] for t in range(problem.n_states)),
            Fraction(0),
        )
        for a in range(problem.n_actions)
    )


@dataclass(frozen=True)
class BoundReport:
    """Both sides of the size-beta payoff guarantee, evaluated exactly."""

    value_prime: Fraction
    value_pi: Fraction
    value_noinfo: Fraction
    beta: Fraction
    slack: Fraction
    holds: bool

    def __post_init__(self) -> None:
        rhs = self.value_pi / self.beta + (1 - 1 / self.beta) * self.value_noinfo
        if self.slack != self.value_prime - rhs:
            raise InvalidInput("slack is not the difference of the two sides")
        if self.holds != (self.slack >= 0):
            raise InvalidInput("holds flag contradicts the slack sign")


def verify_bound(
    problem: DecisionProblem,
    pi: Experiment,
    pi_prime: Experiment,
    beta: RationalLike,
) -> BoundReport:
    """Evaluate V(P') - [(1/beta) V(P) + (1 - 1/beta) V(null)] exactly."""
    scale = as_rational(beta)
    if scale < 1:
        raise InvalidInput(f"the bound is defined for beta >= 1, got {scale}")
    if pi.states != pi_prime.states:
        raise InvalidInput("experiments must share the same state labels")
    value_prime, _ = value(problem, pi_prime)
    value_pi, _ = value(problem, pi)
    base = value_null(problem)
    slack = value_prime - (value_pi / scale + (1 - 1 / scale) * base)
    return BoundReport(
        value_prime=value_prime,
        value_pi=value_pi,
        value_noinfo=base,
        beta=scale,
        slack=slack,
        holds=slack >= 0,
    )


def falsify_bound(
    pi: Experiment, pi_prime: Experiment, beta: RationalLike
) -> DecisionProblem | None:
    """Find a decision problem violating the size-beta guarantee, if any.

    The guarantee holds for every decision problem exactly when the
    dilution of ``pi`` by beta is a Blackwell garbling of ``pi_prime``.
    When that LP is infeasible, its Farkas multipliers y(s, t) on the
    reproduction rows price the states: actions indexed by the diluted
    signals with payoffs u(a_s, t) = y(s, t) |states| under the uniform
    prior make the diluted experiment worth strictly more than
    ``pi_prime``, a strict violation of the bound.  Payoffs are rescaled
    into [-1, 1] and the violation is re-verified before returning.
    """
    scale = as_rational(beta)
    if scale < 1:
        raise InvalidInput(f"the bound is defined for beta >= 1, got {scale}")
    diluted = dilute(pi, scale)
    outcome = blackwell_outcome(diluted, pi_prime)
    if outcome.status == OPTIMAL:
        return None
    assert outcome.status == INFEASIBLE
    n_states = pi.n_states
    # The first len(diluted.signals) * n_states Farkas rows are the
    # reproduction rows, laid out signal-major.
    payoffs = []
    for i in range(diluted.n_signals):
        payoffs.append(
            tuple(
                outcome.farkas[i * n_states + t] * n_states for t in range(n_states)
            )
        )
    peak = max(abs(entry) for row in payoffs for entry in row)
    assert peak > 0, "a Farkas certificate cannot have all-zero row multipliers"
    if peak > 1:
        payoffs = [tuple(entry / peak for entry in row) for row in payoffs]
    problem = DecisionProblem(
        actions=tuple(f"a_{signal}" for signal in diluted.signals),
        payoffs=tuple(payoffs),
        prior=Prior(weights=tuple(Fraction(1, n_states) for _ in range(n_states))),
    )
    report = verify_bound(problem, pi, pi_prime, scale)
    assert not report.holds, "falsifier construction must violate the bound"
    return problem


def random_decision_problem(
    seed: int,
    n_actions: int,
    n_states: int,
    denominator_bound: int = 12,
) -> DecisionProblem:
    """Seeded random decision problem with payoffs in [-1, 1].

    Each payoff is p/q with q <= denominator_bound and |p| <= q; the prior
    is full support with the same denominator discipline.
    """
    if n_actions < 1 or n_states < 1 or denominator_bound < 1:
        raise InvalidInput("counts and the denominator bound must be positive")
    rng = random.Random(seed)
    payoffs = tuple(
        tuple(
            Fraction(rng.randint(-q, q), q)
            for q in (rng.randint(1, denominator_bound) for _ in range(n_states))
        )
        for _ in range(n_actions)
    )
    raw = [rng.randint(1, denominator_bound) for _ in range(n_states)]
    total = sum(raw)
    weights = tuple(Fraction(w, total) for w in raw)
    return DecisionProblem(
        actions=tuple(f"a{i}" for i in range(n_actions)),
        payoffs=payoffs,
        prior=Prior(weights=weights),
    )


def mixed_strategy_payoff(
    problem: DecisionProblem,
    pi: Experiment,
    pi_prime: Experiment,
    certificate: GarblingCertificate,
    policy: PolicyTable,
    residual_policy: PolicyTable,
) -> Fraction:
    """Payoff of the simulated strategy a certificate induces on pi_prime.

    On signal s' the strategy plays the pi policy pushed through the
    channel with probability gamma(s')/beta and falls back to the residual
    policy otherwise.  Its payoff decomposes exactly as
    (1/beta) U(policy; pi) + (1 - 1/beta) U(residual_policy; residual).
    """
    if certificate.pi != pi or certificate.pi_prime != pi_prime:
        raise InvalidInput("certificate does not concern this pair of experiments")
    if not verify_certificate(certificate):
        raise InvalidInput("certificate does not verify")
    _check_compatible(problem, pi_prime)
    if policy.signals != pi.signals:
        raise InvalidInput("policy is indexed by a different signal set")
    if residual_policy.signals != pi_prime.signals:
        raise InvalidInput("residual policy must be indexed by pi_prime's signals")
    beta = certificate.beta
    if beta == 1:
        raise InvalidInput(
            "size-1 certificates leave no residual; use the garbled policy directly"
        )
    gamma = certificate.gamma
    total = Fraction(0)
    for t in range(problem.n_states):
        weight = problem.prior.weights[t]
        if weight == 0:
            continue
        for j in range(pi_prime.n_signals):
            mass = weight * pi_prime.matrix[t][j]
            if mass == 0:
                continue
            # Channel part: psi(s, s')/beta is the joint chance of keeping
            # the weighted draw and garbling s' to s.
            for i in range(pi.n_signals):
                if certificate.psi[i][j] == 0:
                    continue
                action = policy.indices[i]
                total += mass * certificate.psi[i][j] / beta * problem.payoffs[action][t]
            fallback = 1 - gamma[j] / beta
            if fallback != 0:
                action = residual_policy.indices[j]
                total += mass * fallback * problem.payoffs[action][t]
    return total


def residual_for(certificate: GarblingCertificate) -> Experiment:
    """The residual experiment of a certificate's weight (size > 1)."""
    return residual_experiment(certificate.pi_prime, certificate.weight())
