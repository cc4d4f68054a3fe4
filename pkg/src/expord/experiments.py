"""Finite statistical experiments, priors, weights, and decision problems.

An experiment maps each hidden state to an exact probability distribution
over a finite signal alphabet.  A weight attached to an experiment rescales
its signal columns while preserving total mass one under every state; weights
are the raw material of the weighted-garbling order implemented in
:mod:`expord.order`.  Everything validates eagerly and stores Fractions, so
any object that exists is coherent.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .numerics import InvalidInput, Rational, RationalLike, as_rational


def _default_labels(prefix: str, count: int) -> tuple[str, ...]:
    return tuple(f"{prefix}{i}" for i in range(count))


def _check_labels(labels: tuple[str, ...], kind: str) -> None:
    if not labels:
        raise InvalidInput(f"{kind} labels must be nonempty")
    if len(set(labels)) != len(labels):
        raise InvalidInput(f"duplicate {kind} labels: {labels!r}")
    for label in labels:
        if not isinstance(label, str) or not label:
            raise InvalidInput(f"{kind} labels must be nonempty strings")


@dataclass(frozen=True)
class Experiment:
    """A finite experiment: one signal distribution per hidden state.

    ``matrix[i][j]`` is the probability of signal ``signals[j]`` given state
    ``states[i]``.  Rows must be exact probability vectors.
    """

    states: tuple[str, ...]
    signals: tuple[str, ...]
    matrix: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self) -> None:
        _check_labels(self.states, "state")
        _check_labels(self.signals, "signal")
        if len(self.matrix) != len(self.states):
            raise InvalidInput("one matrix row per state is required")
        for label, row in zip(self.states, self.matrix):
            if len(row) != len(self.signals):
                raise InvalidInput(f"row for state {label!r} has the wrong length")
            for entry in row:
                if not isinstance(entry, Fraction):
                    raise InvalidInput("matrix entries must be Fractions")
                if entry < 0:
                    raise InvalidInput(f"negative probability in state {label!r}")
            total = sum(row, Fraction(0))
            if total != 1:
                raise InvalidInput(
                    f"row for state {label!r} sums to {total}, expected 1"
                )

    @property
    def n_states(self) -> int:
        return len(self.states)

    @property
    def n_signals(self) -> int:
        return len(self.signals)

    def column(self, j: int) -> tuple[Fraction, ...]:
        """Likelihood column of signal ``j`` across states."""
        return tuple(row[j] for row in self.matrix)

    def has_full_support(self) -> bool:
        """True when every signal has positive probability in every state."""
        return all(entry > 0 for row in self.matrix for entry in row)

    def signal_probability(self, prior: "Prior") -> tuple[Fraction, ...]:
        """Marginal signal distribution under ``prior``."""
        if len(prior.weights) != self.n_states:
            raise InvalidInput("prior dimension does not match the state set")
        return tuple(
            sum(
                (prior.weights[i] * self.matrix[i][j] for i in range(self.n_states)),
                Fraction(0),
            )
            for j in range(self.n_signals)
        )


def validate_experiment(
    rows: Iterable[Sequence[RationalLike]],
    states: Sequence[str] | None = None,
    signals: Sequence[str] | None = None,
) -> Experiment:
    """Build an :class:`Experiment` from raw rows, checking every invariant.

    Rows may mix ints, Fractions, and rational strings.  Labels default to
    ``t0, t1, ...`` for states and ``s0, s1, ...`` for signals.
    """
    matrix = tuple(tuple(as_rational(entry) for entry in row) for row in rows)
    if not matrix:
        raise InvalidInput("an experiment needs at least one state")
    n_signals = len(matrix[0])
    state_labels = tuple(states) if states is not None else _default_labels("t", len(matrix))
    signal_labels = tuple(signals) if signals is not None else _default_labels("s", n_signals)
    return Experiment(states=state_labels, signals=signal_labels, matrix=matrix)


@dataclass(frozen=True)
class Prior:
    """An exact probability vector over hidden states."""

    weights: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        if not self.weights:
            raise InvalidInput("a prior needs at least one state")
        for entry in self.weights:
            if not isinstance(entry, Fraction):
                raise InvalidInput("prior entries must be Fractions")
            if entry < 0:
                raise InvalidInput("prior entries must be nonnegative")
        if sum(self.weights, Fraction(0)) != 1:
            raise InvalidInput("prior must sum to exactly 1")

    @property
    def full_support(self) -> bool:
        return all(entry > 0 for entry in self.weights)


def prior(weights: Sequence[RationalLike]) -> Prior:
    return Prior(weights=tuple(as_rational(w) for w in weights))


def uniform_prior(n_states: int) -> Prior:
    if n_states < 1:
        raise InvalidInput("a prior needs at least one state")
    return Prior(weights=tuple(Fraction(1, n_states) for _ in range(n_states)))


def weight_check(experiment: Experiment, values: Sequence[Fraction]) -> bool:
    """Is ``values`` a valid weight for ``experiment``?

    A weight assigns a nonnegative factor to each signal such that the
    reweighted rows still sum to one in every state.
    """
    if len(values) != experiment.n_signals:
        return False
    if any(v < 0 for v in values):
        return False
    for row in experiment.matrix:
        total = sum((v * p for v, p in zip(values, row)), Fraction(0))
        if total != 1:
            return False
    return True


@dataclass(frozen=True)
class Weight:
    """A validated weight for a specific experiment.

    ``size`` is the largest factor.  The all-ones weight is always valid,
    and any valid weight has some factor >= 1 (reweighted rows could not
    reach mass one otherwise), so ``size >= 1`` always holds.
    """

    values: tuple[Fraction, ...]
    size: Fraction

    def __post_init__(self) -> None:
        if self.size != max(self.values):
            raise InvalidInput("weight size must equal the largest factor")
        if self.size < 1:
            raise InvalidInput("weight size below 1 is impossible for a valid weight")


def make_weight(experiment: Experiment, values: Sequence[RationalLike]) -> Weight:
    """Validate ``values`` against ``experiment`` and wrap them as a Weight."""
    converted = tuple(as_rational(v) for v in values)
    if not weight_check(experiment, converted):
        raise InvalidInput("not a valid weight for this experiment")
    return Weight(values=converted, size=max(converted))


def unit_weight(experiment: Experiment) -> Weight:
    return Weight(
        values=tuple(Fraction(1) for _ in experiment.signals), size=Fraction(1)
    )


def apply_weight(weight: Weight | Sequence[RationalLike], experiment: Experiment) -> Experiment:
    """Rescale each signal column by its weight factor.

    The result is again an experiment over the same labels: validity of the
    weight is exactly the condition that every reweighted row sums to one.
    """
    if isinstance(weight, Weight):
        values = weight.values
        if len(values) != experiment.n_signals:
            raise InvalidInput("weight dimension does not match the signal set")
        if not weight_check(experiment, values):
            raise InvalidInput("weight is not valid for this experiment")
    else:
        values = make_weight(experiment, weight).values
    matrix = tuple(
        tuple(v * p for v, p in zip(values, row)) for row in experiment.matrix
    )
    return Experiment(states=experiment.states, signals=experiment.signals, matrix=matrix)


def regularize(experiment: Experiment) -> Experiment:
    """Drop null signals and merge signals with proportional likelihoods.

    Two signals are merged when their likelihood columns are positive
    multiples of each other; the merged column is the sum and the label
    joins the members with ``+``.  The operation is idempotent and does not
    change the induced posterior distribution under any prior.
    """
    columns = [experiment.column(j) for j in range(experiment.n_signals)]
    groups: list[list[int]] = []
    for j, column in enumerate(columns):
        if all(entry == 0 for entry in column):
            continue
        placed = False
        for group in groups:
            anchor = columns[group[0]]
            pivot = next(k for k, entry in enumerate(anchor) if entry != 0)
            if column[pivot] == 0:
                continue
            scale = column[pivot] / anchor[pivot]
            if scale > 0 and all(
                column[k] == scale * anchor[k] for k in range(len(anchor))
            ):
                group.append(j)
                placed = True
                break
        if not placed:
            groups.append([j])
    signals = tuple(
        "+".join(experiment.signals[j] for j in group) for group in groups
    )
    matrix = tuple(
        tuple(
            sum((row[j] for j in group), Fraction(0)) for group in groups
        )
        for row in experiment.matrix
    )
    return Experiment(states=experiment.states, signals=signals, matrix=matrix)


def _fresh_label(base: str, taken: Sequence[str]) -> str:
    label = base
    while label in taken:
        label += "_"
    return label


def dilute(experiment: Experiment, beta: RationalLike) -> Experiment:
    """Blend an experiment with an uninformative null signal.

    Each original signal keeps probability ``1/beta`` of its mass; the rest
    moves to a fresh null signal whose likelihood is constant across states.
    ``beta`` must be >= 1; ``beta = 1`` appends a null signal of mass zero.
    """
    scale = as_rational(beta)
    if scale < 1:
        raise InvalidInput(f"dilution size must be >= 1, got {scale}")
    inv = 1 / scale
    null_label = _fresh_label("null", experiment.signals)
    matrix = tuple(
        tuple(inv * p for p in row) + (1 - inv,) for row in experiment.matrix
    )
    return Experiment(
        states=experiment.states,
        signals=experiment.signals + (null_label,),
        matrix=matrix,
    )


def residual_experiment(experiment: Experiment, weight: Weight) -> Experiment:
    """The experiment carrying the mass a weight leaves unused.

    For a weight with mean factor above one, the rows
    ``(1 - values[j]/size) / (1 - 1/size) * matrix[i][j]`` form a proper
    experiment; mixing the reweighted experiment (with probability
    ``1/size``) and this residual (with probability ``1 - 1/size``)
    reproduces a dilution of the reweighted experiment.
    """
    values = weight.values
    if len(values) != experiment.n_signals:
        raise InvalidInput("weight dimension does not match the signal set")
    if not weight_check(experiment, values):
        raise InvalidInput("weight is not valid for this experiment")
    size = weight.size
    if size == 1:
        raise InvalidInput("residual experiment requires weight size > 1")
    denom = 1 - 1 / size
    matrix = tuple(
        tuple((1 - v / size) / denom * p for v, p in zip(values, row))
        for row in experiment.matrix
    )
    return Experiment(
        states=experiment.states, signals=experiment.signals, matrix=matrix
    )


@dataclass(frozen=True)
class DecisionProblem:
    """Finitely many actions, an exact payoff table, and a prior.

    ``payoffs[a][i]`` is the payoff of action ``actions[a]`` in state ``i``.
    """

    actions: tuple[str, ...]
    payoffs: tuple[tuple[Fraction, ...], ...]
    prior: Prior

    def __post_init__(self) -> None:
        _check_labels(self.actions, "action")
        if len(self.payoffs) != len(self.actions):
            raise InvalidInput("one payoff row per action is required")
        n_states = len(self.prior.weights)
        for label, row in zip(self.actions, self.payoffs):
            if len(row) != n_states:
                raise InvalidInput(f"payoff row for action {label!r} has the wrong length")
            for entry in row:
                if not isinstance(entry, Fraction):
                    raise InvalidInput("payoffs must be Fractions")

    @property
    def n_actions(self) -> int:
        return len(self.actions)

    @property
    def n_states(self) -> int:
        return len(self.prior.weights)


def decision_problem(
    payoffs: Iterable[Sequence[RationalLike]],
    prior_weights: Sequence[RationalLike],
    actions: Sequence[str] | None = None,
) -> DecisionProblem:
    """Build a validated :class:`DecisionProblem` from raw rows."""
    table = tuple(tuple(as_rational(entry) for entry in row) for row in payoffs)
    if not table:
        raise InvalidInput("a decision problem needs at least one action")
    labels = tuple(actions) if actions is not None else _default_labels("a", len(table))
    return DecisionProblem(actions=labels, payoffs=table, prior=prior(prior_weights))
