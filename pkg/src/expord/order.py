"""Garbling orders between experiments, decided exactly with certificates.

An experiment P is a weighted garbling of P' when there are a valid weight
gamma for P' and a channel phi from P''s signals to P's signals with

    P(s|t) = sum_{s'} phi(s|s') gamma(s') P'(s'|t)   for all s, t.

Substituting psi(s, s') = gamma(s') phi(s|s') turns the existence question
into a single linear feasibility problem in nonnegative psi: the weight
identity follows by summing the reproduction rows over s, so the reproduction
rows alone characterize the order.  Blackwell garbling is the special case
gamma = 1, recovered by adding column normalization rows.  All decisions here
return either a certificate that verifies by substitution or an exact
negative answer.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .experiments import Experiment, Weight, apply_weight, make_weight, weight_check
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
    RationalLike,
    as_rational,
    linear_program,
    solve,
)


class OrderError(InvalidInput):
    """A certified relation required by an operation does not hold."""


@dataclass(frozen=True)
class VerificationResult:
    """Outcome of an exact re-check, with one message per violated condition."""

    ok: bool
    violations: tuple[str, ...] = ()

    def __bool__(self) -> bool:
        return self.ok


@dataclass(frozen=True)
class GarblingCertificate:
    """Evidence that ``pi`` is a weighted garbling of ``pi_prime``.

    The payload is the linearized kernel ``psi`` with
    ``psi[s][s']  =  gamma(s') * phi(s|s')``.  The weight, channel, and size
    are derived views; rows of ``phi`` at signals with zero weight are set
    uniform by convention.
    """

    pi: Experiment
    pi_prime: Experiment
    psi: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self) -> None:
        if len(self.psi) != self.pi.n_signals:
            raise InvalidInput("psi must have one row per signal of pi")
        for row in self.psi:
            if len(row) != self.pi_prime.n_signals:
                raise InvalidInput("psi must have one column per signal of pi_prime")
            for entry in row:
                if not isinstance(entry, Fraction):
                    raise InvalidInput("psi entries must be Fractions")
                if entry < 0:
                    raise InvalidInput("psi entries must be nonnegative")
        if self.pi.states != self.pi_prime.states:
            raise InvalidInput("certificates require a shared state set")

    @property
    def gamma(self) -> tuple[Fraction, ...]:
        """Weight factors: column sums of psi."""
        return tuple(
            sum((row[j] for row in self.psi), Fraction(0))
            for j in range(self.pi_prime.n_signals)
        )

    @property
    def beta(self) -> Fraction:
        """Size of the certificate: the largest weight factor."""
        return max(self.gamma)

    @property
    def phi(self) -> tuple[tuple[Fraction, ...], ...]:
        """Channel from pi_prime's signals to pi's signals, as psi/gamma."""
        gamma = self.gamma
        n = self.pi.n_signals
        uniform = Fraction(1, n)
        return tuple(
            tuple(
                self.psi[i][j] / gamma[j] if gamma[j] > 0 else uniform
                for j in range(self.pi_prime.n_signals)
            )
            for i in range(n)
        )

    def weight(self) -> Weight:
        """The certificate's weight as a validated :class:`Weight`."""
        return make_weight(self.pi_prime, self.gamma)


def verify_certificate(certificate: GarblingCertificate) -> VerificationResult:
    """Re-derive every certificate condition by exact substitution."""
    pi, pi_prime, psi = certificate.pi, certificate.pi_prime, certificate.psi
    violations: list[str] = []
    for i, signal in enumerate(pi.signals):
        for t, state in enumerate(pi.states):
            reproduced = sum(
                (psi[i][j] * pi_prime.matrix[t][j] for j in range(pi_prime.n_signals)),
                Fraction(0),
            )
            if reproduced != pi.matrix[t][i]:
                violations.append(
                    f"reproduction fails at signal {signal!r}, state {state!r}: "
                    f"{reproduced} != {pi.matrix[t][i]}"
                )
    gamma = certificate.gamma
    for t, state in enumerate(pi.states):
        mass = sum(
            (gamma[j] * pi_prime.matrix[t][j] for j in range(pi_prime.n_signals)),
            Fraction(0),
        )
        if mass != 1:
            violations.append(
                f"weight identity fails at state {state!r}: mass {mass} != 1"
            )
    if certificate.beta < 1:
        violations.append(f"size {certificate.beta} below 1")
    return VerificationResult(ok=not violations, violations=tuple(violations))


def _require_shared_states(pi: Experiment, pi_prime: Experiment) -> None:
    if pi.states != pi_prime.states:
        raise InvalidInput(
            "experiments must share the same state labels to be compared"
        )


def _reproduction_rows(
    pi: Experiment, pi_prime: Experiment, n_vars: int, offset: int = 0
) -> list[tuple[list[Fraction], str, Fraction]]:
    """Equality rows sum_{s'} psi(s,s') pi_prime(s'|t) = pi(s|t), flattened.

    Variable layout: psi(s, s') at index offset + s * |S'| + s'.
    """
    n_sp = pi_prime.n_signals
    rows = []
    for i in range(pi.n_signals):
        for t in range(pi.n_states):
            coeffs = [Fraction(0)] * n_vars
            for j in range(n_sp):
                coeffs[offset + i * n_sp + j] = pi_prime.matrix[t][j]
            rows.append((coeffs, EQ, pi.matrix[t][i]))
    return rows


def _psi_from_point(
    pi: Experiment, pi_prime: Experiment, point: Sequence[Fraction], offset: int = 0
) -> tuple[tuple[Fraction, ...], ...]:
    n_sp = pi_prime.n_signals
    return tuple(
        tuple(point[offset + i * n_sp + j] for j in range(n_sp))
        for i in range(pi.n_signals)
    )


def _weighted_lp(
    pi: Experiment, pi_prime: Experiment, max_size: Fraction | None = None
) -> tuple[LinearProgram, LpOutcome]:
    n_vars = pi.n_signals * pi_prime.n_signals
    rows = _reproduction_rows(pi, pi_prime, n_vars)
    if max_size is not None:
        for j in range(pi_prime.n_signals):
            coeffs = [Fraction(0)] * n_vars
            for i in range(pi.n_signals):
                coeffs[i * pi_prime.n_signals + j] = Fraction(1)
            rows.append((coeffs, LE, max_size))
    lp = linear_program([Fraction(0)] * n_vars, rows, sense="min")
    return lp, solve(lp)


def check_weighted(
    pi: Experiment,
    pi_prime: Experiment,
    max_size: RationalLike | None = None,
) -> GarblingCertificate | None:
    """Decide whether ``pi`` is a weighted garbling of ``pi_prime``.

    Returns a verifying certificate, or None when the relation is
    certifiably absent (the feasibility LP has a Farkas certificate).
    Passing ``max_size`` restricts the search to certificates of at most
    that size, so a witness of a requested size can be demanded.
    """
    _require_shared_states(pi, pi_prime)
    cap = None
    if max_size is not None:
        cap = as_rational(max_size)
        if cap < 1:
            raise InvalidInput("max_size must be at least 1")
    _lp, outcome = _weighted_lp(pi, pi_prime, cap)
    if outcome.status == INFEASIBLE:
        return None
    assert outcome.status == OPTIMAL
    psi = _psi_from_point(pi, pi_prime, outcome.x)
    certificate = GarblingCertificate(pi=pi, pi_prime=pi_prime, psi=psi)
    assert verify_certificate(certificate), "solver returned a non-verifying psi"
    if cap is not None:
        assert certificate.beta <= cap
    return certificate


def blackwell_outcome(pi: Experiment, pi_prime: Experiment) -> LpOutcome:
    """Feasibility LP for plain Blackwell garbling (column-stochastic phi).

    Exposed separately because the Farkas certificate of the infeasible
    case is the raw material for building violating decision problems.
    """
    _require_shared_states(pi, pi_prime)
    n_vars = pi.n_signals * pi_prime.n_signals
    rows = _reproduction_rows(pi, pi_prime, n_vars)
    n_sp = pi_prime.n_signals
    for j in range(n_sp):
        coeffs = [Fraction(0)] * n_vars
        for i in range(pi.n_signals):
            coeffs[i * n_sp + j] = Fraction(1)
        rows.append((coeffs, EQ, Fraction(1)))
    lp = linear_program([Fraction(0)] * n_vars, rows, sense="min")
    return solve(lp)


def check_blackwell(pi: Experiment, pi_prime: Experiment) -> GarblingCertificate | None:
    """Decide whether ``pi`` is a Blackwell garbling of ``pi_prime``.

    The returned certificate has weight one on every signal, so its psi is
    the channel phi itself and its size is exactly 1.
    """
    outcome = blackwell_outcome(pi, pi_prime)
    if outcome.status == INFEASIBLE:
        return None
    assert outcome.status == OPTIMAL
    psi = _psi_from_point(pi, pi_prime, outcome.x)
    certificate = GarblingCertificate(pi=pi, pi_prime=pi_prime, psi=psi)
    assert certificate.beta == 1
    assert verify_certificate(certificate), "solver returned a non-verifying phi"
    return certificate


def min_size(
    pi: Experiment, pi_prime: Experiment
) -> tuple[Fraction, GarblingCertificate] | None:
    """Smallest certificate size over all weighted-garbling certificates.

    Minimizes an auxiliary bound t over psi >= 0 subject to the
    reproduction rows and column sums <= t.  Returns the exact minimum and
    a witness attaining it, or None when no certificate exists.  The
    minimum equals 1 exactly when the pair is Blackwell ordered.
    """
    _require_shared_states(pi, pi_prime)
    n_psi = pi.n_signals * pi_prime.n_signals
    n_vars = n_psi + 1
    t_index = n_psi
    rows = _reproduction_rows(pi, pi_prime, n_vars)
    for j in range(pi_prime.n_signals):
        coeffs = [Fraction(0)] * n_vars
        for i in range(pi.n_signals):
            coeffs[i * pi_prime.n_signals + j] = Fraction(1)
        coeffs[t_index] = Fraction(-1)
        rows.append((coeffs, LE, Fraction(0)))
    objective = [Fraction(0)] * n_psi + [Fraction(1)]
    outcome = solve(linear_program(objective, rows, sense="min"))
    if outcome.status == INFEASIBLE:
        return None
    assert outcome.status == OPTIMAL, "size is bounded below by 1"
    psi = _psi_from_point(pi, pi_prime, outcome.x)
    certificate = GarblingCertificate(pi=pi, pi_prime=pi_prime, psi=psi)
    assert verify_certificate(certificate)
    assert certificate.beta == outcome.objective
    return outcome.objective, certificate


@dataclass(frozen=True)
class SizeInterval:
    """The exact set of achievable certificate sizes for an ordered pair.

    Achievable sizes form the interval [beta_min, beta_max]; beta_max is
    None when sizes are unbounded above (pi_prime has a null signal to
    park arbitrary mass on).  Witnesses attain each finite endpoint, and
    mixing them traces out every intermediate size.
    """

    beta_min: Fraction
    beta_max: Fraction | None
    witness_min: GarblingCertificate
    witness_max: GarblingCertificate | None

    @property
    def unbounded(self) -> bool:
        return self.beta_max is None


def size_interval(pi: Experiment, pi_prime: Experiment) -> SizeInterval | None:
    """Compute the exact interval of achievable certificate sizes.

    The lower endpoint comes from :func:`min_size`.  The upper endpoint
    maximizes each column sum of psi separately; the overall maximum size
    is the largest of these because a maximizing psi for one column keeps
    every other column at or below its own maximum.
    """
    base = min_size(pi, pi_prime)
    if base is None:
        return None
    beta_min, witness_min = base
    n_vars = pi.n_signals * pi_prime.n_signals
    rows = _reproduction_rows(pi, pi_prime, n_vars)
    best: tuple[Fraction, GarblingCertificate] | None = None
    for j in range(pi_prime.n_signals):
        objective = [Fraction(0)] * n_vars
        for i in range(pi.n_signals):
            objective[i * pi_prime.n_signals + j] = Fraction(1)
        outcome = solve(linear_program(objective, rows, sense="max"))
        assert outcome.status != INFEASIBLE, "min_size already proved feasibility"
        if outcome.status == UNBOUNDED:
            return SizeInterval(
                beta_min=beta_min,
                beta_max=None,
                witness_min=witness_min,
                witness_max=None,
            )
        if best is None or outcome.objective > best[0]:
            psi = _psi_from_point(pi, pi_prime, outcome.x)
            best = (
                outcome.objective,
                GarblingCertificate(pi=pi, pi_prime=pi_prime, psi=psi),
            )
    beta_max, witness_max = best
    assert verify_certificate(witness_max)
    assert witness_max.beta == beta_max >= beta_min
    return SizeInterval(
        beta_min=beta_min,
        beta_max=beta_max,
        witness_min=witness_min,
        witness_max=witness_max,
    )


def mix_certificates(
    first: GarblingCertificate,
    second: GarblingCertificate,
    weight_on_second: RationalLike,
) -> GarblingCertificate:
    """Convex combination of two certificates for the same pair.

    Feasible psi form a convex set, so any mixture verifies.  The mixture's
    size is the max of the mixed column sums, which interpolates between
    the endpoint sizes but need not be their convex combination.
    """
    lam = as_rational(weight_on_second)
    if not 0 <= lam <= 1:
        raise InvalidInput(f"mixing weight must lie in [0, 1], got {lam}")
    if first.pi != second.pi or first.pi_prime != second.pi_prime:
        raise InvalidInput("certificates must concern the same pair of experiments")
    psi = tuple(
        tuple((1 - lam) * a + lam * b for a, b in zip(row_a, row_b))
        for row_a, row_b in zip(first.psi, second.psi)
    )
    return GarblingCertificate(pi=first.pi, pi_prime=first.pi_prime, psi=psi)


def compose(
    inner: GarblingCertificate, outer: GarblingCertificate
) -> GarblingCertificate:
    """Chain certificates along pi <= pi' <= pi'' into one for pi <= pi''.

    The linearized kernels compose by matrix product:
    psi(s, s'') = sum_{s'} psi_inner(s, s') psi_outer(s', s'').  Summing
    columns shows the composite size is at most the product of the sizes.
    """
    if inner.pi_prime != outer.pi:
        raise InvalidInput(
            "inner certificate's upper experiment must be the outer's lower one"
        )
    n_mid = inner.pi_prime.n_signals
    psi = tuple(
        tuple(
            sum(
                (inner.psi[i][k] * outer.psi[k][j] for k in range(n_mid)),
                Fraction(0),
            )
            for j in range(outer.pi_prime.n_signals)
        )
        for i in range(inner.pi.n_signals)
    )
    composite = GarblingCertificate(pi=inner.pi, pi_prime=outer.pi_prime, psi=psi)
    assert composite.beta <= inner.beta * outer.beta
    return composite


@dataclass(frozen=True)
class ConditionalExperiment:
    """An experiment enriched with a binary event, conditionally informative.

    ``event[t][j]`` is the joint probability of signal j and the event in
    state t; the base experiment's entry splits exactly into event and
    no-event parts.  The event has the same probability ``alpha`` in every
    state, and within each signal the event's likelihood ratio is state
    independent, so observing the event carries no information beyond the
    signal.
    """

    base: Experiment
    event: tuple[tuple[Fraction, ...], ...]
    alpha: Fraction

    def __post_init__(self) -> None:
        base = self.base
        if len(self.event) != base.n_states:
            raise InvalidInput("event table must have one row per state")
        if not 0 < self.alpha <= 1:
            raise InvalidInput(f"alpha must lie in (0, 1], got {self.alpha}")
        for t, row in enumerate(self.event):
            if len(row) != base.n_signals:
                raise InvalidInput("event table must have one column per signal")
            for j, entry in enumerate(row):
                if not isinstance(entry, Fraction):
                    raise InvalidInput("event entries must be Fractions")
                if entry < 0 or entry > base.matrix[t][j]:
                    raise InvalidInput(
                        "event mass must lie between 0 and the base likelihood"
                    )
            mass = sum(row, Fraction(0))
            if mass != self.alpha:
                raise InvalidInput(
                    f"event probability must be {self.alpha} in every state, "
                    f"found {mass}"
                )
        for j in range(base.n_signals):
            ratio: Fraction | None = None
            for t in range(base.n_states):
                if base.matrix[t][j] == 0:
                    continue
                current = self.event[t][j] / base.matrix[t][j]
                if ratio is None:
                    ratio = current
                elif current != ratio:
                    raise InvalidInput(
                        f"event likelihood ratio at signal "
                        f"{base.signals[j]!r} depends on the state"
                    )

    def kernel(self) -> tuple[Fraction, ...]:
        """Per-signal event probability kappa(event | s'); 0 on null signals."""
        out = []
        for j in range(self.base.n_signals):
            ratio = Fraction(0)
            for t in range(self.base.n_states):
                if self.base.matrix[t][j] > 0:
                    ratio = self.event[t][j] / self.base.matrix[t][j]
                    break
            out.append(ratio)
        return tuple(out)


def to_conditional(
    pi_prime: Experiment, weight: Weight | GarblingCertificate
) -> ConditionalExperiment:
    """Repackage a weight as a state-independent event on ``pi_prime``.

    The event keeps the fraction gamma(s') / beta of each signal's mass,
    so alpha = 1 / beta and the signal distribution conditional on the
    event is exactly the reweighted experiment.  A certificate stands in
    for its weight as long as it concerns ``pi_prime``.
    """
    if isinstance(weight, GarblingCertificate):
        if weight.pi_prime != pi_prime:
            raise InvalidInput("certificate does not concern this experiment")
        weight = weight.weight()
    if len(weight.values) != pi_prime.n_signals:
        raise InvalidInput("weight dimension does not match the signal set")
    if not weight_check(pi_prime, weight.values):
        raise InvalidInput("weight is not valid for this experiment")
    beta = weight.size
    event = tuple(
        tuple(v / beta * p for v, p in zip(weight.values, row))
        for row in pi_prime.matrix
    )
    return ConditionalExperiment(base=pi_prime, event=event, alpha=1 / beta)


def from_conditional(
    conditional: ConditionalExperiment, pi: Experiment
) -> GarblingCertificate:
    """Recover a weighted-garbling certificate from a conditional experiment.

    The weight is gamma(s') = kappa(event|s') / alpha.  The signal
    distribution conditional on the event is the reweighted base
    experiment; ``pi`` must be a Blackwell garbling of it, and the
    resulting channel combines with gamma into a certificate of size
    max kappa / alpha.  Raises :class:`OrderError` when the Blackwell
    check fails.
    """
    base = conditional.base
    _require_shared_states(pi, base)
    kappa = conditional.kernel()
    gamma = tuple(k / conditional.alpha for k in kappa)
    weight = make_weight(base, gamma)
    conditioned = apply_weight(weight, base)
    channel = check_blackwell(pi, conditioned)
    if channel is None:
        raise OrderError(
            "the experiment is not a Blackwell garbling of the "
            "event-conditional distribution"
        )
    psi = tuple(
        tuple(channel.psi[i][j] * gamma[j] for j in range(base.n_signals))
        for i in range(pi.n_signals)
    )
    certificate = GarblingCertificate(pi=pi, pi_prime=base, psi=psi)
    assert verify_certificate(certificate)
    return certificate
