"""Posterior beliefs and the belief-space characterization of the order.

Under a full-support prior, an experiment induces a finite distribution over
posterior beliefs.  Whether one experiment is a weighted garbling of another
can be read off these objects alone: it holds exactly when every posterior of
the coarser experiment lies in the convex hull of the finer one's posteriors,
a prior-independent support condition.  Couplings between the two posterior
distributions certify the relation quantitatively, and their worst
likelihood ratio recovers a weight.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .experiments import Experiment, Prior, Weight, make_weight, regularize
from .numerics import (
    EQ,
    INFEASIBLE,
    OPTIMAL,
    InvalidInput,
    linear_program,
    solve,
)
from .order import VerificationResult

Belief = tuple[Fraction, ...]


@dataclass(frozen=True)
class PosteriorAtom:
    """One support point of a posterior distribution.

    ``signals`` lists every signal mapped to this belief; their
    probabilities are merged into one atom.
    """

    signals: tuple[str, ...]
    belief: Belief
    probability: Fraction


@dataclass(frozen=True)
class PosteriorDistribution:
    """The exact distribution over posterior beliefs induced by a prior."""

    prior: Prior
    atoms: tuple[PosteriorAtom, ...]

    def __post_init__(self) -> None:
        if not self.atoms:
            raise InvalidInput("a posterior distribution needs at least one atom")
        total = sum((atom.probability for atom in self.atoms), Fraction(0))
        if total != 1:
            raise InvalidInput(f"atom probabilities sum to {total}, expected 1")
        for atom in self.atoms:
            if atom.probability <= 0:
                raise InvalidInput("zero-probability atoms must be omitted")
        beliefs = [atom.belief for atom in self.atoms]
        if len(set(beliefs)) != len(beliefs):
            raise InvalidInput("atoms with equal beliefs must be merged")
        n = len(self.prior.weights)
        for atom in self.atoms:
            if len(atom.belief) != n:
                raise InvalidInput("belief dimension does not match the prior")
        for t in range(n):
            mean = sum(
                (atom.probability * atom.belief[t] for atom in self.atoms),
                Fraction(0),
            )
            if mean != self.prior.weights[t]:
                raise InvalidInput(
                    "martingale property fails: posterior mean differs from prior"
                )

    @property
    def beliefs(self) -> tuple[Belief, ...]:
        return tuple(atom.belief for atom in self.atoms)

    def support_pairs(self) -> tuple[tuple[Belief, Fraction], ...]:
        """(belief, probability) pairs, ignoring signal labels."""
        return tuple((atom.belief, atom.probability) for atom in self.atoms)


def posteriors(experiment: Experiment, mu0: Prior) -> PosteriorDistribution:
    """Bayes posteriors of every positive-probability signal, merged by value.

    Signals with equal posteriors are collected into a single atom; signals
    of probability zero are dropped.  Requires a full-support prior so every
    surviving signal has a well-defined posterior.
    """
    if len(mu0.weights) != experiment.n_states:
        raise InvalidInput("prior dimension does not match the state set")
    if not mu0.full_support:
        raise InvalidInput("posteriors require a full-support prior")
    atoms: list[tuple[list[str], Belief, Fraction]] = []
    for j, signal in enumerate(experiment.signals):
        mass = sum(
            (mu0.weights[t] * experiment.matrix[t][j] for t in range(experiment.n_states)),
            Fraction(0),
        )
        if mass == 0:
            continue
        belief = tuple(
            mu0.weights[t] * experiment.matrix[t][j] / mass
            for t in range(experiment.n_states)
        )
        for k, (merged, existing, prob) in enumerate(atoms):
            if existing == belief:
                atoms[k] = (merged + [signal], existing, prob + mass)
                break
        else:
            atoms.append(([signal], belief, mass))
    return PosteriorDistribution(
        prior=mu0,
        atoms=tuple(
            PosteriorAtom(signals=tuple(sig), belief=belief, probability=prob)
            for sig, belief, prob in atoms
        ),
    )


@dataclass(frozen=True)
class HullMembershipCertificate:
    """Exact convex coefficients expressing a point inside a hull."""

    point: Belief
    generators: tuple[Belief, ...]
    coefficients: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        if len(self.coefficients) != len(self.generators):
            raise InvalidInput("one coefficient per generator is required")
        if any(c < 0 for c in self.coefficients):
            raise InvalidInput("hull coefficients must be nonnegative")
        if sum(self.coefficients, Fraction(0)) != 1:
            raise InvalidInput("hull coefficients must sum to 1")
        for t in range(len(self.point)):
            mixed = sum(
                (c * g[t] for c, g in zip(self.coefficients, self.generators)),
                Fraction(0),
            )
            if mixed != self.point[t]:
                raise InvalidInput("coefficients do not reproduce the point")


def _hull_lp(point: Belief, generators: Sequence[Belief]):
    n_gen = len(generators)
    rows = []
    for t in range(len(point)):
        coeffs = [g[t] for g in generators]
        rows.append((coeffs, EQ, point[t]))
    rows.append(([Fraction(1)] * n_gen, EQ, Fraction(1)))
    return solve(linear_program([Fraction(0)] * n_gen, rows, sense="min"))


def _check_belief_dimensions(point: Belief, generators: Sequence[Belief]) -> None:
    if not generators:
        raise InvalidInput("at least one generator is required")
    dim = len(point)
    if any(len(g) != dim for g in generators):
        raise InvalidInput("all points must share one state space")


def hull_membership(
    point: Belief, generators: Sequence[Belief]
) -> HullMembershipCertificate | None:
    """Exact convex-hull membership via LP feasibility.

    Returns coefficients (one choice among possibly many) or None when the
    point lies outside the hull.
    """
    _check_belief_dimensions(point, generators)
    outcome = _hull_lp(point, generators)
    if outcome.status == INFEASIBLE:
        return None
    assert outcome.status == OPTIMAL
    return HullMembershipCertificate(
        point=tuple(point),
        generators=tuple(tuple(g) for g in generators),
        coefficients=outcome.x,
    )


def separating_functional(
    point: Belief, generators: Sequence[Belief]
) -> tuple[Fraction, ...] | None:
    """A linear functional h with h . g <= 0 for all generators, h . point > 0.

    Exists exactly when the point lies outside the hull; built from the
    Farkas certificate of the membership LP.  The Farkas multipliers
    (y, z) satisfy y . g_k + z <= 0 for every generator and
    y . point + z > 0; since beliefs sum to one, h = y + z folds the offset
    into the functional.
    """
    _check_belief_dimensions(point, generators)
    outcome = _hull_lp(point, generators)
    if outcome.status == OPTIMAL:
        return None
    assert outcome.status == INFEASIBLE
    y = outcome.farkas
    offset = y[-1]
    h = tuple(y_t + offset for y_t in y[:-1])
    assert all(
        sum((h_t * g[t] for t, h_t in enumerate(h)), Fraction(0)) <= 0
        for g in generators
    )
    assert sum((h_t * point[t] for t, h_t in enumerate(h)), Fraction(0)) > 0
    return h


@dataclass(frozen=True)
class CouplingCertificate:
    """A joint distribution over posterior pairs certifying the order.

    Rows index atoms of the coarser experiment's posterior distribution,
    columns atoms of the finer one's (after regularization).  Semantic
    validity is checked by :func:`verify_coupling`, not at construction, so
    broken couplings can be built and examined.
    """

    prior: Prior
    pi_atoms: tuple[PosteriorAtom, ...]
    pi_prime_atoms: tuple[PosteriorAtom, ...]
    matrix: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self) -> None:
        if len(self.matrix) != len(self.pi_atoms):
            raise InvalidInput("one coupling row per pi atom is required")
        for row in self.matrix:
            if len(row) != len(self.pi_prime_atoms):
                raise InvalidInput("one coupling column per pi_prime atom is required")
            for entry in row:
                if not isinstance(entry, Fraction):
                    raise InvalidInput("coupling entries must be Fractions")

    @property
    def beta(self) -> Fraction:
        """Realized size: the largest column mass to atom probability ratio."""
        return max(
            sum((row[j] for row in self.matrix), Fraction(0)) / atom.probability
            for j, atom in enumerate(self.pi_prime_atoms)
        )


@dataclass(frozen=True)
class CouplingVerification:
    """Outcome of verify_coupling with the realized size."""

    ok: bool
    violations: tuple[str, ...]
    beta: Fraction | None

    def __bool__(self) -> bool:
        return self.ok


def check_weighted_beliefs(
    pi: Experiment, pi_prime: Experiment, mu0: Prior
) -> CouplingCertificate | None:
    """Decide the weighted-garbling order through posterior geometry.

    Succeeds exactly when every posterior of ``pi`` lies in the convex hull
    of the posteriors of ``pi_prime`` (regularized first, so its atoms are
    in bijection with its signals).  The coupling sends each atom of ``pi``
    to hull coefficients over the atoms of ``pi_prime``.
    """
    if pi.states != pi_prime.states:
        raise InvalidInput("experiments must share the same state labels")
    source = posteriors(pi, mu0)
    target = posteriors(regularize(pi_prime), mu0)
    generators = target.beliefs
    rows = []
    for atom in source.atoms:
        membership = hull_membership(atom.belief, generators)
        if membership is None:
            return None
        rows.append(
            tuple(atom.probability * chi for chi in membership.coefficients)
        )
    return CouplingCertificate(
        prior=mu0,
        pi_atoms=source.atoms,
        pi_prime_atoms=target.atoms,
        matrix=tuple(rows),
    )


def verify_coupling(
    coupling: CouplingCertificate,
    pi: Experiment,
    pi_prime: Experiment,
    mu0: Prior,
) -> CouplingVerification:
    """Re-check the three coupling properties against the experiments.

    Conditions: the stored atom lists equal the recomputed posterior
    distributions; the first marginal matches the atom probabilities of
    ``pi``; each row's barycenter is its own atom's belief; mass is
    nonnegative and totals one.  The realized size (largest column mass to
    column probability ratio) is reported; it is finite whenever the mass
    sits on the stored atoms, which all have positive probability.
    """
    violations: list[str] = []
    source = posteriors(pi, mu0)
    target = posteriors(regularize(pi_prime), mu0)
    if coupling.prior != mu0:
        violations.append("coupling was built for a different prior")
    if coupling.pi_atoms != source.atoms:
        violations.append("stored pi atoms differ from the recomputed posteriors")
    if coupling.pi_prime_atoms != target.atoms:
        violations.append(
            "stored pi_prime atoms differ from the recomputed posteriors"
        )
    total = Fraction(0)
    for i, (atom, row) in enumerate(zip(coupling.pi_atoms, coupling.matrix)):
        for entry in row:
            if entry < 0:
                violations.append(f"negative mass in coupling row {i}")
                break
        row_mass = sum(row, Fraction(0))
        total += row_mass
        if row_mass != atom.probability:
            violations.append(
                f"first marginal at row {i}: mass {row_mass} != {atom.probability}"
            )
        dim = len(atom.belief)
        for t in range(dim):
            moment = sum(
                (row[j] * coupling.pi_prime_atoms[j].belief[t] for j in range(len(row))),
                Fraction(0),
            )
            if moment != atom.probability * atom.belief[t]:
                violations.append(f"barycenter fails at row {i}, coordinate {t}")
                break
    if total != 1:
        violations.append(f"total coupling mass {total} != 1")
    beta = coupling.beta if not violations else None
    return CouplingVerification(
        ok=not violations, violations=tuple(violations), beta=beta
    )


def coupling_to_weight(
    coupling: CouplingCertificate, pi_prime: Experiment, mu0: Prior
) -> Weight:
    """Read a weight off a coupling: column mass over column probability.

    Requires ``pi_prime`` regular (atoms in bijection with signals).  The
    returned factors satisfy the weight identity because summing
    gamma(s') pi_prime(s'|t) telescopes through the barycenter and marginal
    properties of the coupling.
    """
    if regularize(pi_prime) != pi_prime:
        raise InvalidInput("coupling_to_weight requires a regular experiment")
    target = posteriors(pi_prime, mu0)
    if coupling.pi_prime_atoms != target.atoms:
        raise InvalidInput("coupling atoms do not match this experiment and prior")
    by_signal: dict[str, Fraction] = {}
    for j, atom in enumerate(target.atoms):
        mass = sum((row[j] for row in coupling.matrix), Fraction(0))
        for signal in atom.signals:
            by_signal[signal] = mass / atom.probability
    values = [by_signal.get(signal, Fraction(0)) for signal in pi_prime.signals]
    return make_weight(pi_prime, values)


def coupling_from_certificate(
    certificate, mu0: Prior
) -> CouplingCertificate:
    """Push a garbling certificate into a coupling of posterior atoms.

    Mass psi(s, s') q'(s') couples the posterior of s with the posterior of
    s'; aggregating over signals with merged posteriors gives atom-level
    mass.  The barycenter property holds algebraically: the row moment
    equals mu(t) pi(s|t), which is the atom mass times its belief.
    """
    pi, pi_prime = certificate.pi, certificate.pi_prime
    source = posteriors(pi, mu0)
    target = posteriors(regularize(pi_prime), mu0)
    signal_mass = pi_prime.signal_probability(mu0)
    row_of: dict[str, int] = {}
    for i, atom in enumerate(source.atoms):
        for signal in atom.signals:
            row_of[signal] = i
    # Original pi_prime signals are tied to target atoms by posterior value,
    # which survives both merging and relabeling.
    belief_index = {atom.belief: j for j, atom in enumerate(target.atoms)}
    col_of: dict[int, int] = {}
    for j in range(pi_prime.n_signals):
        if signal_mass[j] == 0:
            continue
        belief = tuple(
            mu0.weights[t] * pi_prime.matrix[t][j] / signal_mass[j]
            for t in range(pi_prime.n_states)
        )
        col_of[j] = belief_index[belief]
    matrix = [
        [Fraction(0)] * len(target.atoms) for _ in range(len(source.atoms))
    ]
    for i, signal in enumerate(pi.signals):
        if signal not in row_of:
            continue
        for j in range(pi_prime.n_signals):
            if j not in col_of:
                continue
            mass = certificate.psi[i][j] * signal_mass[j]
            matrix[row_of[signal]][col_of[j]] += mass
    return CouplingCertificate(
        prior=mu0,
        pi_atoms=source.atoms,
        pi_prime_atoms=target.atoms,
        matrix=tuple(tuple(row) for row in matrix),
    )
