"""Command-line surface binding the library into a certified comparison tool.

Commands read UTF-8 JSON documents whose numbers are exact rational strings
and write a single JSON document to stdout.  Exit codes follow one contract
everywhere: 0 means the queried relation holds or the computation succeeded,
1 means the relation was certified false, and 2 means the input was invalid.
"""

from __future__ import annotations

import argparse
import random
import sys
from fractions import Fraction
from typing import Sequence

from . import documents as docs
from . import generators
from .beliefs import (
    check_weighted_beliefs,
    hull_membership,
    posteriors,
    separating_functional,
    verify_coupling,
)
from .dynamics import (
    MarkovChain,
    StoppingProblem,
    counterexample,
    eta_limit,
    merging_horizon,
    stopping_value,
)
from .experiments import DecisionProblem, Experiment, Prior, dilute
from .numerics import (
    INFEASIBLE,
    OPTIMAL,
    InvalidInput,
    dual_program,
    farkas_verifies,
    parse_rational,
    ray_verifies,
    solution_feasible,
    solve,
)
from .order import (
    ConditionalExperiment,
    GarblingCertificate,
    OrderError,
    check_blackwell,
    check_weighted,
    compose,
    from_conditional,
    min_size,
    size_interval,
    to_conditional,
    verify_certificate,
)
from .value import random_decision_problem, falsify_bound, value, verify_bound


def _emit(doc: dict) -> None:
    print(docs.dump_document(doc))


def _report(command: str, **fields) -> dict:
    doc = {"kind": "report", "command": command}
    doc.update(fields)
    return doc


def _parse_vector(text: str, name: str) -> tuple[Fraction, ...]:
    parts = [p.strip() for p in text.split(",")]
    if not parts or any(not p for p in parts):
        raise InvalidInput(f"{name}: expected comma-separated rationals, got {text!r}")
    return tuple(parse_rational(p) for p in parts)


def _parse_prior(text: str) -> Prior:
    return Prior(weights=_parse_vector(text, "prior"))


def _load(filename: str, expected: type, kind: str):
    loaded = docs.load_document(filename)
    if not isinstance(loaded, expected):
        raise InvalidInput(f"{filename}: expected a {kind} document")
    return loaded


def _load_experiment(filename: str) -> Experiment:
    return _load(filename, Experiment, "experiment")


def _load_chain(filename: str) -> MarkovChain:
    return _load(filename, MarkovChain, "chain")


def _load_problem(filename: str) -> DecisionProblem:
    return _load(filename, DecisionProblem, "decision_problem")


def _cmd_check(args) -> int:
    pi = _load_experiment(args.pi)
    pi_prime = _load_experiment(args.pi_prime)
    if args.relation == "blackwell":
        certificate = check_blackwell(pi, pi_prime)
    else:
        cap = parse_rational(args.beta) if args.beta is not None else None
        certificate = check_weighted(pi, pi_prime, max_size=cap)
    if certificate is None:
        note = f"no {args.relation} garbling certificate exists"
        if args.relation == "weighted" and args.beta is not None:
            note += f" of size at most {args.beta}"
        _emit(_report("check", relation=args.relation, holds=False, note=note))
        return 1
    _emit(docs.certificate_to_doc(certificate))
    return 0


def _cmd_size_interval(args) -> int:
    pi = _load_experiment(args.pi)
    pi_prime = _load_experiment(args.pi_prime)
    interval = size_interval(pi, pi_prime)
    if interval is None:
        _emit(
            _report(
                "size-interval",
                holds=False,
                note="the pair is not weighted-garbling ordered",
            )
        )
        return 1
    _emit(
        _report(
            "size-interval",
            holds=True,
            beta_min=docs.rational_str(interval.beta_min),
            beta_max=(
                "unbounded"
                if interval.beta_max is None
                else docs.rational_str(interval.beta_max)
            ),
            witness_min=docs.certificate_to_doc(interval.witness_min),
            witness_max=(
                None
                if interval.witness_max is None
                else docs.certificate_to_doc(interval.witness_max)
            ),
        )
    )
    return 0


def _cmd_compose(args) -> int:
    inner = _load(args.inner, GarblingCertificate, "certificate")
    outer = _load(args.outer, GarblingCertificate, "certificate")
    _emit(docs.certificate_to_doc(compose(inner, outer)))
    return 0


def _cmd_conditional(args) -> int:
    if args.direction == "to":
        certificate = _load(args.certificate, GarblingCertificate, "certificate")
        conditional = to_conditional(certificate.pi_prime, certificate.weight())
        _emit(docs.conditional_to_doc(conditional))
        return 0
    conditional = _load(args.conditional, ConditionalExperiment, "conditional_experiment")
    pi = _load_experiment(args.pi)
    try:
        certificate = from_conditional(conditional, pi)
    except OrderError as error:
        _emit(_report("conditional", direction="from", holds=False, note=str(error)))
        return 1
    _emit(docs.certificate_to_doc(certificate))
    return 0


def _cmd_posteriors(args) -> int:
    experiment = _load_experiment(args.experiment)
    mu0 = _parse_prior(args.prior)
    distribution = posteriors(experiment, mu0)
    _emit(
        _report(
            "posteriors",
            prior=[docs.rational_str(w) for w in mu0.weights],
            states=list(experiment.states),
            atoms=[docs.atom_to_doc(atom) for atom in distribution.atoms],
        )
    )
    return 0


def _cmd_hull_check(args) -> int:
    point = _parse_vector(args.point, "point")
    generators_arg = [
        _parse_vector(part, "generators") for part in args.generators.split(";")
    ]
    membership = hull_membership(point, generators_arg)
    if membership is None:
        functional = separating_functional(point, generators_arg)
        assert functional is not None
        _emit(
            _report(
                "hull-check",
                holds=False,
                separating_functional=[docs.rational_str(h) for h in functional],
                note="the point lies outside the hull; the functional is "
                "nonpositive on every generator and positive at the point",
            )
        )
        return 1
    _emit(
        _report(
            "hull-check",
            holds=True,
            coefficients=[docs.rational_str(c) for c in membership.coefficients],
        )
    )
    return 0


def _cmd_beliefs_check(args) -> int:
    pi = _load_experiment(args.pi)
    pi_prime = _load_experiment(args.pi_prime)
    mu0 = _parse_prior(args.prior)
    coupling = check_weighted_beliefs(pi, pi_prime, mu0)
    if coupling is None:
        _emit(
            _report(
                "beliefs-check",
                holds=False,
                note="some posterior of the first experiment lies outside the "
                "posterior hull of the second",
            )
        )
        return 1
    verification = verify_coupling(coupling, pi, pi_prime, mu0)
    assert verification.ok, "emitted couplings must re-verify"
    _emit(docs.coupling_to_doc(coupling))
    return 0


def _cmd_value(args) -> int:
    problem = _load_problem(args.problem)
    experiment = _load_experiment(args.experiment)
    total, table = value(problem, experiment)
    _emit(
        _report(
            "value",
            value=docs.rational_str(total),
            policy=dict(zip(table.signals, table.actions)),
        )
    )
    return 0


def _cmd_bound_verify(args) -> int:
    problem = _load_problem(args.problem)
    pi = _load_experiment(args.pi)
    pi_prime = _load_experiment(args.pi_prime)
    report = verify_bound(problem, pi, pi_prime, parse_rational(args.beta))
    _emit(
        _report(
            "bound-verify",
            holds=report.holds,
            beta=docs.rational_str(report.beta),
            value_prime=docs.rational_str(report.value_prime),
            value_pi=docs.rational_str(report.value_pi),
            value_noinfo=docs.rational_str(report.value_noinfo),
            slack=docs.rational_str(report.slack),
        )
    )
    return 0 if report.holds else 1


def _cmd_bound_falsify(args) -> int:
    pi = _load_experiment(args.pi)
    pi_prime = _load_experiment(args.pi_prime)
    problem = falsify_bound(pi, pi_prime, parse_rational(args.beta))
    if problem is None:
        _emit(
            _report(
                "bound-falsify",
                holds=True,
                note="the size bound holds for every decision problem at this beta",
            )
        )
        return 0
    _emit(docs.decision_problem_to_doc(problem))
    return 1


def _cmd_dilute(args) -> int:
    experiment = _load_experiment(args.experiment)
    _emit(docs.experiment_to_doc(dilute(experiment, parse_rational(args.beta))))
    return 0


def _cmd_eta(args) -> int:
    experiment = _load_experiment(args.experiment)
    chain = _load_chain(args.chain)
    result = eta_limit(
        chain, experiment, tol=parse_rational(args.tol), max_iter=args.max_iter
    )
    _emit(
        _report(
            "eta",
            iterations=result.iterations,
            gap=docs.rational_str(result.gap),
            converged=result.converged,
            hull=docs.belief_list_doc(result.hull.points),
        )
    )
    return 0


def _cmd_merge_horizon(args) -> int:
    experiment = _load_experiment(args.experiment)
    chain = _load_chain(args.chain)
    report = merging_horizon(
        chain, experiment, epsilon=parse_rational(args.eps), n_max=args.nmax
    )
    _emit(
        _report(
            "merge-horizon",
            horizon=report.horizon,
            profile=[docs.rational_str(g) for g in report.profile],
            monotone=report.monotone,
            epsilon=docs.rational_str(report.epsilon),
            n_max=report.n_max,
        )
    )
    return 0


def _cmd_stopping(args) -> int:
    problem = _load_problem(args.problem)
    experiment = _load_experiment(args.experiment)
    chain = _load_chain(args.chain)
    stopping = StoppingProblem(problem=problem, chain=chain, horizon=args.horizon)
    _emit(
        _report(
            "stopping",
            horizon=args.horizon,
            value=docs.rational_str(stopping_value(stopping, experiment)),
        )
    )
    return 0


def _cmd_counterexample(args) -> int:
    pi = _load_experiment(args.pi)
    pi_prime = _load_experiment(args.pi_prime)
    mu = _parse_prior(args.prior)
    found = counterexample(pi, pi_prime, mu)
    if found is None:
        _emit(
            _report(
                "counterexample",
                found=False,
                note="the weighted-garbling order holds, so no stopping "
                "problem can separate the pair",
            )
        )
        return 0
    problem, chain = found
    values = []
    for horizon in (1, 2, 3, 4):
        stopping = StoppingProblem(problem=problem, chain=chain, horizon=horizon)
        values.append(
            {
                "horizon": horizon,
                "pi": docs.rational_str(stopping_value(stopping, pi)),
                "pi_prime": docs.rational_str(stopping_value(stopping, pi_prime)),
            }
        )
    _emit(
        _report(
            "counterexample",
            found=True,
            problem=docs.decision_problem_to_doc(problem),
            chain=docs.chain_to_doc(chain),
            values=values,
        )
    )
    return 1


def _selftest_lps(rng: random.Random, count: int) -> tuple[bool, str]:
    optimal = infeasible = unbounded = 0
    for _ in range(count):
        lp = generators.random_lp(rng)
        outcome = solve(lp)
        if outcome.status == OPTIMAL:
            optimal += 1
            if not solution_feasible(lp, outcome.x):
                return False, "optimal point infeasible"
            dual = solve(dual_program(lp))
            if dual.status != OPTIMAL or dual.objective != outcome.objective:
                return False, "strong duality failed"
        elif outcome.status == INFEASIBLE:
            infeasible += 1
            if not farkas_verifies(lp, outcome.farkas):
                return False, "Farkas certificate failed"
        else:
            unbounded += 1
            if not ray_verifies(lp, outcome.ray):
                return False, "unbounded ray failed"
    return True, f"{optimal} optimal / {infeasible} infeasible / {unbounded} unbounded"


def _selftest_orders(seed: int, count: int) -> tuple[bool, str]:
    rng = random.Random(seed)
    ordered = 0
    for pi, mu0, pi_prime in generators.corpus_pairs(seed, count):
        lp_cert = check_weighted(pi, pi_prime)
        coupling = check_weighted_beliefs(pi, pi_prime, mu0)
        if (lp_cert is None) != (coupling is None):
            return False, "LP and posterior-geometry paths disagree"
        blackwell = check_blackwell(pi, pi_prime)
        sizing = min_size(pi, pi_prime)
        if (blackwell is not None) != (sizing is not None and sizing[0] == 1):
            return False, "Blackwell check disagrees with min_size"
        if lp_cert is None:
            problem = falsify_bound(pi, pi_prime, rng.choice([1, 2]))
            if problem is None:
                return False, "no falsifier for an unordered pair"
            continue
        ordered += 1
        reparsed = docs.certificate_from_doc(docs.certificate_to_doc(lp_cert))
        if not verify_certificate(reparsed):
            return False, "certificate failed after a serialization round trip"
        beta_min, witness = sizing
        report = verify_bound(
            random_decision_problem(rng.randrange(2**30), 3, pi.n_states),
            pi,
            pi_prime,
            beta_min,
        )
        if not report.holds:
            return False, "size bound violated at the minimal size"
        conditional = to_conditional(pi_prime, witness.weight())
        recovered = from_conditional(conditional, pi)
        if recovered.beta != beta_min:
            return False, "conditional round trip changed the size"
    return True, f"{count} pairs, {ordered} ordered"


def _selftest_compose(seed: int, count: int) -> tuple[bool, str]:
    for inner, outer in generators.certificate_chains(seed, count):
        composite = compose(inner, outer)
        if not verify_certificate(composite):
            return False, "composite certificate failed to verify"
        if composite.beta > inner.beta * outer.beta:
            return False, "composite size exceeded the product"
    return True, f"{count} chains"


def _cmd_selftest(args) -> int:
    seed = args.seed
    checks = []
    ok, detail = _selftest_lps(random.Random(seed), 40)
    checks.append({"name": "lp-certificates-and-duality", "ok": ok, "detail": detail})
    ok, detail = _selftest_orders(seed + 1, 16)
    checks.append({"name": "order-path-equivalence", "ok": ok, "detail": detail})
    ok, detail = _selftest_compose(seed + 2, 8)
    checks.append({"name": "composition", "ok": ok, "detail": detail})
    passed = all(c["ok"] for c in checks)
    _emit(_report("selftest", seed=seed, ok=passed, checks=checks))
    return 0 if passed else 1


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="expord",
        description="Exact comparison of statistical experiments with certificates.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    check = sub.add_parser("check", help="decide a garbling order between experiments")
    relation = check.add_subparsers(dest="relation", required=True)
    for name in ("blackwell", "weighted"):
        p = relation.add_parser(name)
        p.add_argument("pi", help="experiment JSON for the (candidate) garbling")
        p.add_argument("pi_prime", help="experiment JSON being garbled")
        if name == "weighted":
            p.add_argument("--beta", help="request a witness of at most this size")
        p.set_defaults(handler=_cmd_check)

    p = sub.add_parser("size-interval", help="range of certificate sizes for a pair")
    p.add_argument("pi")
    p.add_argument("pi_prime")
    p.set_defaults(handler=_cmd_size_interval)

    p = sub.add_parser("compose", help="chain two certificates transitively")
    p.add_argument("inner", help="certificate for pi <= pi'")
    p.add_argument("outer", help="certificate for pi' <= pi''")
    p.set_defaults(handler=_cmd_compose)

    conditional = sub.add_parser(
        "conditional", help="convert between weights and conditional events"
    )
    direction = conditional.add_subparsers(dest="direction", required=True)
    p = direction.add_parser("to")
    p.add_argument("certificate", help="certificate whose weight becomes the event")
    p.set_defaults(handler=_cmd_conditional)
    p = direction.add_parser("from")
    p.add_argument("conditional", help="conditional_experiment JSON")
    p.add_argument("pi", help="experiment to place below the conditional")
    p.set_defaults(handler=_cmd_conditional)

    p = sub.add_parser("posteriors", help="posterior distribution from a prior")
    p.add_argument("experiment")
    p.add_argument("--prior", required=True, help="comma-separated rationals")
    p.set_defaults(handler=_cmd_posteriors)

    p = sub.add_parser("hull-check", help="exact convex-hull membership")
    p.add_argument("--point", required=True, help="comma-separated belief")
    p.add_argument(
        "--generators", required=True, help="semicolon-separated list of beliefs"
    )
    p.set_defaults(handler=_cmd_hull_check)

    p = sub.add_parser(
        "beliefs-check", help="decide the weighted order through posterior hulls"
    )
    p.add_argument("pi")
    p.add_argument("pi_prime")
    p.add_argument("--prior", required=True)
    p.set_defaults(handler=_cmd_beliefs_check)

    p = sub.add_parser("value", help="optimal expected payoff of a decision problem")
    p.add_argument("problem")
    p.add_argument("experiment")
    p.set_defaults(handler=_cmd_value)

    p = sub.add_parser("bound-verify", help="evaluate the size-beta payoff bound")
    p.add_argument("problem")
    p.add_argument("pi")
    p.add_argument("pi_prime")
    p.add_argument("--beta", required=True)
    p.set_defaults(handler=_cmd_bound_verify)

    p = sub.add_parser(
        "bound-falsify", help="search for a decision problem violating the bound"
    )
    p.add_argument("pi")
    p.add_argument("pi_prime")
    p.add_argument("--beta", required=True)
    p.set_defaults(handler=_cmd_bound_falsify)

    p = sub.add_parser("dilute", help="mix an experiment with an uninformative signal")
    p.add_argument("experiment")
    p.add_argument("--beta", required=True)
    p.set_defaults(handler=_cmd_dilute)

    p = sub.add_parser("eta", help="iterated hull of transition-then-signal updates")
    p.add_argument("experiment")
    p.add_argument("--chain", required=True)
    p.add_argument("--tol", default="1/1000000")
    p.add_argument("--max-iter", type=int, default=64)
    p.set_defaults(handler=_cmd_eta)

    p = sub.add_parser("merge-horizon", help="history length for posterior merging")
    p.add_argument("experiment")
    p.add_argument("--chain", required=True)
    p.add_argument("--eps", required=True)
    p.add_argument("--nmax", type=int, default=12)
    p.set_defaults(handler=_cmd_merge_horizon)

    p = sub.add_parser("stopping", help="finite-horizon optimal stopping value")
    p.add_argument("problem")
    p.add_argument("experiment")
    p.add_argument("--chain", required=True)
    p.add_argument("--horizon", type=int, required=True)
    p.set_defaults(handler=_cmd_stopping)

    p = sub.add_parser(
        "counterexample", help="stopping problem separating an unordered pair"
    )
    p.add_argument("pi")
    p.add_argument("pi_prime")
    p.add_argument("--prior", required=True)
    p.set_defaults(handler=_cmd_counterexample)

    p = sub.add_parser("selftest", help="cross-module equivalence battery")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(handler=_cmd_selftest)

    return parser


def run(argv: Sequence[str] | None = None) -> int:
    """Parse and dispatch one command line; returns the exit code."""
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as stop:
        return 0 if not stop.code else 2
    try:
        return args.handler(args)
    except InvalidInput as error:
        print(f"error: {error}", file=sys.stderr)
        return 2
    except OSError as error:
        print(f"error: {error}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
