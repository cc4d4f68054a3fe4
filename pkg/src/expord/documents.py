"""JSON document schemas with exact rational payloads.

Every number is serialized as a rational string like ``"3/4"`` so files
round-trip losslessly.  Certificates embed both experiments together with
content digests, which parsers recompute and compare, so a certificate can
never be verified against the wrong pair.
"""

from __future__ import annotations

import hashlib
import json
from fractions import Fraction
from typing import Any, Sequence

from .beliefs import CouplingCertificate, PosteriorAtom
from .dynamics import MarkovChain
from .experiments import DecisionProblem, Experiment, Prior
from .numerics import InvalidInput, parse_rational
from .order import ConditionalExperiment, GarblingCertificate


def rational_str(value: Fraction) -> str:
    return str(value)


def _fail(path: str, message: str) -> "InvalidInput":
    return InvalidInput(f"{path}: {message}")


def _need(doc: Any, key: str, path: str) -> Any:
    if not isinstance(doc, dict):
        raise _fail(path, "expected an object")
    if key not in doc:
        raise _fail(f"{path}.{key}", "missing field")
    return doc[key]


def _rational(value: Any, path: str) -> Fraction:
    if isinstance(value, str):
        try:
            return parse_rational(value)
        except InvalidInput as error:
            raise _fail(path, str(error)) from None
    if isinstance(value, int) and not isinstance(value, bool):
        return Fraction(value)
    raise _fail(path, f"expected a rational string, got {value!r}")


def _rational_list(value: Any, path: str) -> tuple[Fraction, ...]:
    if not isinstance(value, list):
        raise _fail(path, "expected a list")
    return tuple(_rational(entry, f"{path}[{k}]") for k, entry in enumerate(value))


def _rational_matrix(value: Any, path: str) -> tuple[tuple[Fraction, ...], ...]:
    if not isinstance(value, list):
        raise _fail(path, "expected a list of rows")
    return tuple(_rational_list(row, f"{path}[{k}]") for k, row in enumerate(value))


def _label_list(value: Any, path: str) -> tuple[str, ...]:
    if not isinstance(value, list) or not all(isinstance(s, str) for s in value):
        raise _fail(path, "expected a list of strings")
    return tuple(value)


def canonical_json(doc: dict) -> str:
    return json.dumps(doc, sort_keys=True, separators=(",", ":"))


def document_digest(doc: dict) -> str:
    return hashlib.sha256(canonical_json(doc).encode("utf-8")).hexdigest()


def experiment_to_doc(experiment: Experiment) -> dict:
    return {
        "kind": "experiment",
        "states": list(experiment.states),
        "signals": list(experiment.signals),
        "matrix": [[rational_str(p) for p in row] for row in experiment.matrix],
    }


def experiment_from_doc(doc: Any, path: str = "experiment") -> Experiment:
    kind = _need(doc, "kind", path)
    if kind != "experiment":
        raise _fail(f"{path}.kind", f"expected 'experiment', got {kind!r}")
    return Experiment(
        states=_label_list(_need(doc, "states", path), f"{path}.states"),
        signals=_label_list(_need(doc, "signals", path), f"{path}.signals"),
        matrix=_rational_matrix(_need(doc, "matrix", path), f"{path}.matrix"),
    )


def chain_to_doc(chain: MarkovChain) -> dict:
    return {
        "kind": "chain",
        "states": list(chain.states),
        "transition": [[rational_str(p) for p in row] for row in chain.rows],
    }


def chain_from_doc(doc: Any, path: str = "chain") -> MarkovChain:
    kind = _need(doc, "kind", path)
    if kind != "chain":
        raise _fail(f"{path}.kind", f"expected 'chain', got {kind!r}")
    return MarkovChain(
        states=_label_list(_need(doc, "states", path), f"{path}.states"),
        rows=_rational_matrix(_need(doc, "transition", path), f"{path}.transition"),
    )


def decision_problem_to_doc(problem: DecisionProblem) -> dict:
    return {
        "kind": "decision_problem",
        "actions": list(problem.actions),
        "payoffs": [[rational_str(u) for u in row] for row in problem.payoffs],
        "prior": [rational_str(w) for w in problem.prior.weights],
    }


def decision_problem_from_doc(doc: Any, path: str = "decision_problem") -> DecisionProblem:
    kind = _need(doc, "kind", path)
    if kind != "decision_problem":
        raise _fail(f"{path}.kind", f"expected 'decision_problem', got {kind!r}")
    return DecisionProblem(
        actions=_label_list(_need(doc, "actions", path), f"{path}.actions"),
        payoffs=_rational_matrix(_need(doc, "payoffs", path), f"{path}.payoffs"),
        prior=Prior(weights=_rational_list(_need(doc, "prior", path), f"{path}.prior")),
    )


def certificate_to_doc(certificate: GarblingCertificate) -> dict:
    pi_doc = experiment_to_doc(certificate.pi)
    pi_prime_doc = experiment_to_doc(certificate.pi_prime)
    return {
        "kind": "certificate",
        "pi": pi_doc,
        "pi_prime": pi_prime_doc,
        "pi_digest": document_digest(pi_doc),
        "pi_prime_digest": document_digest(pi_prime_doc),
        "psi": [[rational_str(v) for v in row] for row in certificate.psi],
        "gamma": [rational_str(v) for v in certificate.gamma],
        "phi": [[rational_str(v) for v in row] for row in certificate.phi],
        "beta": rational_str(certificate.beta),
    }


def certificate_from_doc(doc: Any, path: str = "certificate") -> GarblingCertificate:
    kind = _need(doc, "kind", path)
    if kind != "certificate":
        raise _fail(f"{path}.kind", f"expected 'certificate', got {kind!r}")
    pi_doc = _need(doc, "pi", path)
    pi_prime_doc = _need(doc, "pi_prime", path)
    pi = experiment_from_doc(pi_doc, f"{path}.pi")
    pi_prime = experiment_from_doc(pi_prime_doc, f"{path}.pi_prime")
    for key, payload in (("pi_digest", pi_doc), ("pi_prime_digest", pi_prime_doc)):
        stated = _need(doc, key, path)
        actual = document_digest(experiment_to_doc(experiment_from_doc(payload, path)))
        if stated != actual:
            raise _fail(f"{path}.{key}", "digest does not match the embedded experiment")
    certificate = GarblingCertificate(
        pi=pi,
        pi_prime=pi_prime,
        psi=_rational_matrix(_need(doc, "psi", path), f"{path}.psi"),
    )
    stated_beta = _rational(_need(doc, "beta", path), f"{path}.beta")
    if stated_beta != certificate.beta:
        raise _fail(f"{path}.beta", "stated size differs from the psi column sums")
    stated_gamma = _rational_list(_need(doc, "gamma", path), f"{path}.gamma")
    if stated_gamma != certificate.gamma:
        raise _fail(f"{path}.gamma", "stated weight differs from the psi column sums")
    return certificate


def conditional_to_doc(conditional: ConditionalExperiment) -> dict:
    base_doc = experiment_to_doc(conditional.base)
    return {
        "kind": "conditional_experiment",
        "base": base_doc,
        "base_digest": document_digest(base_doc),
        "event": [[rational_str(v) for v in row] for row in conditional.event],
        "alpha": rational_str(conditional.alpha),
    }


def conditional_from_doc(doc: Any, path: str = "conditional_experiment") -> ConditionalExperiment:
    kind = _need(doc, "kind", path)
    if kind != "conditional_experiment":
        raise _fail(f"{path}.kind", f"expected 'conditional_experiment', got {kind!r}")
    base = experiment_from_doc(_need(doc, "base", path), f"{path}.base")
    stated = _need(doc, "base_digest", path)
    if stated != document_digest(experiment_to_doc(base)):
        raise _fail(f"{path}.base_digest", "digest does not match the embedded experiment")
    return ConditionalExperiment(
        base=base,
        event=_rational_matrix(_need(doc, "event", path), f"{path}.event"),
        alpha=_rational(_need(doc, "alpha", path), f"{path}.alpha"),
    )


def atom_to_doc(atom: PosteriorAtom) -> dict:
    return {
        "signals": list(atom.signals),
        "belief": [rational_str(b) for b in atom.belief],
        "probability": rational_str(atom.probability),
    }


def atom_from_doc(doc: Any, path: str) -> PosteriorAtom:
    return PosteriorAtom(
        signals=_label_list(_need(doc, "signals", path), f"{path}.signals"),
        belief=_rational_list(_need(doc, "belief", path), f"{path}.belief"),
        probability=_rational(_need(doc, "probability", path), f"{path}.probability"),
    )


def coupling_to_doc(coupling: CouplingCertificate) -> dict:
    return {
        "kind": "coupling",
        "prior": [rational_str(w) for w in coupling.prior.weights],
        "pi_atoms": [atom_to_doc(atom) for atom in coupling.pi_atoms],
        "pi_prime_atoms": [atom_to_doc(atom) for atom in coupling.pi_prime_atoms],
        "matrix": [[rational_str(v) for v in row] for row in coupling.matrix],
        "beta": rational_str(coupling.beta),
    }


def coupling_from_doc(doc: Any, path: str = "coupling") -> CouplingCertificate:
    kind = _need(doc, "kind", path)
    if kind != "coupling":
        raise _fail(f"{path}.kind", f"expected 'coupling', got {kind!r}")
    atoms = _need(doc, "pi_atoms", path)
    prime_atoms = _need(doc, "pi_prime_atoms", path)
    if not isinstance(atoms, list) or not isinstance(prime_atoms, list):
        raise _fail(path, "atom lists must be lists")
    coupling = CouplingCertificate(
        prior=Prior(weights=_rational_list(_need(doc, "prior", path), f"{path}.prior")),
        pi_atoms=tuple(
            atom_from_doc(a, f"{path}.pi_atoms[{k}]") for k, a in enumerate(atoms)
        ),
        pi_prime_atoms=tuple(
            atom_from_doc(a, f"{path}.pi_prime_atoms[{k}]")
            for k, a in enumerate(prime_atoms)
        ),
        matrix=_rational_matrix(_need(doc, "matrix", path), f"{path}.matrix"),
    )
    stated_beta = _rational(_need(doc, "beta", path), f"{path}.beta")
    if stated_beta != coupling.beta:
        raise _fail(f"{path}.beta", "stated size differs from the coupling ratios")
    return coupling


_PARSERS = {
    "experiment": experiment_from_doc,
    "chain": chain_from_doc,
    "decision_problem": decision_problem_from_doc,
    "certificate": certificate_from_doc,
    "conditional_experiment": conditional_from_doc,
    "coupling": coupling_from_doc,
}


def parse_document(doc: Any, path: str = "document"):
    """Dispatch a raw JSON object to its typed parser by ``kind``."""
    kind = _need(doc, "kind", path)
    parser = _PARSERS.get(kind)
    if parser is None:
        raise _fail(f"{path}.kind", f"unknown document kind {kind!r}")
    return parser(doc, path)


def load_document(filename: str):
    try:
        with open(filename, "r", encoding="utf-8") as handle:
            raw = json.load(handle)
    except json.JSONDecodeError as error:
        raise InvalidInput(f"{filename}: invalid JSON ({error})") from None
    return parse_document(raw, filename)


def dump_document(doc: dict) -> str:
    return json.dumps(doc, indent=2)


def belief_list_doc(beliefs: Sequence[Sequence[Fraction]]) -> list[list[str]]:
    return [[rational_str(b) for b in belief] for belief in beliefs]
