"""Order-deciding LPs, size intervals, composition, conditional form.

The hand-checkable oracles come from the two-parameter symmetric family:
a binary-symmetric experiment with accuracy q against a three-signal
experiment that is pure noise with probability 1/2 and binary symmetric
with accuracy q' otherwise.  The weighted order holds iff 2q - 1 <=
2(2q'-1), with minimal size 2(2q-1)/(2q'-1) when that is at least 1.
"""

from fractions import Fraction

import pytest

from expord import (
    ConditionalExperiment,
    GarblingCertificate,
    InvalidInput,
    OrderError,
    apply_weight,
    check_blackwell,
    check_weighted,
    compose,
    dilute,
    from_conditional,
    make_weight,
    min_size,
    mix_certificates,
    size_interval,
    to_conditional,
    validate_experiment,
    verify_certificate,
)
from expord.generators import (
    binary_symmetric,
    dilution_certificate,
    perfect_experiment,
    three_signal_family,
    uninformative_experiment,
)

F = Fraction


def _upper_dilution_certificate(experiment, beta):
    """Certificate that the base is a weighted garbling of its dilution.

    psi places beta on the diagonal and nothing on the null signal, so the
    size is exactly beta.
    """
    diluted = dilute(experiment, beta)
    n = experiment.n_signals
    psi = tuple(
        tuple(F(beta) if i == j else F(0) for j in range(diluted.n_signals))
        for i in range(n)
    )
    return GarblingCertificate(pi=experiment, pi_prime=diluted, psi=psi)


class TestCheckBlackwell:
    def test_self_garbling(self):
        e = binary_symmetric("4/5")
        cert = check_blackwell(e, e)
        assert cert is not None and cert.beta == 1
        # The identity kernel is itself a valid witness.
        identity = GarblingCertificate(
            pi=e, pi_prime=e, psi=((F(1), F(0)), (F(0), F(1)))
        )
        assert verify_certificate(identity)

    def test_symmetric_pair_is_blackwell_ordered(self):
        pi = binary_symmetric("3/5")
        pi_prime = three_signal_family("4/5")
        cert = check_blackwell(pi, pi_prime)
        assert cert is not None
        assert verify_certificate(cert)
        assert cert.beta == 1
        assert all(g == 1 for g in cert.gamma)

    def test_hand_witness_verifies(self):
        # phi(s1|s0') = 1/3, phi(s1|s1') = 1, phi(s1|s2') = 1/3
        pi = binary_symmetric("3/5")
        pi_prime = three_signal_family("4/5")
        psi = (
            (F(1, 3), F(1), F(1, 3)),
            (F(2, 3), F(0), F(2, 3)),
        )
        witness = GarblingCertificate(pi=pi, pi_prime=pi_prime, psi=psi)
        assert verify_certificate(witness)
        assert witness.beta == 1

    def test_garbling_cannot_create_information(self):
        assert check_blackwell(perfect_experiment(2), uninformative_experiment(2)) is None

    def test_state_mismatch_rejected(self):
        with pytest.raises(InvalidInput):
            check_blackwell(binary_symmetric("3/5"), perfect_experiment(3))


class TestCheckWeighted:
    def test_weighted_but_not_blackwell(self):
        pi = binary_symmetric("4/5")
        pi_prime = three_signal_family("9/10")
        assert check_blackwell(pi, pi_prime) is None
        cert = check_weighted(pi, pi_prime)
        assert cert is not None
        assert verify_certificate(cert)

    def test_hand_weighted_witness(self):
        # gamma = (1/2, 3/2, 3/2) with phi(s1|s0') = 1/2, phi(s1|s1') = 1,
        # phi(s1|s2') = 0;  psi = gamma * phi columnwise.
        pi = binary_symmetric("4/5")
        pi_prime = three_signal_family("9/10")
        psi = (
            (F(1, 4), F(3, 2), F(0)),
            (F(1, 4), F(0), F(3, 2)),
        )
        witness = GarblingCertificate(pi=pi, pi_prime=pi_prime, psi=psi)
        assert verify_certificate(witness)
        assert witness.gamma == (F(1, 2), F(3, 2), F(3, 2))
        assert witness.beta == F(3, 2)

    def test_reflexivity(self):
        e = binary_symmetric("4/5")
        cert = check_weighted(e, e)
        assert cert is not None
        # The likelihood matrix is invertible, so psi is forced to identity.
        assert cert.psi == ((F(1), F(0)), (F(0), F(1)))
        assert cert.beta == 1

    def test_perfect_vs_uninformative_fails(self):
        assert check_weighted(perfect_experiment(2), uninformative_experiment(2)) is None

    def test_size_cap_excludes_and_admits(self):
        pi = binary_symmetric("4/5")
        pi_prime = three_signal_family("9/10")
        assert check_weighted(pi, pi_prime, max_size=1) is None
        capped = check_weighted(pi, pi_prime, max_size="3/2")
        assert capped is not None and capped.beta == F(3, 2)

    def test_size_cap_below_one_rejected(self):
        with pytest.raises(InvalidInput):
            check_weighted(
                binary_symmetric("3/5"), binary_symmetric("3/5"), max_size="1/2"
            )


class TestMinSize:
    def test_blackwell_pair_has_size_one(self):
        got = min_size(binary_symmetric("3/5"), three_signal_family("4/5"))
        assert got is not None
        beta, cert = got
        assert beta == 1 and cert.beta == 1
        assert verify_certificate(cert)

    def test_symmetric_family_formula(self):
        # beta_min = 2(2q-1)/(2q'-1) = 2(3/5)/(4/5) = 3/2
        got = min_size(binary_symmetric("4/5"), three_signal_family("9/10"))
        assert got is not None
        beta, cert = got
        assert beta == F(3, 2) and cert.beta == F(3, 2)

    def test_identity_pair(self):
        e = binary_symmetric("3/5")
        got = min_size(e, e)
        assert got is not None and got[0] == 1

    def test_unordered_pair_returns_none(self):
        assert min_size(perfect_experiment(2), uninformative_experiment(2)) is None


class TestSizeInterval:
    def test_blackwell_pair_interval(self):
        interval = size_interval(binary_symmetric("3/5"), three_signal_family("4/5"))
        assert interval is not None
        assert interval.beta_min == 1 and interval.beta_max == 2
        assert verify_certificate(interval.witness_min)
        assert verify_certificate(interval.witness_max)
        assert interval.witness_min.beta == 1
        assert interval.witness_max.beta == 2

    def test_invertible_pair_is_degenerate(self):
        e = binary_symmetric("3/5")
        interval = size_interval(e, e)
        assert interval is not None
        assert interval.beta_min == 1 and interval.beta_max == 1

    def test_weighted_pair_interval(self):
        interval = size_interval(binary_symmetric("4/5"), three_signal_family("9/10"))
        assert interval is not None
        assert interval.beta_min == F(3, 2) and interval.beta_max == 2

    def test_null_signal_makes_sizes_unbounded(self):
        base = validate_experiment([["1/2", "0", "1/2"], ["1/4", "0", "3/4"]])
        interval = size_interval(base, base)
        assert interval is not None
        assert interval.unbounded and interval.beta_max is None
        assert interval.witness_max is None

    def test_unordered_pair_returns_none(self):
        assert size_interval(perfect_experiment(2), uninformative_experiment(2)) is None


class TestMixCertificates:
    def _endpoints(self):
        interval = size_interval(binary_symmetric("3/5"), three_signal_family("4/5"))
        assert interval is not None
        return interval.witness_min, interval.witness_max

    def test_endpoint_weights(self):
        low, high = self._endpoints()
        assert mix_certificates(low, high, 0).psi == low.psi
        assert mix_certificates(low, high, 1).psi == high.psi

    def test_midpoint_has_intermediate_size(self):
        low, high = self._endpoints()
        mid = mix_certificates(low, high, "1/2")
        assert verify_certificate(mid)
        assert mid.beta == F(3, 2)

    def test_mismatched_pairs_rejected(self):
        low, _ = self._endpoints()
        other = check_weighted(binary_symmetric("4/5"), three_signal_family("9/10"))
        with pytest.raises(InvalidInput):
            mix_certificates(low, other, "1/2")

    def test_weight_outside_unit_interval_rejected(self):
        low, high = self._endpoints()
        with pytest.raises(InvalidInput):
            mix_certificates(low, high, "3/2")


class TestCompose:
    def test_identity_composition(self):
        e = binary_symmetric("4/5")
        ident = check_blackwell(e, e)
        composed = compose(ident, ident)
        assert verify_certificate(composed)
        assert composed.beta == 1

    def test_blackwell_then_weighted(self):
        inner = check_blackwell(binary_symmetric("3/5"), binary_symmetric("4/5"))
        outer = check_weighted(binary_symmetric("4/5"), three_signal_family("9/10"))
        assert inner is not None and outer is not None
        composed = compose(inner, outer)
        assert verify_certificate(composed)
        assert composed.beta <= inner.beta * outer.beta
        assert composed.pi == binary_symmetric("3/5")
        assert composed.pi_prime == three_signal_family("9/10")

    def test_two_dilutions_multiply_sizes(self):
        e = binary_symmetric("4/5")
        inner = _upper_dilution_certificate(e, 2)
        outer = _upper_dilution_certificate(inner.pi_prime, 2)
        composed = compose(inner, outer)
        assert verify_certificate(composed)
        assert composed.beta <= 4

    def test_middle_mismatch_rejected(self):
        e = binary_symmetric("4/5")
        ident = check_blackwell(e, e)
        other = check_blackwell(binary_symmetric("3/5"), binary_symmetric("3/5"))
        with pytest.raises(InvalidInput):
            compose(ident, other)

    def test_downward_dilution_certificate_is_blackwell(self):
        cert = dilution_certificate(binary_symmetric("4/5"), 2)
        assert verify_certificate(cert)
        assert cert.beta == 1


class TestConditional:
    def _example_cert(self):
        pi = binary_symmetric("4/5")
        pi_prime = three_signal_family("4/5")
        psi = ((F(0), F(2), F(0)), (F(0), F(0), F(2)))
        return GarblingCertificate(pi=pi, pi_prime=pi_prime, psi=psi)

    def test_to_conditional_example(self):
        cert = self._example_cert()
        assert verify_certificate(cert) and cert.beta == 2
        ce = to_conditional(cert.pi_prime, cert)
        assert ce.alpha == F(1, 2)
        # event mass gamma(s') pi'(s'|t) / beta
        assert ce.event[0][1] == F(2, 5)
        assert ce.event[0][0] == 0 and ce.event[1][0] == 0
        for t in range(2):
            assert sum(ce.event[t]) == F(1, 2)

    def test_weight_argument_matches_certificate_argument(self):
        cert = self._example_cert()
        via_weight = to_conditional(cert.pi_prime, cert.weight())
        via_cert = to_conditional(cert.pi_prime, cert)
        assert via_weight == via_cert

    def test_blackwell_certificate_degenerates(self):
        e = binary_symmetric("4/5")
        cert = check_blackwell(e, e)
        ce = to_conditional(e, cert)
        assert ce.alpha == 1
        assert ce.event == e.matrix

    def test_round_trip_recovers_weight(self):
        cert = self._example_cert()
        ce = to_conditional(cert.pi_prime, cert)
        recovered = from_conditional(ce, cert.pi)
        assert verify_certificate(recovered)
        assert recovered.gamma == (F(0), F(2), F(2))
        assert recovered.beta == 2

    def test_alpha_one_round_trip_is_blackwell(self):
        e = binary_symmetric("4/5")
        ce = to_conditional(e, check_blackwell(e, e))
        recovered = from_conditional(ce, e)
        assert recovered.beta == 1

    def test_state_dependent_event_rejected(self):
        base = binary_symmetric("4/5")
        # kappa would be 1/2 on (s1|t0) but 1/4 on (s1|t1)
        event = ((F(2, 5), F(1, 10)), (F(1, 20), F(2, 5)))
        with pytest.raises(InvalidInput):
            ConditionalExperiment(base=base, event=event, alpha=F(1, 2))

    def test_blackwell_failure_raises_order_error(self):
        pi_prime = three_signal_family("4/5")
        weight = make_weight(pi_prime, ["0", "2", "2"])
        ce = to_conditional(pi_prime, weight)
        with pytest.raises(OrderError):
            from_conditional(ce, perfect_experiment(2))

    def test_conditioned_table_matches_apply_weight(self):
        cert = self._example_cert()
        ce = to_conditional(cert.pi_prime, cert)
        reweighted = apply_weight(cert.weight(), cert.pi_prime)
        for t in range(2):
            for j in range(3):
                assert ce.event[t][j] == ce.alpha * reweighted.matrix[t][j]


class TestVerifyCertificate:
    def test_perturbed_kernel_fails(self):
        cert = check_weighted(binary_symmetric("4/5"), three_signal_family("9/10"))
        psi = [list(row) for row in cert.psi]
        psi[0][0] += F(1, 1000)
        broken = GarblingCertificate(
            pi=cert.pi, pi_prime=cert.pi_prime, psi=tuple(tuple(r) for r in psi)
        )
        result = verify_certificate(broken)
        assert not result
        assert result.violations

    def test_two_thirds_channel_witness(self):
        # binary symmetric 3/5 out of 4/5 via phi = [[2/3,1/3],[1/3,2/3]]
        witness = GarblingCertificate(
            pi=binary_symmetric("3/5"),
            pi_prime=binary_symmetric("4/5"),
            psi=((F(2, 3), F(1, 3)), (F(1, 3), F(2, 3))),
        )
        assert verify_certificate(witness)
        assert witness.beta == 1
