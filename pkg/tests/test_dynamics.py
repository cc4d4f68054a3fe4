"""Hidden-Markov belief dynamics, merging, stopping, and the separator."""

import itertools
from fractions import Fraction

import pytest

from expord import (
    InvalidInput,
    StoppingProblem,
    belief_set,
    counterexample,
    decision_problem,
    eta_limit,
    eta_step,
    full_simplex,
    iid_chain,
    markov_chain,
    merging_horizon,
    prior,
    regular_prior_check,
    stationary_distribution,
    stopping_value,
    uniform_prior,
    update,
)
from expord.generators import (
    binary_symmetric,
    perfect_experiment,
    random_chain,
    three_signal_family,
    uninformative_experiment,
)
from expord.value import random_decision_problem

F = Fraction

UNIFORM = uniform_prior(2)
IDENTITY_2 = markov_chain([["1", "0"], ["0", "1"]])
IID_UNIFORM = iid_chain(UNIFORM)
MATCHING = decision_problem([["1", "0"], ["0", "1"]], ["1/2", "1/2"])


def exhaustive_stopping_value(problem, chain, horizon, experiment):
    """Reference value by brute enumeration of history-contingent rules.

    Carries the unnormalized joint distribution over the current state down
    each history and lists the expected payoff of every deterministic rule;
    the maximum over rules must equal the backward-induction value.  Only
    usable for tiny trees.
    """
    n = problem.n_states

    def rule_values(t, dist):
        mass = sum(dist)
        stop_values = [
            sum(problem.payoffs[a][u] * dist[u] for u in range(n))
            for a in range(problem.n_actions)
        ]
        if t == horizon or mass == 0:
            return stop_values
        pushed = [
            sum(dist[u] * chain.rows[u][v] for u in range(n)) for v in range(n)
        ]
        branches = []
        for j in range(experiment.n_signals):
            child = tuple(experiment.matrix[v][j] * pushed[v] for v in range(n))
            branches.append(rule_values(t + 1, child))
        continue_values = [
            sum(combo) for combo in itertools.product(*branches)
        ]
        return stop_values + continue_values

    return max(rule_values(0, tuple(problem.prior.weights)))


class TestUpdate:
    def test_identity_chain_is_plain_bayes(self):
        got = update(IDENTITY_2, binary_symmetric("3/5"), (F(1, 3), F(2, 3)), "s1")
        assert got == (F(3, 7), F(4, 7))

    def test_iid_chain_forgets_the_current_belief(self):
        e = binary_symmetric("3/5")
        for belief in [(F(1, 3), F(2, 3)), (F(9, 10), F(1, 10))]:
            assert update(IID_UNIFORM, e, belief, "s1") == (F(3, 5), F(2, 5))

    def test_uninformative_signal_gives_the_pushforward(self):
        chain = markov_chain([["7/10", "3/10"], ["3/10", "7/10"]])
        mu = (F(1), F(0))
        got = update(chain, uninformative_experiment(2, 2), mu, "s0")
        assert got == (F(7, 10), F(3, 10))

    def test_zero_probability_signal_rejected(self):
        with pytest.raises(InvalidInput):
            update(IDENTITY_2, perfect_experiment(2), (F(1), F(0)), 1)


class TestEtaStep:
    def test_iid_image_is_the_posterior_hull(self):
        out = eta_step(IID_UNIFORM, binary_symmetric("3/5"), full_simplex(2))
        assert set(out.points) == {(F(3, 5), F(2, 5)), (F(2, 5), F(3, 5))}

    def test_uninformative_fixed_point(self):
        point = belief_set([(F(1, 3), F(2, 3))])
        out = eta_step(IDENTITY_2, uninformative_experiment(2, 2), point)
        assert out.points == point.points

    def test_contained_in_the_simplex(self):
        simplex = full_simplex(2)
        out = eta_step(IID_UNIFORM, binary_symmetric("3/5"), simplex)
        for p in out.points:
            assert simplex.contains(p)


class TestEtaLimit:
    def test_iid_limit_is_the_posterior_support_hull(self):
        result = eta_limit(IID_UNIFORM, binary_symmetric("3/5"))
        assert result.converged and result.gap == 0
        assert set(result.hull.points) == {(F(3, 5), F(2, 5)), (F(2, 5), F(3, 5))}

    def test_uninformative_contracts_to_the_stationary_point(self):
        chain = markov_chain([["7/10", "3/10"], ["3/10", "7/10"]])
        assert stationary_distribution(chain) == (F(1, 2), F(1, 2))
        result = eta_limit(chain, uninformative_experiment(2, 2))
        assert result.converged
        for p in result.hull.points:
            assert abs(p[0] - F(1, 2)) + abs(p[1] - F(1, 2)) < F(1, 10 ** 4)

    def test_zero_tolerance_stops_at_an_exact_fixed_point(self):
        result = eta_limit(IID_UNIFORM, binary_symmetric("3/5"), tol=0)
        assert result.converged and result.gap == 0

    def test_too_many_states_rejected(self):
        mu4 = uniform_prior(4)
        with pytest.raises(InvalidInput):
            eta_limit(iid_chain(mu4), perfect_experiment(4))


class TestRegularPriorCheck:
    def test_iid_prior_equal_to_the_chain_row(self):
        e = binary_symmetric("3/5")
        result = eta_limit(IID_UNIFORM, e)
        assert regular_prior_check(IID_UNIFORM, e, UNIFORM, result.hull)

    def test_full_simplex_accepts_everything(self):
        e = binary_symmetric("9/10")
        assert regular_prior_check(IDENTITY_2, e, prior(["1/4", "3/4"]), full_simplex(2))

    def test_point_hull_rejects_distant_updates(self):
        hull = belief_set([(F(1, 2), F(1, 2))])
        assert not regular_prior_check(IDENTITY_2, binary_symmetric("3/5"), UNIFORM, hull)


class TestMergingHorizon:
    def test_chain_mixing_profile(self):
        chain = markov_chain([["7/10", "3/10"], ["3/10", "7/10"]])
        report = merging_horizon(chain, uninformative_experiment(2, 2), "1/10")
        assert report.horizon == 4
        assert report.profile == (F(4, 5), F(8, 25), F(16, 125), F(32, 625))
        assert report.monotone

    def test_perfect_signals_merge_immediately(self):
        chain = markov_chain([["7/10", "3/10"], ["3/10", "7/10"]])
        report = merging_horizon(chain, perfect_experiment(2), "1/10")
        assert report.horizon == 1
        assert report.profile == (F(0),)

    def test_vacuous_threshold(self):
        chain = markov_chain([["7/10", "3/10"], ["3/10", "7/10"]])
        report = merging_horizon(chain, uninformative_experiment(2, 2), 2)
        assert report.horizon == 1

    def test_threshold_never_reached_reports_none(self):
        chain = markov_chain([["7/10", "3/10"], ["3/10", "7/10"]])
        report = merging_horizon(chain, uninformative_experiment(2, 2), "1/10", n_max=2)
        assert report.horizon is None
        assert len(report.profile) == 2

    def test_chain_with_zeros_rejected(self):
        with pytest.raises(InvalidInput):
            merging_horizon(IDENTITY_2, uninformative_experiment(2, 2), "1/10")


class TestStoppingValue:
    def test_perfect_revelation_after_one_wait(self):
        sp = StoppingProblem(problem=MATCHING, chain=IDENTITY_2, horizon=1)
        assert stopping_value(sp, perfect_experiment(2)) == 1

    def test_uninformative_never_learns(self):
        for horizon in (1, 2, 3):
            sp = StoppingProblem(problem=MATCHING, chain=IDENTITY_2, horizon=horizon)
            assert stopping_value(sp, uninformative_experiment(2)) == F(1, 2)

    def test_binary_symmetric_waiting_adds_nothing(self):
        sp = StoppingProblem(problem=MATCHING, chain=IID_UNIFORM, horizon=2)
        assert stopping_value(sp, binary_symmetric("3/5")) == F(3, 5)

    def test_monotone_in_horizon(self):
        e = binary_symmetric("7/10")
        chain = markov_chain([["7/10", "3/10"], ["3/10", "7/10"]])
        values = [
            stopping_value(
                StoppingProblem(problem=MATCHING, chain=chain, horizon=t), e
            )
            for t in range(1, 6)
        ]
        assert all(a <= b for a, b in zip(values, values[1:]))

    def test_payoff_bound_enforced(self):
        big = decision_problem([["2", "0"], ["0", "1"]], ["1/2", "1/2"])
        with pytest.raises(InvalidInput):
            StoppingProblem(problem=big, chain=IDENTITY_2, horizon=1)

    def test_tree_size_guard(self):
        sp = StoppingProblem(problem=MATCHING, chain=IDENTITY_2, horizon=21)
        with pytest.raises(InvalidInput):
            stopping_value(sp, binary_symmetric("3/5"))

    def test_matches_exhaustive_policy_enumeration(self):
        import random as _random

        e = binary_symmetric("3/5")
        sp = StoppingProblem(problem=MATCHING, chain=IID_UNIFORM, horizon=2)
        assert exhaustive_stopping_value(MATCHING, IID_UNIFORM, 2, e) == F(3, 5)
        for seed in range(8):
            rng = _random.Random(seed)
            dp = random_decision_problem(seed, 2, 2, denominator_bound=6)
            chain = random_chain(rng, 2, strictly_positive=True)
            sp = StoppingProblem(problem=dp, chain=chain, horizon=2)
            expected = exhaustive_stopping_value(dp, chain, 2, e)
            assert stopping_value(sp, e) == expected


class TestCounterexample:
    def test_hand_checked_single_action_oracle(self):
        # One action with payoffs (1/4, -3/4): at horizon 2 the perfect
        # experiment is worth 0 and the uninformative one -1/4.
        dp = decision_problem([["1/4", "-3/4"]], ["1/2", "1/2"])
        sp = StoppingProblem(problem=dp, chain=IID_UNIFORM, horizon=2)
        assert stopping_value(sp, perfect_experiment(2)) == 0
        assert stopping_value(sp, uninformative_experiment(2)) == F(-1, 4)
        # The same instance cannot separate at horizon 1.
        sp1 = StoppingProblem(problem=dp, chain=IID_UNIFORM, horizon=1)
        assert stopping_value(sp1, perfect_experiment(2)) == F(-1, 4)
        assert stopping_value(sp1, uninformative_experiment(2)) == F(-1, 4)

    def test_perfect_vs_uninformative_matches_the_hand_values(self):
        found = counterexample(perfect_experiment(2), uninformative_experiment(2), UNIFORM)
        assert found is not None
        problem, chain = found
        assert set(problem.payoffs) == {
            (F(-1, 4), F(-1, 4)),
            (F(0), F(-1)),
            (F(-1), F(0)),
        }
        for horizon in (1, 2, 3, 4):
            sp = StoppingProblem(problem=problem, chain=chain, horizon=horizon)
            assert stopping_value(sp, perfect_experiment(2)) == 0
            assert stopping_value(sp, uninformative_experiment(2)) == F(-1, 4)

    def test_ordered_pair_yields_none(self):
        assert (
            counterexample(binary_symmetric("3/5"), three_signal_family("4/5"), UNIFORM)
            is None
        )

    def test_reversed_binary_pair_separates(self):
        pi = binary_symmetric("9/10")
        pi_prime = binary_symmetric("3/5")
        found = counterexample(pi, pi_prime, UNIFORM)
        assert found is not None
        problem, chain = found
        for horizon in (1, 2, 3, 4):
            sp = StoppingProblem(problem=problem, chain=chain, horizon=horizon)
            assert stopping_value(sp, pi) > stopping_value(sp, pi_prime)

    def test_payoffs_normalized(self):
        found = counterexample(binary_symmetric("9/10"), binary_symmetric("3/5"), UNIFORM)
        problem, _ = found
        assert all(abs(u) <= 1 for row in problem.payoffs for u in row)

    def test_chain_is_iid_at_the_prior(self):
        mu = prior(["1/3", "2/3"])
        found = counterexample(perfect_experiment(2), uninformative_experiment(2), mu)
        _, chain = found
        assert all(row == mu.weights for row in chain.rows)
