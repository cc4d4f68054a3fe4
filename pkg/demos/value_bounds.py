"""
What a size-beta certificate buys a decision maker
==================================================

If pi is a weighted garbling of pi_prime with size beta, then for every
decision problem

    V(pi_prime)  >=  (1/beta) V(pi) + (1 - 1/beta) V(no info).

The guarantee is tight, and when the order fails it is falsifiable: some
decision problem violates the inequality at every requested beta.  This
script evaluates both sides exactly on the leading family, exhibits the
tight instance, builds a violating problem for an unordered pair from the
infeasibility certificate of the underlying linear program, and closes
with the mixed-strategy identity behind the bound.
"""

from expord import (
    check_weighted,
    decision_problem,
    dilute,
    falsify_bound,
    min_size,
    mixed_strategy_payoff,
    residual_for,
    value,
    value_null,
    verify_bound,
)
from expord.generators import binary_symmetric, three_signal_family

matching = decision_problem([["1", "0"], ["0", "1"]], ["1/2", "1/2"])
pi = binary_symmetric("4/5")
pi_prime = three_signal_family("9/10")

v_pi, table = value(matching, pi)
print("V(pi) =", v_pi, " policy:", dict(zip(table.signals, table.actions)))
v_prime, _ = value(matching, pi_prime)
print("V(pi_prime) =", v_prime)
print("V(no info) =", value_null(matching))

# The pair is ordered with minimal size 3/2, and on the matching problem
# the guarantee binds with zero slack.
beta, cert = min_size(pi, pi_prime)
report = verify_bound(matching, pi, pi_prime, beta)
print("\nminimal size:", beta)
print("bound holds:", report.holds, " slack:", report.slack)

# Diluting pi by beta reveals it with probability 1/beta and stays silent
# otherwise; the bound is exactly the statement that the dilution is
# Blackwell-dominated by pi_prime.
diluted = dilute(pi, beta)
v_diluted, _ = value(matching, diluted)
print("V(diluted pi) =", v_diluted, "= right-hand side of the bound")

# The identity behind the soundness proof: simulating the garbled optimal
# policy through the certificate splits the payoff into a 1/beta share of
# V(pi) and the rest earned on the residual experiment.
residual = residual_for(cert)
_, residual_table = value(matching, residual)
mixed = mixed_strategy_payoff(matching, pi, pi_prime, cert, table, residual_table)
print("mixed strategy payoff:", mixed, "(equals V(pi_prime) here: tight)")

# Reverse the family: a 9/10-accurate binary design cannot be rebuilt
# from 4/5-accurate signals at any size, so every beta admits a violating
# decision problem, found from the Farkas certificate and re-verified.
sharp = binary_symmetric("9/10")
loose = three_signal_family("4/5")
print("\nreversed pair ordered:", check_weighted(sharp, loose) is not None)
for beta in (1, 2, 4):
    violator = falsify_bound(sharp, loose, beta)
    broken = verify_bound(violator, sharp, loose, beta)
    print(
        f"beta {beta}: violating problem with payoffs",
        [tuple(str(u) for u in row) for row in violator.payoffs],
        "slack", broken.slack,
    )
