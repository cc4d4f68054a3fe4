"""
Deciding the weighted-garbling order, with certificates
=======================================================

A binary symmetric experiment reports the state correctly with probability
q.  A second design spends half its budget on a blind signal and, on the
informative half, reports correctly with probability q'.  For q' between
1/2 and 1 the blind design is never Blackwell-sufficient on the nose, yet
a state-independent reweighting of its signals can still reproduce the
binary experiment exactly.  This script walks the full decision pipeline
on that family: feasibility, minimal size, the whole interval of
achievable sizes, mixing, and composition.
"""

from expord import (
    check_blackwell,
    check_weighted,
    compose,
    min_size,
    mix_certificates,
    size_interval,
    verify_certificate,
)
from expord.generators import binary_symmetric, three_signal_family


def rows(matrix):
    return "  ".join("(" + ", ".join(str(x) for x in row) + ")" for row in matrix)


pi = binary_symmetric("3/5")
pi_prime = three_signal_family("4/5")

print("pi rows:      ", rows(pi.matrix))
print("pi_prime rows:", rows(pi_prime.matrix))

# Blackwell first: a plain channel already suffices for this pair.
channel = check_blackwell(pi, pi_prime)
print("\nBlackwell garbling:", "yes" if channel else "no")
print("channel phi:", rows(channel.phi))

# The weighted check returns a linearized kernel psi(s, s') whose column
# sums are the weight gamma; its largest column sum is the size.
cert = check_weighted(pi, pi_prime)
print("\nweighted garbling:", "yes" if cert else "no")
print("gamma:", tuple(str(g) for g in cert.gamma), " size:", cert.beta)
print("re-verified:", bool(verify_certificate(cert)))

# Every achievable size forms a closed interval; both endpoints come with
# witnesses, and mixing the endpoint kernels sweeps the interior.
interval = size_interval(pi, pi_prime)
print("\nsize interval: [", interval.beta_min, ",", interval.beta_max, "]")
midpoint = mix_certificates(interval.witness_min, interval.witness_max, "1/2")
print("midpoint mixture size:", midpoint.beta)

# A harder pair: the informative half is much sharper than the target, so
# no unit-weight channel exists and the minimal size rises above 1.
strong = binary_symmetric("4/5")
sharp = three_signal_family("9/10")
print("\nBlackwell for (4/5, 9/10):", check_blackwell(strong, sharp) is not None)
beta, witness = min_size(strong, sharp)
print("minimal size:", beta, " weight:", tuple(str(g) for g in witness.gamma))

# Certificates compose along chains: with pi <= pi_prime <= sharp, the
# matrix product of the two kernels certifies pi <= sharp directly, and
# the composite size never exceeds the product of the link sizes.
outer_beta, outer = min_size(pi_prime, sharp)
composite = compose(cert, outer)
print("\ncomposite pair verifies:", bool(verify_certificate(composite)))
print("composite size", composite.beta, "<= product", cert.beta * outer_beta)
