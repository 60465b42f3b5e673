"""
The critical sample-size scaling law
====================================

How many unit-variance observations does it take to stay competitive
with n2 observations of standard deviation sigma > 1?  The answer grows
like n2^{sigma^2} with a logarithmic correction; anything slower loses,
anything faster wins.  This script tabulates the law and watches the
finite-n centering gap converge to its limit kappa(C, sigma).
"""

from gausswinner import (
    GroupSpec,
    beta,
    centering_gap,
    critical_n1,
    finite_n_winner,
    kappa,
    two_group_limit,
)

print("required n1 on the critical curve (C = 1):")
for sigma in (1.2, 1.5, 2.0):
    row = []
    for n2 in (10, 100, 1000):
        size = critical_n1(n2, sigma, 1.0)
        row.append(f"n2={n2}: n1={size.floor_value}")
    print(f"  sigma={sigma}:  " + "   ".join(row))

# beta measures distance from the curve: beta -> 0 loses, beta -> inf wins
print("\nbeta for n1 = n2 (same order, sigma = 1.5):")
for n2 in (1e2, 1e4, 1e6):
    print(f"  n2={n2:>8g}: beta = {beta(n2, n2, 1.5):.3e}")

# the centering gap is the deterministic heart of the theory: along the
# critical curve it converges (slowly) to kappa(C, sigma)
c, sigma = 1.0, 1.5
k = kappa(c, sigma)
print(f"\ncentering gap vs kappa = {k:.5f} at (C={c}, sigma={sigma}):")
for n2 in (1e4, 1e6, 1e8, 1e10, 1e12):
    n1 = critical_n1(n2, sigma, c).real_value
    print(f"  n2={n2:>6g}: gap = {centering_gap(n1, n2, sigma):.5f}")

# and the winner probability itself approaches the limit law
lim = two_group_limit(c, sigma).value
print(f"\nfinite-n winner probability vs limit {lim:.5f}:")
for n2 in (1e2, 1e4, 1e6, 1e8):
    n1 = critical_n1(n2, sigma, c).real_value
    p = finite_n_winner(GroupSpec(n1, 1.0), GroupSpec(n2, sigma)).value
    print(f"  n2={n2:>6g}: p = {p:.5f}")
