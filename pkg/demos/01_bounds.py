"""How much does prior knowledge help? Closed-form bounds for p=5.

Without a prior the intrinsic bound is p^2/n. The inverse Wishart prior adds
information that matters while n is comparable to nu and fades as n grows.
"""
from hpdbounds import bounds
from hpdbounds.experiments import toeplitz_center

p = 5
sigma0 = toeplitz_center(p, 0.5)

print(f"{'n':>6} {'ICRB':>10} {'BICRB nu=40':>12} {'BICRB nu=100':>13} {'BCRB nu=40':>11}")
for n in (10, 34, 119, 408, 1394, 3162):
    print(f"{n:>6} {bounds.icrb_ai_asymptotic(p, n).value:>10.5f}"
          f" {bounds.bicrb_affine_invariant(40, p, n).value:>12.5f}"
          f" {bounds.bicrb_affine_invariant(100, p, n).value:>13.5f}"
          f" {bounds.bcrb_euclidean(sigma0, 40, n).value:>11.5f}")

# A stronger prior (larger nu) lowers the bound most at small n.
gain = bounds.icrb_ai_asymptotic(p, 10).value / bounds.bicrb_affine_invariant(100, p, 10).value
print(f"\nat n=10 the nu=100 prior cuts the intrinsic bound by a factor {gain:.1f}")

# The intrinsic bound does not depend on the prior center; the Euclidean one does.
for rho in (0.0, 0.5, 0.9):
    S0 = toeplitz_center(p, rho)
    print(f"rho={rho}: BCRB(n=10) = {bounds.bcrb_euclidean(S0, 40, 10).value:.4f}, "
          f"BICRB(n=10) = {bounds.bicrb_affine_invariant(40, p, 10).value:.4f}")
