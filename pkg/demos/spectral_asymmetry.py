"""How far apart the spectral ratios of phi_k and its inverse drift as k grows.

    python3 demos/spectral_asymmetry.py
"""

from __future__ import annotations

import math

from outer_rates.intpoly import P, Q, certify_irreducible
from outer_rates.roots import family_spectral_ratio


def main():
    print("N  k     rho(p_k)      rho(q_k)   1+1/sqrt(k)  q certificate")
    for N in (3, 5):
        for k in (5, 10, 20, 50, 100):
            rp = family_spectral_ratio(N, k, P)
            rq = family_spectral_ratio(N, k, Q)
            cert = certify_irreducible(N, k, Q)
            print(f"{N}  {k:<4} {rp.ratio:12.4f}  {rq.ratio:10.6f}  {1 + 1 / math.sqrt(k):10.6f}"
                  f"   {cert.method}")
    print()
    print("phi_k converges projectively at a rate of order k; its inverse barely converges.")


if __name__ == "__main__":
    main()
