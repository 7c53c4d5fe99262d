"""Measured convergence rates against the spectral ratio.

    python3 demos/projective_dynamics.py
"""

from __future__ import annotations

from outer_rates.dynamics import iterate_lengths, power_rate, projective_rate
from outer_rates.roots import family_spectral_ratio
from outer_rates.traintrack import family_maps, transition_matrix
from outer_rates.words import phi_family


def main():
    print("N  k    spectral    matrix rate   word rate")
    for N in (3, 4):
        for k in (5, 10, 20):
            f, _ = family_maps(N, k)
            sr = family_spectral_ratio(N, k, "P").ratio
            pr = power_rate(transition_matrix(f)).rho
            wr = projective_rate(iterate_lengths(phi_family(N, k)[0], n_max=40)).rho
            print(f"{N}  {k:<3} {sr:10.3f}  {pr:12.3f}  {wr:10.3f}")


if __name__ == "__main__":
    main()
