"""The distance grid d(X_i, Y_j) between the two axes, for both choices of g.

    python3 demos/axis_separation.py [N] [k]
"""

from __future__ import annotations

import sys

from outer_rates.outer_geometry import axis_separation_report


def show(N, k, variant):
    r = axis_separation_report(N, k, window=3, variant=variant)
    idx = range(-3, 4)
    print(f"{variant} g, N={N}, k={k}")
    print("i\\j " + "".join(f"{j:>8}" for j in idx))
    for i, row in zip(idx, r.grid):
        print(f"{i:>3} " + "".join(f"{x:8.3f}" for x in row))
    print(f"min {r.grid_min:.4f} at {r.argmin}; on the diagonal: {r.min_on_diagonal}")
    print(f"min - log lambda - log lambda_bar = {r.final_value:.4f} (bound {r.final_bound:.4f})")
    if r.advisory:
        print(f"note: {r.advisory}")
    print()


def main():
    N = int(sys.argv[1]) if len(sys.argv) > 1 else 4
    k = int(sys.argv[2]) if len(sys.argv) > 2 else 10
    for variant in ("exact", "printed"):
        show(N, k, variant)


if __name__ == "__main__":
    main()
