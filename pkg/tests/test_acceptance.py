"""Acceptance checks, one test per criterion, each reported as a pass/fail line."""

from __future__ import annotations

import math
import random
import subprocess
import sys
import time

import numpy as np

from oracles import brute_irreducible_mod_p
from outer_rates.dynamics import iterate_lengths, power_rate, projective_rate
from outer_rates.intpoly import P, Q, IntPolynomial, char_poly, mod_p_irreducible, poly_family, table1_audit
from outer_rates.outer_geometry import (RosePoint, axis_data, axis_distance_formula,
                                        axis_separation_report, lipschitz_distance,
                                        max_stretch_bruteforce, random_marking, thinness)
from outer_rates.roots import (bracket_real_root, count_in_unit_disk, family_spectral_ratio,
                               find_roots, sqrt_lower, sqrt_upper, verify_root_lemma)
from outer_rates.traintrack import (family_maps, gates, is_primitive, is_train_track,
                                    local_whitehead_graph, pf_eigen, transition_matrix)
from outer_rates.words import phi_family

GRID = [(N, k) for N in range(3, 9) for k in range(3, 13)]


def test_01_characteristic_polynomials(report):
    t0 = time.perf_counter()
    bad = []
    for N, k in GRID:
        f, g = family_maps(N, k)
        a = char_poly(transition_matrix(f)).descending()
        b = char_poly(transition_matrix(g)).descending()
        if a != [1, -k] + [0] * (N - 2) + [-1] or b != [1, 0, -k] + [0] * (N - 3) + [-1]:
            bad.append((N, k))
    elapsed = time.perf_counter() - t0
    report["detail"] = f"{len(GRID)} pairs in {elapsed:.2f}s, mismatches {bad}"
    assert not bad
    assert elapsed < 1.0


def test_02_root_lemma(report):
    t0 = time.perf_counter()
    bad = []
    for N, k in GRID:
        claims = verify_root_lemma(N, k)
        if not all(c.passed for c in claims):
            bad.append((N, k, [c.name for c in claims if not c.passed]))
        # winding count against modulus classification of the numerical roots
        for which in (P, Q):
            f = poly_family(N, k, which)
            by_modulus = int(np.sum(np.abs(find_roots(f)) < 1))
            if count_in_unit_disk(f) != by_modulus:
                bad.append((N, k, which, "winding"))
        # the outer brackets are rational and contain the sqrt endpoints
        lo, hi = sqrt_lower(k - 1), sqrt_upper(k + 1)
        if not (lo * lo <= k - 1 and hi * hi >= k + 1):
            bad.append((N, k, "sqrt bracket"))
    elapsed = time.perf_counter() - t0
    report["detail"] = f"{len(GRID)} pairs in {elapsed:.2f}s, failures {bad}"
    assert not bad
    assert elapsed < 30.0


def test_03_spectral_asymmetry_bounds(report):
    bad = []
    for N in range(3, 7):
        for k in (5, 10, 20, 50):
            rp = family_spectral_ratio(N, k, P)
            rq = family_spectral_ratio(N, k, Q)
            if rp.ratio_interval[0] < k:
                bad.append((N, k, "p", rp.ratio_interval))
            if rq.ratio_interval[1] > 1 + 1 / math.sqrt(k):
                bad.append((N, k, "q", rq.ratio_interval))
    rp = family_spectral_ratio(3, 10, P)
    rq = family_spectral_ratio(3, 10, Q)
    # exact-sign bisection oracle for q_10 = x^3 - 10x - 1: both outer roots are real
    q = poly_family(3, 10, Q)
    top = bracket_real_root(q, sqrt_lower(9), sqrt_upper(11))
    neg = bracket_real_root(q, -sqrt_upper(11), -sqrt_lower(9))
    oracle_lo = float(top.lo) / float(-neg.lo)
    oracle_hi = float(top.hi) / float(-neg.hi)
    report["detail"] = (f"rho(p_10)={rp.ratio:.6f}, rho(q_10)={rq.ratio:.12f} "
                        f"oracle [{oracle_lo:.12f}, {oracle_hi:.12f}], failures {bad}")
    assert not bad
    assert abs(rp.ratio - 31.67) <= 0.01
    assert oracle_lo <= rq.ratio <= oracle_hi
    assert abs(rq.ratio - 1.0321758420675638) < 1e-14


def test_04_asymptotic_monotonicity(report):
    ks = (5, 10, 20, 50, 100)
    p = [family_spectral_ratio(3, k, P).ratio for k in ks]
    q = [family_spectral_ratio(3, k, Q).ratio for k in ks]
    report["detail"] = f"p ratios {[round(x, 3) for x in p]}, q ratios {[round(x, 5) for x in q]}"
    assert all(a < b for a, b in zip(p, p[1:]))
    assert all(a > b for a, b in zip(q, q[1:]))
    assert all(r - 1 <= 1 / math.sqrt(k) for r, k in zip(q, ks))


def test_05_mod_p_table_audit(report):
    t0 = time.perf_counter()
    rows = {r.N: r for r in table1_audit(range(3, 30, 2))}
    bad = []
    for N in (3, 5, 7, 11, 13):
        r = rows[N]
        coeffs = list(poly_family(N, r.table_residue, Q).coeffs)
        if r.status != "CONFIRMED" or not brute_irreducible_mod_p(coeffs, r.table_p):
            bad.append(N)
    zero_rows = [N for N, r in rows.items() if r.table_residue == 0]
    for N in zero_rows:
        r = rows[N]
        if r.status != "DISCREPANT":
            bad.append(N)
        elif r.found_p is not None:
            if not mod_p_irreducible(poly_family(N, r.found_residue, Q), r.found_p):
                bad.append(N)
        elif "none <=" not in r.note:
            bad.append(N)
    elapsed = time.perf_counter() - t0
    report["detail"] = (f"confirmed 3,5,7,11,13; k'=0 rows {zero_rows} flagged; "
                        f"{elapsed:.1f}s, failures {bad}")
    assert not bad
    assert elapsed < 60.0


def _expected_gates_f(N):
    return sorted([sorted(range(1, N + 1))] + [[-i] for i in range(1, N + 1)])


def _expected_gates_g(N):
    return sorted(sorted([-i, (i + 1) % N + 1]) for i in range(1, N + 1))


def test_06_train_track_facts(report):
    bad = []
    for N in range(3, 7):
        for k in range(3, 13):
            f, g = family_maps(N, k)
            A, B = transition_matrix(f), transition_matrix(g)
            checks = {
                "tt_f": is_train_track(f)[0],
                "tt_g": is_train_track(g)[0],
                "gates_f": sorted(sorted(x) for x in gates(f)) == _expected_gates_f(N),
                "gates_g": sorted(sorted(x) for x in gates(g)) == _expected_gates_g(N),
                "whitehead_f": local_whitehead_graph(f).connected,
                "whitehead_g": local_whitehead_graph(g).connected,
                "primitive_A": is_primitive(A)[0],
                "primitive_B": is_primitive(B)[0],
            }
            failed = [name for name, ok in checks.items() if not ok]
            if failed:
                bad.append((N, k, failed))
    failing_N = sorted({N for N, _, _ in bad})
    kinds = sorted({name for _, _, names in bad for name in names})
    report["detail"] = f"failing N {failing_N} on {kinds}"
    assert not bad


def test_07_eigenvector_display(report):
    worst = 0.0
    for N, k in GRID:
        d = axis_data(N, k)
        f, g = family_maps(N, k)
        ea = pf_eigen(transition_matrix(f), pivot=N - 1)
        eb = pf_eigen(transition_matrix(g), pivot=0)
        va = np.array([d.lam ** (N - 1 - i) for i in range(N)])
        vb = np.array([d.lam_bar ** i for i in range(N)])
        worst = max(worst, float(np.max(np.abs(ea.vector / va - 1))),
                    float(np.max(np.abs(eb.vector / vb - 1))))
    report["detail"] = f"max relative error {worst:.2e} over {len(GRID)} pairs"
    assert worst <= 1e-9


def test_08_axis_geometry(report):
    t0 = time.perf_counter()
    worst_step, worst_formula, bad = 0.0, 0.0, []
    for N in range(3, 7):
        for k in (5, 10, 20):
            d = axis_data(N, k, "exact")
            llam, llb = math.log(d.lam), math.log(d.lam_bar)
            for i in range(-2, 2):
                worst_step = max(worst_step,
                                 abs(lipschitz_distance(d.X(i), d.X(i + 1)).value - llam),
                                 abs(lipschitz_distance(d.Y(i), d.Y(i + 1)).value - llb))
            formula = axis_distance_formula(N, k, "exact", d)
            # X_i and Y_-i are the common translate of (X_0, Y_0) by phi^i
            for i in range(-2, 3):
                worst_formula = max(worst_formula,
                                    abs(lipschitz_distance(d.X(i), d.Y(-i)).value - formula.value))
            if not formula.holds:
                bad.append((N, k))
    rep = axis_separation_report(6, 10, window=4, variant="exact")
    elapsed = time.perf_counter() - t0
    report["detail"] = (f"step err {worst_step:.1e}, formula err {worst_formula:.1e}, "
                        f"grid min {rep.grid_min:.4f} at {rep.argmin}, "
                        f"min - log lam - log lam_bar = {rep.final_value:.4f} >= {rep.final_bound:.4f}, "
                        f"{elapsed:.1f}s")
    assert worst_step <= 1e-9
    assert worst_formula <= 1e-9
    assert not bad
    assert rep.min_on_diagonal
    assert rep.final_value >= 3.5 * math.log(10) - 6
    assert elapsed < 60.0


def test_09_candidate_sufficiency(report):
    rng = random.Random(20240)
    worst = 0.0
    for _ in range(20):
        X = RosePoint.normalized([rng.uniform(0.1, 1.0) for _ in range(3)], random_marking(3, rng))
        Y = RosePoint.normalized([rng.uniform(0.1, 1.0) for _ in range(3)], random_marking(3, rng))
        cand = math.exp(lipschitz_distance(X, Y).value)
        brute, _ = max_stretch_bruteforce(X, Y, max_len=6)
        worst = max(worst, abs(brute / cand - 1))
    report["detail"] = f"20 random pairs, max relative gap {worst:.1e}"
    assert worst <= 1e-9


def test_10_dynamics(report):
    ratios, word = [], []
    for N in (3, 4, 5):
        for k in (5, 10, 20):
            f, _ = family_maps(N, k)
            pr = power_rate(transition_matrix(f))
            sr = family_spectral_ratio(N, k, P).ratio
            wr = projective_rate(iterate_lengths(phi_family(N, k)[0], n_max=40))
            ratios.append(pr.rho / sr)
            word.append(wr.rho / pr.rho)
    thin_ok = True
    for N in (3, 4, 5):
        t = [thinness(axis_data(N, k).X0) for k in range(3, 21)]
        thin_ok = thin_ok and all(a > b for a, b in zip(t, t[1:]))
    report["detail"] = (f"power/spectral in [{min(ratios):.4f}, {max(ratios):.4f}], "
                        f"word/power in [{min(word):.4f}, {max(word):.4f}], thinness decreasing {thin_ok}")
    assert all(0.9 <= r <= 1.1 for r in ratios)
    assert all(abs(r - 1) <= 0.15 for r in word)
    assert thin_ok


def test_11_determinism(report):
    cmd = [sys.executable, "-m", "outer_rates", "verify", "--N", "3", "--k", "10"]
    a = subprocess.run(cmd, capture_output=True, check=True).stdout
    b = subprocess.run(cmd, capture_output=True, check=True).stdout
    report["detail"] = f"{len(a)} bytes, identical {a == b}"
    assert a == b
    assert a.strip().startswith(b"{")
