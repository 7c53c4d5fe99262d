from __future__ import annotations

import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from outer_rates.outer_geometry import (
    Marking,
    RosePoint,
    axis_data,
    axis_distance_formula,
    axis_separation_report,
    candidates,
    class_length,
    lipschitz_distance,
    max_stretch_bruteforce,
    random_marking,
    thinness,
)
from outer_rates.words import ParameterError, Word, apply, cyclic_reduce, phi_family

lengths3 = st.lists(st.floats(0.05, 1.0), min_size=3, max_size=3)


def rose(lengths, marking=None):
    return RosePoint.normalized(lengths, marking)


@pytest.mark.parametrize("N,count", [(2, 4), (3, 9), (4, 16), (6, 36)])
def test_candidate_count(N, count):
    c = candidates(N)
    assert len(c) == count == N * N
    assert len({str(w) for w in c}) == count


def test_rose_point_validation():
    with pytest.raises(ValueError):
        RosePoint((0.5, 0.6), Marking.identity(2))
    with pytest.raises(ValueError):
        RosePoint((1.0, 0.0), Marking.identity(2))
    X = rose([1, 1, 2])
    assert X.lengths == (0.25, 0.25, 0.5)


def test_marking_checks_the_inverse():
    phi, inv = phi_family(3, 10)
    with pytest.raises(ValueError):
        Marking.of(phi, phi)
    assert Marking.of(phi, inv, 2).inverse().power == -2


def test_action_convention():
    phi, inv = phi_family(3, 10)
    X = rose([0.2, 0.3, 0.5])
    w = Word.parse("a1 A2 a3", 3)
    moved = X.act(phi, inv, 2)
    direct = cyclic_reduce(apply(phi, apply(phi, w))).weighted_length(X.lengths)
    assert class_length(moved, w) == pytest.approx(direct, rel=1e-14)
    assert X.act(phi, inv, 2).act(phi, inv, -2).marking.power == 0


def test_unrelated_markings_do_not_compose():
    phi, inv = phi_family(3, 10)
    rng = random.Random(1)
    X = rose([1, 1, 1], random_marking(3, rng))
    with pytest.raises(ValueError):
        X.act(phi, inv, 1)


@settings(max_examples=40, deadline=None)
@given(lengths3, lengths3, lengths3)
def test_triangle_inequality_and_identity(a, b, c):
    X, Y, Z = rose(a), rose(b), rose(c)
    assert lipschitz_distance(X, X).value == pytest.approx(0.0, abs=1e-12)
    dxy = lipschitz_distance(X, Y).value
    assert dxy >= -1e-12  # unit volume forces a stretch of at least 1
    assert lipschitz_distance(X, Z).value <= dxy + lipschitz_distance(Y, Z).value + 1e-12


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 10_000))
def test_candidates_realize_the_max_stretch(seed):
    rng = random.Random(seed)
    X = rose([rng.uniform(0.1, 1) for _ in range(3)], random_marking(3, rng, moves=2))
    Y = rose([rng.uniform(0.1, 1) for _ in range(3)])
    brute, _ = max_stretch_bruteforce(X, Y, max_len=5)
    assert brute == pytest.approx(math.exp(lipschitz_distance(X, Y).value), rel=1e-12)


@pytest.mark.parametrize("N", [3, 4, 5, 6])
@pytest.mark.parametrize("variant", ["printed", "exact"])
def test_translation_lengths(N, variant):
    d = axis_data(N, 10, variant)
    for i in (-1, 0, 1):
        assert lipschitz_distance(d.X(i), d.X(i + 1)).value == pytest.approx(math.log(d.lam), abs=1e-12)
        assert lipschitz_distance(d.Y(i), d.Y(i + 1)).value == pytest.approx(math.log(d.lam_bar), abs=1e-12)


def test_rank_three_axis_values():
    d = axis_data(3, 10)
    assert d.lam == pytest.approx(10.00998006970, abs=1e-10)
    assert d.lam_bar == pytest.approx(3.2111393532786, abs=1e-12)
    base = lipschitz_distance(d.X0, d.Y0)
    assert base.value == pytest.approx(4.368966085009017, abs=1e-12)
    assert str(base.witness) == "a3"
    assert axis_distance_formula(3, 10).value == pytest.approx(base.value, abs=1e-12)
    # along the diagonal the distance moves with i
    diag = [lipschitz_distance(d.X(i), d.Y(i)).value for i in range(-2, 3)]
    assert diag == pytest.approx([7.3651685029959, 2.7580032984233, 4.3689660850090,
                                  6.7022177107734, 9.0354693365377], abs=1e-9)


@pytest.mark.parametrize("N", [3, 4, 5, 6])
@pytest.mark.parametrize("k", [5, 10, 20])
def test_closed_form_on_common_translates(N, k):
    d = axis_data(N, k, "exact")
    f = axis_distance_formula(N, k, "exact", d)
    assert f.lo <= f.value <= f.hi
    assert f.holds
    for i in (-1, 0, 1):
        assert lipschitz_distance(d.X(i), d.Y(-i)).value == pytest.approx(f.value, abs=1e-9)


def test_exact_separation_grid():
    r = axis_separation_report(6, 10, window=4, variant="exact")
    assert r.antidiagonal_constant
    assert r.min_on_diagonal and r.argmin == (-2, -2)
    assert r.grid_min == pytest.approx(8.811817892615, abs=1e-9)
    assert r.intermediate_holds and r.final_holds
    assert r.final_value == pytest.approx(6.036620497550, abs=1e-9)
    assert r.advisory is None


def test_printed_separation_grid():
    r = axis_separation_report(6, 10, window=4, variant="printed")
    assert r.argmin == (-4, 0)
    assert not r.min_on_diagonal
    assert r.grid_min == pytest.approx(6.696418417131, abs=1e-9)
    assert r.diagonal_min == pytest.approx(7.326863912642, abs=1e-9)
    assert not r.intermediate_holds
    assert r.final_value == pytest.approx(3.242041022999, abs=1e-9)
    assert r.final_holds
    assert r.advisory is not None


def test_separation_needs_k_at_least_five():
    with pytest.raises(ParameterError):
        axis_separation_report(3, 4)


def test_thinness_frozen_and_decreasing():
    t = [thinness(axis_data(3, k).X0) for k in (3, 5, 10)]
    assert t == pytest.approx([0.07279398396352, 0.03181197728496, 0.00899202291041], abs=1e-12)
    assert t[0] > t[1] > t[2]


def test_unknown_variant():
    with pytest.raises(ValueError):
        axis_data(3, 10, "other")
