from __future__ import annotations

import pytest

from outer_rates.dynamics import (
    RateError,
    iterate_lengths,
    power_rate,
    projective_rate,
)
from outer_rates.outer_geometry import RosePoint, candidates
from outer_rates.roots import family_spectral_ratio
from outer_rates.traintrack import family_maps, transition_matrix
from outer_rates.words import Automorphism, Word, cyclic_reduce, iterate, phi_family, printed_inverse


def test_positive_trajectory_is_exact_and_matches_words():
    phi, _ = phi_family(3, 5)
    t = iterate_lengths(phi, n_max=6)
    assert t.exact and not t.truncated
    window = candidates(3)
    for n in (0, 3, 6):
        assert t.rows[n] == [len(cyclic_reduce(iterate(phi, w, n))) for w in window]
    assert all(isinstance(x, int) for x in t.rows[-1])


def test_weighted_base_point():
    phi, _ = phi_family(3, 5)
    X = RosePoint.normalized([1, 2, 3])
    t = iterate_lengths(phi, n_max=3, base=X)
    assert not t.exact
    w = candidates(3)[0]
    assert t.rows[3][0] == pytest.approx(cyclic_reduce(iterate(phi, w, 3)).weighted_length(X.lengths))


def test_trajectory_csv():
    phi, _ = phi_family(3, 5)
    text = iterate_lengths(phi, [Word.generator(1, 3)], n_max=2).to_csv()
    assert text.splitlines() == ["n,class,length", "0,a1,1", "1,a1,6", "2,a1,31"]


def test_truncation_on_the_length_cap():
    g, _ = printed_inverse(3, 10)
    t = iterate_lengths(g, n_max=40, cap=10**4)
    assert t.truncated and t.n_max < 40


@pytest.mark.parametrize("N,k", [(3, 10), (4, 5), (5, 20)])
def test_power_rate_tracks_the_spectral_ratio(N, k):
    f, _ = family_maps(N, k)
    est = power_rate(transition_matrix(f))
    assert est.stride == 1
    assert est.rho / family_spectral_ratio(N, k, "P").ratio == pytest.approx(1.0, abs=0.05)


def test_power_rate_frozen_rank_three():
    f, _ = family_maps(3, 10)
    assert power_rate(transition_matrix(f)).rho == pytest.approx(31.2613332922057, rel=1e-9)


def test_power_rate_large_k_with_period_two_errors():
    f, _ = family_maps(3, 100)
    assert power_rate(transition_matrix(f)).rho == pytest.approx(1000.0, rel=0.01)


def test_power_rate_imprimitive_matrix_uses_stride_two():
    _, g = family_maps(4, 10)
    est = power_rate(transition_matrix(g))
    assert est.stride == 2


def test_power_rate_rejects_reducible_matrix():
    with pytest.raises(ValueError):
        power_rate([[1, 0], [0, 1]])


def test_word_rate_for_the_inverse_detects_alternation():
    g, _ = printed_inverse(3, 10)
    est = projective_rate(iterate_lengths(g, n_max=30, cap=10**6))
    assert est.stride == 2
    assert est.rho == pytest.approx(family_spectral_ratio(3, 10, "Q").ratio, rel=0.05)


def test_projective_rate_needs_enough_rows():
    phi, _ = phi_family(3, 10)
    with pytest.raises(RateError):
        projective_rate(iterate_lengths(phi, n_max=3))


def test_constant_trajectory_is_rejected():
    ident = Automorphism.identity(3)
    with pytest.raises(RateError):
        projective_rate(iterate_lengths(ident, n_max=10))


def test_rate_estimate_json():
    phi, _ = phi_family(3, 10)
    doc = projective_rate(iterate_lengths(phi, n_max=20)).to_json()
    assert set(doc) == {"rho_hat", "dispersion", "stride", "fitted_iterates"}
