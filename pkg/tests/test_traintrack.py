from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from outer_rates.intpoly import P, char_poly, poly_family
from outer_rates.roots import bracket_real_root
from outer_rates.traintrack import (
    ConvergenceError,
    GraphMap,
    direction_map,
    family_maps,
    full_irreducibility_report,
    gates,
    is_illegal,
    is_irreducible,
    is_primitive,
    is_train_track,
    local_whitehead_graph,
    pf_eigen,
    taken_turns,
    transition_matrix,
)
from outer_rates.words import Automorphism, Word, compose, printed_inverse, reduce


def immersed_iterates(m: GraphMap, n: int, cap: int = 20_000) -> bool:
    """Oracle: no cancellation when substituting edge images letter by letter."""
    images = {i: list(w.letters()) for i, w in enumerate(m.edge_images, start=1)}
    images.update({-i: [-x for x in reversed(v)] for i, v in list(images.items())})
    for e in range(1, m.rank + 1):
        word = [e]
        for _ in range(n):
            word = [y for x in word for y in images[x]]
            if len(list(reduce(word, m.rank).letters())) != len(word):
                return False
            if len(word) > cap:
                break
    return True


def test_matrices_for_rank_three():
    f, g = family_maps(3, 10)
    assert transition_matrix(f) == [[10, 0, 1], [1, 0, 0], [0, 1, 0]]
    assert transition_matrix(g) == [[0, 1, 0], [0, 0, 1], [1, 10, 0]]


def test_direction_map_examples():
    f, g = family_maps(3, 10)
    Df, Dg = direction_map(f), direction_map(g)
    assert Df[1] == 1 and Df[-1] == -3
    assert Dg[3] == -2 and Dg[-3] == -1


def test_seed_turns_rank_three():
    f, g = family_maps(3, 10)
    assert {(-1, 1), (-1, 3)} <= taken_turns(f)
    assert {(-2, 2), (1, 2)} <= taken_turns(g)


@pytest.mark.parametrize("N", range(3, 9))
def test_gate_shapes(N):
    f, g = family_maps(N, 10)
    assert gates(f) == sorted([list(range(1, N + 1))] + [[-i] for i in range(1, N + 1)])
    gg = gates(g)
    assert len(gg) == N
    assert gg == sorted(sorted([-i, (i + 1) % N + 1]) for i in range(1, N + 1))
    assert all(is_illegal((i, j), gates(f)) for i in range(1, N + 1) for j in range(i + 1, N + 1))


@pytest.mark.parametrize("N", range(3, 9))
def test_exact_inverse_gates_pair_with_the_previous_generator(N):
    _, g = family_maps(N, 10, "exact")
    assert gates(g) == sorted(sorted([-i, (i - 2) % N + 1]) for i in range(1, N + 1))


def test_identity_map():
    ident = GraphMap.from_automorphism(Automorphism.identity(3))
    assert gates(ident) == [[d] for d in sorted(ident.directions())]
    assert taken_turns(ident) == set()
    assert not local_whitehead_graph(ident).connected


@pytest.mark.parametrize("variant", ["printed", "exact"])
@pytest.mark.parametrize("N", range(3, 9))
@pytest.mark.parametrize("k", [3, 7, 12])
def test_train_track_agrees_with_the_immersion_oracle(variant, N, k):
    f, g = family_maps(N, k, variant)
    for m in (f, g):
        ok, witness = is_train_track(m)
        assert ok and witness is None
        assert immersed_iterates(m, 5)


def test_conjugation_example_is_a_train_track():
    # a1 -> a1 a2 A1, a2 -> a2 has no cancellation in any iterate on edges
    m = GraphMap(2, (Word.parse("a1 a2 A1", 2), Word.parse("a2", 2)))
    assert is_train_track(m) == (True, None)
    assert immersed_iterates(m, 8)


def test_a_non_train_track_map():
    # Df(a2) = A1 = Df(A1), and the turn {A1, a2} is taken inside the image of a2
    m = GraphMap(2, (Word.parse("a2 a1", 2), Word.parse("A1 a2 a2", 2)))
    ok, witness = is_train_track(m)
    assert ok == immersed_iterates(m, 6)
    assert (ok, witness) == (False, (-1, 2))


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 3).flatmap(lambda n: st.tuples(st.just(n), st.lists(
    st.lists(st.integers(1, n).flatmap(lambda g: st.sampled_from([g, -g])), min_size=1, max_size=4),
    min_size=n, max_size=n))))
def test_train_track_property_matches_oracle(data):
    n, raw = data
    words = [reduce(r, n) for r in raw]
    if any(not w for w in words):
        return
    m = GraphMap(n, tuple(words))
    assert is_train_track(m)[0] == immersed_iterates(m, 6)


@pytest.mark.parametrize("N", range(3, 9))
def test_taken_turns_are_closed_under_the_direction_map(N):
    f, g = family_maps(N, 10)
    for m in (f, g):
        D = direction_map(m)
        T = taken_turns(m)
        for a, b in T:
            if D[a] != D[b]:
                assert tuple(sorted((D[a], D[b]))) in T


@pytest.mark.parametrize("N", range(3, 9))
def test_primitivity_and_whitehead_by_parity(N):
    f, g = family_maps(N, 10)
    A, B = transition_matrix(f), transition_matrix(g)
    assert is_primitive(A)[0]
    assert local_whitehead_graph(f).connected
    assert is_irreducible(B)
    # printed g: the support graph of B has cycles of lengths N and 2
    assert is_primitive(B)[0] == (N % 2 == 1)
    assert local_whitehead_graph(g).connected == (N % 2 == 1)
    fe, ge = family_maps(N, 10, "exact")
    assert is_primitive(transition_matrix(ge))[0]
    assert local_whitehead_graph(ge).connected


@pytest.mark.parametrize("N", [4, 6, 8])
def test_printed_square_preserves_the_odd_free_factor(N):
    g, _ = printed_inverse(N, 10)
    g2 = compose(g, g)
    odd = set(range(1, N + 1, 2))
    for i in odd:
        assert {gen for gen, _ in g2.images[i - 1].runs} <= odd


def test_primitivity_power_rank_three():
    f, _ = family_maps(3, 10)
    ok, m = is_primitive(transition_matrix(f))
    assert ok and m <= 5


def test_cycle_permutation_is_not_primitive():
    assert is_primitive([[0, 1, 0], [0, 0, 1], [1, 0, 0]]) == (False, None)


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 4).flatmap(lambda n: st.lists(st.lists(st.integers(0, 2), min_size=n, max_size=n),
                                                     min_size=n, max_size=n)))
def test_primitivity_matches_brute_powers(M):
    A = np.array(M, dtype=object)
    n = len(M)
    P_ = np.eye(n, dtype=object)
    brute = False
    for _ in range((n - 1) ** 2 + 1):
        P_ = P_.dot(A)
        if all(x > 0 for x in P_.flat):
            brute = True
            break
    assert is_primitive(M)[0] == brute


def test_pf_eigen_rank_three():
    f, g = family_maps(3, 10)
    ea = pf_eigen(transition_matrix(f), pivot=2)
    eb = pf_eigen(transition_matrix(g), pivot=0)
    lam = bracket_real_root(poly_family(3, 10, P), 10, 11).mid
    assert ea.value == pytest.approx(10.00998007, abs=1e-8)
    assert ea.value == pytest.approx(lam, rel=1e-13)
    assert np.allclose(ea.vector, [lam ** 2, lam, 1], rtol=1e-12)
    assert eb.value == pytest.approx(3.2111393532786, abs=1e-12)
    assert eb.residual <= 1e-12


def test_pf_eigen_rejects_reducible_input():
    with pytest.raises(ValueError):
        pf_eigen(np.eye(3))


def test_pf_eigen_iteration_cap():
    f, _ = family_maps(3, 10)
    with pytest.raises(ConvergenceError):
        pf_eigen(transition_matrix(f), max_iter=2)


@pytest.mark.parametrize("N,k", [(3, 10), (4, 5), (5, 3), (6, 12)])
def test_full_irreducibility_report(N, k):
    exact = full_irreducibility_report(N, k, "exact")
    printed = full_irreducibility_report(N, k, "printed")
    assert exact.passed
    assert printed.passed == (N % 2 == 1)
    doc = printed.to_json()
    assert doc["nielsen_paths"] == "UNVERIFIED"
    assert doc["stretch_factors_differ"] is True
    assert doc["char_poly_B"] == str(char_poly(transition_matrix(family_maps(N, k)[1])))
    # the exact inverse has characteristic polynomial x^N - k x - 1
    assert char_poly(exact.to_json()["B"]).descending() == [1] + [0] * (N - 2) + [-k, -1]


def test_full_irreducibility_report_rejects_small_k():
    with pytest.raises(ValueError):
        full_irreducibility_report(3, 2)
