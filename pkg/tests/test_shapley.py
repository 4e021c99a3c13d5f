import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from shotprs.shapley import (
    EmptySupport, MissingWorth, RestrictedSupport, SupportIndex, TooLarge, classical_shapley, restricted_shapley,
    restricted_weights,
)


def permutation_oracle(n, v):
    """Average marginal contribution over all n! orderings."""
    phi = np.zeros(n)
    for order in itertools.permutations(range(n)):
        mask = 0
        for i in order:
            phi[i] += v[mask | 1 << i] - v[mask]
            mask |= 1 << i
    return phi / math.factorial(n)


def random_game(rng, n):
    v = rng.normal(size=1 << n)
    v[0] = 0.0
    return v


def full_supports(n):
    return {i: RestrictedSupport(i, tuple(m for m in range(1 << n) if not m >> i & 1)) for i in range(n)}


def test_glove_game():
    def v(mask):
        return float(bool(mask & 1) and bool(mask & 0b110))

    res = classical_shapley(3, v)
    np.testing.assert_allclose(res.phi, [2 / 3, 1 / 6, 1 / 6], atol=1e-12)
    np.testing.assert_allclose(res.phi, permutation_oracle(3, [v(m) for m in range(8)]), atol=1e-12)


def test_additive_game():
    w = np.array([0.3, -1.2, 2.5, 0.7])
    v = [sum(w[j] for j in range(4) if m >> j & 1) for m in range(16)]
    np.testing.assert_allclose(classical_shapley(4, v).phi, w, atol=1e-12)


def test_null_player():
    rng = np.random.default_rng(0)
    base = random_game(rng, 3)
    # player 3 (bit 3) adds nothing
    v = [base[m & 0b111] for m in range(16)]
    assert abs(classical_shapley(4, v).phi[3]) < 1e-12


@pytest.mark.parametrize("n", [3, 4, 5, 6])
def test_matches_permutation_oracle(n):
    rng = np.random.default_rng(n)
    for _ in range(5):
        v = random_game(rng, n)
        res = classical_shapley(n, v)
        np.testing.assert_allclose(res.phi, permutation_oracle(n, v), atol=1e-9)
        assert abs(res.phi.sum() - (v[-1] - v[0])) < 1e-9


def test_too_large():
    with pytest.raises(TooLarge):
        classical_shapley(21, lambda m: 0.0)


def test_weights_hand_value():
    np.testing.assert_allclose(restricted_weights(3, [0b010, 0b110]), [1 / 3, 2 / 3], atol=1e-12)


def test_single_coalition_weight():
    assert restricted_weights(7, [0b101]).tolist() == [1.0]


def test_full_support_weights_are_classical():
    n = 5
    sup = [m for m in range(1 << n) if not m & 1]
    w = restricted_weights(n, sup)
    raw = [math.factorial(bin(m).count("1")) * math.factorial(n - bin(m).count("1") - 1) / math.factorial(n)
           for m in sup]
    np.testing.assert_allclose(w, raw, atol=1e-15)
    assert abs(w.sum() - 1) < 1e-12


def test_empty_support():
    with pytest.raises(EmptySupport):
        restricted_weights(3, [])


def test_large_n_weights_finite():
    w = restricted_weights(60, [0, (1 << 30) - 1, (1 << 59) - 1])
    assert np.all(w > 0) and abs(w.sum() - 1) < 1e-12


@settings(max_examples=200, deadline=None)
@given(st.integers(2, 20).flatmap(lambda n: st.tuples(
    st.just(n), st.sets(st.integers(0, (1 << (n - 1)) - 1), min_size=1, max_size=40))))
def test_weights_normalized(case):
    n, masks = case
    w = restricted_weights(n, sorted(m << 1 for m in masks))
    assert np.all(w > 0)
    assert abs(w.sum() - 1.0) < 1e-12


def test_hand_worked_restricted():
    # players 1,2,3 -> bits 0,1,2
    worth = {0b011: 0.3, 0b010: 0.1, 0b111: 0.5, 0b110: 0.2}
    res = restricted_shapley(3, {0: RestrictedSupport(0, (0b010, 0b110))}, worth, [0])
    assert abs(res.phi[0] - (0.2 / 3 + 2 * 0.3 / 3)) < 1e-12
    assert round(res.phi[0], 4) == 0.2667


def test_single_coalition_support():
    res = restricted_shapley(4, {2: RestrictedSupport(2, (0b0011,))}, {0b0011: 0.4, 0b0111: 1.1}, [2])
    assert abs(res.phi[0] - 0.7) < 1e-15


@pytest.mark.parametrize("n", [3, 4, 5, 6])
def test_restricted_reduces_to_classical(n):
    rng = np.random.default_rng(100 + n)
    for _ in range(5):
        v = random_game(rng, n)
        worth = dict(enumerate(v))
        res = restricted_shapley(n, full_supports(n), worth)
        np.testing.assert_allclose(res.phi, classical_shapley(n, v).phi, atol=1e-9)


def test_missing_player_reported():
    res = restricted_shapley(3, {0: RestrictedSupport(0, (0,))}, {0: 0.0, 1: 0.5}, [0, 1])
    assert res.phi[0] == 0.5
    assert math.isnan(res.phi[1])
    assert res.missing == (1,)


def test_missing_worth():
    with pytest.raises(MissingWorth):
        restricted_shapley(3, {0: RestrictedSupport(0, (0b010,))}, {0b010: 0.1}, [0])


def test_symmetry_on_restricted_support():
    # players 0 and 1 have mirrored supports and equal marginals
    worth = {0: 0.0, 0b001: 0.4, 0b010: 0.4, 0b100: 0.1, 0b101: 0.6, 0b110: 0.6}
    supports = {0: RestrictedSupport(0, (0, 0b100)), 1: RestrictedSupport(1, (0, 0b100))}
    res = restricted_shapley(3, supports, worth, [0, 1])
    assert res.phi[0] == res.phi[1]


def test_linearity_and_scaling():
    rng = np.random.default_rng(5)
    n = 5
    supports = {}
    for i in range(n):
        cand = [m for m in range(1 << n) if not m >> i & 1]
        supports[i] = RestrictedSupport(i, tuple(sorted(rng.choice(cand, 6, replace=False).tolist())))
    v, u = random_game(rng, n), random_game(rng, n)
    phi = lambda w: restricted_shapley(n, supports, dict(enumerate(w))).phi
    np.testing.assert_allclose(phi(2.5 * v - 0.7 * u), 2.5 * phi(v) - 0.7 * phi(u), atol=1e-12)
    np.testing.assert_allclose(phi(3.0 * v), 3.0 * phi(v), rtol=1e-12, atol=1e-14)


def test_support_index_matches_mapping():
    rng = np.random.default_rng(9)
    n = 6
    v = random_game(rng, n)
    sup = full_supports(n)
    sup.pop(4)
    coalitions = list(range(1 << n))
    idx = SupportIndex(n, sup, coalitions, range(n))
    ref = restricted_shapley(n, sup, dict(enumerate(v)))
    out = idx.evaluate(v)
    np.testing.assert_allclose(out, ref.phi, atol=1e-12)
    stacked = idx.evaluate(np.stack([v, 2 * v]))
    np.testing.assert_allclose(stacked[1], 2 * out, atol=1e-12)
