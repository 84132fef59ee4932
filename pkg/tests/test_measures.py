"""Entropy-family measures against hand-computed and closed-form values."""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from infoflow.errors import (
    AbsoluteContinuityViolation,
    EmptyAxisSet,
    OverlappingAxisSets,
    TooFewParts,
)
from infoflow.measures import (
    EntropyCache,
    conditional_entropy,
    conditional_mutual_information,
    entropy,
    kl_divergence,
    marginal_entropy,
    multivariate_conditional_mi,
    multivariate_mutual_information,
    mutual_information,
    total_correlation,
)
from infoflow.table import AxisLabel, JointTable

# H(0.3) for the biased-coin check below
H_03 = -(0.3 * math.log2(0.3) + 0.7 * math.log2(0.7))  # = 0.8812908992306927


def coin(p1):
    return JointTable((AxisLabel(0, 1),), (2,), {(0,): 1.0 - p1, (1,): p1})


def uniform(axes, arities):
    cells = int(np.prod(arities))
    mass = {k: 1.0 / cells for k in np.ndindex(*arities)}
    return JointTable(axes, arities, mass)


def xor_table():
    # z = x XOR y with independent fair inputs
    axes = (AxisLabel(0, 1), AxisLabel(1, 1), AxisLabel(2, 1))
    mass = {(x, y, x ^ y): 0.25 for x in (0, 1) for y in (0, 1)}
    return JointTable(axes, (2, 2, 2), mass)


def random_table(seed, arities):
    rng = np.random.default_rng(seed)
    probs = rng.dirichlet(np.ones(int(np.prod(arities))))
    axes = tuple(AxisLabel(v, 1) for v in range(len(arities)))
    keys = list(np.ndindex(*arities))
    return JointTable(axes, arities, dict(zip(keys, probs.tolist())))


def test_entropy_fair_coin():
    assert entropy(coin(0.5)) == pytest.approx(1.0)


def test_entropy_biased_coin():
    assert entropy(coin(0.3)) == pytest.approx(H_03, abs=1e-15)
    assert entropy(coin(0.3)) == pytest.approx(0.8812908992306927, abs=1e-15)


def test_entropy_degenerate_is_zero():
    assert entropy(coin(0.0)) == 0.0


def test_marginal_entropy_empty_selection():
    assert marginal_entropy(xor_table(), ()) == 0.0


def test_conditional_entropy_xor():
    t = xor_table()
    # any single input leaves the output fully uncertain; both pin it
    assert conditional_entropy(t, [2], [0]) == pytest.approx(1.0)
    assert conditional_entropy(t, [2], [0, 1]) == pytest.approx(0.0, abs=1e-12)


def test_conditional_entropy_guards():
    t = xor_table()
    with pytest.raises(EmptyAxisSet):
        conditional_entropy(t, [], [0])
    with pytest.raises(OverlappingAxisSets):
        conditional_entropy(t, [0, 1], [1])


def test_mutual_information_xor_pairs():
    t = xor_table()
    # pairwise independent, jointly determined
    assert mutual_information(t, [0], [2]) == pytest.approx(0.0, abs=1e-12)
    assert mutual_information(t, [0, 1], [2]) == pytest.approx(1.0)


def test_mutual_information_perfect_copy():
    axes = (AxisLabel(0, 1), AxisLabel(1, 1))
    t = JointTable(axes, (2, 2), {(0, 0): 0.5, (1, 1): 0.5})
    assert mutual_information(t, [0], [1]) == pytest.approx(1.0)


def test_cmi_xor_is_synergistic():
    t = xor_table()
    assert conditional_mutual_information(t, [0], [2], [1]) == pytest.approx(1.0)


def test_total_correlation_xor():
    assert total_correlation(xor_table(), [[0], [1], [2]]) == pytest.approx(1.0)


def test_multivariate_mi_xor_negative():
    # three-way interaction information of XOR is -1 bit
    assert multivariate_mutual_information(
        xor_table(), [[0], [1], [2]]
    ) == pytest.approx(-1.0)


def test_multivariate_mi_needs_two_parts():
    with pytest.raises(TooFewParts):
        multivariate_mutual_information(xor_table(), [[0]])


def test_multivariate_conditional_mi_reduces_to_cmi():
    t = random_table(11, (2, 2, 2))
    direct = conditional_mutual_information(t, [0], [1], [2])
    via_mmi = multivariate_conditional_mi(t, [[0], [1]], [2])
    assert via_mmi == pytest.approx(direct, abs=1e-12)


def test_independence_gives_zero_tc():
    t = uniform(tuple(AxisLabel(v, 1) for v in range(3)), (2, 3, 2))
    assert total_correlation(t, [[0], [1], [2]]) == pytest.approx(0.0, abs=1e-12)
    assert mutual_information(t, [0], [1, 2]) == pytest.approx(0.0, abs=1e-12)


def test_kl_divergence_known_value():
    p = coin(0.5)
    q = coin(0.25)
    # 0.5*log2(2) + 0.5*log2(2/3) pattern against the 1/4-3/4 reference
    expect = 0.5 * math.log2(0.5 / 0.75) + 0.5 * math.log2(0.5 / 0.25)
    assert kl_divergence(p, q) == pytest.approx(expect, abs=1e-15)
    assert kl_divergence(p, p) == 0.0


def test_kl_divergence_support_violation():
    with pytest.raises(AbsoluteContinuityViolation):
        kl_divergence(coin(0.5), coin(0.0))


def test_entropy_cache_matches_direct():
    t = random_table(23, (2, 2, 2))
    cache = EntropyCache(t)
    for axes in [(0,), (1,), (0, 1), (0, 1, 2)]:
        assert cache.h(frozenset(axes)) == pytest.approx(
            marginal_entropy(t, axes), abs=1e-15
        )
    # cached call returns the identical float
    first = cache.h(frozenset({0, 1}))
    assert cache.h(frozenset({0, 1})) == first


def test_entropy_cache_co_information():
    t = random_table(29, (2, 2, 2))
    cache = EntropyCache(t)
    got = cache.co_information([frozenset({0}), frozenset({1})], frozenset({2}))
    want = conditional_mutual_information(t, [0], [1], [2])
    assert got == pytest.approx(want, abs=1e-12)


@settings(max_examples=60, deadline=None, derandomize=True)
@given(st.integers(0, 10_000))
def test_information_inequalities_random(seed):
    t = random_table(seed, (2, 2, 2))
    h01 = marginal_entropy(t, [0, 1])
    h0 = marginal_entropy(t, [0])
    h1 = marginal_entropy(t, [1])
    # subadditivity and monotonicity
    assert h01 <= h0 + h1 + 1e-12
    assert h01 >= max(h0, h1) - 1e-12
    assert mutual_information(t, [0], [1]) >= -1e-12
    assert conditional_mutual_information(t, [0], [1], [2]) >= -1e-12
    # conditioning cannot raise entropy
    assert conditional_entropy(t, [0], [1, 2]) <= h0 + 1e-12


@settings(max_examples=40, deadline=None, derandomize=True)
@given(st.integers(0, 10_000))
def test_chain_rule_random(seed):
    t = random_table(seed, (2, 3, 2))
    lhs = entropy(t)
    rhs = (
        marginal_entropy(t, [0])
        + conditional_entropy(t, [1], [0])
        + conditional_entropy(t, [2], [0, 1])
    )
    assert lhs == pytest.approx(rhs, abs=1e-11)
