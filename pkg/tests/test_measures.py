import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st
from scipy.stats import chi2_contingency

from capclass.measures import (chi2_2x2, gini, ig_exact, ig_item, ig_node, min_count,
                               rule_stats)

counts = st.lists(st.integers(0, 50), min_size=2, max_size=5)
nonempty = counts.filter(lambda c: sum(c) > 0)


@pytest.mark.parametrize("freqs, expected", [([3, 3], 0.5), ([3, 1], 0.375), ([2, 0], 0.0),
                                             ([0, 0], 0.0), ([1, 1, 1, 1], 0.75)])
def test_gini_examples(freqs, expected):
    assert gini(freqs) == pytest.approx(expected, abs=1e-12)


@pytest.mark.parametrize("item, expected", [([3, 1], 0.08333), ([3, 3], 0.0), ([3, 2], 0.01667)])
def test_ig_item_examples(item, expected):
    assert ig_item(item, [3, 3]) == pytest.approx(expected, abs=1e-5)


@pytest.mark.parametrize("node, parent, expected", [([1, 1], [3, 1], -0.0625),
                                                    ([2, 0], [3, 1], 0.1875),
                                                    ([0, 2], [3, 3], 0.16667)])
def test_ig_node_examples(node, parent, expected):
    assert ig_node(node, parent) == pytest.approx(expected, abs=1e-5)


def test_empty_reference_rejected():
    with pytest.raises(ValueError):
        ig_item([1, 0], [0, 0])
    with pytest.raises(ValueError):
        ig_node([1, 0], [0, 0])
    with pytest.raises(ValueError):
        rule_stats([0, 0], 0, [3, 3])


def test_rule_stats_examples():
    s = rule_stats([1, 3], 1, [3, 3])
    assert (s.support, s.confidence) == (0.5, 0.75)
    assert s.chi2 == pytest.approx(3.0)
    s = rule_stats([3, 0], 0, [3, 3])
    assert (s.support, s.confidence) == (0.5, 1.0)
    assert s.chi2 == pytest.approx(6.0)


@given(nonempty)
def test_gini_bounds(freqs):
    c = len(freqs)
    assert -1e-12 <= gini(freqs) <= 1 - 1 / c + 1e-12


@given(nonempty, st.data())
def test_ig_item_matches_weighted_gini_definition(dataset, data):
    # item counts are a sub-multiset of the dataset counts
    item = [data.draw(st.integers(0, c)) for c in dataset]
    n = sum(dataset)
    direct = (sum(item) / n) * ((1 - sum((c / n) ** 2 for c in dataset))
                                - (1 - sum((c / sum(item)) ** 2 for c in item) if sum(item) else 0))
    assert ig_item(item, dataset) == pytest.approx(direct, abs=1e-12)
    assert float(ig_exact(item, dataset)) == pytest.approx(direct, abs=1e-12)


@given(nonempty, st.data())
def test_ig_sign_agrees_with_exact(dataset, data):
    item = [data.draw(st.integers(0, c)) for c in dataset]
    exact = ig_exact(item, dataset)
    approx = ig_item(item, dataset)
    assert isinstance(exact, Fraction)
    if exact > 0:
        assert approx > -1e-12
    elif exact < 0:
        assert approx < 1e-12


@given(st.integers(1, 10_000), st.floats(0.0001, 1.0))
def test_min_count_matches_float_threshold(n, minsup):
    k = min_count(minsup, n)
    assert k / n >= minsup
    assert k == 0 or (k - 1) / n < minsup


@given(st.integers(0, 40), st.integers(0, 40), st.integers(0, 40), st.integers(0, 40))
def test_chi2_matches_scipy(a, b, c, d):
    table = [[a, b], [c, d]]
    ours = chi2_2x2(a, b, c, d)
    assert ours >= 0
    if min(a + b, c + d, a + c, b + d) == 0:
        assert ours == 0.0
    else:
        ref = chi2_contingency(table, correction=False)[0]
        assert ours == pytest.approx(ref, rel=1e-9, abs=1e-9)


@given(nonempty, st.data())
def test_rule_stats_ranges(dataset, data):
    rule = [data.draw(st.integers(0, c)) for c in dataset]
    if sum(rule) == 0:
        return
    cls = data.draw(st.integers(0, len(dataset) - 1))
    s = rule_stats(rule, cls, dataset)
    assert 0 <= s.support <= s.confidence <= 1
    assert math.isfinite(s.chi2) and s.chi2 >= 0
