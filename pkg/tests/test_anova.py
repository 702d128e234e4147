import numpy as np
import pytest
import scipy.stats as ss
from hypothesis import assume, given, settings
from hypothesis import strategies as st
from statsmodels.stats.oneway import anova_oneway

from oracles import games_howell_oracle, welch_t_oracle
from peerassess.errors import InvalidAlpha, TooFewGroups, ZeroVarianceGroup
from peerassess.stats.anova import GroupSample, games_howell, welch_anova

RNG = np.random.default_rng(7)
THREE = [
    GroupSample("dislike", RNG.normal(-0.4, 0.6, 40)),
    GroupSample("neutral", RNG.normal(0.0, 1.0, 120)),
    GroupSample("like", RNG.normal(0.3, 1.5, 25)),
]


def test_equal_means_give_zero_f():
    base = [1.0, 2.0, 3.0, 4.0]
    r = welch_anova([GroupSample(str(i), base) for i in range(3)])
    assert r.f == pytest.approx(0.0, abs=1e-15) and r.p == pytest.approx(1.0)


def test_two_groups_equal_squared_welch_t():
    a, b = RNG.normal(0, 1, 15), RNG.normal(0.8, 2, 22)
    r = welch_anova([GroupSample("a", a), GroupSample("b", b)])
    t, df = welch_t_oracle(a.tolist(), b.tolist())
    assert r.f == pytest.approx(t * t, rel=1e-12)
    assert r.df2 == pytest.approx(df, rel=1e-12)
    assert r.p == pytest.approx(ss.ttest_ind(a, b, equal_var=False).pvalue, abs=1e-9)


def test_three_groups_match_reference():
    ref = anova_oneway([g.values for g in THREE], use_var="unequal", welch_correction=True)
    r = welch_anova(THREE)
    assert r.f == pytest.approx(ref.statistic, abs=1e-6)
    assert r.df2 == pytest.approx(ref.df[1], abs=1e-6)
    assert r.p == pytest.approx(ref.pvalue, abs=1e-6)


def test_games_howell_two_groups_match_welch_t():
    a, b = RNG.normal(0, 1, 12), RNG.normal(0.9, 1.7, 30)
    (pair,) = games_howell([GroupSample("a", a), GroupSample("b", b)])
    t, _ = welch_t_oracle(a.tolist(), b.tolist())
    assert pair.q == pytest.approx(np.sqrt(2) * abs(t), rel=1e-12)
    assert pair.p == pytest.approx(ss.ttest_ind(a, b, equal_var=False).pvalue, abs=1e-4)
    # with two groups the interval is the Welch t interval
    lo, hi = ss.ttest_ind(b, a, equal_var=False).confidence_interval()
    assert pair.ci == pytest.approx((lo, hi), abs=1e-4)


def test_games_howell_three_groups_match_reference():
    got = games_howell(THREE)
    ref = games_howell_oracle([list(g.values) for g in THREE])
    for pair, (diff, p, ci) in zip(got, ref):
        assert pair.mean_diff == pytest.approx(diff, abs=1e-12)
        assert pair.p == pytest.approx(p, abs=1e-4)
        assert pair.ci == pytest.approx(ci, abs=1e-4)
    assert [(p.group_a, p.group_b) for p in got] == [("dislike", "neutral"), ("dislike", "like"), ("neutral", "like")]


def test_identical_groups():
    vals = [1.0, 2.0, 4.0, 7.0]
    (pair,) = games_howell([GroupSample("a", vals), GroupSample("b", vals)])
    assert pair.mean_diff == 0.0 and pair.p == pytest.approx(1.0, abs=1e-9)
    assert pair.ci[0] == pytest.approx(-pair.ci[1])


def test_validation():
    with pytest.raises(TooFewGroups):
        welch_anova([GroupSample("a", [1, 2])])
    with pytest.raises(TooFewGroups):
        welch_anova([GroupSample("a", [1, 2]), GroupSample("b", [1])])
    with pytest.raises(ZeroVarianceGroup):
        welch_anova([GroupSample("a", [1, 2]), GroupSample("b", [3, 3])])
    with pytest.raises(InvalidAlpha):
        games_howell(THREE, 0.0)


samples = st.lists(st.floats(-10, 10, allow_nan=False), min_size=3, max_size=12)


@settings(max_examples=60, deadline=None)
@given(st.lists(samples, min_size=2, max_size=4), st.floats(-50, 50), st.floats(0.1, 20))
def test_welch_shift_and_scale_invariance(groups, shift, scale):
    assume(all(np.var(g) > 1e-3 for g in groups))
    base = welch_anova([GroupSample(str(i), g) for i, g in enumerate(groups)])
    moved = welch_anova([GroupSample(str(i), [v + shift for v in g]) for i, g in enumerate(groups)])
    scaled = welch_anova([GroupSample(str(i), [v * scale for v in g]) for i, g in enumerate(groups)])
    assert moved.f == pytest.approx(base.f, rel=1e-6, abs=1e-9)
    assert scaled.f == pytest.approx(base.f, rel=1e-6, abs=1e-9)


@settings(max_examples=25, deadline=None)
@given(st.lists(samples, min_size=3, max_size=4), st.sampled_from([0.01, 0.05, 0.2]))
def test_games_howell_penalty_and_intervals(groups, alpha):
    assume(all(np.var(g) > 1e-3 for g in groups))
    gs = [GroupSample(str(i), g) for i, g in enumerate(groups)]
    pairs = games_howell(gs, alpha)
    wider = games_howell(gs, alpha / 2)
    by_label = {g.label: g for g in gs}
    for pair, wide in zip(pairs, wider):
        a, b = by_label[pair.group_a], by_label[pair.group_b]
        welch_p = ss.ttest_ind(a.values, b.values, equal_var=False).pvalue
        assert pair.p >= welch_p - 1e-6
        assert pair.ci[0] <= pair.mean_diff <= pair.ci[1]
        assert wide.ci[0] <= pair.ci[0] and wide.ci[1] >= pair.ci[1]
