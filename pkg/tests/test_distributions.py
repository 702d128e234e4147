import math

import numpy as np
import pytest
import scipy.special as sp
import scipy.stats as ss
from hypothesis import given, settings
from hypothesis import strategies as st

from peerassess.errors import ParameterOutOfRange
from peerassess.stats.distributions import (
    betainc,
    f_cdf,
    f_quantile,
    f_sf,
    studentized_range_cdf,
    studentized_range_quantile,
    t_cdf,
    t_quantile,
    t_two_tailed_p,
)

P_GRID = np.linspace(0.005, 0.995, 100)


@pytest.mark.parametrize("a,b", [(0.5, 0.5), (1, 1), (2.5, 7), (30, 0.5), (200, 150), (0.1, 40)])
def test_betainc_matches_scipy(a, b):
    for x in np.linspace(0, 1, 41):
        assert betainc(a, b, x) == pytest.approx(sp.betainc(a, b, x), abs=1e-12)


@pytest.mark.parametrize("df", [1, 2.5, 7, 30, 1000])
def test_t_cdf_matches_scipy(df):
    for x in np.linspace(-8, 8, 33):
        assert t_cdf(x, df) == pytest.approx(ss.t.cdf(x, df), abs=1e-12)
    assert t_two_tailed_p(2.0, df) == pytest.approx(2 * ss.t.sf(2.0, df), rel=1e-10)


@pytest.mark.parametrize("d1,d2", [(1, 1), (2, 10), (3, 120), (40, 7), (123, 370)])
def test_f_cdf_matches_scipy(d1, d2):
    for x in np.linspace(0, 10, 41):
        assert f_cdf(x, d1, d2) == pytest.approx(ss.f.cdf(x, d1, d2), abs=1e-12)
        assert f_sf(x, d1, d2) == pytest.approx(ss.f.sf(x, d1, d2), abs=1e-12)


@pytest.mark.parametrize("df", [1, 3, 12, 200])
def test_t_cdf_zero_is_half(df):
    assert t_cdf(0.0, df) == 0.5


@pytest.mark.parametrize("d", [1, 4, 25, 300])
def test_f_median_equal_df(d):
    assert f_quantile(0.5, d, d) == pytest.approx(1.0, abs=1e-10)


@pytest.mark.parametrize("d1,d2", [(1, 1), (2, 5), (4, 200), (123, 370), (600, 3)])
def test_f_quantile_cdf_identity(d1, d2):
    for p in P_GRID:
        assert f_cdf(f_quantile(p, d1, d2), d1, d2) == pytest.approx(p, abs=1e-8)


@pytest.mark.parametrize("df", [1, 2, 5, 30, 1e4])
def test_t_quantile_cdf_identity(df):
    for p in P_GRID:
        assert t_cdf(t_quantile(p, df), df) == pytest.approx(p, abs=1e-8)


def test_quantiles_match_scipy():
    assert f_quantile(0.975, 122, 123) == pytest.approx(ss.f.ppf(0.975, 122, 123), rel=1e-10)
    assert t_quantile(0.975, 9) == pytest.approx(ss.t.ppf(0.975, 9), rel=1e-9)


@pytest.mark.parametrize("df", [2, 5, 17.5, 60, 1000, 1e5])
def test_studentized_range_two_group_identity(df):
    for q in np.linspace(0.05, 8, 40):
        expected = 2 * t_cdf(q / math.sqrt(2), df) - 1
        assert studentized_range_cdf(q, 2, df) == pytest.approx(expected, abs=1e-6)


@pytest.mark.parametrize("k,df", [(3, 5), (3, 40), (4, 12), (6, 100), (10, 3000)])
def test_studentized_range_matches_scipy(k, df):
    # scipy's own integration degrades for very large df, so stay below ~1e4
    for q in np.linspace(0.2, 7, 15):
        assert studentized_range_cdf(q, k, df) == pytest.approx(ss.studentized_range.cdf(q, k, df), abs=1e-6)


def test_studentized_range_infinite_df():
    # normal range law of two variables: P(|Z1 - Z2| <= q) = 2 Phi(q / sqrt 2) - 1
    q = 1.7
    assert studentized_range_cdf(q, 2, math.inf) == pytest.approx(2 * sp.ndtr(q / math.sqrt(2)) - 1, abs=1e-9)


def test_studentized_range_quantile_roundtrip():
    for p in (0.5, 0.9, 0.95, 0.99):
        q = studentized_range_quantile(p, 3, 25)
        assert studentized_range_cdf(q, 3, 25) == pytest.approx(p, abs=1e-9)


@pytest.mark.parametrize(
    "fn,args",
    [
        (lambda x: t_cdf(x, 4), np.linspace(-30, 30, 400)),
        (lambda x: f_cdf(x, 3, 8), np.linspace(0, 40, 400)),
        (lambda x: studentized_range_cdf(x, 4, 9), np.linspace(0, 12, 120)),
    ],
)
def test_cdfs_monotone_and_bounded(fn, args):
    values = np.array([fn(x) for x in args])
    assert np.all(np.diff(values) >= -1e-15)
    assert np.all((values >= 0) & (values <= 1))


@settings(max_examples=60, deadline=None)
@given(
    st.floats(0.5, 500),
    st.floats(0.5, 500),
    st.floats(0, 50),
    st.floats(0, 50),
)
def test_f_cdf_monotone_property(d1, d2, x, y):
    lo, hi = sorted((x, y))
    assert 0.0 <= f_cdf(lo, d1, d2) <= f_cdf(hi, d1, d2) + 1e-15 <= 1.0 + 1e-15


@pytest.mark.parametrize(
    "call",
    [
        lambda: t_cdf(0, 0),
        lambda: f_cdf(1, -1, 3),
        lambda: f_quantile(1.0, 2, 3),
        lambda: t_quantile(0.0, 3),
        lambda: studentized_range_cdf(1.0, 1, 5),
        lambda: studentized_range_cdf(-1.0, 3, 5),
    ],
)
def test_parameter_errors(call):
    with pytest.raises(ParameterOutOfRange):
        call()
