"""Distribution functions for the F, Student t and studentized range laws.

The F and t laws are expressed through the regularized incomplete beta
function, evaluated with a modified-Lentz continued fraction.  Quantiles
are found by Newton iteration safeguarded with bisection.  The studentized
range CDF is a double integral: an outer integral over the density of the
scale factor ``s = sqrt(chi2_df / df)`` and an inner integral giving the
CDF of the range of ``k`` standard normals.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.optimize import brentq
from scipy.special import ndtr

from ..errors import NonConvergence, ParameterOutOfRange

MAX_ITER = 200
_CF_MAX_ITER = 100_000
_CF_EPS = 1e-16
_TINY = 1e-300


def _check_df(*dfs: float) -> None:
    for df in dfs:
        if not df > 0 or math.isnan(df):
            raise ParameterOutOfRange(f"degrees of freedom must be > 0, got {df}")


def _check_p(p: float) -> None:
    if not 0.0 < p < 1.0:
        raise ParameterOutOfRange(f"probability must lie in (0, 1), got {p}")


def _log_beta(a: float, b: float) -> float:
    return math.lgamma(a) + math.lgamma(b) - math.lgamma(a + b)


def _beta_cf(a: float, b: float, x: float) -> float:
    """Continued fraction for I_x(a, b), modified Lentz method."""
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _TINY:
        d = _TINY
    d = 1.0 / d
    h = d
    for m in range(1, _CF_MAX_ITER + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _TINY:
            d = _TINY
        c = 1.0 + aa / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _TINY:
            d = _TINY
        c = 1.0 + aa / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _CF_EPS:
            return h
    raise NonConvergence(f"incomplete beta continued fraction did not converge (a={a}, b={b}, x={x})")


def betainc(a: float, b: float, x: float) -> float:
    """Regularized incomplete beta function I_x(a, b)."""
    if a <= 0 or b <= 0:
        raise ParameterOutOfRange(f"betainc needs a, b > 0, got a={a}, b={b}")
    if not 0.0 <= x <= 1.0:
        raise ParameterOutOfRange(f"betainc needs 0 <= x <= 1, got {x}")
    if x == 0.0 or x == 1.0:
        return x
    log_front = a * math.log(x) + b * math.log1p(-x) - _log_beta(a, b)
    if x < (a + 1.0) / (a + b + 2.0):
        return math.exp(log_front) * _beta_cf(a, b, x) / a
    return 1.0 - math.exp(log_front) * _beta_cf(b, a, 1.0 - x) / b


# --- Student t ---------------------------------------------------------------


def _t_tail(x: float, df: float) -> float:
    """P(T > |x|)."""
    return 0.5 * betainc(df / 2.0, 0.5, df / (df + x * x))


def t_cdf(x: float, df: float) -> float:
    _check_df(df)
    if math.isinf(x):
        return 1.0 if x > 0 else 0.0
    if x == 0:
        return 0.5
    tail = _t_tail(x, df)
    return 1.0 - tail if x > 0 else tail


def t_sf(x: float, df: float) -> float:
    return t_cdf(-x, df)


def t_two_tailed_p(t: float, df: float) -> float:
    _check_df(df)
    if math.isinf(t):
        return 0.0
    return min(1.0, 2.0 * _t_tail(t, df))


def t_pdf(x: float, df: float) -> float:
    _check_df(df)
    return math.exp(
        math.lgamma((df + 1) / 2)
        - math.lgamma(df / 2)
        - 0.5 * math.log(df * math.pi)
        - (df + 1) / 2 * math.log1p(x * x / df)
    )


def t_quantile(p: float, df: float) -> float:
    _check_p(p)
    _check_df(df)
    if p == 0.5:
        return 0.0
    upper = max(p, 1.0 - p)
    # solve P(T > x) = 1 - upper on x > 0 using the tail form for accuracy
    x = _newton_bisect(
        lambda v: 0.5 - _t_tail(v, df) if v > 0 else 0.0,
        lambda v: t_pdf(v, df),
        upper - 0.5,
        lo=0.0,
    )
    return x if p > 0.5 else -x


# --- F -----------------------------------------------------------------------


def f_cdf(x: float, df1: float, df2: float) -> float:
    _check_df(df1, df2)
    if x <= 0:
        return 0.0
    if math.isinf(x):
        return 1.0
    return betainc(df1 / 2.0, df2 / 2.0, df1 * x / (df1 * x + df2))


def f_sf(x: float, df1: float, df2: float) -> float:
    _check_df(df1, df2)
    if x <= 0:
        return 1.0
    if math.isinf(x):
        return 0.0
    return betainc(df2 / 2.0, df1 / 2.0, df2 / (df2 + df1 * x))


def f_pdf(x: float, df1: float, df2: float) -> float:
    _check_df(df1, df2)
    if x <= 0:
        return 0.0
    return math.exp(
        df1 / 2 * math.log(df1 / df2)
        + (df1 / 2 - 1) * math.log(x)
        - (df1 + df2) / 2 * math.log1p(df1 * x / df2)
        - _log_beta(df1 / 2, df2 / 2)
    )


def f_quantile(p: float, df1: float, df2: float) -> float:
    """Inverse of :func:`f_cdf` in ``x``."""
    _check_p(p)
    _check_df(df1, df2)
    return _newton_bisect(lambda v: f_cdf(v, df1, df2), lambda v: f_pdf(v, df1, df2), p, lo=0.0)


def _newton_bisect(cdf, pdf, p: float, lo: float) -> float:
    """Solve ``cdf(x) = p`` for x > lo with a monotone ``cdf``."""
    hi = 1.0
    for _ in range(MAX_ITER):
        if cdf(hi) >= p:
            break
        lo, hi = hi, hi * 2.0
    else:
        raise NonConvergence(f"could not bracket quantile for p={p}")
    x = 0.5 * (lo + hi) if lo > 0 else hi / 2.0
    for _ in range(MAX_ITER):
        err = cdf(x) - p
        if err == 0.0:
            return x
        if err > 0:
            hi = x
        else:
            lo = x
        density = pdf(x)
        step_ok = False
        if density > 0 and math.isfinite(density):
            candidate = x - err / density
            if lo < candidate < hi:
                step_ok = True
        new = candidate if step_ok else 0.5 * (lo + hi)
        if abs(new - x) <= 1e-15 * max(abs(x), 1e-300) or hi - lo <= 4e-16 * hi:
            return new
        x = new
    raise NonConvergence(f"quantile iteration cap ({MAX_ITER}) exceeded for p={p}")


# --- studentized range ---------------------------------------------------------

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(16)


def _composite_gl(a: float, b: float, panels: int) -> tuple[np.ndarray, np.ndarray]:
    edges = np.linspace(a, b, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[:-1] + edges[1:])
    nodes = (mid[:, None] + half[:, None] * _GL_NODES[None, :]).ravel()
    weights = (half[:, None] * _GL_WEIGHTS[None, :]).ravel()
    return nodes, weights


_Z_NODES, _Z_WEIGHTS = _composite_gl(-8.5, 8.5, 17)
_PHI_Z = np.exp(-0.5 * _Z_NODES**2) / math.sqrt(2 * math.pi)


def _range_cdf(w: np.ndarray, k: int) -> np.ndarray:
    """CDF of the range of ``k`` iid standard normals at each ``w``."""
    w = np.atleast_1d(np.asarray(w, dtype=float))
    inner = ndtr(_Z_NODES[None, :]) - ndtr(_Z_NODES[None, :] - w[:, None])
    inner = np.clip(inner, 0.0, 1.0) ** (k - 1)
    return np.clip(k * (inner * (_PHI_Z * _Z_WEIGHTS)[None, :]).sum(axis=1), 0.0, 1.0)


def _scale_log_density(u: np.ndarray, df: float) -> np.ndarray:
    """log of f_s(e^u) * e^u for s = sqrt(chi2_df / df)."""
    log_c = df / 2 * math.log(df) - math.lgamma(df / 2) - (df / 2 - 1) * math.log(2.0)
    return log_c + df * u - df * np.exp(2 * u) / 2


def _scale_support(df: float, drop: float = 40.0) -> tuple[float, float]:
    def rel(u):
        return df * u - df * (math.exp(2 * u) - 1) / 2 + drop

    lo = -1.0
    while rel(lo) > 0:
        lo *= 2
    hi = 1.0
    while rel(hi) > 0:
        hi *= 2
    return brentq(rel, lo, 0.0, xtol=1e-12), brentq(rel, 0.0, hi, xtol=1e-12)


def studentized_range_cdf(q: float, groups: int, df: float) -> float:
    """P(Q <= q) for the studentized range of ``groups`` means with ``df``
    error degrees of freedom.  ``df = inf`` gives the normal range law."""
    if groups < 2 or int(groups) != groups:
        raise ParameterOutOfRange(f"groups must be an integer >= 2, got {groups}")
    if q < 0 or math.isnan(q):
        raise ParameterOutOfRange(f"q must be >= 0, got {q}")
    if not df > 0:
        raise ParameterOutOfRange(f"degrees of freedom must be > 0, got {df}")
    groups = int(groups)
    if q == 0:
        return 0.0
    if math.isinf(q):
        return 1.0
    if math.isinf(df) or df > 1e8:
        return float(_range_cdf(np.array([q]), groups)[0])
    lo, hi = _scale_support(df)
    u, wts = _composite_gl(lo, hi, 24)
    log_f = _scale_log_density(u, df)
    dens = np.exp(log_f - log_f.max()) * wts
    values = _range_cdf(q * np.exp(u), groups)
    return float(min(1.0, max(0.0, (dens * values).sum() / dens.sum())))


def studentized_range_sf(q: float, groups: int, df: float) -> float:
    return 1.0 - studentized_range_cdf(q, groups, df)


def studentized_range_quantile(p: float, groups: int, df: float) -> float:
    _check_p(p)
    hi = 1.0
    while studentized_range_cdf(hi, groups, df) < p:
        hi *= 2.0
        if hi > 1e6:
            raise NonConvergence(f"could not bracket studentized range quantile for p={p}")
    return brentq(lambda v: studentized_range_cdf(v, groups, df) - p, 0.0, hi, xtol=1e-12, rtol=1e-12, maxiter=MAX_ITER)
