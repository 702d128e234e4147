"""Inter-rater reliability: one-way random-effects ICC and Cronbach's alpha."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..errors import DegenerateMatrix, InvalidAlpha, OutOfRange
from .distributions import f_quantile, f_sf


@dataclass(frozen=True)
class RatingMatrix:
    """``n`` subjects (rows) each rated ``k`` times (columns)."""

    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 2:
            raise DegenerateMatrix("rating matrix must be two-dimensional with equal-length rows")
        n, k = values.shape
        if n < 2 or k < 2:
            raise DegenerateMatrix(f"need at least 2 subjects and 2 ratings each, got {n}x{k}")
        if not np.all(np.isfinite(values)):
            raise DegenerateMatrix("rating matrix contains non-finite values")
        object.__setattr__(self, "values", values)

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[float]]) -> "RatingMatrix":
        rows = [list(r) for r in rows]
        if len({len(r) for r in rows}) > 1:
            raise DegenerateMatrix("every subject needs the same number of ratings")
        return cls(np.array(rows, dtype=float))

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def k(self) -> int:
        return self.values.shape[1]


@dataclass(frozen=True)
class IccResult:
    single: float
    average: float
    ci_single: tuple[float, float]
    ci_average: tuple[float, float]
    alpha_level: float
    msb: float
    msw: float
    n: int
    k: int
    f: float
    p: float


def _check_alpha(alpha_level: float) -> None:
    if not 0.0 < alpha_level < 1.0:
        raise InvalidAlpha(f"alpha level must lie in (0, 1), got {alpha_level}")


def icc1(m: RatingMatrix, alpha_level: float = 0.05) -> IccResult:
    """ICC(1,1) and ICC(1,k): absolute agreement, one-way random effects.

    Confidence bounds come from the F distribution of ``MSB / MSW`` with
    ``(n - 1, n(k - 1))`` degrees of freedom.
    """
    _check_alpha(alpha_level)
    if not isinstance(m, RatingMatrix):
        m = RatingMatrix(np.asarray(m, dtype=float))
    x = m.values
    n, k = m.n, m.k
    grand = x.mean()
    row_means = x.mean(axis=1)
    ss_between = k * float(((row_means - grand) ** 2).sum())
    ss_within = float(((x - row_means[:, None]) ** 2).sum())
    if ss_between + ss_within == 0:
        raise DegenerateMatrix("all ratings are identical")
    df_b, df_w = n - 1, n * (k - 1)
    msb = ss_between / df_b
    msw = ss_within / df_w

    single = (msb - msw) / (msb + (k - 1) * msw)
    average = (msb - msw) / msb if msb > 0 else -math.inf

    if msw == 0:
        return IccResult(single, average, (single, single), (average, average),
                         alpha_level, msb, msw, n, k, math.inf, 0.0)
    f0 = msb / msw
    ci_single, ci_average = icc1_intervals(f0, n, k, alpha_level)
    return IccResult(
        single=single,
        average=average,
        ci_single=ci_single,
        ci_average=ci_average,
        alpha_level=alpha_level,
        msb=msb,
        msw=msw,
        n=n,
        k=k,
        f=f0,
        p=f_sf(f0, df_b, df_w),
    )


def icc1_intervals(f0: float, n: int, k: int, alpha_level: float = 0.05):
    """Confidence bounds for ICC(1,1) and ICC(1,k) given the observed
    ``F = MSB / MSW`` from ``n`` subjects rated ``k`` times each.

    Returns ``(ci_single, ci_average)``.
    """
    _check_alpha(alpha_level)
    df_b, df_w = n - 1, n * (k - 1)
    f_lower = f0 / f_quantile(1 - alpha_level / 2, df_b, df_w)
    f_upper = f0 * f_quantile(1 - alpha_level / 2, df_w, df_b)
    ci_single = ((f_lower - 1) / (f_lower + k - 1), (f_upper - 1) / (f_upper + k - 1))
    # F = 0 (no between-subject spread) sends the average-measures bound to -inf
    ci_average = tuple(1 - 1 / f if f > 0 else -math.inf for f in (f_lower, f_upper))
    return ci_single, ci_average


ICC_BANDS = ((0.50, "poor"), (0.75, "moderate"), (0.90, "good"))


def interpret_icc(value: float) -> str:
    """Koo & Li reliability label; a boundary value belongs to the higher band."""
    if not -1.0 <= value <= 1.0 or math.isnan(value):
        raise OutOfRange(f"ICC value {value} outside [-1, 1]")
    for upper, label in ICC_BANDS:
        if value < upper:
            return label
    return "excellent"


def cronbach_alpha(items) -> float:
    """Internal consistency of a respondents x items score matrix."""
    x = np.asarray(items, dtype=float)
    if x.ndim != 2 or x.shape[0] < 2 or x.shape[1] < 2:
        raise DegenerateMatrix("need at least 2 respondents and 2 items")
    k = x.shape[1]
    total_var = x.sum(axis=1).var(ddof=1)
    if total_var == 0:
        raise DegenerateMatrix("respondent totals have zero variance")
    return k / (k - 1) * (1 - x.var(axis=0, ddof=1).sum() / total_var)
