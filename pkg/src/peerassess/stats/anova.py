"""Welch's heteroscedastic one-way ANOVA and the Games-Howell post hoc test."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from typing import Sequence

import numpy as np

from ..errors import InvalidAlpha, TooFewGroups, ZeroVarianceGroup
from .distributions import f_sf, studentized_range_quantile, studentized_range_sf


@dataclass(frozen=True)
class GroupSample:
    label: str
    values: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "label", str(self.label))
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))

    @property
    def n(self) -> int:
        return len(self.values)

    @property
    def mean(self) -> float:
        return float(np.mean(self.values))

    @property
    def var(self) -> float:
        return float(np.var(self.values, ddof=1))

    @property
    def sd(self) -> float:
        return math.sqrt(self.var)


@dataclass(frozen=True)
class WelchResult:
    f: float
    df1: float
    df2: float
    p: float


@dataclass(frozen=True)
class GamesHowellPair:
    group_a: str
    group_b: str
    mean_diff: float  # mean(b) - mean(a)
    se: float
    df: float
    q: float
    p: float
    ci: tuple[float, float]
    alpha_level: float


def _validate(groups: Sequence[GroupSample]) -> list[GroupSample]:
    groups = [g if isinstance(g, GroupSample) else GroupSample(*g) for g in groups]
    if len(groups) < 2:
        raise TooFewGroups(f"need at least 2 groups, got {len(groups)}")
    for g in groups:
        if g.n < 2:
            raise TooFewGroups(f"group {g.label!r} has {g.n} value(s); at least 2 needed")
        if g.var == 0:
            raise ZeroVarianceGroup(f"group {g.label!r} has zero variance")
    return groups


def welch_anova(groups: Sequence[GroupSample]) -> WelchResult:
    groups = _validate(groups)
    g = len(groups)
    n = np.array([s.n for s in groups], dtype=float)
    means = np.array([s.mean for s in groups])
    w = n / np.array([s.var for s in groups])
    total_w = w.sum()
    grand = (w * means).sum() / total_w
    a = (w * (means - grand) ** 2).sum() / (g - 1)
    lam = ((1 - w / total_w) ** 2 / (n - 1)).sum()
    b = 1 + 2 * (g - 2) / (g * g - 1) * lam
    f = float(a / b)
    df2 = float((g * g - 1) / (3 * lam))
    return WelchResult(f, float(g - 1), df2, f_sf(f, g - 1, df2))


@lru_cache(maxsize=4096)
def _q_crit(alpha_level: float, groups: int, df: float) -> float:
    return studentized_range_quantile(1 - alpha_level, groups, df)


def games_howell(groups: Sequence[GroupSample], alpha_level: float = 0.05) -> list[GamesHowellPair]:
    """All pairwise comparisons, in input order (0-1, 0-2, ..., 1-2, ...)."""
    if not 0.0 < alpha_level < 1.0:
        raise InvalidAlpha(f"alpha level must lie in (0, 1), got {alpha_level}")
    groups = _validate(groups)
    g = len(groups)
    pairs = []
    for a, b in combinations(groups, 2):
        va, vb = a.var / a.n, b.var / b.n
        se = math.sqrt(va + vb)
        df = (va + vb) ** 2 / (va**2 / (a.n - 1) + vb**2 / (b.n - 1))
        diff = b.mean - a.mean
        q = abs(diff) * math.sqrt(2) / se
        p = min(1.0, max(0.0, studentized_range_sf(q, g, df)))
        half = _q_crit(alpha_level, g, df) * se / math.sqrt(2)
        pairs.append(GamesHowellPair(a.label, b.label, diff, se, df, q, p, (diff - half, diff + half), alpha_level))
    return pairs
