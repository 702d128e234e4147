"""Spearman rank-order correlation with mid-rank ties."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..errors import ConstantInput, LengthMismatch
from .distributions import t_two_tailed_p


@dataclass(frozen=True)
class SpearmanResult:
    rs: float
    n: int
    p_two_tailed: float


def midranks(values: Sequence[float]) -> np.ndarray:
    """1-based ranks; tied values share the mean of the ranks they span."""
    x = np.asarray(values, dtype=float)
    order = np.argsort(x, kind="mergesort")
    ranks = np.empty(len(x))
    sorted_x = x[order]
    i = 0
    while i < len(x):
        j = i
        while j + 1 < len(x) and sorted_x[j + 1] == sorted_x[i]:
            j += 1
        ranks[order[i : j + 1]] = (i + j) / 2.0 + 1.0
        i = j + 1
    return ranks


def spearman(x: Sequence[float], y: Sequence[float]) -> SpearmanResult:
    if len(x) != len(y):
        raise LengthMismatch(f"x has {len(x)} values, y has {len(y)}")
    n = len(x)
    if n < 3:
        raise LengthMismatch(f"need at least 3 pairs, got {n}")
    rx, ry = midranks(x), midranks(y)
    dx, dy = rx - rx.mean(), ry - ry.mean()
    sxx, syy = float(dx @ dx), float(dy @ dy)
    if sxx == 0 or syy == 0:
        raise ConstantInput("Spearman correlation is undefined for a constant input")
    rs = float(dx @ dy) / math.sqrt(sxx * syy)
    rs = max(-1.0, min(1.0, rs))
    if abs(rs) == 1.0:
        p = 0.0
    else:
        t = rs * math.sqrt((n - 2) / (1 - rs * rs))
        p = t_two_tailed_p(t, n - 2)
    return SpearmanResult(rs, n, p)
