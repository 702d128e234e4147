"""Statistical procedures used to evaluate peer assessment data."""

from .anova import GamesHowellPair, GroupSample, WelchResult, games_howell, welch_anova
from .correlation import SpearmanResult, midranks, spearman
from .distributions import (
    betainc,
    f_cdf,
    f_quantile,
    f_sf,
    studentized_range_cdf,
    studentized_range_quantile,
    t_cdf,
    t_quantile,
)
from .reliability import IccResult, RatingMatrix, cronbach_alpha, icc1, icc1_intervals, interpret_icc
from .tables import (
    accuracy_by_min_count,
    descriptives,
    fairness_by_count,
    grade_difference_table,
    relationship_bias_report,
)

__all__ = [
    "GamesHowellPair",
    "GroupSample",
    "IccResult",
    "RatingMatrix",
    "SpearmanResult",
    "WelchResult",
    "accuracy_by_min_count",
    "betainc",
    "cronbach_alpha",
    "descriptives",
    "f_cdf",
    "f_quantile",
    "f_sf",
    "fairness_by_count",
    "games_howell",
    "grade_difference_table",
    "icc1",
    "icc1_intervals",
    "interpret_icc",
    "midranks",
    "relationship_bias_report",
    "spearman",
    "studentized_range_cdf",
    "studentized_range_quantile",
    "t_cdf",
    "t_quantile",
    "welch_anova",
]
