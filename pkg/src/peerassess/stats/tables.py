"""Dataset-level analyses: reliability by group size, accuracy, grade
differences and relationship bias."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np

from ..dataset import Dataset
from ..errors import PeerAssessError, TooFewGroups
from ..sociometry import Relationship
from .anova import GamesHowellPair, GroupSample, WelchResult, games_howell, welch_anova
from .correlation import SpearmanResult, spearman
from .reliability import IccResult, RatingMatrix, icc1

RELATIONSHIP_ORDER = (Relationship.DISLIKE, Relationship.NEUTRAL, Relationship.LIKE)
DIFFERENCES = tuple(range(-5, 6))
RATINGS = tuple(range(0, 6))


@dataclass(frozen=True)
class PostSummary:
    post_id: str
    skill_id: str
    author: str
    assessment_count: int
    grades: tuple[int, ...]  # submission order
    mean_peer_grade: float
    final_peer_grade: int
    professor_rating: Optional[int]


def post_summaries(ds: Dataset) -> list[PostSummary]:
    grouped: dict[str, list] = {}
    for r in ds.records:
        grouped.setdefault(r.post_id, []).append(r)
    out = []
    for post_id, recs in grouped.items():
        first = recs[0]
        out.append(
            PostSummary(
                post_id=post_id,
                skill_id=first.skill_id,
                author=first.author,
                assessment_count=first.assessment_count,
                grades=tuple(r.peer_grade for r in recs),
                mean_peer_grade=first.mean_peer_grade,
                final_peer_grade=first.final_peer_grade,
                professor_rating=first.professor_rating,
            )
        )
    return out


def fairness_by_count(ds: Dataset, alpha_level: float = 0.05, counts: Iterable[int] = (2, 3, 4, 5)) -> dict[int, IccResult]:
    """ICC(1) for each group of posts sharing the same number of assessments.

    Groups with fewer than two posts, or whose grades are all identical,
    are left out.
    """
    posts = post_summaries(ds)
    out = {}
    for c in counts:
        rows = [p.grades for p in posts if p.assessment_count == c]
        if len(rows) < 2 or c < 2:
            continue
        try:
            out[c] = icc1(RatingMatrix.from_rows(rows), alpha_level)
        except PeerAssessError:
            continue
    return out


def _rated(ds: Dataset, min_count: int = 1) -> list[PostSummary]:
    return [p for p in post_summaries(ds) if p.professor_rating is not None and p.assessment_count >= min_count]


def accuracy_by_min_count(ds: Dataset, min_counts: Iterable[int] = (1, 2, 3, 4, 5)) -> dict[int, SpearmanResult]:
    """Spearman between professor rating and unrounded mean peer grade over
    posts with at least ``m`` assessments, for each ``m``."""
    out = {}
    for m in min_counts:
        posts = _rated(ds, m)
        try:
            out[m] = spearman([p.professor_rating for p in posts], [p.mean_peer_grade for p in posts])
        except PeerAssessError:
            continue
    return out


def accuracy_final_grade(ds: Dataset, min_count: int = 3) -> Optional[SpearmanResult]:
    """Spearman between professor rating and the rounded final peer grade."""
    posts = _rated(ds, min_count)
    try:
        return spearman([p.professor_rating for p in posts], [p.final_peer_grade for p in posts])
    except PeerAssessError:
        return None


@dataclass(frozen=True)
class Descriptive:
    n: int
    mean: float
    sd: float


def describe(values) -> Descriptive:
    x = np.asarray(list(values), dtype=float)
    if len(x) == 0:
        return Descriptive(0, math.nan, math.nan)
    sd = float(x.std(ddof=1)) if len(x) > 1 else math.nan
    return Descriptive(len(x), float(x.mean()), sd)


def descriptives(ds: Dataset, min_count: int = 1) -> dict[str, Descriptive]:
    """Mean and SD of professor rating, final peer grade and mean peer grade
    over rated posts with at least ``min_count`` assessments."""
    posts = _rated(ds, min_count)
    return {
        "professor_rating": describe(p.professor_rating for p in posts),
        "final_peer_grade": describe(p.final_peer_grade for p in posts),
        "mean_peer_grade": describe(p.mean_peer_grade for p in posts),
    }


@dataclass(frozen=True)
class GradeDifferenceTable:
    """Counts of (final peer grade - professor rating) by professor rating."""

    counts: dict[int, dict[int, int]]

    def row_total(self, rating: int) -> int:
        return sum(self.counts[rating].values())

    def percent(self, rating: int, diff: int) -> float:
        total = self.row_total(rating)
        return 100.0 * self.counts[rating][diff] / total if total else 0.0

    def column_total(self, diff: int) -> int:
        return sum(self.counts[r][diff] for r in RATINGS)

    @property
    def total(self) -> int:
        return sum(self.row_total(r) for r in RATINGS)


def grade_difference_table(ds: Dataset, min_count: int = 1) -> GradeDifferenceTable:
    counts = {r: {d: 0 for d in DIFFERENCES} for r in RATINGS}
    for p in _rated(ds, min_count):
        counts[p.professor_rating][p.final_peer_grade - p.professor_rating] += 1
    return GradeDifferenceTable(counts)


@dataclass(frozen=True)
class MetricReport:
    metric: str
    groups: dict[str, Descriptive]
    welch: WelchResult
    games_howell: list[GamesHowellPair]

    def max_pairwise_difference(self) -> float:
        means = [d.mean for d in self.groups.values()]
        return max(means) - min(means)


@dataclass(frozen=True)
class RelationshipBiasReport:
    counts: dict[str, int]
    final_difference: MetricReport
    rating_difference: Optional[MetricReport]


METRICS = {
    "final_difference": lambda r: r.peer_grade - r.final_peer_grade,
    "rating_difference": lambda r: None if r.professor_rating is None else r.peer_grade - r.professor_rating,
}


def _metric_report(name, records, alpha_level) -> MetricReport:
    fn = METRICS[name]
    samples = []
    for rel in RELATIONSHIP_ORDER:
        values = [v for r in records if r.relationship is rel for v in [fn(r)] if v is not None]
        if len(values) >= 2:
            samples.append(GroupSample(rel.value, values))
    if len(samples) < 2:
        raise TooFewGroups(f"{name}: fewer than two relationship classes with at least 2 records")
    return MetricReport(
        metric=name,
        groups={s.label: describe(s.values) for s in samples},
        welch=welch_anova(samples),
        games_howell=games_howell(samples, alpha_level),
    )


def relationship_bias_report(ds: Dataset, alpha_level: float = 0.05, min_count: int = 3) -> RelationshipBiasReport:
    """Peer-grade deviations split by grader -> author relationship.

    Only posts with at least ``min_count`` assessments are used and edges of
    unknown relationship are dropped.  The deviation from the professor
    rating is computed on records of rated posts only.
    """
    records = [r for r in ds.records if r.assessment_count >= min_count]
    counts = {rel.value: sum(r.relationship is rel for r in records) for rel in Relationship}
    known = [r for r in records if r.relationship is not Relationship.UNKNOWN]
    final = _metric_report("final_difference", known, alpha_level)
    try:
        rating = _metric_report("rating_difference", known, alpha_level)
    except TooFewGroups:
        rating = None
    return RelationshipBiasReport(counts, final, rating)


def rating_series(ds: Dataset) -> list[tuple[str, int, float, int]]:
    """(post_id, professor rating, mean peer grade, final peer grade) per rated post."""
    return [(p.post_id, p.professor_rating, p.mean_peer_grade, p.final_peer_grade) for p in _rated(ds)]
