"""Posts, assessments and the flattened analysis dataset."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .errors import NoAssessments, PeerAssessError, ReferentialIntegrity
from .sociometry import (
    NominationSet,
    PeerRating,
    RatingThresholds,
    Relationship,
    SociometryDB,
    StudentId,
    validate_grade,
)

ROUNDING_MODES = ("half_up", "half_even")


@dataclass(frozen=True)
class Post:
    post_id: str
    author: StudentId
    skill_id: str
    created_at: int
    parent_post: Optional[str] = None
    # opaque handle to the submitted work; not part of the exported tables
    content_ref: Optional[str] = field(default=None, compare=False)


@dataclass(frozen=True)
class PeerAssessment:
    post_id: str
    grader: StudentId
    grade: int
    feedback: str
    submitted_at: int


@dataclass(frozen=True)
class ProfessorRating:
    post_id: str
    grade: int
    reply: str = ""


@dataclass(frozen=True)
class AssessmentRecord:
    """One completed peer assessment with everything the statistics need."""

    post_id: str
    skill_id: str
    author: StudentId
    grader: StudentId
    relationship: Relationship
    peer_grade: int
    professor_rating: Optional[int]
    assessment_count: int
    final_peer_grade: int
    mean_peer_grade: float
    submitted_at: int


def has_feedback(text: Optional[str]) -> bool:
    return bool(text and text.strip())


def round_grade(value: Fraction, rounding: str = "half_up") -> int:
    if rounding == "half_up":
        # grades are non-negative, so half-up equals half-away-from-zero
        return math.floor(value + Fraction(1, 2)) if value >= 0 else -math.floor(-value + Fraction(1, 2))
    if rounding == "half_even":
        return round(value)
    raise ValueError(f"unknown rounding mode {rounding!r}; expected one of {ROUNDING_MODES}")


def final_peer_grade(grades: Sequence[int], rounding: str = "half_up") -> int:
    """Rounded mean of the completed peer grades of one post.

    >>> final_peer_grade([3, 4])
    4
    >>> final_peer_grade([3, 4], rounding="half_even")
    4
    >>> final_peer_grade([2, 3], rounding="half_even")
    2
    """
    grades = [validate_grade(g) for g in grades]
    if not grades:
        raise NoAssessments("no completed peer assessments")
    return round_grade(Fraction(sum(grades), len(grades)), rounding)


@dataclass(frozen=True)
class Dataset:
    """Source tables plus the derived per-assessment records.

    The source tables are kept so a dataset can be written back out and
    reloaded unchanged.  ``records`` follows post order and, within a post,
    submission order.
    """

    students: tuple[StudentId, ...]
    posts: tuple[Post, ...]
    assessments: tuple[PeerAssessment, ...]
    professor_ratings: tuple[ProfessorRating, ...]
    nominations: tuple[NominationSet, ...]
    ratings: tuple[PeerRating, ...]
    records: tuple[AssessmentRecord, ...]
    rounding: str = "half_up"

    def __len__(self) -> int:
        return len(self.records)

    @classmethod
    def from_tables(
        cls,
        students: Iterable[StudentId],
        posts: Iterable[Post],
        assessments: Iterable[PeerAssessment],
        professor_ratings: Iterable[ProfessorRating] = (),
        nominations: Iterable[NominationSet] = (),
        ratings: Iterable[PeerRating] = (),
        *,
        thresholds: RatingThresholds = RatingThresholds(),
        rounding: str = "half_up",
    ) -> "Dataset":
        """Flatten source tables into records.

        Relationship classes are derived from the final sociometric state.
        Raises :class:`ReferentialIntegrity` when an assessment or rating
        points at an unknown post or student.
        """
        students = tuple(dict.fromkeys(students))
        posts = tuple(posts)
        assessments = tuple(assessments)
        professor_ratings = tuple(professor_ratings)
        nominations = tuple(nominations)
        ratings = tuple(ratings)
        if rounding not in ROUNDING_MODES:
            raise ValueError(f"unknown rounding mode {rounding!r}")

        enrolled = set(students)
        post_by_id = {}
        for p in posts:
            if p.post_id in post_by_id:
                raise ReferentialIntegrity(f"duplicate post id {p.post_id!r}")
            if p.author not in enrolled:
                raise ReferentialIntegrity(f"post {p.post_id!r} has unknown author {p.author!r}")
            post_by_id[p.post_id] = p
        for p in posts:
            if p.parent_post is not None and p.parent_post not in post_by_id:
                raise ReferentialIntegrity(f"post {p.post_id!r} has unknown parent {p.parent_post!r}")

        by_post: dict[str, list[PeerAssessment]] = {}
        seen = set()
        for a in assessments:
            if a.post_id not in post_by_id:
                raise ReferentialIntegrity(f"assessment references unknown post {a.post_id!r}")
            if a.grader not in enrolled:
                raise ReferentialIntegrity(f"assessment by unknown student {a.grader!r}")
            if (a.post_id, a.grader) in seen:
                raise ReferentialIntegrity(f"duplicate assessment of {a.post_id!r} by {a.grader!r}")
            seen.add((a.post_id, a.grader))
            by_post.setdefault(a.post_id, []).append(a)

        professor = {}
        for r in professor_ratings:
            if r.post_id not in post_by_id:
                raise ReferentialIntegrity(f"professor rating references unknown post {r.post_id!r}")
            if r.post_id in professor:
                raise ReferentialIntegrity(f"two professor ratings for post {r.post_id!r}")
            professor[r.post_id] = r.grade

        db = SociometryDB(students, min_nominations=0, thresholds=thresholds)
        try:
            for n in nominations:
                db.record_nominations(n.owner, sorted(n.liked), sorted(n.disliked), min_nominations=0)
            for r in ratings:
                db.record_peer_rating(r.rater, r.ratee, r.score, r.timestamp)
        except PeerAssessError as exc:
            raise ReferentialIntegrity(str(exc)) from exc

        records = []
        for p in posts:
            group = sorted(by_post.get(p.post_id, ()), key=lambda a: a.submitted_at)
            if not group:
                continue
            grades = [a.grade for a in group]
            final = final_peer_grade(grades, rounding)
            mean = sum(grades) / len(grades)
            for a in group:
                records.append(
                    AssessmentRecord(
                        post_id=p.post_id,
                        skill_id=p.skill_id,
                        author=p.author,
                        grader=a.grader,
                        relationship=db.classify_relationship(a.grader, p.author),
                        peer_grade=a.grade,
                        professor_rating=professor.get(p.post_id),
                        assessment_count=len(group),
                        final_peer_grade=final,
                        mean_peer_grade=mean,
                        submitted_at=a.submitted_at,
                    )
                )
        return cls(
            students=students,
            posts=posts,
            assessments=assessments,
            professor_ratings=professor_ratings,
            nominations=nominations,
            ratings=ratings,
            records=tuple(records),
            rounding=rounding,
        )
