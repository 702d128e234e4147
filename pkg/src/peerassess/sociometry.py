"""Students, grades and the sociometric layer.

Students nominate the peers they like most and least.  When a grader is
assigned a post whose author is absent from their nominations, they are
later asked to rate that author on a 0..5 scale where 0 means "I do not
know this person".  :class:`SociometryDB` stores both kinds of data and
classifies every directed grader -> author edge.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Optional

from .errors import (
    OverlappingNominations,
    ScoreOutOfRange,
    SelfNomination,
    SelfRating,
    TooFewNominations,
    UnknownStudent,
)

StudentId = str

GRADE_MIN = 0
GRADE_MAX = 5
DEFAULT_MIN_NOMINATIONS = 4


class Relationship(str, Enum):
    LIKE = "like"
    DISLIKE = "dislike"
    NEUTRAL = "neutral"
    UNKNOWN = "unknown"

    def __str__(self) -> str:
        return self.value


def validate_grade(value) -> int:
    """Return ``value`` as an int, raising :class:`ScoreOutOfRange` if it is
    not an integer in 0..5."""
    try:
        integral = not isinstance(value, bool) and int(value) == value
    except (TypeError, ValueError, OverflowError):
        integral = False
    if not integral:
        raise ScoreOutOfRange(f"grade must be an integer, got {value!r}")
    value = int(value)
    if not GRADE_MIN <= value <= GRADE_MAX:
        raise ScoreOutOfRange(f"grade {value} outside {GRADE_MIN}..{GRADE_MAX}")
    return value


@dataclass(frozen=True)
class NominationSet:
    owner: StudentId
    liked: frozenset
    disliked: frozenset


@dataclass(frozen=True)
class PeerRating:
    rater: StudentId
    ratee: StudentId
    score: int
    timestamp: int


@dataclass(frozen=True)
class RatingThresholds:
    """Bucket boundaries mapping a 1..5 acquaintance score to a class.

    Scores ``1..dislike_max`` are Dislike, ``dislike_max+1..neutral_max``
    Neutral and anything above Like.  Score 0 is always Unknown.
    """

    dislike_max: int = 2
    neutral_max: int = 3

    def __post_init__(self):
        if not 0 <= self.dislike_max <= self.neutral_max <= GRADE_MAX:
            raise ValueError("thresholds must satisfy 0 <= dislike_max <= neutral_max <= 5")

    def classify(self, score: int) -> Relationship:
        if score == 0:
            return Relationship.UNKNOWN
        if score <= self.dislike_max:
            return Relationship.DISLIKE
        if score <= self.neutral_max:
            return Relationship.NEUTRAL
        return Relationship.LIKE


class SociometryDB:
    """Nominations and pairwise peer ratings for one cohort.

    Writes are expected to be serialized by the caller.  Ratings follow
    latest-write-wins per ordered pair; the full history is kept in
    :attr:`rating_history` for auditing and export.
    """

    def __init__(
        self,
        students: Iterable[StudentId] = (),
        *,
        min_nominations: int = DEFAULT_MIN_NOMINATIONS,
        thresholds: RatingThresholds = RatingThresholds(),
    ):
        self._students: dict[StudentId, None] = {}
        self.min_nominations = min_nominations
        self.thresholds = thresholds
        self._nominations: dict[StudentId, NominationSet] = {}
        self._ratings: dict[tuple[StudentId, StudentId], PeerRating] = {}
        self.rating_history: list[PeerRating] = []
        self._clock = 0
        for s in students:
            self.enroll(s)

    # roster ---------------------------------------------------------------
    def enroll(self, student: StudentId) -> None:
        self._students.setdefault(str(student), None)

    @property
    def students(self) -> list[StudentId]:
        """Enrolled students in enrollment order."""
        return list(self._students)

    def is_enrolled(self, student: StudentId) -> bool:
        return student in self._students

    def _require(self, *students: StudentId) -> None:
        for s in students:
            if s not in self._students:
                raise UnknownStudent(f"student {s!r} is not enrolled")

    # writes ---------------------------------------------------------------
    def record_nominations(
        self,
        owner: StudentId,
        liked: Iterable[StudentId],
        disliked: Iterable[StudentId],
        min_nominations: Optional[int] = None,
    ) -> NominationSet:
        liked, disliked = list(liked), list(disliked)
        minimum = self.min_nominations if min_nominations is None else min_nominations
        if owner in liked or owner in disliked:
            raise SelfNomination(f"{owner!r} nominated themselves")
        self._require(owner, *liked, *disliked)
        liked_set, disliked_set = frozenset(liked), frozenset(disliked)
        if len(liked_set) < minimum or len(disliked_set) < minimum:
            raise TooFewNominations(
                f"{owner!r} nominated {len(liked_set)} liked / {len(disliked_set)} disliked,"
                f" at least {minimum} of each required"
            )
        overlap = liked_set & disliked_set
        if overlap:
            raise OverlappingNominations(f"{owner!r} both liked and disliked {sorted(overlap)}")
        nominations = NominationSet(owner, liked_set, disliked_set)
        self._nominations[owner] = nominations
        return nominations

    def record_peer_rating(
        self,
        rater: StudentId,
        ratee: StudentId,
        score: int,
        timestamp: Optional[int] = None,
    ) -> PeerRating:
        if rater == ratee:
            raise SelfRating(f"{rater!r} cannot rate themselves")
        score = validate_grade(score)
        self._require(rater, ratee)
        if timestamp is None:
            timestamp = self._clock
        self._clock = max(self._clock, int(timestamp)) + 1
        rating = PeerRating(rater, ratee, score, int(timestamp))
        self._ratings[(rater, ratee)] = rating
        self.rating_history.append(rating)
        return rating

    # reads ----------------------------------------------------------------
    def nominations(self, owner: StudentId) -> Optional[NominationSet]:
        return self._nominations.get(owner)

    def all_nominations(self) -> list[NominationSet]:
        return [self._nominations[s] for s in self._students if s in self._nominations]

    def rating(self, rater: StudentId, ratee: StudentId) -> Optional[PeerRating]:
        return self._ratings.get((rater, ratee))

    def nominations_cover(self, grader: StudentId, author: StudentId) -> bool:
        noms = self._nominations.get(grader)
        return noms is not None and (author in noms.liked or author in noms.disliked)

    def classify_relationship(self, grader: StudentId, author: StudentId) -> Relationship:
        """Class of the directed edge ``grader -> author``.

        Nominations take precedence over ratings; without either the edge is
        Unknown.
        """
        self._require(grader, author)
        noms = self._nominations.get(grader)
        if noms is not None:
            if author in noms.liked:
                return Relationship.LIKE
            if author in noms.disliked:
                return Relationship.DISLIKE
        rating = self._ratings.get((grader, author))
        if rating is None:
            return Relationship.UNKNOWN
        return self.thresholds.classify(rating.score)
