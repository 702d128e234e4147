"""Reviewer selection and assignment lifecycle.

Each post gets up to five graders.  Among them at most one may like the
author and at most one may dislike the author; the remaining slots go to
neutral or unknown peers.  Inside each bucket candidates are drawn without
replacement with probability proportional to a load weight, so students
holding many open assignments are picked less often.
"""

from __future__ import annotations

import warnings
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Iterable, Optional, Sequence

import numpy as np

from .errors import EmptyPool, InvalidTransition, NotAResubmission, ShortPoolWarning
from .sociometry import Relationship, SociometryDB, StudentId

ASSIGNMENT_WINDOW = 48 * 3600  # seconds
REVIEWER_SLOTS = 5


class Status(str, Enum):
    PENDING = "pending"
    COMPLETED = "completed"
    EXPIRED = "expired"

    def __str__(self) -> str:
        return self.value


@dataclass
class Assignment:
    post_id: str
    grader: StudentId
    author: StudentId
    issued_at: int
    deadline: int
    relationship_at_issue: Relationship
    status: Status = Status.PENDING
    replacement: bool = False

    def is_live(self, now: int) -> bool:
        return self.status is Status.PENDING and now <= self.deadline

    def complete(self) -> None:
        if self.status is not Status.PENDING:
            raise InvalidTransition(f"cannot complete a {self.status} assignment")
        self.status = Status.COMPLETED

    def expire(self) -> None:
        if self.status is not Status.PENDING:
            raise InvalidTransition(f"cannot expire a {self.status} assignment")
        self.status = Status.EXPIRED


@dataclass
class LoadState:
    pending: Counter = field(default_factory=Counter)
    issued: Counter = field(default_factory=Counter)

    def open(self, grader: StudentId) -> None:
        self.pending[grader] += 1
        self.issued[grader] += 1

    def close(self, grader: StudentId) -> None:
        if self.pending[grader] <= 0:
            raise InvalidTransition(f"{grader!r} has no pending assignment to close")
        self.pending[grader] -= 1


@dataclass(frozen=True)
class RatingPrompt:
    """Request for ``rater`` to score their acquaintance with ``ratee``."""

    rater: StudentId
    ratee: StudentId
    post_id: str
    issued_at: int


def load_weight(pending: int) -> float:
    return 1.0 / (1.0 + pending)


def _weighted_draw(
    candidates: list[StudentId],
    weights: list[float],
    count: int,
    rng: np.random.Generator,
) -> list[StudentId]:
    """Sequential weighted sampling without replacement."""
    candidates, weights = list(candidates), list(weights)
    chosen = []
    while candidates and len(chosen) < count:
        cumulative = np.cumsum(weights)
        u = rng.random() * cumulative[-1]
        idx = int(np.searchsorted(cumulative, u, side="right"))
        idx = min(idx, len(candidates) - 1)
        chosen.append(candidates.pop(idx))
        weights.pop(idx)
    return chosen


def select_reviewers(
    post_id: str,
    author: StudentId,
    roster: Iterable[StudentId],
    db: SociometryDB,
    load: LoadState,
    seed,
    *,
    issued_at: int = 0,
    window: int = ASSIGNMENT_WINDOW,
    slots: int = REVIEWER_SLOTS,
    weight: Callable[[int], float] = load_weight,
    exclude: Iterable[StudentId] = (),
    taken: Sequence[Relationship] = (),
) -> list[Assignment]:
    """Pick graders for a post.

    Parameters
    ----------
    roster
        Candidate graders.  The author and anyone in ``exclude`` are removed.
    seed
        Anything accepted by :func:`numpy.random.default_rng`.  The result
        is a pure function of the inputs and the seed.
    slots
        Number of graders wanted.
    taken
        Relationship classes of graders already holding a slot on this post
        (used for replacement draws); they count against the one-liker and
        one-disliker caps.

    Returns
    -------
    list of Assignment
        Liker first (if any), then disliker, then neutral/unknown graders in
        draw order.  Fewer than ``slots`` entries triggers a
        :class:`ShortPoolWarning`.
    """
    excluded = set(exclude) | {author}
    candidates = sorted(dict.fromkeys(s for s in roster if s not in excluded))
    if not candidates:
        raise EmptyPool(f"no eligible graders for post {post_id!r}")

    buckets: dict[Relationship, list[StudentId]] = {
        Relationship.LIKE: [],
        Relationship.DISLIKE: [],
        Relationship.NEUTRAL: [],
    }
    classes = {}
    for c in candidates:
        rel = db.classify_relationship(c, author)
        classes[c] = rel
        key = Relationship.NEUTRAL if rel is Relationship.UNKNOWN else rel
        buckets[key].append(c)

    rng = np.random.default_rng(seed)
    held = Counter(taken)

    def draw(bucket, count):
        pool = buckets[bucket]
        return _weighted_draw(pool, [weight(load.pending[c]) for c in pool], count, rng)

    chosen: list[StudentId] = []
    for capped in (Relationship.LIKE, Relationship.DISLIKE):
        if len(chosen) < slots and held[capped] < 1:
            chosen += draw(capped, 1)
    chosen += draw(Relationship.NEUTRAL, slots - len(chosen))

    if len(chosen) < slots:
        warnings.warn(
            f"post {post_id!r}: only {len(chosen)} of {slots} reviewer slots filled",
            ShortPoolWarning,
            stacklevel=2,
        )
    return [
        Assignment(post_id, g, author, issued_at, issued_at + window, classes[g])
        for g in chosen
    ]


def request_rating_if_unknown(assignment: Assignment, db: SociometryDB) -> Optional[RatingPrompt]:
    """Prompt the grader to rate the author when their relationship is unknown."""
    if db.nominations_cover(assignment.grader, assignment.author):
        return None
    if db.classify_relationship(assignment.grader, assignment.author) is not Relationship.UNKNOWN:
        return None
    return RatingPrompt(assignment.grader, assignment.author, assignment.post_id, assignment.issued_at)


class AssignmentEngine:
    """Issues, tracks and expires reviewer assignments for a course.

    Every selection draws from its own seed stream ``(seed, draw_index)`` so
    the whole run is reproducible from ``seed`` and the order of calls.
    """

    def __init__(
        self,
        db: SociometryDB,
        *,
        seed: int = 0,
        window: int = ASSIGNMENT_WINDOW,
        slots: int = REVIEWER_SLOTS,
        weight: Callable[[int], float] = load_weight,
        replace_expired: bool = True,
    ):
        self.db = db
        self.seed = seed
        self.window = window
        self.slots = slots
        self.weight = weight
        self.replace_expired = replace_expired
        self.load = LoadState()
        self.issued: list[Assignment] = []
        self._open: dict[int, Assignment] = {}
        self._by_post: dict[str, list[Assignment]] = {}
        self._authors: dict[str, StudentId] = {}
        self._withdrawn: set[StudentId] = set()
        self._draws = 0

    @property
    def roster(self) -> list[StudentId]:
        return [s for s in self.db.students if s not in self._withdrawn]

    def withdraw(self, student: StudentId) -> None:
        """Remove a student from future selections (e.g. dropped the course)."""
        self._withdrawn.add(student)

    def assignments(self, post_id: Optional[str] = None) -> list[Assignment]:
        if post_id is None:
            return list(self.issued)
        return list(self._by_post.get(post_id, ()))

    def open_assignments(self) -> list[Assignment]:
        return [a for a in self._open.values() if a.status is Status.PENDING]

    def live_assignment(self, post_id: str, grader: StudentId, now: int) -> Optional[Assignment]:
        for a in self._by_post.get(post_id, ()):
            if a.grader == grader and a.is_live(now):
                return a
        return None

    def _next_seed(self) -> tuple[int, int]:
        seed = (self.seed, self._draws)
        self._draws += 1
        return seed

    def _issue(self, assignments: list[Assignment]) -> list[Assignment]:
        for a in assignments:
            self.load.open(a.grader)
            self._open[id(a)] = a
            self._by_post.setdefault(a.post_id, []).append(a)
            self.issued.append(a)
        return assignments

    def _select(self, post_id, author, now, *, slots, exclude=(), taken=()):
        return select_reviewers(
            post_id,
            author,
            self.roster,
            self.db,
            self.load,
            self._next_seed(),
            issued_at=now,
            window=self.window,
            slots=slots,
            weight=self.weight,
            exclude=exclude,
            taken=taken,
        )

    def assign_post(self, post_id: str, author: StudentId, now: int) -> list[Assignment]:
        self._authors[post_id] = author
        return self._issue(self._select(post_id, author, now, slots=self.slots))

    def assign_resubmission(self, new_post, original_post, now: int) -> list[Assignment]:
        """Give a resubmission to the graders of the post it replaces.

        ``new_post`` and ``original_post`` need ``post_id``, ``author`` and
        ``parent_post`` attributes.  Graders whose original assignment
        expired, or who have withdrawn, are replaced by fresh draws.
        """
        if new_post.parent_post != original_post.post_id or new_post.author != original_post.author:
            raise NotAResubmission(f"{new_post.post_id!r} is not a resubmission of {original_post.post_id!r}")
        previous = [a for a in self._by_post.get(original_post.post_id, ()) if a.status is not Status.EXPIRED]
        # a kept grader carries its original class so the caps stay satisfied
        # even if a rating prompt has since reclassified the edge
        kept: dict[StudentId, Relationship] = {}
        for a in previous:
            if a.grader not in self._withdrawn and len(kept) < self.slots:
                kept.setdefault(a.grader, a.relationship_at_issue)
        post_id, author = new_post.post_id, new_post.author
        self._authors[post_id] = author
        fresh = [Assignment(post_id, g, author, now, now + self.window, rel) for g, rel in kept.items()]
        missing = self.slots - len(fresh)
        if missing > 0:
            try:
                fresh += self._select(
                    post_id,
                    author,
                    now,
                    slots=missing,
                    exclude=list(kept),
                    taken=[a.relationship_at_issue for a in fresh],
                )
            except EmptyPool:
                pass
        return self._issue(fresh)

    def complete(self, assignment: Assignment) -> None:
        assignment.complete()
        self.load.close(assignment.grader)
        self._open.pop(id(assignment), None)

    def expire_assignments(self, now: int) -> list[Assignment]:
        """Expire every pending assignment whose deadline has passed.

        Each expired first-round slot receives a single replacement draw
        (when ``replace_expired`` is set).  Returns the newly expired
        assignments; replacements appear in :attr:`issued`.
        """
        expired = [a for a in self._open.values() if a.status is Status.PENDING and a.deadline < now]
        for a in expired:
            del self._open[id(a)]
            a.expire()
            self.load.close(a.grader)
        if not self.replace_expired:
            return expired
        for a in expired:
            if a.replacement:
                continue
            on_post = self._by_post[a.post_id]
            taken = [b.relationship_at_issue for b in on_post if b.status is not Status.EXPIRED]
            if len(taken) >= self.slots:
                continue
            try:
                with warnings.catch_warnings():
                    warnings.simplefilter("ignore", ShortPoolWarning)
                    new = self._select(
                        a.post_id,
                        a.author,
                        now,
                        slots=1,
                        exclude=[b.grader for b in on_post],
                        taken=taken,
                    )
            except EmptyPool:
                continue
            for b in new:
                b.replacement = True
            self._issue(new)
        return expired

    def request_rating_if_unknown(self, assignment: Assignment) -> Optional[RatingPrompt]:
        return request_rating_if_unknown(assignment, self.db)
