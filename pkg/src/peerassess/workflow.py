"""Post lifecycle: training gate, submission, assessment and visibility.

A student must pass the training page of a skill (grade every sample
exactly as the faculty did) before submitting a post for that skill or
assessing someone else's.  Grades stay hidden from students until a post
has three completed assessments; graders who still hold a live assignment
on the post keep seeing nothing.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Sequence, Union

from .assignment import Assignment, AssignmentEngine, Status
from .dataset import (
    Dataset,
    PeerAssessment,
    Post,
    ProfessorRating,
    final_peer_grade,
    has_feedback,
)
from .errors import (
    AssignmentExpired,
    DuplicateAssessment,
    DuplicateRating,
    EmptyFeedback,
    MissingAnswers,
    TrainingIncomplete,
    UnknownPost,
    UnknownSkill,
    UnknownViewer,
    ValidationError,
)
from .sociometry import SociometryDB, StudentId, validate_grade

REVEAL_THRESHOLD = 3
PROFESSOR = "__professor__"

__all__ = [
    "Course",
    "PROFESSOR",
    "REVEAL_THRESHOLD",
    "TrainingPage",
    "TrainingStatus",
    "VisibilityView",
    "final_peer_grade",
]


@dataclass(frozen=True)
class TrainingPage:
    skill_id: str
    criteria_text: str
    samples: tuple[tuple[str, int], ...]

    def __post_init__(self):
        samples = tuple((str(s), validate_grade(g)) for s, g in self.samples)
        if len(samples) < 2:
            raise ValidationError(f"training page for {self.skill_id!r} needs at least two samples")
        if len({s for s, _ in samples}) != len(samples):
            raise ValidationError(f"duplicate sample ids on training page {self.skill_id!r}")
        object.__setattr__(self, "samples", samples)

    def answer_key(self) -> dict[str, int]:
        return dict(self.samples)


@dataclass
class TrainingStatus:
    student_id: StudentId
    skill_id: str
    completed: bool = False
    attempts: int = 0


@dataclass(frozen=True)
class VisibilityView:
    viewer: StudentId
    post_id: str
    sees_professor: bool
    sees_final_peer_grade: bool
    sees_individual_grades: bool
    grader_identities_visible: bool = False
    professor_rating: Optional[ProfessorRating] = None
    final_peer_grade: Optional[int] = None
    # (grade, feedback) pairs, never grader ids
    individual: tuple[tuple[int, str], ...] = field(default=())


class Course:
    """Workflow state for one course: training, posts, assessments, ratings.

    Timestamps are integer seconds.  All mutations go through methods on
    this object; reads (:meth:`visibility`, :meth:`final_peer_grade`) do
    not modify state.
    """

    def __init__(
        self,
        db: SociometryDB,
        engine: Optional[AssignmentEngine] = None,
        *,
        rounding: str = "half_up",
    ):
        self.db = db
        self.engine = engine if engine is not None else AssignmentEngine(db)
        self.rounding = rounding
        self.training_pages: dict[str, TrainingPage] = {}
        self._training: dict[tuple[StudentId, str], TrainingStatus] = {}
        self.posts: dict[str, Post] = {}
        self._assessments: dict[str, list[PeerAssessment]] = {}
        self.professor_ratings: dict[str, ProfessorRating] = {}
        self.prompts: list = []
        self._next_post = 0

    # training -------------------------------------------------------------
    def add_training_page(self, page: TrainingPage) -> None:
        self.training_pages[page.skill_id] = page

    def training_status(self, student: StudentId, skill: str) -> TrainingStatus:
        key = (student, skill)
        if key not in self._training:
            self._training[key] = TrainingStatus(student, skill)
        return self._training[key]

    def training_records(self) -> list[TrainingStatus]:
        return sorted(self._training.values(), key=lambda t: (t.student_id, t.skill_id))

    def is_trained(self, student: StudentId, skill: str) -> bool:
        status = self._training.get((student, skill))
        return status is not None and status.completed

    def complete_training(
        self,
        student: StudentId,
        skill: str,
        answers: Union[Mapping[str, int], Iterable[tuple[str, int]]],
    ) -> TrainingStatus:
        page = self.training_pages.get(skill)
        if page is None:
            raise UnknownSkill(f"no training page for skill {skill!r}")
        answers = dict(answers.items() if isinstance(answers, Mapping) else answers)
        key = page.answer_key()
        missing = sorted(set(key) - set(answers))
        if missing:
            raise MissingAnswers(f"no answer for samples {missing}")
        answers = {s: validate_grade(g) for s, g in answers.items()}
        status = self.training_status(student, skill)
        status.attempts += 1
        if all(answers[s] == g for s, g in key.items()):
            status.completed = True
        return status

    # posts ----------------------------------------------------------------
    def submit_post(
        self,
        student: StudentId,
        skill: str,
        content: Optional[str] = None,
        now: int = 0,
        *,
        parent: Optional[str] = None,
        post_id: Optional[str] = None,
    ) -> Post:
        """Create a post and assign its graders.

        With ``parent`` set the post is a resubmission and goes to the
        graders of the parent post.
        """
        if skill not in self.training_pages:
            raise UnknownSkill(f"no training page for skill {skill!r}")
        if not self.db.is_enrolled(student):
            raise UnknownViewer(f"student {student!r} is not enrolled")
        if not self.is_trained(student, skill):
            raise TrainingIncomplete(f"{student!r} has not completed training for {skill!r}")
        if parent is not None:
            original = self.post(parent)
            if original.author != student or original.skill_id != skill:
                raise ValidationError("a resubmission must share author and skill with its parent")
        if post_id is None:
            post_id = f"p{self._next_post:05d}"
        self._next_post += 1
        if post_id in self.posts:
            raise ValidationError(f"duplicate post id {post_id!r}")
        post = Post(post_id, student, skill, now, parent, content)
        self.posts[post_id] = post
        self._assessments[post_id] = []
        if parent is None:
            issued = self.engine.assign_post(post_id, student, now)
        else:
            issued = self.engine.assign_resubmission(post, self.posts[parent], now)
        for a in issued:
            prompt = self.engine.request_rating_if_unknown(a)
            if prompt is not None:
                self.prompts.append(prompt)
        return post

    def post(self, post_id: str) -> Post:
        try:
            return self.posts[post_id]
        except KeyError:
            raise UnknownPost(f"unknown post {post_id!r}") from None

    def assessments(self, post_id: str) -> list[PeerAssessment]:
        self.post(post_id)
        return list(self._assessments[post_id])

    def expire_assignments(self, now: int) -> list[Assignment]:
        """Expire overdue assignments; replacement graders get rating prompts too."""
        before = len(self.engine.issued)
        expired = self.engine.expire_assignments(now)
        for a in self.engine.issued[before:]:
            prompt = self.engine.request_rating_if_unknown(a)
            if prompt is not None:
                self.prompts.append(prompt)
        return expired

    def submit_assessment(self, assignment: Assignment, grade: int, feedback: str, now: int) -> PeerAssessment:
        post = self.post(assignment.post_id)
        grade = validate_grade(grade)
        if any(a.grader == assignment.grader for a in self._assessments[post.post_id]):
            raise DuplicateAssessment(f"{assignment.grader!r} already assessed {post.post_id!r}")
        if assignment.status is Status.EXPIRED or (assignment.status is Status.PENDING and now > assignment.deadline):
            raise AssignmentExpired(f"assignment for {post.post_id!r} expired at {assignment.deadline}")
        if assignment.status is not Status.PENDING:
            raise DuplicateAssessment(f"assignment for {post.post_id!r} already completed")
        if not self.is_trained(assignment.grader, post.skill_id):
            raise TrainingIncomplete(f"{assignment.grader!r} has not completed training for {post.skill_id!r}")
        if not has_feedback(feedback):
            raise EmptyFeedback("peer assessments need written feedback")
        self.engine.complete(assignment)
        assessment = PeerAssessment(post.post_id, assignment.grader, grade, feedback, now)
        self._assessments[post.post_id].append(assessment)
        return assessment

    def record_professor_rating(self, post_id: str, grade: int, reply: str = "") -> ProfessorRating:
        self.post(post_id)
        grade = validate_grade(grade)
        if post_id in self.professor_ratings:
            raise DuplicateRating(f"post {post_id!r} already has a professor rating")
        rating = ProfessorRating(post_id, grade, reply)
        self.professor_ratings[post_id] = rating
        return rating

    # reads ----------------------------------------------------------------
    def final_peer_grade(self, post_id: str) -> int:
        return final_peer_grade([a.grade for a in self.assessments(post_id)], self.rounding)

    def visibility(self, post_id: str, viewer: StudentId, now: int) -> VisibilityView:
        post = self.post(post_id)
        if viewer != PROFESSOR and not self.db.is_enrolled(viewer):
            raise UnknownViewer(f"unknown viewer {viewer!r}")
        done = self._assessments[post_id]
        revealed = len(done) >= REVEAL_THRESHOLD
        if viewer == PROFESSOR:
            sees, individual = True, True
        elif self.engine.live_assignment(post_id, viewer, now) is not None:
            sees, individual = False, False
        else:
            sees = revealed
            individual = revealed and viewer == post.author
        final = None
        if sees and done:
            final = final_peer_grade([a.grade for a in done], self.rounding)
        return VisibilityView(
            viewer=viewer,
            post_id=post_id,
            sees_professor=sees,
            sees_final_peer_grade=sees,
            sees_individual_grades=individual,
            grader_identities_visible=False,
            professor_rating=self.professor_ratings.get(post_id) if sees else None,
            final_peer_grade=final,
            individual=tuple((a.grade, a.feedback) for a in done) if individual else (),
        )

    def build_dataset(self) -> Dataset:
        """Flatten completed assessments (with feedback) into a :class:`Dataset`."""
        posts = list(self.posts.values())
        assessments = [a for p in posts for a in self._assessments[p.post_id] if has_feedback(a.feedback)]
        ratings = [self.professor_ratings[p.post_id] for p in posts if p.post_id in self.professor_ratings]
        return Dataset.from_tables(
            self.db.students,
            posts,
            assessments,
            ratings,
            self.db.all_nominations(),
            self.db.rating_history,
            thresholds=self.db.thresholds,
            rounding=self.rounding,
        )
