"""Synthetic semesters: cohorts, relationship graphs and grading behaviour.

A run is fully determined by its :class:`SimulationConfig`.  The simulator
only uses the public workflow and assignment operations, so every dataset it
produces obeys the same invariants as real course data.

Model summary
-------------
* Each ordered pair of students has a latent affinity ``a ~ N(0, 1)``.
  Students nominate their highest-affinity peers as liked and their lowest
  as disliked.
* Rating prompts are answered from the same affinity: with probability
  ``unacquainted_prob`` the answer is 0, otherwise
  ``clamp(round(3 + rating_shift + rating_scale * a), 1, 5)``.
* Every post has a latent quality drawn from a normal distribution
  truncated to [0, 5].  The professor grades
  ``clamp(round(quality + N(0, professor_noise)))`` and a peer grades
  ``clamp(round(quality + bias(relationship) + N(0, grader_noise)))``.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import asdict, dataclass, field, fields
from typing import Optional

import numpy as np

from .assignment import AssignmentEngine, Status
from .dataset import Dataset
from .errors import CohortTooSmall, ValidationError
from .sociometry import GRADE_MAX, GRADE_MIN, Relationship, SociometryDB
from .workflow import Course, TrainingPage

DAY = 24 * 3600
DEFAULT_START = 1_700_000_000


@dataclass(frozen=True)
class SimulationConfig:
    students: int = 64
    skills: int = 26
    posts_per_student_rate: float = 0.51
    min_nominations: int = 4
    max_nominations: int = 6
    like_bias: float = 0.5
    dislike_bias: float = 0.5  # magnitude; dislikers grade this much lower
    grader_noise: float = 0.7
    professor_noise: float = 0.5
    participation_prob: float = 0.85
    quality_mean: float = 3.2
    quality_sd: float = 1.0
    professor_coverage: float = 1.0
    unacquainted_prob: float = 0.1
    rating_shift: float = 0.2
    rating_scale: float = 0.6
    replace_expired: bool = False
    rounding: str = "half_up"
    skill_spacing_days: float = 4.0
    submission_spread_days: float = 3.0
    start_time: int = DEFAULT_START
    seed: int = 0

    def __post_init__(self):
        problems = []
        if self.students < 2:
            problems.append("students must be >= 2")
        if self.skills < 1:
            problems.append("skills must be >= 1")
        if self.posts_per_student_rate < 0:
            problems.append("posts_per_student_rate must be >= 0")
        if not 0 <= self.min_nominations <= self.max_nominations:
            problems.append("need 0 <= min_nominations <= max_nominations")
        for name in ("participation_prob", "professor_coverage", "unacquainted_prob"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                problems.append(f"{name} must lie in [0, 1]")
        for name in ("grader_noise", "professor_noise", "quality_sd"):
            if getattr(self, name) < 0:
                problems.append(f"{name} must be >= 0")
        if not GRADE_MIN <= self.quality_mean <= GRADE_MAX:
            problems.append("quality_mean must lie in [0, 5]")
        if self.rounding not in ("half_up", "half_even"):
            problems.append("rounding must be 'half_up' or 'half_even'")
        if not 0 <= self.seed < 2**64:
            problems.append("seed must be a 64-bit unsigned integer")
        if problems:
            raise ValidationError("invalid simulation config: " + "; ".join(problems))

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "SimulationConfig":
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ValidationError(f"unknown simulation config keys: {unknown}")
        return cls(**data)


@dataclass(frozen=True)
class GraderModel:
    biases: dict = field(default_factory=dict)
    noise: float = 0.7

    @classmethod
    def from_config(cls, cfg: SimulationConfig) -> "GraderModel":
        return cls(
            {
                Relationship.LIKE: cfg.like_bias,
                Relationship.DISLIKE: -cfg.dislike_bias,
                Relationship.NEUTRAL: 0.0,
                Relationship.UNKNOWN: 0.0,
            },
            cfg.grader_noise,
        )

    def bias(self, rel: Relationship) -> float:
        return self.biases.get(rel, 0.0)


def _clamp_round(value: float) -> int:
    # half away from zero, like the final-grade rule
    rounded = math.floor(value + 0.5) if value >= 0 else -math.floor(-value + 0.5)
    return int(min(GRADE_MAX, max(GRADE_MIN, rounded)))


def grader_response(true_quality: float, rel: Relationship, model: GraderModel, rng: np.random.Generator) -> int:
    if not GRADE_MIN <= true_quality <= GRADE_MAX:
        raise ValidationError(f"quality {true_quality} outside [0, 5]")
    noise = rng.normal(0.0, model.noise) if model.noise > 0 else 0.0
    return _clamp_round(true_quality + model.bias(rel) + noise)


def student_ids(n: int) -> list[str]:
    width = len(str(n))
    return [f"s{i + 1:0{width}d}" for i in range(n)]


@dataclass
class Cohort:
    roster: list[str]
    db: SociometryDB
    affinity: np.ndarray
    unacquainted: np.ndarray  # bool matrix, rater x ratee

    def answer_prompt(self, rater: str, ratee: str, shift: float, scale: float = 1.0) -> int:
        i, j = self.roster.index(rater), self.roster.index(ratee)
        if self.unacquainted[i, j]:
            return 0
        return int(min(GRADE_MAX, max(1, _clamp_round(3 + shift + scale * self.affinity[i, j]))))


def generate_cohort(cfg: SimulationConfig, rng: Optional[np.random.Generator] = None) -> Cohort:
    """Roster plus nominations drawn from planted affinities."""
    if cfg.students < 2 * cfg.min_nominations + 1:
        raise CohortTooSmall(
            f"{cfg.students} students cannot each nominate {cfg.min_nominations} liked and disliked peers"
        )
    if rng is None:
        rng = np.random.default_rng(cfg.seed)
    n = cfg.students
    roster = student_ids(n)
    affinity = rng.normal(size=(n, n))
    np.fill_diagonal(affinity, np.nan)
    unacquainted = rng.random((n, n)) < cfg.unacquainted_prob
    db = SociometryDB(roster, min_nominations=cfg.min_nominations)
    for i, owner in enumerate(roster):
        n_like = int(rng.integers(cfg.min_nominations, cfg.max_nominations + 1))
        n_dislike = int(rng.integers(cfg.min_nominations, cfg.max_nominations + 1))
        while n_like + n_dislike > n - 1:
            if n_like >= n_dislike:
                n_like -= 1
            else:
                n_dislike -= 1
        others = [j for j in range(n) if j != i]
        ranked = sorted(others, key=lambda j: (-affinity[i, j], j))
        liked = [roster[j] for j in ranked[:n_like]]
        disliked = [roster[j] for j in ranked[len(ranked) - n_dislike :]]
        db.record_nominations(owner, liked, disliked)
    return Cohort(roster, db, affinity, unacquainted)


def _truncated_normal(rng: np.random.Generator, mean: float, sd: float) -> float:
    if sd == 0:
        return float(min(GRADE_MAX, max(GRADE_MIN, mean)))
    while True:
        v = rng.normal(mean, sd)
        if GRADE_MIN <= v <= GRADE_MAX:
            return float(v)


@dataclass
class SimulationRun:
    config: SimulationConfig
    cohort: Cohort
    course: Course
    quality: dict[str, float]
    dataset: Dataset


def run_semester(cfg: SimulationConfig) -> SimulationRun:
    """Simulate a full semester and keep the internal state for inspection."""
    streams = np.random.SeedSequence(cfg.seed).spawn(6)
    cohort_rng, post_rng, quality_rng, grade_rng, part_rng, prof_rng = (np.random.default_rng(s) for s in streams)
    engine_seed = int(np.random.SeedSequence(cfg.seed).generate_state(1, dtype=np.uint64)[0])

    cohort = generate_cohort(cfg, cohort_rng)
    db = cohort.db
    engine = AssignmentEngine(db, seed=engine_seed, replace_expired=cfg.replace_expired)
    course = Course(db, engine, rounding=cfg.rounding)
    model = GraderModel.from_config(cfg)
    professor = GraderModel({}, cfg.professor_noise)

    skills = [f"k{s + 1:02d}" for s in range(cfg.skills)]
    for skill in skills:
        samples = tuple((f"{skill}-sample{i}", int(post_rng.integers(0, 6))) for i in (1, 2))
        course.add_training_page(TrainingPage(skill, f"criteria for {skill}", samples))
        for student in cohort.roster:
            course.complete_training(student, skill, samples)

    # post schedule: per (skill, student) a Poisson number of submissions;
    # the first is original, later ones resubmit the previous one
    planned = []
    for s, skill in enumerate(skills):
        opens = cfg.start_time + int(s * cfg.skill_spacing_days * DAY)
        spread = max(1, int(cfg.submission_spread_days * DAY))
        for student in cohort.roster:
            count = int(post_rng.poisson(cfg.posts_per_student_rate))
            times = sorted(int(t) for t in opens + post_rng.integers(0, spread, size=count))
            for idx, t in enumerate(times):
                planned.append((t, student, skill, idx))
    planned.sort()

    queue: list = []
    seq = 0

    def push(time, kind, payload):
        nonlocal seq
        heapq.heappush(queue, (time, seq, kind, payload))
        seq += 1

    for item in planned:
        push(item[0], "post", item)

    quality: dict[str, float] = {}
    chain: dict[tuple[str, str], str] = {}
    scheduled = 0
    prompts_seen = 0

    def after_issue(now):
        nonlocal scheduled, prompts_seen
        for a in engine.issued[scheduled:]:
            if part_rng.random() < cfg.participation_prob:
                delay = int(part_rng.integers(0, engine.window + 1))
                push(a.issued_at + delay, "complete", a)
        scheduled = len(engine.issued)
        for prompt in course.prompts[prompts_seen:]:
            score = cohort.answer_prompt(prompt.rater, prompt.ratee, cfg.rating_shift, cfg.rating_scale)
            db.record_peer_rating(prompt.rater, prompt.ratee, score, now)
        prompts_seen = len(course.prompts)

    while True:
        if not queue:
            pending = [a.deadline for a in engine.open_assignments()]
            if not pending:
                break
            now = max(pending) + 1
            course.expire_assignments(now)
            after_issue(now)
            continue
        now, _, kind, payload = heapq.heappop(queue)
        course.expire_assignments(now)
        after_issue(now)
        if kind == "post":
            _, student, skill, idx = payload
            parent = chain.get((student, skill)) if idx > 0 else None
            post = course.submit_post(student, skill, f"{student}/{skill}/{idx}", now, parent=parent)
            chain[(student, skill)] = post.post_id
            q = _truncated_normal(quality_rng, cfg.quality_mean, cfg.quality_sd)
            quality[post.post_id] = q
            if prof_rng.random() < cfg.professor_coverage:
                course.record_professor_rating(post.post_id, grader_response(q, Relationship.NEUTRAL, professor, prof_rng))
            after_issue(now)
        else:
            a = payload
            if a.status is not Status.PENDING or now > a.deadline:
                continue
            rel = db.classify_relationship(a.grader, a.author)
            grade = grader_response(quality[a.post_id], rel, model, grade_rng)
            course.submit_assessment(a, grade, f"feedback from {a.grader} on {a.post_id}", now)

    return SimulationRun(cfg, cohort, course, quality, course.build_dataset())


def simulate_semester(cfg: SimulationConfig) -> Dataset:
    return run_semester(cfg).dataset
