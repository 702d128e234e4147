"""Delimited-text tables, configuration files and run manifests.

A dataset directory holds one file per table, each with a header row.
Comma is the default delimiter; a file whose header contains a tab is read
as tab-delimited.  Timestamps are integer UTC seconds since the epoch.
Lists of student ids (nominations) are space-separated inside one field.

=================  ==========================================================
file               columns
=================  ==========================================================
students.csv       student_id
posts.csv          post_id, author_id, skill_id, parent_post_id, created_at
assessments.csv    post_id, grader_id, grade, feedback, submitted_at
professor.csv      post_id, grade, reply (optional)
nominations.csv    owner_id, liked_ids, disliked_ids
ratings.csv        rater_id, ratee_id, score, timestamp
training.csv       student_id, skill_id, completed, attempts
assignments.csv    post_id, grader_id, issued_at, deadline, status,
                   relationship_at_issue
dataset.csv        flattened export, see :data:`DATASET_COLUMNS`
=================  ==========================================================
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import os
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterable, Optional, Sequence

from . import __version__
from .assignment import Assignment, Status
from .dataset import Dataset, PeerAssessment, Post, ProfessorRating, has_feedback
from .errors import ParseError, PeerAssessError, SchemaMismatch, ValidationError
from .sociometry import (
    DEFAULT_MIN_NOMINATIONS,
    NominationSet,
    PeerRating,
    RatingThresholds,
    Relationship,
    SociometryDB,
    validate_grade,
)

CONFIG_ENV = "PEERASSESS_CONFIG"

TABLES = {
    "students": ("student_id",),
    "posts": ("post_id", "author_id", "skill_id", "parent_post_id", "created_at"),
    "assessments": ("post_id", "grader_id", "grade", "feedback", "submitted_at"),
    "professor": ("post_id", "grade", "reply"),
    "nominations": ("owner_id", "liked_ids", "disliked_ids"),
    "ratings": ("rater_id", "ratee_id", "score", "timestamp"),
    "training": ("student_id", "skill_id", "completed", "attempts"),
    "assignments": ("post_id", "grader_id", "issued_at", "deadline", "status", "relationship_at_issue"),
}
OPTIONAL_COLUMNS = {"professor": {"reply"}, "posts": {"parent_post_id"}}
DATASET_COLUMNS = (
    "post_id",
    "skill_id",
    "author_id",
    "grader_id",
    "relationship",
    "peer_grade",
    "professor_rating",
    "assessment_count",
    "final_peer_grade",
    "mean_peer_grade",
    "submitted_at",
)


# --- low-level table i/o -------------------------------------------------------


def _write_rows(path: Path, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    path.write_text(buf.getvalue(), encoding="utf-8")


def read_table(path: Path, table: str) -> list[tuple[int, dict[str, str]]]:
    """Rows of a table as ``(line_number, {column: text})``."""
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    first = text.split("\n", 1)[0]
    delimiter = "\t" if "\t" in first else ","
    reader = csv.DictReader(io.StringIO(text), delimiter=delimiter)
    header = reader.fieldnames or []
    required = set(TABLES[table]) - OPTIONAL_COLUMNS.get(table, set())
    missing = sorted(required - set(header))
    if missing:
        raise SchemaMismatch(f"{path}: missing columns {missing}; expected {list(TABLES[table])}")
    rows = []
    for row in reader:
        if None in row:
            raise ParseError("too many fields", str(path), reader.line_num)
        rows.append((reader.line_num, row))
    return rows


def _field(path, line, row, column, convert: Callable = str, optional=False):
    raw = row.get(column)
    if raw is None or raw == "":
        if optional:
            return None
        raise ParseError("missing value", str(path), line, column)
    try:
        return convert(raw)
    except (ValueError, PeerAssessError) as exc:
        raise ParseError(f"bad value {raw!r}: {exc}", str(path), line, column) from None


def _int(text: str) -> int:
    return int(text.strip())


def _grade(text: str) -> int:
    return validate_grade(_int(text))


def _ids(text: str) -> list[str]:
    return text.split()


# --- dataset -----------------------------------------------------------------


@dataclass(frozen=True)
class LoadReport:
    assessments_read: int
    dropped_empty_feedback: int
    dropped_inactive_graders: int
    students_never_assessed: int

    @property
    def assessments_kept(self) -> int:
        return self.assessments_read - self.dropped_empty_feedback - self.dropped_inactive_graders


def write_dataset(ds: Dataset, directory) -> list[Path]:
    """Write every table of ``ds`` plus the flattened ``dataset.csv``."""
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    written = []

    def put(name, header, rows):
        path = d / f"{name}.csv"
        _write_rows(path, header, rows)
        written.append(path)

    put("students", TABLES["students"], [(s,) for s in ds.students])
    put(
        "posts",
        TABLES["posts"],
        [(p.post_id, p.author, p.skill_id, p.parent_post or "", p.created_at) for p in ds.posts],
    )
    put(
        "assessments",
        TABLES["assessments"],
        [(a.post_id, a.grader, a.grade, a.feedback, a.submitted_at) for a in ds.assessments],
    )
    put("professor", TABLES["professor"], [(r.post_id, r.grade, r.reply) for r in ds.professor_ratings])
    put(
        "nominations",
        TABLES["nominations"],
        [(n.owner, " ".join(sorted(n.liked)), " ".join(sorted(n.disliked))) for n in ds.nominations],
    )
    put("ratings", TABLES["ratings"], [(r.rater, r.ratee, r.score, r.timestamp) for r in ds.ratings])
    put("dataset", DATASET_COLUMNS, [_record_row(r) for r in ds.records])
    return written


def _record_row(r) -> tuple:
    return (
        r.post_id,
        r.skill_id,
        r.author,
        r.grader,
        r.relationship.value,
        r.peer_grade,
        "" if r.professor_rating is None else r.professor_rating,
        r.assessment_count,
        r.final_peer_grade,
        repr(r.mean_peer_grade),
        r.submitted_at,
    )


def load_dataset(
    directory,
    *,
    min_nominations: int = DEFAULT_MIN_NOMINATIONS,
    thresholds: RatingThresholds = RatingThresholds(),
    rounding: str = "half_up",
    with_report: bool = False,
):
    """Load a dataset directory and apply the cleaning rules.

    Assessments without feedback are dropped, then any assessment written by
    a student left with no assessments at all (a no-op once the first rule
    has run, kept for parity with the documented procedure).  With
    ``with_report`` a ``(Dataset, LoadReport)`` pair is returned.
    """
    d = Path(directory)
    if not d.is_dir():
        raise ValidationError(f"{d} is not a dataset directory")

    def table(name):
        path = d / f"{name}.csv"
        if not path.exists():
            raise SchemaMismatch(f"{d}: missing table {name}.csv")
        return path, read_table(path, name)

    path, rows = table("students")
    students = [_field(path, ln, row, "student_id") for ln, row in rows]

    path, rows = table("posts")
    posts = [
        Post(
            post_id=_field(path, ln, row, "post_id"),
            author=_field(path, ln, row, "author_id"),
            skill_id=_field(path, ln, row, "skill_id"),
            created_at=_field(path, ln, row, "created_at", _int),
            parent_post=_field(path, ln, row, "parent_post_id", optional=True),
        )
        for ln, row in rows
    ]

    path, rows = table("assessments")
    assessments = [
        PeerAssessment(
            post_id=_field(path, ln, row, "post_id"),
            grader=_field(path, ln, row, "grader_id"),
            grade=_field(path, ln, row, "grade", _grade),
            feedback=row.get("feedback") or "",
            submitted_at=_field(path, ln, row, "submitted_at", _int),
        )
        for ln, row in rows
    ]

    path, rows = table("professor")
    professor = [
        ProfessorRating(
            post_id=_field(path, ln, row, "post_id"),
            grade=_field(path, ln, row, "grade", _grade),
            reply=row.get("reply") or "",
        )
        for ln, row in rows
    ]

    path, rows = table("nominations")
    nominations = [
        (ln, _field(path, ln, row, "owner_id"), _ids(row.get("liked_ids") or ""), _ids(row.get("disliked_ids") or ""))
        for ln, row in rows
    ]
    check = SociometryDB(students, min_nominations=min_nominations, thresholds=thresholds)
    nomination_sets = []
    for ln, owner, liked, disliked in nominations:
        try:
            nomination_sets.append(check.record_nominations(owner, liked, disliked))
        except ValidationError as exc:
            raise type(exc)(f"{path}:{ln}: {exc}") from None

    path, rows = table("ratings")
    ratings = [
        PeerRating(
            rater=_field(path, ln, row, "rater_id"),
            ratee=_field(path, ln, row, "ratee_id"),
            score=_field(path, ln, row, "score", _grade),
            timestamp=_field(path, ln, row, "timestamp", _int),
        )
        for ln, row in rows
    ]

    kept = [a for a in assessments if has_feedback(a.feedback)]
    dropped_empty = len(assessments) - len(kept)
    active = {a.grader for a in kept}
    cleaned = [a for a in kept if a.grader in active]
    report = LoadReport(
        assessments_read=len(assessments),
        dropped_empty_feedback=dropped_empty,
        dropped_inactive_graders=len(kept) - len(cleaned),
        students_never_assessed=sum(s not in active for s in dict.fromkeys(students)),
    )
    ds = Dataset.from_tables(
        students,
        posts,
        cleaned,
        professor,
        nomination_sets,
        ratings,
        thresholds=thresholds,
        rounding=rounding,
    )
    return (ds, report) if with_report else ds


# --- auxiliary workflow tables ---------------------------------------------------


def write_assignments(assignments: Iterable[Assignment], path) -> None:
    _write_rows(
        Path(path),
        TABLES["assignments"],
        [
            (a.post_id, a.grader, a.issued_at, a.deadline, a.status.value, a.relationship_at_issue.value)
            for a in assignments
        ],
    )


def read_assignments(path) -> list[Assignment]:
    path = Path(path)
    out = []
    for ln, row in read_table(path, "assignments"):
        out.append(
            Assignment(
                post_id=_field(path, ln, row, "post_id"),
                grader=_field(path, ln, row, "grader_id"),
                author="",
                issued_at=_field(path, ln, row, "issued_at", _int),
                deadline=_field(path, ln, row, "deadline", _int),
                relationship_at_issue=_field(path, ln, row, "relationship_at_issue", Relationship),
                status=_field(path, ln, row, "status", Status),
            )
        )
    return out


def write_training(statuses, path) -> None:
    _write_rows(
        Path(path),
        TABLES["training"],
        [(t.student_id, t.skill_id, int(t.completed), t.attempts) for t in statuses],
    )


def read_training(path) -> list[tuple[str, str, bool, int]]:
    path = Path(path)

    def flag(text):
        if text not in ("0", "1"):
            raise ValueError("expected 0 or 1")
        return text == "1"

    return [
        (
            _field(path, ln, row, "student_id"),
            _field(path, ln, row, "skill_id"),
            _field(path, ln, row, "completed", flag),
            _field(path, ln, row, "attempts", _int),
        )
        for ln, row in read_table(path, "training")
    ]


def read_item_matrix(path) -> list[list[float]]:
    """Respondents x items score matrix; header row holds item names."""
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    delimiter = "\t" if "\t" in text.split("\n", 1)[0] else ","
    reader = csv.reader(io.StringIO(text), delimiter=delimiter)
    header = next(reader, None)
    if not header:
        raise SchemaMismatch(f"{path}: empty item file")
    rows = []
    for line, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != len(header):
            raise ParseError(f"expected {len(header)} fields, got {len(row)}", str(path), line)
        try:
            rows.append([float(v) for v in row])
        except ValueError as exc:
            raise ParseError(str(exc), str(path), line) from None
    return rows


# --- config and manifest ---------------------------------------------------------


def load_config(path=None) -> dict:
    """Read a YAML or JSON mapping.  ``path`` falls back to $PEERASSESS_CONFIG."""
    if path is None:
        path = os.environ.get(CONFIG_ENV)
    if path is None:
        raise ValidationError(f"no config file given and ${CONFIG_ENV} is unset")
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    if path.suffix.lower() == ".json":
        data = json.loads(text)
    else:
        import yaml

        data = yaml.safe_load(text)
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise SchemaMismatch(f"{path}: configuration must be a mapping")
    return data


def file_digest(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def directory_digests(directory) -> dict[str, str]:
    d = Path(directory)
    return {p.name: file_digest(p) for p in sorted(d.glob("*.csv"))}


def write_manifest(path, *, command: str, config: Optional[dict], seed, inputs: dict, outputs: dict) -> dict:
    """Write the run manifest.  ``SOURCE_DATE_EPOCH`` pins the timestamp."""
    stamp = int(os.environ.get("SOURCE_DATE_EPOCH", time.time()))
    manifest = {
        "tool": "peerassess",
        "version": __version__,
        "command": command,
        "config": config,
        "seed": seed,
        "inputs": inputs,
        "outputs": outputs,
        "created_at": stamp,
    }
    Path(path).write_text(dump_json(manifest), encoding="utf-8")
    return manifest


def dump_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=False) + "\n"
