import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from peerassess.assignment import AssignmentEngine  # noqa: E402
from peerassess.sociometry import SociometryDB  # noqa: E402
from peerassess.workflow import Course, TrainingPage  # noqa: E402

ROSTER = [f"s{i:02d}" for i in range(1, 13)]


def make_db(roster=ROSTER, min_nominations=2):
    """Ring-shaped nominations: each student likes the next two and dislikes
    the previous two (directional, so likes need not be mutual)."""
    db = SociometryDB(roster, min_nominations=min_nominations)
    n = len(roster)
    for i, s in enumerate(roster):
        liked = [roster[(i + d) % n] for d in (1, 2)]
        disliked = [roster[(i - d) % n] for d in (1, 2)]
        db.record_nominations(s, liked, disliked)
    return db


@pytest.fixture
def db():
    return make_db()


SAMPLES = (("sample-a", 3), ("sample-b", 5))


def make_course(seed=0, trained=True, replace_expired=True):
    db = make_db()
    course = Course(db, AssignmentEngine(db, seed=seed, replace_expired=replace_expired))
    course.add_training_page(TrainingPage("k01", "rubric", SAMPLES))
    if trained:
        for s in ROSTER:
            course.complete_training(s, "k01", dict(SAMPLES))
    return course


@pytest.fixture
def course():
    return make_course()


ACCEPTANCE_LINES: list = []


def pytest_terminal_summary(terminalreporter):
    # test modules import this file by plain name, which may be a second copy
    lines = getattr(sys.modules.get("conftest"), "ACCEPTANCE_LINES", ACCEPTANCE_LINES)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
