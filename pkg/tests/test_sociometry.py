import pytest
from hypothesis import given
from hypothesis import strategies as st

from peerassess.errors import (
    OverlappingNominations,
    ScoreOutOfRange,
    SelfNomination,
    SelfRating,
    TooFewNominations,
    UnknownStudent,
)
from peerassess.sociometry import RatingThresholds, Relationship, SociometryDB, validate_grade

LETTERS = list("ABCDEFGHIJ")


@pytest.fixture
def sdb():
    return SociometryDB(LETTERS)


def test_nominations_meeting_bounds_exactly(sdb):
    ns = sdb.record_nominations("A", "BCDE", "FGHI", 4)
    assert ns.liked == frozenset("BCDE") and ns.disliked == frozenset("FGHI")
    assert sdb.nominations("A") == ns


def test_too_few_liked(sdb):
    with pytest.raises(TooFewNominations):
        sdb.record_nominations("A", "BCD", "FGHI", 4)


def test_self_nomination(sdb):
    with pytest.raises(SelfNomination):
        sdb.record_nominations("A", "BCDA", "FGHI", 4)


def test_overlap_rejected(sdb):
    with pytest.raises(OverlappingNominations):
        sdb.record_nominations("A", "BCDE", "EFGH", 4)


def test_unknown_student(sdb):
    with pytest.raises(UnknownStudent):
        sdb.record_nominations("A", ["B", "C", "D", "Z"], "FGHI", 4)


def test_duplicates_collapse_before_count(sdb):
    with pytest.raises(TooFewNominations):
        sdb.record_nominations("A", "BBCD", "FGHI", 4)


def test_renomination_overwrites(sdb):
    sdb.record_nominations("A", "BCDE", "FGHI")
    sdb.record_nominations("A", "FGHI", "BCDE")
    assert sdb.classify_relationship("A", "F") is Relationship.LIKE


def test_rating_store_and_zero_marker(sdb):
    r = sdb.record_peer_rating("A", "B", 5)
    assert r.score == 5
    assert sdb.record_peer_rating("A", "C", 0).score == 0
    assert sdb.classify_relationship("A", "C") is Relationship.UNKNOWN


def test_self_rating(sdb):
    with pytest.raises(SelfRating):
        sdb.record_peer_rating("A", "A", 3)


@pytest.mark.parametrize("bad", [-1, 6, 2.5, "x", None])
def test_grade_range(bad):
    with pytest.raises(ScoreOutOfRange):
        validate_grade(bad)


def test_nomination_beats_rating(sdb):
    sdb.record_nominations("A", "BCDE", "FGHI")
    sdb.record_peer_rating("A", "B", 1)
    assert sdb.classify_relationship("A", "B") is Relationship.LIKE


def test_no_data_is_unknown(sdb):
    assert sdb.classify_relationship("A", "B") is Relationship.UNKNOWN


def test_edges_are_directional(sdb):
    sdb.record_nominations("A", "BCDE", "FGHI")
    assert sdb.classify_relationship("A", "B") is Relationship.LIKE
    assert sdb.classify_relationship("B", "A") is Relationship.UNKNOWN


def test_latest_rating_wins_and_history_kept(sdb):
    sdb.record_peer_rating("A", "B", 5, timestamp=10)
    sdb.record_peer_rating("A", "B", 1, timestamp=20)
    assert sdb.classify_relationship("A", "B") is Relationship.DISLIKE
    assert [r.score for r in sdb.rating_history] == [5, 1]


@pytest.mark.parametrize(
    "score,rel",
    [(0, "unknown"), (1, "dislike"), (2, "dislike"), (3, "neutral"), (4, "like"), (5, "like")],
)
def test_threshold_partition(score, rel):
    assert RatingThresholds().classify(score) is Relationship(rel)


@given(st.lists(st.tuples(st.sampled_from(LETTERS), st.sampled_from(LETTERS), st.integers(0, 5)), max_size=40))
def test_classification_is_pure_and_supersede_is_local(ops):
    db = SociometryDB(LETTERS, min_nominations=0)
    for rater, ratee, score in ops:
        if rater == ratee:
            continue
        before = {(g, a): db.classify_relationship(g, a) for g in LETTERS for a in LETTERS if g != a}
        db.record_peer_rating(rater, ratee, score)
        after = {(g, a): db.classify_relationship(g, a) for g in LETTERS for a in LETTERS if g != a}
        changed = {k for k in before if before[k] != after[k]}
        assert changed <= {(rater, ratee)}
        assert after[(rater, ratee)] is RatingThresholds().classify(score)
        # identical state, identical answers
        assert after == {(g, a): db.classify_relationship(g, a) for g in LETTERS for a in LETTERS if g != a}


@given(st.data())
def test_nominations_never_yield_both_classes(data):
    db = SociometryDB(LETTERS, min_nominations=0)
    owner = data.draw(st.sampled_from(LETTERS))
    others = [s for s in LETTERS if s != owner]
    labels = data.draw(st.lists(st.sampled_from("LDN"), min_size=len(others), max_size=len(others)))
    liked = [s for s, lab in zip(others, labels) if lab == "L"]
    disliked = [s for s, lab in zip(others, labels) if lab == "D"]
    db.record_nominations(owner, liked, disliked)
    for a in others:
        rel = db.classify_relationship(owner, a)
        assert (rel is Relationship.LIKE) == (a in liked)
        assert (rel is Relationship.DISLIKE) == (a in disliked)
