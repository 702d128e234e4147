import math
from collections import Counter

import numpy as np
import pytest
from scipy.stats import binom, norm

from peerassess.assignment import Status
from peerassess.errors import CohortTooSmall, ValidationError
from peerassess.simulator import (
    GraderModel,
    SimulationConfig,
    generate_cohort,
    grader_response,
    run_semester,
    simulate_semester,
)
from peerassess.sociometry import Relationship


def test_cohort_of_64():
    c = generate_cohort(SimulationConfig(students=64, min_nominations=4, seed=1))
    noms = c.db.all_nominations()
    assert len(noms) == 64
    assert all(len(n.liked) >= 4 and len(n.disliked) >= 4 for n in noms)


def test_cohort_boundary():
    c = generate_cohort(SimulationConfig(students=9, min_nominations=4, max_nominations=6))
    assert all(len(n.liked) == 4 and len(n.disliked) == 4 for n in c.db.all_nominations())
    with pytest.raises(CohortTooSmall):
        generate_cohort(SimulationConfig(students=8, min_nominations=4))


def test_noiseless_identity_and_clamp():
    rng = np.random.default_rng(0)
    assert grader_response(4.0, Relationship.NEUTRAL, GraderModel({}, 0.0), rng) == 4
    like = GraderModel({Relationship.LIKE: 0.5}, 0.0)
    assert grader_response(4.8, Relationship.LIKE, like, rng) == 5


def _clamped_rounded_mean(mu, sd):
    # grade g covers [g - .5, g + .5) with the ends absorbing the tails
    cuts = [-math.inf, 0.5, 1.5, 2.5, 3.5, 4.5, math.inf]
    probs = [norm.cdf(cuts[g + 1], mu, sd) - norm.cdf(cuts[g], mu, sd) for g in range(6)]
    mean = sum(g * p for g, p in enumerate(probs))
    var = sum((g - mean) ** 2 * p for g, p in enumerate(probs))
    return mean, var


def test_grader_response_monte_carlo():
    model = GraderModel({Relationship.LIKE: 0.5}, 0.7)
    rng = np.random.default_rng(123)
    n = 100_000
    draws = np.array([grader_response(3.0, Relationship.LIKE, model, rng) for _ in range(n)])
    mean, var = _clamped_rounded_mean(3.5, 0.7)
    assert abs(draws.mean() - mean) <= 3 * math.sqrt(var / n)


def test_config_validation_and_dict_roundtrip():
    cfg = SimulationConfig(seed=5, like_bias=0.3)
    assert SimulationConfig.from_dict(cfg.to_dict()) == cfg
    with pytest.raises(ValidationError):
        SimulationConfig.from_dict({"bogus": 1})
    with pytest.raises(ValidationError):
        SimulationConfig(participation_prob=1.5)


def test_determinism():
    cfg = SimulationConfig(students=20, skills=4, posts_per_student_rate=1.0, seed=9)
    assert simulate_semester(cfg) == simulate_semester(cfg)
    assert simulate_semester(cfg) != simulate_semester(SimulationConfig(**{**cfg.to_dict(), "seed": 10}))


def test_full_participation_gives_five_assessments():
    cfg = SimulationConfig(students=30, skills=6, participation_prob=1.0, seed=4)
    ds = simulate_semester(cfg)
    counts = Counter(r.assessment_count for r in ds.records)
    assert set(counts) == {5}


def test_single_redraw_binomial():
    # each slot succeeds first time w.p. p, else its one replacement does: 1 - (1 - p)^2
    p = 0.8
    cfg = SimulationConfig(participation_prob=p, replace_expired=True, seed=77)
    run = run_semester(cfg)
    per_post = Counter(r.post_id for r in run.dataset.records)
    n_posts = len(run.course.posts)
    observed = Counter(per_post.get(pid, 0) for pid in run.course.posts)
    slot = 1 - (1 - p) ** 2
    for k in range(6):
        expected = binom.pmf(k, 5, slot)
        sigma = math.sqrt(expected * (1 - expected) / n_posts)
        assert abs(observed[k] / n_posts - expected) <= 4 * sigma + 1e-3, (k, observed[k], expected)


def test_generated_state_obeys_invariants():
    run = run_semester(SimulationConfig(students=24, skills=8, posts_per_student_rate=0.8, replace_expired=True, seed=3))
    engine, course = run.course.engine, run.course
    for post_id, post in course.posts.items():
        live = [a for a in engine.assignments(post_id) if a.status is not Status.EXPIRED]
        rels = Counter(a.relationship_at_issue for a in live)
        assert rels[Relationship.LIKE] <= 1 and rels[Relationship.DISLIKE] <= 1
        assert post.author not in {a.grader for a in engine.assignments(post_id)}
        graders = [a.grader for a in course.assessments(post_id)]
        assert len(graders) == len(set(graders))
        assert all(course.is_trained(g, post.skill_id) for g in graders)
    assert not engine.open_assignments()


def test_planted_bias_ordering():
    ds = simulate_semester(SimulationConfig(seed=11))
    from peerassess.stats.tables import relationship_bias_report

    groups = relationship_bias_report(ds).final_difference.groups
    assert groups["dislike"].mean < groups["neutral"].mean < groups["like"].mean
