"""Peer assessment with sociometric reviewer assignment and reliability analysis."""

__version__ = "0.1.0"

from .assignment import Assignment, AssignmentEngine, select_reviewers
from .dataset import AssessmentRecord, Dataset, PeerAssessment, Post, ProfessorRating, final_peer_grade
from .errors import PeerAssessError, ValidationError
from .simulator import SimulationConfig, run_semester, simulate_semester
from .sociometry import NominationSet, PeerRating, Relationship, SociometryDB
from .workflow import Course, TrainingPage

__all__ = [
    "AssessmentRecord",
    "Assignment",
    "AssignmentEngine",
    "Course",
    "Dataset",
    "NominationSet",
    "PeerAssessError",
    "PeerAssessment",
    "PeerRating",
    "Post",
    "ProfessorRating",
    "Relationship",
    "SimulationConfig",
    "SociometryDB",
    "TrainingPage",
    "ValidationError",
    "__version__",
    "final_peer_grade",
    "run_semester",
    "select_reviewers",
    "simulate_semester",
]
