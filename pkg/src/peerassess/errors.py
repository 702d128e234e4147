"""Exception hierarchy.

Every error raised on purpose by this package derives from
:class:`PeerAssessError`.  Errors that describe bad input data (as opposed
to a bug or an unexpected state) derive from :class:`ValidationError`; the
command-line tool maps those to exit status 2.
"""


class PeerAssessError(Exception):
    """Base class for all package errors."""


class ValidationError(PeerAssessError):
    """Input data violates a documented precondition."""


# sociometry
class TooFewNominations(ValidationError):
    pass


class OverlappingNominations(ValidationError):
    pass


class SelfNomination(ValidationError):
    pass


class SelfRating(ValidationError):
    pass


class ScoreOutOfRange(ValidationError):
    """A grade or peer rating outside 0..5."""


class UnknownStudent(ValidationError):
    pass


# assignment
class EmptyPool(PeerAssessError):
    pass


class NotAResubmission(ValidationError):
    pass


class InvalidTransition(PeerAssessError):
    """Assignment status change other than Pending -> Completed/Expired."""


class ShortPoolWarning(UserWarning):
    """Fewer eligible reviewers than requested slots."""


# workflow
class MissingAnswers(ValidationError):
    pass


class UnknownSkill(ValidationError):
    pass


class UnknownPost(ValidationError):
    pass


class TrainingIncomplete(PeerAssessError):
    pass


class AssignmentExpired(PeerAssessError):
    pass


class EmptyFeedback(ValidationError):
    pass


class DuplicateAssessment(PeerAssessError):
    pass


class DuplicateRating(PeerAssessError):
    pass


class NoAssessments(PeerAssessError):
    pass


class UnknownViewer(ValidationError):
    pass


# statistics
class DegenerateMatrix(ValidationError):
    pass


class InvalidAlpha(ValidationError):
    pass


class OutOfRange(ValidationError):
    pass


class LengthMismatch(ValidationError):
    pass


class ConstantInput(ValidationError):
    pass


class ZeroVarianceGroup(ValidationError):
    pass


class TooFewGroups(ValidationError):
    pass


class ParameterOutOfRange(ValidationError):
    pass


class NonConvergence(PeerAssessError):
    pass


# simulation
class CohortTooSmall(ValidationError):
    pass


# file i/o
class ParseError(ValidationError):
    def __init__(self, message: str, path: str = "", line: int = 0, column: str = ""):
        location = f"{path}:{line}" if path else f"line {line}"
        if column:
            location += f" column {column!r}"
        super().__init__(f"{location}: {message}")
        self.path = path
        self.line = line
        self.column = column


class SchemaMismatch(ValidationError):
    pass


class ReferentialIntegrity(ValidationError):
    pass
