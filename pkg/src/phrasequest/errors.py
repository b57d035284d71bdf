"""Exception types shared across the package.

Every error a caller is expected to catch has its own class; handlers in the
HTTP layer map them to status codes, so messages should be short and concrete.
"""


class PhraseQuestError(Exception):
    """Base class for all package errors."""


# --- configuration ----------------------------------------------------------

class ConfigParseError(PhraseQuestError):
    """The config document could not be parsed at all."""


class ValidationError(PhraseQuestError):
    """A parsed config violates an invariant; message names the first one."""


class UnknownState(PhraseQuestError):
    """A game-state label has no configured scene asset."""


# --- phrase tracking --------------------------------------------------------

class UnknownPhrase(PhraseQuestError):
    """A detection refers to a phrase outside the tracked set."""


# --- session engine ---------------------------------------------------------

class InvalidHero(PhraseQuestError):
    pass


class InvalidPracticeSet(PhraseQuestError):
    pass


class IllegalTransition(PhraseQuestError):
    """Next location is outside the phase's set or skips a checkpoint."""


class SessionFinished(PhraseQuestError):
    """The session already completed its final turn."""


class MissingPhaseValue(PhraseQuestError):
    pass


# --- narrative provider orchestration ---------------------------------------

class MalformedResponse(PhraseQuestError):
    """Provider reply could not be parsed into the structured format."""


class ContractViolation(PhraseQuestError):
    """Parsed reply violates a response invariant; message is the reason."""


class ProviderFailure(PhraseQuestError):
    """All retry attempts were exhausted.

    ``attempts`` holds one ``(raw_reply, reason)`` pair per failed attempt.
    """

    def __init__(self, message: str, attempts: list[tuple[str, str]]):
        super().__init__(message)
        self.attempts = attempts


class TransportError(PhraseQuestError):
    """Network-level failure, or a scripted fixture miss."""


# --- assessment -------------------------------------------------------------

class WrongSelectionCount(PhraseQuestError):
    pass


class MissingElicitation(PhraseQuestError):
    """Elicited text missing for a rated phrase (or present when forbidden)."""


class IncompleteResponses(PhraseQuestError):
    pass


class GraderFailure(PhraseQuestError):
    """Grader errored, or returned a score outside {0, 0.5, 1.0}."""


class SessionNotFinished(PhraseQuestError):
    pass


# --- analytics --------------------------------------------------------------

class DegeneratePre(PhraseQuestError):
    """Pre-score equals the maximum; the growth-rate denominator is zero."""


class EmptyGroup(PhraseQuestError):
    pass


class InconsistentIds(PhraseQuestError):
    pass


# --- service ----------------------------------------------------------------

class NotFound(PhraseQuestError):
    pass


class Busy(PhraseQuestError):
    """A turn for this session is already in flight."""


class AsrFailure(PhraseQuestError):
    pass


class CorruptLog(PhraseQuestError):
    pass
