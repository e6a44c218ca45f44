"""Exception hierarchy shared across the workbench."""


class CtlabError(Exception):
    """Base class for all workbench errors."""


class ValidationError(CtlabError):
    """Input data violates a schema or label invariant."""


class ParseError(ValidationError):
    """A row or record could not be parsed."""


class EmptyInputError(ValidationError):
    """An operation received an empty selection where data is required."""


class ConfigurationError(CtlabError):
    """A config value, path, or resolvable id is invalid or missing."""


class TrainingError(CtlabError):
    """Training aborted (NaN loss, resolver failure, ...)."""


class LeakageError(CtlabError):
    """Test-split data reached a component that must never see it."""


class SessionCapError(CtlabError):
    """Annotator hit the per-session annotation cap."""


class AuthorizationError(CtlabError):
    """Caller lacks the role required for the operation."""


class StateError(CtlabError):
    """Operation is illegal in the object's current state."""
