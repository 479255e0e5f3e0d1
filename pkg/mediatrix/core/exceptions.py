"""Custom simulator exceptions."""

from typing import Any

EXIT_INPUT_ERROR = 1
EXIT_VIOLATION = 2


class MediatrixError(Exception):
    """Base simulator exception."""

    def __init__(
        self,
        detail: str = "An unexpected error occurred",
        exit_code: int = EXIT_INPUT_ERROR,
    ) -> None:
        self.detail = detail
        self.exit_code = exit_code
        super().__init__(detail)


# ---------------------------------------------------------------------------
# Layouts, operators and states
# ---------------------------------------------------------------------------


class ValidationError(MediatrixError):
    """Validation error exception."""

    def __init__(self, detail: str = "Validation failed") -> None:
        super().__init__(detail=detail)


class ZeroDimension(ValidationError):
    """Subsystem declared with a non-positive dimension."""

    def __init__(self, label: str, dim: int) -> None:
        super().__init__(f"Subsystem '{label}' must have dim >= 1, got {dim}")


class DuplicateLabel(ValidationError):
    """Subsystem label used twice in one layout."""

    def __init__(self, label: str) -> None:
        super().__init__(f"Subsystem label '{label}' appears more than once")


class UnknownLabel(ValidationError):
    """Subsystem not found in layout."""

    def __init__(self, label: str, labels: tuple[str, ...] | None = None) -> None:
        detail = f"Subsystem '{label}' not found"
        if labels is not None:
            detail = f"Subsystem '{label}' not found in layout {list(labels)}"
        super().__init__(detail)


class EmptyKeepSet(ValidationError):
    """Partial trace asked to keep nothing."""

    def __init__(self, detail: str = "Partial trace needs at least one subsystem to keep") -> None:
        super().__init__(detail)


class DimensionMismatch(ValidationError):
    """Operator or factor dimension does not match its leg."""

    def __init__(self, detail: str = "Dimension does not match the layout") -> None:
        super().__init__(detail)


class ShapeMismatch(ValidationError):
    """Kraus or Choi matrix shape inconsistent with the declared layouts."""

    def __init__(self, detail: str = "Matrix shape does not match the declared layouts") -> None:
        super().__init__(detail)


class LayoutMismatch(ValidationError):
    """Object supplied on a layout other than the one required."""

    def __init__(self, expected: Any = None, actual: Any = None) -> None:
        detail = "Layout mismatch"
        if expected is not None and actual is not None:
            detail = f"Layout mismatch: expected {expected}, got {actual}"
        super().__init__(detail)


class NotAState(ValidationError):
    """Matrix is not a density matrix within tolerance."""

    def __init__(self, detail: str = "Matrix is not a valid density matrix") -> None:
        super().__init__(detail)


class NotNormalized(ValidationError):
    """Probability distribution does not sum to one."""

    def __init__(self, total: float) -> None:
        super().__init__(f"Probabilities must sum to 1, got {total!r}")


class NegativeProbability(ValidationError):
    """Probability distribution with a negative entry."""

    def __init__(self, index: int, value: float) -> None:
        super().__init__(f"Probability at index {index} is negative: {value!r}")


# ---------------------------------------------------------------------------
# Channels
# ---------------------------------------------------------------------------


class ChannelError(MediatrixError):
    """Channel construction or classification failure."""

    def __init__(self, detail: str = "Invalid channel") -> None:
        super().__init__(detail)


class NotTracePreserving(ChannelError):
    """Kraus sum or Choi marginal deviates from the identity."""

    def __init__(self, deviation: float, tolerance: float) -> None:
        self.deviation = deviation
        super().__init__(f"Map is not trace preserving: deviation {deviation:.3e} > {tolerance:.1e}")


class NotCP(ChannelError):
    """Choi matrix has a negative eigenvalue."""

    def __init__(self, min_eigenvalue: float) -> None:
        self.min_eigenvalue = min_eigenvalue
        super().__init__(f"Map is not completely positive: Choi eigenvalue {min_eigenvalue:.3e}")


class NoClassicalLeg(ChannelError):
    """Layout has no subsystem flagged classical."""

    def __init__(self, detail: str = "Layout has no classical subsystem") -> None:
        super().__init__(detail)


class NotGClassical(ChannelError):
    """Interaction is not invariant under pinching of the mediator."""

    def __init__(self, detail: str = "Interaction does not respect the classical mediator") -> None:
        super().__init__(detail)


# ---------------------------------------------------------------------------
# Entanglement and protocols
# ---------------------------------------------------------------------------


class BadCut(ValidationError):
    """Bipartition does not split the layout."""

    def __init__(self, detail: str = "Cut must partition the layout into two non-empty sides") -> None:
        super().__init__(detail)


class EmptyEnsemble(ValidationError):
    """Ensemble with no terms."""

    def __init__(self, detail: str = "Ensemble has no terms") -> None:
        super().__init__(detail)


class LoccError(MediatrixError):
    """LOCC protocol construction or compilation failure."""

    def __init__(self, detail: str = "Invalid LOCC protocol") -> None:
        super().__init__(detail)


class MissingTranscriptInstrument(LoccError):
    """No instrument assigned to a reachable transcript."""

    def __init__(self, round_index: int, transcript: tuple[int, ...]) -> None:
        super().__init__(f"Round {round_index} has no instrument for transcript {list(transcript)}")


class MediatorOverflow(LoccError):
    """Transcript register larger than the configured cap."""

    def __init__(self, needed: int, cap: int) -> None:
        super().__init__(f"Transcript register needs dimension {needed}, cap is {cap}")


# ---------------------------------------------------------------------------
# Configuration
# ---------------------------------------------------------------------------


class ConfigError(MediatrixError):
    """Configuration problem."""

    def __init__(self, detail: str = "Invalid configuration") -> None:
        super().__init__(detail)


class ConfigParseError(ConfigError):
    """Scenario file could not be read or parsed."""

    def __init__(self, path: str, reason: str) -> None:
        super().__init__(f"Cannot parse config '{path}': {reason}")


class SchemaViolation(ConfigError):
    """Scenario file parsed but failed schema validation."""

    def __init__(self, detail: str = "Config does not match the schema") -> None:
        super().__init__(detail)


class ConfigOutOfRange(ConfigError):
    """Parameter outside the configured caps."""

    def __init__(self, name: str, value: Any, limit: Any) -> None:
        super().__init__(f"{name}={value} is outside the allowed range (limit {limit})")
