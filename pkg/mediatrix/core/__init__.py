"""Core exception types."""

from mediatrix.core.exceptions import (
    EXIT_INPUT_ERROR,
    EXIT_VIOLATION,
    BadCut,
    ChannelError,
    ConfigError,
    ConfigOutOfRange,
    ConfigParseError,
    DimensionMismatch,
    DuplicateLabel,
    EmptyEnsemble,
    EmptyKeepSet,
    LayoutMismatch,
    LoccError,
    MediatorOverflow,
    MediatrixError,
    MissingTranscriptInstrument,
    NegativeProbability,
    NoClassicalLeg,
    NotAState,
    NotCP,
    NotGClassical,
    NotNormalized,
    NotTracePreserving,
    SchemaViolation,
    ShapeMismatch,
    UnknownLabel,
    ValidationError,
    ZeroDimension,
)

__all__ = [
    "EXIT_INPUT_ERROR",
    "EXIT_VIOLATION",
    "BadCut",
    "ChannelError",
    "ConfigError",
    "ConfigOutOfRange",
    "ConfigParseError",
    "DimensionMismatch",
    "DuplicateLabel",
    "EmptyEnsemble",
    "EmptyKeepSet",
    "LayoutMismatch",
    "LoccError",
    "MediatorOverflow",
    "MediatrixError",
    "MissingTranscriptInstrument",
    "NegativeProbability",
    "NoClassicalLeg",
    "NotAState",
    "NotCP",
    "NotGClassical",
    "NotNormalized",
    "NotTracePreserving",
    "SchemaViolation",
    "ShapeMismatch",
    "UnknownLabel",
    "ValidationError",
    "ZeroDimension",
]
