"""Shared exception types.

Kept deliberately small: callers distinguish "you asked for something that
does not exist" (NotFoundError), "your inputs are inconsistent with each
other" (ConfigError), and "the input bytes are broken" (ParseError). Plain
ValueError is used for single-value validation failures.
"""


class CampusTraceError(Exception):
    """Base class for library-specific errors."""


class NotFoundError(CampusTraceError, KeyError):
    """A referenced user, dataset, or run does not exist."""


class ConfigError(CampusTraceError, ValueError):
    """Mutually inconsistent configuration (e.g. mismatched time grids)."""


class ParseError(CampusTraceError, ValueError):
    """Malformed input document.

    ``offset`` is the byte/character offset of the failure when known.
    """

    def __init__(self, message: str, offset: int | None = None):
        super().__init__(message)
        self.offset = offset
