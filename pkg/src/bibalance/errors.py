"""Semantic exception hierarchy for the bookmaking game library.

Public functions raise these instead of bare ValueError so callers can
distinguish bad inputs from protocol violations and capacity guards.
"""


class BookmakingError(Exception):
    """Base class for all library errors."""


class DomainError(BookmakingError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class InfeasibleError(BookmakingError):
    """A requested value pair or tree parameter admits no interior odds."""


class CapacityError(BookmakingError):
    """An exact computation was requested beyond its enumeration guard."""


class ProtocolError(BookmakingError):
    """A strategy violated the sequential game protocol.

    Carries the 1-based round index and the offending side ("house" or
    "gambler") so drivers can report exactly where a game broke.
    """

    def __init__(self, message: str, round_index: int | None = None, side: str | None = None):
        super().__init__(message)
        self.round_index = round_index
        self.side = side


class GameAbort(BookmakingError):
    """An interactive game was aborted by the player (e.g. EOF on stdin)."""
