"""Core data model and protocol of the binary online bookmaking game.

A game runs for a fixed horizon of ``T`` rounds. Each round the house posts
odds ``r`` in (0, 1), the probability mass it implicitly assigns to outcome 1;
the gambler answers with a bet fraction ``q`` in [0, 1] placed on outcome 1.
The round exposes the house to a loss vector

    ((1 - q) / (1 - r),  q / r)

per winning team, and exposures add up over rounds. The house's game loss is
the larger coordinate of the accumulated vector; with overround ``gamma`` the
guaranteed monetary gain is ``T * (1 - loss / (T * gamma))``.

Odds are kept strictly interior: an endpoint odds value would expose the house
to an unbounded payout against any positive opposing bet, and no sensible
strategy ever posts one, so ``round_loss`` treats r in {0, 1} as a domain
error. All arithmetic is 64-bit floating point and losses accumulate in fixed
left-to-right round order for reproducibility.

House and gambler strategies are duck-typed: a house exposes
``next_odds(q_prev)`` (``q_prev`` is ``None`` on the first round) and a
gambler exposes ``next_bet(r)``. One instance serves one game.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import IO, Iterable

from .errors import DomainError, ProtocolError

__all__ = [
    "GameConfig",
    "LossVector",
    "Transcript",
    "round_loss",
    "play_game",
    "game_loss",
    "house_gain",
]

TRANSCRIPT_CSV_HEADER = "t,r,q,l0_cum,l1_cum"


@dataclass(frozen=True)
class GameConfig:
    """Horizon and overround of one game.

    ``horizon`` is the number of rounds T >= 1; ``overround`` is the
    dimensionless house margin parameter gamma >= 1 (gamma = 1 is a fair
    book).
    """

    horizon: int
    overround: float = 1.0

    def __post_init__(self):
        if not isinstance(self.horizon, int) or self.horizon < 1:
            raise DomainError(f"horizon must be a positive integer, got {self.horizon!r}")
        if not self.overround >= 1.0:
            raise DomainError(f"overround must be >= 1, got {self.overround!r}")


@dataclass(frozen=True)
class LossVector:
    """Accumulated payout exposure per winning team; both components >= 0."""

    l0: float
    l1: float

    def __post_init__(self):
        if self.l0 < 0 or self.l1 < 0:
            raise DomainError(f"loss components must be nonnegative, got ({self.l0}, {self.l1})")

    def add(self, other: "LossVector") -> "LossVector":
        return LossVector(self.l0 + other.l0, self.l1 + other.l1)

    def max_component(self) -> float:
        return max(self.l0, self.l1)

    def as_tuple(self) -> tuple[float, float]:
        return (self.l0, self.l1)


def validate_odds(r: float) -> float:
    """Check r in the open interval (0, 1); endpoints mean infinite exposure."""
    if not (0.0 < r < 1.0):
        raise DomainError(f"odds must lie strictly inside (0, 1), got {r!r}")
    return float(r)


def validate_bet(q: float) -> float:
    """Check q in the closed interval [0, 1]."""
    if not (0.0 <= q <= 1.0):
        raise DomainError(f"bet fraction must lie in [0, 1], got {q!r}")
    return float(q)


def round_loss(r: float, q: float) -> LossVector:
    """Per-round exposure vector ((1-q)/(1-r), q/r) for odds r and bet q."""
    r = validate_odds(r)
    q = validate_bet(q)
    return LossVector((1.0 - q) / (1.0 - r), q / r)


@dataclass(frozen=True)
class Transcript:
    """Complete record of one game: the (r, q) pairs and accumulated losses."""

    config: GameConfig
    rounds: tuple[tuple[float, float], ...]
    accumulated: LossVector = field(default=LossVector(0.0, 0.0))

    def __post_init__(self):
        if len(self.rounds) > self.config.horizon:
            raise DomainError(
                f"transcript has {len(self.rounds)} rounds, horizon is {self.config.horizon}"
            )

    @property
    def complete(self) -> bool:
        return len(self.rounds) == self.config.horizon

    def recompute_accumulated(self) -> LossVector:
        """Re-sum the per-round losses in round order.

        Matches the stored vector exactly (0 ulp) because play_game uses the
        same left-to-right summation.
        """
        l0 = 0.0
        l1 = 0.0
        for r, q in self.rounds:
            step = round_loss(r, q)
            l0 += step.l0
            l1 += step.l1
        return LossVector(l0, l1)

    def bets(self) -> tuple[float, ...]:
        return tuple(q for _, q in self.rounds)

    def odds(self) -> tuple[float, ...]:
        return tuple(r for r, _ in self.rounds)

    # -- serialization ------------------------------------------------------

    def to_json_dict(self) -> dict:
        return {
            "T": self.config.horizon,
            "gamma": self.config.overround,
            "rounds": [[r, q] for r, q in self.rounds],
            "loss": [self.accumulated.l0, self.accumulated.l1],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict())

    @classmethod
    def from_json_dict(cls, obj: dict) -> "Transcript":
        config = GameConfig(horizon=int(obj["T"]), overround=float(obj.get("gamma", 1.0)))
        rounds = tuple((float(r), float(q)) for r, q in obj["rounds"])
        loss = obj.get("loss")
        if loss is None:
            acc = cls(config, rounds).recompute_accumulated()
        else:
            acc = LossVector(float(loss[0]), float(loss[1]))
        return cls(config, rounds, acc)

    @classmethod
    def from_json(cls, text: str) -> "Transcript":
        return cls.from_json_dict(json.loads(text))

    def csv_rows(self) -> Iterable[str]:
        """Rows ``t,r,q,l0_cum,l1_cum`` with cumulative losses after round t."""
        l0 = 0.0
        l1 = 0.0
        for t, (r, q) in enumerate(self.rounds, start=1):
            step = round_loss(r, q)
            l0 += step.l0
            l1 += step.l1
            yield f"{t},{r!r},{q!r},{l0!r},{l1!r}"

    def write_csv(self, fp: IO[str]) -> None:
        fp.write(TRANSCRIPT_CSV_HEADER + "\n")
        for row in self.csv_rows():
            fp.write(row + "\n")


def play_game(house, gambler, config: GameConfig) -> Transcript:
    """Run the sequential protocol for exactly ``config.horizon`` rounds.

    The house sees only past bets (its t-th odds may depend on q_1..q_{t-1});
    the gambler sees odds up to and including the current round. A strategy
    emitting a value outside its domain aborts the game with a ProtocolError
    naming the round.
    """
    rounds: list[tuple[float, float]] = []
    l0 = 0.0
    l1 = 0.0
    q_prev: float | None = None
    for t in range(1, config.horizon + 1):
        try:
            r = validate_odds(house.next_odds(q_prev))
        except DomainError as exc:
            raise ProtocolError(f"house produced invalid odds at round {t}: {exc}", t, "house") from exc
        try:
            q = validate_bet(gambler.next_bet(r))
        except DomainError as exc:
            raise ProtocolError(f"gambler produced invalid bet at round {t}: {exc}", t, "gambler") from exc
        step = round_loss(r, q)
        l0 += step.l0
        l1 += step.l1
        rounds.append((r, q))
        q_prev = q
    return Transcript(config, tuple(rounds), LossVector(l0, l1))


def game_loss(transcript: Transcript) -> float:
    """The worst-case payout max(l0, l1) of a complete transcript."""
    if not transcript.complete:
        raise DomainError(
            f"game loss requires a complete transcript "
            f"({len(transcript.rounds)}/{transcript.config.horizon} rounds played)"
        )
    return transcript.accumulated.max_component()


def house_gain(loss: float, config: GameConfig) -> float:
    """Guaranteed monetary gain T * (1 - loss / (T * gamma)) for a given loss."""
    if loss < 0:
        raise DomainError(f"loss must be nonnegative, got {loss!r}")
    T = config.horizon
    return T * (1.0 - loss / (T * config.overround))

