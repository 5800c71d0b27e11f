"""Gambler-side strategies for attacking house strategies.

A gambler exposes ``next_bet(r)`` and is consumed by one game. Decisive
kinds emit only 0 or 1. The worst-case searcher enumerates every decisive
bet sequence (betting whole-budget each round is enough to realize any house
strategy's worst case), branching the house via ``clone`` so each bet prefix
is evaluated exactly once.

Selection ids understood by :func:`make_gambler`:

    greedy, proportional, alternating, constant:<q>, random:<seed>,
    replay:<file>, interactive

``exhaustive`` is a search, not a per-round strategy; use
:func:`exhaustive_worst_case` (the CLI accepts it as a gambler id and does
exactly that, then replays the worst sequence).
"""

from __future__ import annotations

import copy
import math
import sys
from typing import Callable, Sequence

import numpy as np

from .errors import CapacityError, DomainError, GameAbort
from .game import Transcript

__all__ = [
    "GamblerStrategy",
    "GreedyGambler",
    "ProportionalGambler",
    "ConstantGambler",
    "AlternatingGambler",
    "RandomGambler",
    "ReplayGambler",
    "InteractiveGambler",
    "greedy_decisive_step",
    "final_round_bit",
    "exhaustive_worst_case",
    "make_gambler",
    "GAMBLER_KINDS",
]

GAMBLER_KINDS = (
    "exhaustive",
    "greedy",
    "proportional",
    "alternating",
    "constant:<q>",
    "random:<seed>",
    "replay:<file>",
    "interactive",
)


class GamblerStrategy:
    """Base class: one instance per game, bets produced in round order."""

    kind = "abstract"

    def next_bet(self, r: float) -> float:
        raise NotImplementedError

    def clone(self) -> "GamblerStrategy":
        return copy.deepcopy(self)


def greedy_decisive_step(r: float, l0: float, l1: float) -> int:
    """Bet on the team whose exposure would become larger; ties go to team 1."""
    if l0 + 1.0 / (1.0 - r) > l1 + 1.0 / r:
        return 0
    return 1


def final_round_bit(r: float, l0: float, l1: float) -> int:
    """Last-round override: bet where the final exposure is maximal (ties to 1).

    A worst-case gambler always ends on the winning team, so decisive
    adversaries replace their last bit with the argmax of the two
    counterfactual final losses.
    """
    return greedy_decisive_step(r, l0, l1)


class GreedyGambler(GamblerStrategy):
    """One-step lookahead decisive adversary; cheap and strong at any horizon.

    Each round it bets toward the larger counterfactual exposure, which on
    the last round coincides with the winning-team override. Against the
    loss-equalizing house every decisive path ties, so greedy attains the
    optimal loss exactly.
    """

    kind = "greedy"

    def __init__(self, T: int):
        self.T = T
        self.t = 0
        self.l0 = 0.0
        self.l1 = 0.0

    def next_bet(self, r):
        self.t += 1
        if self.t == self.T:
            bit = final_round_bit(r, self.l0, self.l1)
        else:
            bit = greedy_decisive_step(r, self.l0, self.l1)
        if bit == 0:
            self.l0 += 1.0 / (1.0 - r)
        else:
            self.l1 += 1.0 / r
        return float(bit)


class ProportionalGambler(GamblerStrategy):
    """Bets q = r each round, handing the house a flat (1, 1) loss per round."""

    kind = "proportional"

    def next_bet(self, r):
        return r


class ConstantGambler(GamblerStrategy):
    """Always bets the same fraction."""

    kind = "constant"

    def __init__(self, q: float):
        if not (0.0 <= q <= 1.0):
            raise DomainError(f"constant bet must lie in [0, 1], got {q!r}")
        self.q = float(q)

    def next_bet(self, r):
        return self.q


class AlternatingGambler(GamblerStrategy):
    """Decisive bets 0, 1, 0, 1, ... from the first round."""

    kind = "alternating"

    def __init__(self):
        self.t = 0

    def next_bet(self, r):
        bit = self.t % 2
        self.t += 1
        return float(bit)


class RandomGambler(GamblerStrategy):
    """Seeded i.i.d. uniform bets in [0, 1]."""

    kind = "random"

    def __init__(self, seed: int = 0):
        self.seed = int(seed)
        self._rng = np.random.default_rng(self.seed)

    def next_bet(self, r):
        return float(self._rng.random())


class ReplayGambler(GamblerStrategy):
    """Re-issues the bet sequence of a stored transcript, bit for bit."""

    kind = "replay"

    def __init__(self, bets: Sequence[float]):
        self.bets = [float(q) for q in bets]
        self._i = 0

    @classmethod
    def from_transcript(cls, transcript: Transcript) -> "ReplayGambler":
        return cls(transcript.bets())

    @classmethod
    def from_file(cls, path: str) -> "ReplayGambler":
        with open(path, "r", encoding="utf-8") as fp:
            return cls.from_transcript(Transcript.from_json(fp.read()))

    def next_bet(self, r):
        if self._i >= len(self.bets):
            raise DomainError(f"replay exhausted after {len(self.bets)} bets")
        q = self.bets[self._i]
        self._i += 1
        return q


class InteractiveGambler(GamblerStrategy):
    """Reads bets from a terminal, showing odds, payouts and running exposure."""

    kind = "interactive"

    def __init__(self, T: int, gamma: float = 1.0, infile=None, outfile=None):
        self.T = T
        self.gamma = gamma
        self.t = 0
        self.l0 = 0.0
        self.l1 = 0.0
        self._in = infile if infile is not None else sys.stdin
        self._out = outfile if outfile is not None else sys.stdout

    def _say(self, text: str) -> None:
        self._out.write(text + "\n")
        self._out.flush()

    def next_bet(self, r):
        g = self.gamma
        self._say(
            f"round {self.t + 1}/{self.T}: odds r={r:.6f} "
            f"(payout per unit: team0 {1.0 / (g * (1.0 - r)):.4f}, team1 {1.0 / (g * r):.4f})"
        )
        self._say(f"  exposure so far: team0 {self.l0 / g:.4f}, team1 {self.l1 / g:.4f}")
        while True:
            self._out.write("  your bet on team 1 (q in [0,1]): ")
            self._out.flush()
            line = self._in.readline()
            if line == "":
                raise GameAbort("input closed, game aborted")
            try:
                q = float(line.strip())
            except ValueError:
                self._say("  not a number, try again")
                continue
            if not (0.0 <= q <= 1.0):
                self._say("  bet must lie in [0, 1], try again")
                continue
            break
        self.t += 1
        self.l0 += (1.0 - q) / (1.0 - r)
        self.l1 += q / r
        return q


def exhaustive_worst_case(
    house_factory: Callable[[], object], T: int
) -> tuple[tuple[int, ...], float]:
    """Worst decisive bet sequence and its game loss, by full enumeration.

    Walks the depth-T bet tree once, cloning the (stateful) house at each
    branch so every prefix's odds are computed exactly once. Returns the
    lexicographically smallest maximizer together with the loss; losses
    within a relative 1e-12 of the incumbent count as ties (floating-point
    noise on exactly-equalized strategies), so exact ties resolve
    lexicographically. Guarded at T <= 22.
    """
    if not isinstance(T, int) or T < 1:
        raise DomainError(f"horizon must be a positive integer, got {T!r}")
    if T > 22:
        raise CapacityError(f"2^{T} sequences exceed the enumeration guard (22)")
    best_loss = -math.inf
    best_bits: tuple[int, ...] | None = None

    def dfs(house, r: float, l0: float, l1: float, t: int, bits: tuple[int, ...]) -> None:
        nonlocal best_loss, best_bits
        for bit in (0, 1):  # 0 first: ties resolve to the lexicographically smallest
            nl0 = l0 + (1.0 / (1.0 - r) if bit == 0 else 0.0)
            nl1 = l1 + (1.0 / r if bit == 1 else 0.0)
            if t == T:
                loss = max(nl0, nl1)
                if best_bits is None or loss > best_loss + 1e-12 * max(1.0, best_loss):
                    best_loss = loss
                    best_bits = bits + (bit,)
            else:
                branch = house.clone()
                r_next = branch.next_odds(float(bit))
                dfs(branch, r_next, nl0, nl1, t + 1, bits + (bit,))

    house = house_factory()
    dfs(house, house.next_odds(None), 0.0, 0.0, 1, ())
    return best_bits, best_loss


def make_gambler(selector: str, T: int, gamma: float = 1.0, infile=None, outfile=None) -> GamblerStrategy:
    """Instantiate a gambler by selection id (see module docstring)."""
    kind, _, arg = selector.partition(":")
    if kind == "greedy":
        return GreedyGambler(T)
    if kind == "proportional":
        return ProportionalGambler()
    if kind == "alternating":
        return AlternatingGambler()
    if kind == "constant":
        if not arg:
            raise DomainError("constant gambler needs a value, e.g. constant:0.5")
        return ConstantGambler(float(arg))
    if kind == "random":
        return RandomGambler(int(arg) if arg else 0)
    if kind == "replay":
        if not arg:
            raise DomainError("replay gambler needs a transcript file, e.g. replay:game.json")
        return ReplayGambler.from_file(arg)
    if kind == "interactive":
        return InteractiveGambler(T, gamma, infile=infile, outfile=outfile)
    if kind == "exhaustive":
        raise DomainError(
            "exhaustive is a search, not a per-round strategy; "
            "use exhaustive_worst_case (the CLI simulate command handles it)"
        )
    raise DomainError(f"unknown gambler id {selector!r}; known ids: {', '.join(GAMBLER_KINDS)}")
