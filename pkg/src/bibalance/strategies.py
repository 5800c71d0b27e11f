"""House-side odds strategies behind a common sequential interface.

Every strategy serves one game: construct it for a horizon T, then call
``next_odds(q_prev)`` exactly T times (``q_prev`` is ``None`` on the first
call). Available kinds:

``optimal``
    The loss-equalizing strategy. Tracks the pair (a, b) of worst-case
    future losses per team, starting from (T + sqrt(T), T + sqrt(T)), and
    updates one coordinate through the depth involution after each bet:
    game loss exactly T + sqrt(T) against every decisive bet sequence, O(1)
    state and work per round. The first fractional bet switches to the
    expected extension below, which agrees on decisive play.

``expected``
    The extension of the loss-equalizing strategy to continuous bets: the
    posted odds are the expectation of the decisive-play odds over
    independent Bernoulli realizations of the past bets. Exact enumeration,
    with zero-weight branches pruned (decisive coordinates do not branch)
    and a cap on the number of fractional coordinates; beyond the cap use
    the Monte Carlo strategy instead.

``kt``
    The add-half relative-frequency probability assignment
    (1/2 + #ones) / t. Excellent for sequence compression, poor for
    bookmaking: on the bet sequence 0^(T-1) 1 it loses exactly 2T.

``uniform``
    Constant 1/2, the no-information baseline; worst-case decisive loss 2T.

``mc`` and ``blackwell`` are provided by the monte_carlo and blackwell
modules and are registered in :func:`make_house`.
"""

from __future__ import annotations

import copy
import json
import math
import os
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from .balance import involution, root_fixed_point
from .errors import CapacityError, DomainError, InfeasibleError, ProtocolError

__all__ = [
    "HouseStrategy",
    "DecisiveState",
    "OptimalDecisiveHouse",
    "OptimalHouse",
    "ExpectedSkeletonHouse",
    "KTHouse",
    "UniformHouse",
    "optimal_decisive_init",
    "optimal_decisive_step",
    "state_odds",
    "expected_skeleton_odds",
    "kt_baseline_odds",
    "uniform_baseline_odds",
    "decisive_loss_batch",
    "iter_skeleton_odds",
    "make_house",
    "HOUSE_KINDS",
    "EXACT_ENUM_CAP",
]

# Exact expected-odds enumeration is refused beyond this many fractional bets.
EXACT_ENUM_CAP = 24
# Realization branches lighter than this weight are dropped.
PRUNE_WEIGHT = 1e-30

HOUSE_KINDS = ("optimal", "expected", "mc", "blackwell", "kt", "uniform")


class HouseStrategy:
    """Base class enforcing the one-game calling discipline.

    ``next_odds`` may be called at most ``T`` times, in order; subclasses
    implement ``_odds``. ``clone`` snapshots the full strategy state, which
    lets tree searches branch a game without replaying it.
    """

    kind = "abstract"

    def __init__(self, T: int | None):
        if T is not None and (not isinstance(T, int) or T < 1):
            raise DomainError(f"horizon must be a positive integer, got {T!r}")
        self.T = T
        self._served = 0

    def next_odds(self, q_prev: float | None = None) -> float:
        if self.T is not None and self._served >= self.T:
            raise ProtocolError(
                f"next_odds called more than horizon={self.T} times",
                self._served + 1,
                "house",
            )
        if self._served == 0:
            if q_prev is not None:
                raise ProtocolError("first odds query must not carry a bet", 1, "house")
        elif q_prev is None:
            raise ProtocolError("previous bet missing", self._served + 1, "house")
        r = self._odds(q_prev)
        self._served += 1
        return r

    def _odds(self, q_prev: float | None) -> float:
        raise NotImplementedError

    def clone(self) -> "HouseStrategy":
        return copy.deepcopy(self)


# ---------------------------------------------------------------------------
# Optimal strategy for decisive gamblers
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DecisiveState:
    """Running pair of worst-case future losses plus the round index.

    ``a`` is the future loss if team 0 wins, ``b`` if team 1 wins; ``t`` is
    the index of the round about to be played (1-based). With d rounds
    remaining both coordinates stay strictly above d.
    """

    a: float
    b: float
    t: int
    T: int


def optimal_decisive_init(T: int) -> DecisiveState:
    """Initial state (T + sqrt(T), T + sqrt(T)) at round 1."""
    x = root_fixed_point(T)
    return DecisiveState(a=x, b=x, t=1, T=T)


def state_odds(s: DecisiveState) -> float:
    """Odds posted at the current round: 1 / (b - f_{T-t}(a)).

    The subtrahend is the hypothetical team-1 future loss after a bet on
    team 1; at the first round this evaluates to 1/2 for every horizon.
    """
    r = 1.0 / (s.b - involution(s.T - s.t, s.a))
    if not (0.0 < r < 1.0):
        raise InfeasibleError(f"internal invariant violation: odds {r} outside (0, 1) at {s}")
    return r


def optimal_decisive_step(s: DecisiveState, q_prev: int) -> tuple[DecisiveState, float]:
    """Consume the bet of round t and return the new state plus round-(t+1) odds."""
    if s.t >= s.T:
        raise ProtocolError(f"no rounds left after round {s.T}", s.t, "house")
    if q_prev not in (0, 1):
        raise DomainError(
            f"decisive strategy requires bets in {{0, 1}}, got {q_prev!r}; "
            "use the expected-skeleton strategy for continuous bets"
        )
    d = s.T - s.t
    if q_prev == 0:
        nxt = DecisiveState(a=involution(d, s.b), b=s.b, t=s.t + 1, T=s.T)
    else:
        nxt = DecisiveState(a=s.a, b=involution(d, s.a), t=s.t + 1, T=s.T)
    return nxt, state_odds(nxt)


class OptimalDecisiveHouse(HouseStrategy):
    """Loss-equalizing house for decisive gamblers (kind ``optimal``)."""

    kind = "optimal"

    def __init__(self, T: int):
        super().__init__(T)
        self.state = optimal_decisive_init(T)

    def _odds(self, q_prev):
        if q_prev is None:
            return state_odds(self.state)
        bet = _as_bit(q_prev)
        self.state, r = optimal_decisive_step(self.state, bet)
        return r


def _as_bit(q) -> int:
    if q == 0:
        return 0
    if q == 1:
        return 1
    raise DomainError(
        f"decisive strategy requires bets in {{0, 1}}, got {q!r}; "
        "use the expected-skeleton strategy for continuous bets"
    )


# ---------------------------------------------------------------------------
# Expected extension to continuous bets
# ---------------------------------------------------------------------------


def expected_skeleton_odds(history: Sequence[float], T: int) -> float:
    """Expectation of the optimal odds over Bernoulli realizations of past bets.

    For a continuous bet history q_1..q_{t-1} the posted odds are

        sum over x in {0,1}^(t-1) of r_opt(x) * prod q_i^{x_i} (1-q_i)^{1-x_i},

    evaluated by depth-first enumeration. Branches of zero weight are pruned,
    so a decisive history collapses to the single matching realization and
    only genuinely fractional bets branch. Histories with more than
    EXACT_ENUM_CAP fractional coordinates raise CapacityError; the Monte
    Carlo strategy handles those.
    """
    n = len(history)
    if not isinstance(T, int) or T < 1:
        raise DomainError(f"horizon must be a positive integer, got {T!r}")
    if n > T - 1:
        raise DomainError(f"history of length {n} too long for horizon {T}")
    hist = [float(q) for q in history]
    for q in hist:
        if not (0.0 <= q <= 1.0):
            raise DomainError(f"bet fraction must lie in [0, 1], got {q!r}")
    branching = sum(1 for q in hist if 0.0 < q < 1.0)
    if branching > EXACT_ENUM_CAP:
        raise CapacityError(
            f"exact expectation over 2^{branching} realizations exceeds the cap "
            f"({EXACT_ENUM_CAP}); use the Monte Carlo strategy"
        )
    x = root_fixed_point(T)
    total = 0.0

    def rec(i: int, weight: float, a: float, b: float) -> None:
        nonlocal total
        if weight < PRUNE_WEIGHT:
            return
        if i == n:
            total += weight * (1.0 / (b - involution(T - (n + 1), a)))
            return
        q = hist[i]
        d = T - (i + 1)
        if q < 1.0:
            rec(i + 1, weight * (1.0 - q), involution(d, b), b)
        if q > 0.0:
            rec(i + 1, weight * q, a, involution(d, a))

    rec(0, 1.0, x, x)
    return total


class ExpectedSkeletonHouse(HouseStrategy):
    """Exact expected-odds house for continuous bets (kind ``expected``)."""

    kind = "expected"

    def __init__(self, T: int):
        super().__init__(T)
        self.history: list[float] = []

    def _odds(self, q_prev):
        if q_prev is not None:
            self.history.append(float(q_prev))
        return expected_skeleton_odds(self.history, self.T)


class OptimalHouse(HouseStrategy):
    """The optimal house for any gambler (kind ``optimal``).

    While the play stays decisive this is the O(1)-per-round state recursion;
    the first fractional bet switches to the exact expected extension, which
    agrees with the state recursion bit for bit on every decisive history, so
    the transition is seamless. Guarantees loss at most T + sqrt(T) for every
    bet sequence, with equality on fully decisive play.
    """

    kind = "optimal"

    def __init__(self, T: int):
        super().__init__(T)
        self.state = optimal_decisive_init(T)
        self.history: list[float] = []
        self._decisive = True

    def _odds(self, q_prev):
        if q_prev is None:
            return state_odds(self.state)
        q = float(q_prev)
        if not (0.0 <= q <= 1.0):
            raise DomainError(f"bet fraction must lie in [0, 1], got {q_prev!r}")
        self.history.append(q)
        if self._decisive and q in (0.0, 1.0):
            self.state, r = optimal_decisive_step(self.state, int(q))
            return r
        self._decisive = False
        return expected_skeleton_odds(self.history, self.T)


# ---------------------------------------------------------------------------
# Baselines
# ---------------------------------------------------------------------------


def kt_baseline_odds(history: Sequence[int]) -> float:
    """Add-half frequency estimate (1/2 + #ones) / t on a decisive history."""
    ones = 0
    for q in history:
        ones += _as_bit(q)
    return (0.5 + ones) / (len(history) + 1)


def uniform_baseline_odds(history: Sequence[float] = ()) -> float:
    """Constant 1/2 regardless of history."""
    return 0.5


class KTHouse(HouseStrategy):
    """Add-half relative-frequency house (kind ``kt``); decisive bets only."""

    kind = "kt"

    def __init__(self, T: int):
        super().__init__(T)
        self._ones = 0
        self._len = 0

    def _odds(self, q_prev):
        if q_prev is not None:
            self._ones += _as_bit(q_prev)
            self._len += 1
        return (0.5 + self._ones) / (self._len + 1)


class UniformHouse(HouseStrategy):
    """Constant-odds house (kind ``uniform``)."""

    kind = "uniform"

    def _odds(self, q_prev):
        return 0.5


# ---------------------------------------------------------------------------
# Vectorized batch runner for decisive sequences
# ---------------------------------------------------------------------------

_NUMBA_KERNEL = None


def _numba_kernel():
    """Compile (once) the batched decisive-game kernel.

    The state update mirrors the scalar path expression for expression, so
    outputs agree bit for bit; tests assert that. Set BIBALANCE_NO_NUMBA=1 to
    force the numpy fallback.
    """
    global _NUMBA_KERNEL
    if _NUMBA_KERNEL is not None:
        return _NUMBA_KERNEL
    if os.environ.get("BIBALANCE_NO_NUMBA"):
        return None
    try:
        from numba import njit
    except ImportError:
        return None

    @njit(cache=True)
    def kernel(bits, T):  # pragma: no cover - exercised through the wrapper
        n = bits.shape[0]
        l0 = np.zeros(n)
        l1 = np.zeros(n)
        for i in range(n):
            a = T + math.sqrt(T)
            b = a
            r = 1.0 / (b - (T - 1) * (a - (T - 2.0)) / (a - (T - 1.0))) if T > 1 else 1.0 / b
            for t in range(1, T + 1):
                q = bits[i, t - 1]
                if q == 0:
                    l0[i] += 1.0 / (1.0 - r)
                else:
                    l1[i] += 1.0 / r
                if t < T:
                    d = T - t
                    if q == 0:
                        a = d * (b - (d - 1.0)) / (b - d)
                    else:
                        b = d * (a - (d - 1.0)) / (a - d)
                    if d > 1:
                        bp = (d - 1) * (a - (d - 2.0)) / (a - (d - 1.0))
                    else:
                        bp = 0.0
                    r = 1.0 / (b - bp)
        return l0, l1

    _NUMBA_KERNEL = kernel
    return kernel


def _numpy_batch(bits: np.ndarray, T: int) -> tuple[np.ndarray, np.ndarray]:
    n = bits.shape[0]
    a = np.full(n, T + math.sqrt(T))
    b = a.copy()
    if T > 1:
        r = 1.0 / (b - (T - 1) * (a - (T - 2.0)) / (a - (T - 1.0)))
    else:
        r = 1.0 / b
    l0 = np.zeros(n)
    l1 = np.zeros(n)
    for t in range(1, T + 1):
        q = bits[:, t - 1].astype(bool)
        l0 += np.where(q, 0.0, 1.0 / (1.0 - r))
        l1 += np.where(q, 1.0 / r, 0.0)
        if t < T:
            d = T - t
            a = np.where(q, a, d * (b - (d - 1.0)) / (b - d))
            b = np.where(q, d * (a - (d - 1.0)) / (a - d), b)
            bp = (d - 1) * (a - (d - 2.0)) / (a - (d - 1.0)) if d > 1 else 0.0
            r = 1.0 / (b - bp)
    return l0, l1


def decisive_loss_batch(T: int, bits: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Accumulated (l0, l1) of the optimal house against many decisive sequences.

    ``bits`` has shape (n_games, T) with entries in {0, 1}. Matches the
    scalar strategy path exactly; exists because enumerating 2^T sequences or
    driving horizons of 10^5 rounds through per-round Python calls would
    dominate the runtime of the verification suites.
    """
    bits = np.ascontiguousarray(bits, dtype=np.int8)
    if bits.ndim != 2 or bits.shape[1] != T:
        raise DomainError(f"bits must have shape (n, {T}), got {bits.shape}")
    if bits.size and not np.isin(bits, (0, 1)).all():
        raise DomainError("bits must contain only 0 and 1")
    kernel = _numba_kernel()
    if kernel is not None:
        return kernel(bits, T)
    return _numpy_batch(bits, T)


def all_decisive_sequences(T: int) -> np.ndarray:
    """All 2^T decisive sequences as an int8 matrix, lexicographic row order."""
    if T > 22:
        raise CapacityError(f"2^{T} sequences exceed the enumeration guard (22)")
    codes = np.arange(2**T, dtype=np.int64)
    shifts = np.arange(T - 1, -1, -1, dtype=np.int64)
    return ((codes[:, None] >> shifts[None, :]) & 1).astype(np.int8)


def iter_skeleton_odds(T: int) -> Iterator[tuple[tuple[int, ...], float]]:
    """Yield (decisive prefix, posted odds) for every prefix of length < T."""

    def rec(t: int, a: float, b: float, prefix: tuple[int, ...]):
        yield prefix, 1.0 / (b - involution(T - t, a))
        if t < T:
            d = T - t
            yield from rec(t + 1, involution(d, b), b, prefix + (0,))
            yield from rec(t + 1, a, involution(d, a), prefix + (1,))

    x = root_fixed_point(T)
    yield from rec(1, x, x, ())


# ---------------------------------------------------------------------------
# Factory
# ---------------------------------------------------------------------------


def make_house(kind: str, T: int, params: dict | str | None = None) -> HouseStrategy:
    """Instantiate a house strategy by its string id.

    ``params`` is an optional JSON object (or already-parsed dict):
    ``mc`` accepts {"N", "seed", "eps", "delta"}, ``blackwell`` accepts
    {"delta"} to override the horizon schedule. The other kinds take no
    parameters.
    """
    if isinstance(params, str):
        params = json.loads(params) if params else {}
    params = dict(params or {})
    if kind == "optimal":
        return OptimalHouse(T)
    if kind == "expected":
        return ExpectedSkeletonHouse(T)
    if kind == "kt":
        return KTHouse(T)
    if kind == "uniform":
        return UniformHouse(T)
    if kind == "mc":
        from .monte_carlo import MonteCarloHouse

        return MonteCarloHouse(
            T,
            n_copies=params.get("N"),
            seed=params.get("seed", 0),
            epsilon=params.get("eps"),
            delta=params.get("delta"),
        )
    if kind == "blackwell":
        from .blackwell import BlackwellHouse

        return BlackwellHouse(T, delta_cap=params.get("delta"))
    raise DomainError(f"unknown house kind {kind!r}; known kinds: {', '.join(HOUSE_KINDS)}")
