"""Monte Carlo approximation of the expected odds for continuous bets.

Exact expectation of the optimal odds over Bernoulli realizations of the bet
history costs 2^(t-1) work per round. This module instead runs N parallel
copies of the decisive-state recursion: on each bet q the j-th copy draws
X_j ~ Ber(q), applies the decisive update, and the posted odds are the
arithmetic mean of the per-copy odds. Hoeffding's inequality gives

    Pr(|mean - expectation| >= eps at any of the T rounds) <= 2T exp(-2N eps^2),

so N >= ln(2T / delta) / (2 eps^2) keeps every round within eps with
probability 1 - delta, and odds within eps inflate the guaranteed loss by at
most a factor 1 + 2 eps (T + sqrt(T)) when eps <= 1 / (2 (T + sqrt(T))).

Randomness is drawn from a counter-based generator keyed by the seed, one
vector of uniforms per round indexed by copy, so results are a pure function
of (seed, T, N, bets) no matter how the copy updates are scheduled. Decisive
bets leave nothing to chance: every copy takes the same branch, the copies
stay identical, and the posted odds coincide exactly with the decisive
strategy for any N and seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .strategies import HouseStrategy

__all__ = [
    "MCConfig",
    "MonteCarloHouse",
    "required_samples",
    "deviation_probability_bound",
    "loss_inflation_bound",
]


def required_samples(epsilon: float, delta: float, T: int) -> int:
    """Smallest N with N >= ln(2T / delta) / (2 epsilon^2) (natural log)."""
    if not (0.0 < epsilon <= 0.5):
        raise DomainError(f"epsilon must lie in (0, 1/2], got {epsilon!r}")
    if not (0.0 < delta < 1.0):
        raise DomainError(f"delta must lie in (0, 1), got {delta!r}")
    if not isinstance(T, int) or T < 1:
        raise DomainError(f"horizon must be a positive integer, got {T!r}")
    return max(1, math.ceil(math.log(2.0 * T / delta) / (2.0 * epsilon * epsilon)))


def deviation_probability_bound(N: int, epsilon: float, T: int) -> float:
    """Union bound min(1, 2T exp(-2 N epsilon^2)) on any round deviating by epsilon."""
    if not isinstance(N, int) or N < 1:
        raise DomainError(f"copy count must be a positive integer, got {N!r}")
    if not epsilon > 0:
        raise DomainError(f"epsilon must be positive, got {epsilon!r}")
    if not isinstance(T, int) or T < 1:
        raise DomainError(f"horizon must be a positive integer, got {T!r}")
    return min(1.0, 2.0 * T * math.exp(-2.0 * N * epsilon * epsilon))


def loss_inflation_bound(epsilon: float, T: int) -> float:
    """Loss guarantee (1 + 2 eps (T + sqrt(T))) (T + sqrt(T)) under eps-accurate odds.

    Requires eps <= 1 / (2 (T + sqrt(T))), the range where an eps odds error
    cannot more than double any single payout.
    """
    if not isinstance(T, int) or T < 1:
        raise DomainError(f"horizon must be a positive integer, got {T!r}")
    optimal = T + math.sqrt(T)
    if epsilon < 0 or epsilon > 1.0 / (2.0 * optimal):
        raise DomainError(
            f"epsilon must lie in [0, 1/(2(T + sqrt(T)))] = [0, {1.0 / (2.0 * optimal)}], "
            f"got {epsilon!r}"
        )
    return (1.0 + 2.0 * epsilon * optimal) * optimal


@dataclass(frozen=True)
class MCConfig:
    """Copy count, seed, and optional accuracy targets for the Monte Carlo house."""

    n_copies: int
    seed: int = 0
    epsilon: float | None = None
    delta: float | None = None

    def __post_init__(self):
        if not isinstance(self.n_copies, int) or self.n_copies < 1:
            raise DomainError(f"copy count must be a positive integer, got {self.n_copies!r}")

    @classmethod
    def resolve(
        cls,
        T: int,
        n_copies: int | None = None,
        seed: int = 0,
        epsilon: float | None = None,
        delta: float | None = None,
    ) -> "MCConfig":
        """Fill in N from (epsilon, delta) when not given; validate it otherwise."""
        if (epsilon is None) != (delta is None):
            raise DomainError("epsilon and delta must be given together")
        if epsilon is not None:
            needed = required_samples(epsilon, delta, T)
            if n_copies is None:
                n_copies = needed
            elif n_copies < needed:
                raise DomainError(
                    f"N={n_copies} below the {needed} copies required for "
                    f"(eps={epsilon}, delta={delta}, T={T})"
                )
        elif n_copies is None:
            raise DomainError("either N or (epsilon, delta) must be given")
        return cls(int(n_copies), int(seed), epsilon, delta)


class MonteCarloHouse(HouseStrategy):
    """N-copy Monte Carlo house for continuous bets (kind ``mc``)."""

    kind = "mc"

    def __init__(
        self,
        T: int,
        n_copies: int | None = None,
        seed: int = 0,
        epsilon: float | None = None,
        delta: float | None = None,
    ):
        super().__init__(T)
        self.config = MCConfig.resolve(T, n_copies, seed, epsilon, delta)
        n = self.config.n_copies
        x = T + math.sqrt(T)
        self._a = np.full(n, x)
        self._b = np.full(n, x)
        # Counter-based generator: draws are addressed (round, copy), so the
        # stream does not depend on how copy updates are scheduled.
        self._rng = np.random.Generator(np.random.Philox(key=self.config.seed))
        self.copy_updates = 0

    def _odds(self, q_prev):
        T = self.T
        if q_prev is None:
            return self._mean_odds(self._per_copy_odds(T - 1))
        q = float(q_prev)
        if not (0.0 <= q <= 1.0):
            raise DomainError(f"bet fraction must lie in [0, 1], got {q_prev!r}")
        t = self._served  # rounds already served; we are producing round t+1
        d = T - t
        u = self._rng.random(self.config.n_copies)
        ones = u < q  # exact for q = 0 (never) and q = 1 (always)
        a, b = self._a, self._b
        upd_a = d * (b - (d - 1.0)) / (b - d)
        upd_b = d * (a - (d - 1.0)) / (a - d)
        self._a = np.where(ones, a, upd_a)
        self._b = np.where(ones, upd_b, b)
        self.copy_updates += self.config.n_copies
        return self._mean_odds(self._per_copy_odds(d - 1))

    @staticmethod
    def _mean_odds(r: np.ndarray) -> float:
        first = r[0]
        if np.all(r == first):
            # Copies in lockstep (decisive input so far): return the common
            # value exactly rather than through the mean's rounding.
            return float(first)
        return float(np.mean(r))

    def _per_copy_odds(self, d_minus: int) -> np.ndarray:
        if d_minus > 0:
            bp = d_minus * (self._a - (d_minus - 1.0)) / (self._a - d_minus)
        else:
            bp = 0.0
        return 1.0 / (self._b - bp)
