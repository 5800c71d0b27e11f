"""Bi-balancing mathematics for the binary bookmaking game tree.

A complete depth-d game tree is *bi-balanced* by a strategy when the
accumulated loss toward team 0 is the same along every decisive bet path
ending in 0, and likewise for team 1. The two constant values (v0, v1) at a
node of remaining depth d are linked by the depth involution

    f_d(x) = d * (x - (d - 1)) / (x - d),        f_d(f_d(x)) = x,

so every achievable pair has the form (x, f_d(x)) with x > d. Equivalently
the pair satisfies the product identity (v0 - d) * (v1 - d) = d. Equating the
two root coordinates x = f_T(x) yields the optimal game loss T + sqrt(T).

The module offers the involution itself, the one-step forward value
recursion, the odds formula, a constructor materializing the full odds tree
over decisive bet prefixes, and an enumeration verifier that checks
bi-balance directly from the odds (without using the involution), so the
check is not circular.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .errors import CapacityError, DomainError, InfeasibleError

__all__ = [
    "ValuePair",
    "BalancedTree",
    "BalanceReport",
    "involution",
    "advance_value",
    "odds_from_value",
    "root_fixed_point",
    "initial_value",
    "build_bibalanced_tree",
    "verify_bibalanced",
    "verify_bibalanced_sampled",
    "path_loss",
    "MAX_TREE_DEPTH",
]

# Full materialization of 2^depth odds is refused above this depth; use
# path_loss / sampled verification beyond it.
MAX_TREE_DEPTH = 24


def _involution_raw(d, x):
    # Shared expression; also valid elementwise on numpy arrays whose entries
    # are known to satisfy x > d.
    return d * (x - (d - 1.0)) / (x - d)


def involution(d: int, x: float) -> float:
    """Depth-d involution f_d(x) = d(x - d + 1)/(x - d) on the branch x > d.

    f_0 is identically 0 by convention, which lets the last-round odds
    formula 1 / (v1 - f_0(v0)) = 1 / v1 work without a special case. For
    d >= 1 the map sends (d, inf) onto itself, is strictly decreasing, and is
    its own inverse.
    """
    if not isinstance(d, int) or d < 0:
        raise DomainError(f"depth must be a nonnegative integer, got {d!r}")
    if d == 0:
        return 0.0
    if not x > d:
        raise DomainError(f"involution at depth {d} requires x > {d}, got {x!r}")
    return _involution_raw(d, float(x))


def root_fixed_point(T: int) -> float:
    """The solution x > T of x = f_T(x), i.e. T + sqrt(T).

    The quadratic has a second root T - sqrt(T), rejected because achievable
    values at depth T must exceed T.
    """
    if not isinstance(T, int) or T < 1:
        raise DomainError(f"horizon must be a positive integer, got {T!r}")
    return T + math.sqrt(T)


@dataclass(frozen=True)
class ValuePair:
    """Worst-case future losses (v0 if team 0 wins, v1 if team 1 wins)."""

    v0: float
    v1: float

    def as_tuple(self) -> tuple[float, float]:
        return (self.v0, self.v1)


def initial_value(T: int) -> ValuePair:
    """Root value of the optimal depth-T tree: both coordinates T + sqrt(T)."""
    x = root_fixed_point(T)
    return ValuePair(x, x)


def advance_value(v: ValuePair, bet: int, d_after: int) -> ValuePair:
    """One forward step of the value recursion after observing a decisive bet.

    ``d_after`` is the remaining depth below the new node. A bet on team 1
    leaves v0 unchanged and maps v1 to f_{d_after}(v0); a bet on team 0 is the
    mirror image. Domain errors from the involution signal an infeasible pair.
    """
    if bet not in (0, 1):
        raise DomainError(f"decisive bet must be 0 or 1, got {bet!r}")
    if bet == 0:
        return ValuePair(involution(d_after, v.v1), v.v1)
    return ValuePair(v.v0, involution(d_after, v.v0))


def odds_from_value(v: ValuePair, d_remaining: int) -> float:
    """Odds at a node with value ``v`` and ``d_remaining`` rounds to play.

    The odds are 1 / (v1 - v1') where v1' = f_{d_remaining - 1}(v0) is the
    hypothetical team-1 value after a bet on team 1. Raises InfeasibleError
    when the result leaves (0, 1), meaning the pair is not achievable at this
    depth.
    """
    if d_remaining < 1:
        raise DomainError(f"odds need at least one remaining round, got {d_remaining!r}")
    hypothetical = involution(d_remaining - 1, v.v0)
    denom = v.v1 - hypothetical
    if denom <= 0:
        raise InfeasibleError(f"value pair {v.as_tuple()} infeasible at depth {d_remaining}")
    r = 1.0 / denom
    if not (0.0 < r < 1.0):
        raise InfeasibleError(
            f"value pair {v.as_tuple()} at depth {d_remaining} gives odds {r} outside (0, 1)"
        )
    return r


@dataclass(frozen=True)
class BalancedTree:
    """A materialized bi-balanced tree: odds for every decisive bet prefix.

    ``odds`` maps prefix bitstrings ("" for the root, "01" after bets 0 then
    1, ...) of length < depth to the odds posted at that node. The root value
    is (x, f_depth(x)).
    """

    depth: int
    root_value: ValuePair
    odds: dict[str, float]

    def odds_at(self, prefix: str) -> float:
        return self.odds[prefix]

    def to_json_dict(self) -> dict:
        return {"depth": self.depth, "x": self.root_value.v0, "odds": dict(self.odds)}

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict())

    def paths(self) -> Iterator[str]:
        """All 2^depth decisive bet sequences in lexicographic order."""
        for k in range(2 ** self.depth):
            yield format(k, f"0{self.depth}b")


def build_bibalanced_tree(depth: int, x: float) -> BalancedTree:
    """Materialize the unique bi-balanced tree of given depth and root value (x, f_depth(x)).

    Requires x > depth: the depth-1 base case needs x > 1 for an interior
    root odd, and connecting two depth-d trees into a depth-(d+1) tree needs
    the new coordinate to exceed d+1, which is the same condition expressed
    one level up. Every posted odd is validated to lie in (0, 1); the first
    violating node is named in the error.
    """
    if not isinstance(depth, int) or depth < 1:
        raise DomainError(f"tree depth must be a positive integer, got {depth!r}")
    if depth > MAX_TREE_DEPTH:
        raise CapacityError(
            f"refusing to materialize 2^{depth} odds (guard {MAX_TREE_DEPTH}); "
            "use path_loss for deep trees"
        )
    if not x > depth:
        raise InfeasibleError(f"root value must exceed the depth: need x > {depth}, got {x!r}")
    root = ValuePair(float(x), involution(depth, float(x)))
    odds: dict[str, float] = {}
    stack: list[tuple[str, ValuePair]] = [("", root)]
    while stack:
        prefix, value = stack.pop()
        d_remaining = depth - len(prefix)
        try:
            r = odds_from_value(value, d_remaining)
        except (DomainError, InfeasibleError) as exc:
            raise InfeasibleError(f"infeasible node at prefix {prefix!r}: {exc}") from exc
        odds[prefix] = r
        if d_remaining > 1:
            for bet in (0, 1):
                child = advance_value(value, bet, d_remaining - 1)
                stack.append((prefix + str(bet), child))
    return BalancedTree(depth, root, odds)


@dataclass(frozen=True)
class BalanceReport:
    """Spread of per-team path losses over a materialized tree."""

    depth: int
    spread0: float
    spread1: float
    value0: float
    value1: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.spread0 <= self.tolerance and self.spread1 <= self.tolerance


def path_loss(tree: BalancedTree, bits: str) -> tuple[float, float]:
    """Accumulated (l0, l1) along one decisive path, straight from the odds."""
    l0 = 0.0
    l1 = 0.0
    for t, ch in enumerate(bits):
        r = tree.odds[bits[:t]]
        if ch == "0":
            l0 += 1.0 / (1.0 - r)
        else:
            l1 += 1.0 / r
    return l0, l1


def verify_bibalanced_sampled(
    depth: int, x: float, n_paths: int = 1000, seed: int = 0, tolerance: float = 1e-9
) -> BalanceReport:
    """Spread check for trees too deep to materialize.

    Walks ``n_paths`` random decisive paths, computing each node's odds on
    the fly from the forward value recursion (O(depth) memory), and measures
    the per-team loss spread over the sampled paths.
    """
    if not x > depth:
        raise InfeasibleError(f"root value must exceed the depth: need x > {depth}, got {x!r}")
    rng = np.random.default_rng(seed)
    min0 = min1 = math.inf
    max0 = max1 = -math.inf
    for _ in range(n_paths):
        bits = rng.integers(0, 2, depth)
        value = ValuePair(float(x), involution(depth, float(x)))
        l0 = 0.0
        l1 = 0.0
        for t, bit in enumerate(bits):
            d_remaining = depth - t
            r = odds_from_value(value, d_remaining)
            if bit == 0:
                l0 += 1.0 / (1.0 - r)
            else:
                l1 += 1.0 / r
            if d_remaining > 1:
                value = advance_value(value, int(bit), d_remaining - 1)
        if bits[-1] == 0:
            min0 = min(min0, l0)
            max0 = max(max0, l0)
        else:
            min1 = min(min1, l1)
            max1 = max(max1, l1)
    spread0 = max0 - min0 if max0 >= min0 else 0.0
    spread1 = max1 - min1 if max1 >= min1 else 0.0
    return BalanceReport(
        depth=depth,
        spread0=spread0,
        spread1=spread1,
        value0=max0,
        value1=max1,
        tolerance=tolerance,
    )


def verify_bibalanced(tree: BalancedTree, tolerance: float = 1e-9) -> BalanceReport:
    """Enumerate all 2^depth paths and measure the loss spreads per team.

    Losses are recomputed from the stored odds alone, so the check is
    independent of the value recursion that built the tree. The report
    passes when the spread of l0 over paths ending in 0 and of l1 over paths
    ending in 1 are both within the tolerance.
    """
    min0 = math.inf
    max0 = -math.inf
    min1 = math.inf
    max1 = -math.inf
    for bits in tree.paths():
        l0, l1 = path_loss(tree, bits)
        if bits[-1] == "0":
            min0 = min(min0, l0)
            max0 = max(max0, l0)
        else:
            min1 = min(min1, l1)
            max1 = max(max1, l1)
    return BalanceReport(
        depth=tree.depth,
        spread0=max0 - min0,
        spread1=max1 - min1,
        value0=max0,
        value1=max1,
        tolerance=tolerance,
    )
