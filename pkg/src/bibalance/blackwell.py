"""Approachability-based baseline house strategy.

A horizon-free alternative to the optimal strategy: steer the time-averaged
loss vector toward the convex target set

    S = { x >= 0 : (x - (1,1)) . lam1 <= 0  and  (x - (1,1)) . lam2 <= 0 },

a kite with vertices (0,0), (0, Delta), (1,1), (Delta, 0), where for a cap
parameter Delta in (1, 2)

    lam1 = (1 - 1/Delta, 1/Delta),   lam1_perp = (1, 1 - Delta),
    lam2 = (1/Delta, 1 - 1/Delta),   lam2_perp = (1 - Delta, 1).

The plane splits into S and three outside regions: A1 (above the lam1 face),
A2 (below the lam2 face), and the cone A3 beyond the vertex (1,1); A1 and A2
are further split at the point that projects onto the face endpoint. The
update rule posts lam1 in A1, lam2 in A2, the normalized direction
(x - (1,1)) / |x - (1,1)|_1 in A3, and uniform odds inside S. Every posted
vector keeps both components at least (Delta - 1)/Delta, which bounds each
round's loss and yields the guarantee

    |avg loss after t rounds|_inf <= Delta + sqrt(2/t) * Delta^2 / (Delta - 1)

for every bet sequence. With the horizon schedule Delta = 1 + delta_T,
delta_T = (2/T)^(1/4) / (1 - (2/T)^(1/4)), the final normalized loss is at
most 1 + 2 delta_T: amortized loss 1 + O(T^(-1/4)), versus 1 + T^(-1/2) for
the optimal strategy.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .errors import DomainError
from .strategies import HouseStrategy

__all__ = [
    "DeltaParam",
    "Region",
    "lambda_vectors",
    "classify_region",
    "region_matches",
    "project_to_S",
    "next_odds_vector",
    "delta_for_horizon",
    "anytime_bound",
    "BlackwellHouse",
    "blackwell_trace",
    "TRACE_CSV_HEADER",
]

Vec = tuple[float, float]

TRACE_CSV_HEADER = "t,phi1,phi2,region,r,bound"


@dataclass(frozen=True)
class DeltaParam:
    """Cap parameter Delta of the target set, strictly between 1 and 2."""

    delta_cap: float

    def __post_init__(self):
        if not (1.0 < self.delta_cap < 2.0):
            raise DomainError(f"delta_cap must lie in (1, 2), got {self.delta_cap!r}")


class Region(enum.Enum):
    S = "S"
    A1_MINUS = "A1-"
    A1_PLUS = "A1+"
    A2_MINUS = "A2-"
    A2_PLUS = "A2+"
    A3 = "A3"


def lambda_vectors(dp: DeltaParam) -> tuple[Vec, Vec, Vec, Vec]:
    """The face normals and face directions (lam1, lam1_perp, lam2, lam2_perp)."""
    d = dp.delta_cap
    lam1 = (1.0 - 1.0 / d, 1.0 / d)
    lam1_perp = (1.0, 1.0 - d)
    lam2 = (1.0 / d, 1.0 - 1.0 / d)
    lam2_perp = (1.0 - d, 1.0)
    return lam1, lam1_perp, lam2, lam2_perp


def _dot(u: Vec, v: Vec) -> float:
    return u[0] * v[0] + u[1] * v[1]


def _functionals(x: Vec, dp: DeltaParam) -> tuple[float, float, float, float]:
    """Inner products of x - (1,1) with lam1, lam2, lam1_perp, lam2_perp."""
    lam1, lam1_perp, lam2, lam2_perp = lambda_vectors(dp)
    u = (x[0] - 1.0, x[1] - 1.0)
    return _dot(u, lam1), _dot(u, lam2), _dot(u, lam1_perp), _dot(u, lam2_perp)


def _check_point(x: Vec) -> Vec:
    if x[0] < 0 or x[1] < 0:
        raise DomainError(f"average loss components must be nonnegative, got {x!r}")
    return (float(x[0]), float(x[1]))


def region_matches(x: Vec, dp: DeltaParam) -> tuple[Region, ...]:
    """All region tags whose defining inequalities hold at x.

    Each of the six predicate sets is evaluated independently; on a valid
    partition exactly one matches (the property tests drive random points
    through this to confirm no gaps or overlaps).
    """
    x = _check_point(x)
    p1, p2, o1, o2 = _functionals(x, dp)
    out = []
    if p1 <= 0 and p2 <= 0:
        out.append(Region.S)
    if p1 > 0 and o1 <= 0:
        out.append(Region.A1_MINUS if o1 < -1.0 else Region.A1_PLUS)
    if p2 > 0 and o2 <= 0:
        out.append(Region.A2_MINUS if o2 < -1.0 else Region.A2_PLUS)
    if o1 > 0 and o2 > 0:
        out.append(Region.A3)
    return tuple(out)


def classify_region(x: Vec, dp: DeltaParam) -> Region:
    """The unique region containing x; ties on boundaries follow the printed signs."""
    x = _check_point(x)
    p1, p2, o1, o2 = _functionals(x, dp)
    if p1 <= 0 and p2 <= 0:
        return Region.S
    if p1 > 0 and o1 <= 0:
        return Region.A1_MINUS if o1 < -1.0 else Region.A1_PLUS
    if p2 > 0 and o2 <= 0:
        return Region.A2_MINUS if o2 < -1.0 else Region.A2_PLUS
    if o1 > 0 and o2 > 0:
        return Region.A3
    raise DomainError(f"point {x!r} matches no region; partition violated")


def _segment_projection(x: Vec, direction: Vec) -> Vec:
    # Euclidean projection onto the segment from (1,1) - direction to (1,1).
    u = (x[0] - 1.0, x[1] - 1.0)
    gamma = _dot(u, direction) / _dot(direction, direction)
    gamma = min(0.0, max(-1.0, gamma))
    return (1.0 + gamma * direction[0], 1.0 + gamma * direction[1])


def project_to_S(x: Vec, dp: DeltaParam) -> Vec:
    """Euclidean projection of x onto the target set.

    Points of S project to themselves. The boundary facing the rest of the
    quadrant consists of the two segments from (0, Delta) to (1, 1) and from
    (1, 1) to (Delta, 0), so an outside point projects to the nearer of its
    two clamped segment projections; the vertex cases ((0, Delta), (1, 1),
    (Delta, 0)) fall out of the clamping.
    """
    x = _check_point(x)
    p1, p2, _, _ = _functionals(x, dp)
    if p1 <= 0 and p2 <= 0:
        return x
    _, lam1_perp, _, lam2_perp = lambda_vectors(dp)
    c1 = _segment_projection(x, lam1_perp)
    c2 = _segment_projection(x, lam2_perp)
    d1 = (x[0] - c1[0]) ** 2 + (x[1] - c1[1]) ** 2
    d2 = (x[0] - c2[0]) ** 2 + (x[1] - c2[1]) ** 2
    return c1 if d1 <= d2 else c2


def next_odds_vector(x: Vec, dp: DeltaParam) -> Vec:
    """Probability vector posted by the update rule given the running average x."""
    region = classify_region(x, dp)
    lam1, _, lam2, _ = lambda_vectors(dp)
    if region is Region.S:
        return (0.5, 0.5)
    if region in (Region.A1_MINUS, Region.A1_PLUS):
        return lam1
    if region in (Region.A2_MINUS, Region.A2_PLUS):
        return lam2
    u = (x[0] - 1.0, x[1] - 1.0)
    norm = u[0] + u[1]
    # (1,1) itself lies in S, so the direction cannot degenerate; inside A3
    # both components are nonnegative and the l1 norm is their sum.
    assert norm > 0 and u[0] >= 0 and u[1] >= 0, f"degenerate A3 direction at {x!r}"
    return (u[0] / norm, u[1] / norm)


def delta_for_horizon(T: int) -> DeltaParam:
    """Horizon schedule Delta = 1 + (2/T)^(1/4) / (1 - (2/T)^(1/4)).

    Needs T > 32: at T = 32 the schedule hits Delta = 2, leaving the valid
    cap range. For shorter horizons pass an explicit DeltaParam instead.
    """
    if not isinstance(T, int) or T < 1:
        raise DomainError(f"horizon must be a positive integer, got {T!r}")
    if T <= 32:
        raise DomainError(
            f"horizon schedule needs T > 32 (T={T} gives a cap outside (1, 2)); "
            "supply an explicit delta instead"
        )
    s = (2.0 / T) ** 0.25
    return DeltaParam(1.0 + s / (1.0 - s))


def anytime_bound(t: int, dp: DeltaParam) -> float:
    """Upper bound Delta + sqrt(2/t) Delta^2 / (Delta - 1) on |avg loss|_inf after t rounds."""
    if not isinstance(t, int) or t < 1:
        raise DomainError(f"round count must be a positive integer, got {t!r}")
    d = dp.delta_cap
    return d + math.sqrt(2.0 / t) * d * d / (d - 1.0)


class BlackwellHouse(HouseStrategy):
    """Approachability house (kind ``blackwell``).

    Horizon-free: the update rule only needs the running average loss, so
    ``T`` may be ``None`` (no call-count enforcement). When ``delta_cap`` is
    omitted it is derived from the horizon schedule, which requires T > 32.
    """

    kind = "blackwell"

    def __init__(self, T: int | None = None, delta_cap: float | DeltaParam | None = None):
        super().__init__(T)
        if delta_cap is None:
            if T is None:
                raise DomainError("either a horizon or an explicit delta_cap is required")
            self.delta = delta_for_horizon(T)
        elif isinstance(delta_cap, DeltaParam):
            self.delta = delta_cap
        else:
            self.delta = DeltaParam(float(delta_cap))
        self._sum = [0.0, 0.0]
        self._count = 0
        self._last_r: float | None = None

    def average_loss(self) -> Vec:
        if self._count == 0:
            return (0.0, 0.0)
        return (self._sum[0] / self._count, self._sum[1] / self._count)

    def _odds(self, q_prev):
        if q_prev is not None:
            q = float(q_prev)
            if not (0.0 <= q <= 1.0):
                raise DomainError(f"bet fraction must lie in [0, 1], got {q_prev!r}")
            # Same arithmetic as the transcript loss, so the internal average
            # agrees bit for bit with one recomputed from the game record.
            self._sum[0] += (1.0 - q) / (1.0 - self._last_r)
            self._sum[1] += q / self._last_r
            self._count += 1
        vec = next_odds_vector(self.average_loss(), self.delta)
        self._last_r = vec[1]
        return vec[1]


def blackwell_trace(transcript, dp: DeltaParam) -> list[dict]:
    """Per-round trace rows for a played game: t, phi1, phi2, region, r, bound.

    ``phi1, phi2`` are the components of the average loss after round t,
    ``region`` is the classification that produced the round's odds (i.e. of
    the average before the round), ``r`` the posted scalar odds, and
    ``bound`` the anytime guarantee at t.
    """
    rows = []
    s0 = 0.0
    s1 = 0.0
    for t, (r, q) in enumerate(transcript.rounds, start=1):
        prev_avg = (0.0, 0.0) if t == 1 else (s0 / (t - 1), s1 / (t - 1))
        region = classify_region(prev_avg, dp)
        s0 += (1.0 - q) / (1.0 - r)
        s1 += q / r
        rows.append(
            {
                "t": t,
                "phi1": s0 / t,
                "phi2": s1 / t,
                "region": region.value,
                "r": r,
                "bound": anytime_bound(t, dp),
            }
        )
    return rows
