"""Binary online bookmaking: optimal odds updating and its baselines.

The house posts odds over T rounds against adversarial bets and wants to
minimize its worst-case payout. The loss-equalizing strategy built on
bi-balanced game trees guarantees exactly T + sqrt(T); this package
implements it together with its exact and Monte Carlo extensions to
continuous bets, an approachability baseline, gambler-side adversaries, and
brute-force verifiers for every closed-form claim at desk scale.
"""

from .balance import (
    BalancedTree,
    ValuePair,
    advance_value,
    build_bibalanced_tree,
    involution,
    odds_from_value,
    root_fixed_point,
    verify_bibalanced,
)
from .errors import (
    BookmakingError,
    CapacityError,
    DomainError,
    GameAbort,
    InfeasibleError,
    ProtocolError,
)
from .game import (
    GameConfig,
    LossVector,
    Transcript,
    game_loss,
    house_gain,
    play_game,
    round_loss,
)
from .strategies import (
    DecisiveState,
    ExpectedSkeletonHouse,
    KTHouse,
    OptimalDecisiveHouse,
    OptimalHouse,
    UniformHouse,
    expected_skeleton_odds,
    kt_baseline_odds,
    make_house,
    optimal_decisive_init,
    optimal_decisive_step,
    uniform_baseline_odds,
)

__version__ = "0.1.0"

__all__ = [
    "BalancedTree",
    "ValuePair",
    "advance_value",
    "build_bibalanced_tree",
    "involution",
    "odds_from_value",
    "root_fixed_point",
    "verify_bibalanced",
    "BookmakingError",
    "CapacityError",
    "DomainError",
    "GameAbort",
    "InfeasibleError",
    "ProtocolError",
    "GameConfig",
    "LossVector",
    "Transcript",
    "game_loss",
    "house_gain",
    "play_game",
    "round_loss",
    "DecisiveState",
    "ExpectedSkeletonHouse",
    "KTHouse",
    "OptimalDecisiveHouse",
    "OptimalHouse",
    "UniformHouse",
    "expected_skeleton_odds",
    "kt_baseline_odds",
    "make_house",
    "optimal_decisive_init",
    "optimal_decisive_step",
    "uniform_baseline_odds",
    "__version__",
]
