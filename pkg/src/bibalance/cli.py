"""Command-line front end: simulate, sweep, verify, play, compare.

Exit codes: 0 success (or verification pass), 1 verification fail, 2 usage
or domain error, 3 protocol violation during a game, 4 interactive game
aborted. Output files are byte-stable for fixed seeds and arguments; CSV column
orders are frozen (golden-tested) and documented in the README.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor

from .adversaries import (
    AlternatingGambler,
    ConstantGambler,
    GreedyGambler,
    ReplayGambler,
    exhaustive_worst_case,
    make_gambler,
)
from .blackwell import TRACE_CSV_HEADER, blackwell_trace, delta_for_horizon
from .errors import BookmakingError, CapacityError, DomainError, GameAbort, InfeasibleError, ProtocolError
from .game import TRANSCRIPT_CSV_HEADER, GameConfig, Transcript, game_loss, house_gain, play_game
from .oracle import (
    GridSpec,
    OracleReport,
    blackwell_bound_check,
    blackwell_partition_check,
    blackwell_projection_check,
    decisive_maximizer_check,
    equalizer_solve_T2,
    grid_minimax,
    kt_counterexample_check,
    mc_concentration_check,
    verify_jensen_domination,
    verify_optimal_loss,
    verify_subtree_balance,
)
from .strategies import HOUSE_KINDS, make_house

SWEEP_CSV_HEADER = "T,house,worst_loss,normalized_loss,bound"
COMPARE_CSV_HEADER = "house,loss,normalized_loss,gain"

GRID_MINIMAX_TOL = {1: 5e-3, 2: 1e-2, 3: 2e-2}


def _float_or_none(x):
    return None if x is None else float(x)


def _make_house(kind: str, T: int, args):
    if kind == "mc":
        mc_seed = getattr(args, "mc_seed", None)
        if mc_seed is None:
            mc_seed = getattr(args, "seed", 0) or 0
        return make_house(
            "mc",
            T,
            {
                "N": getattr(args, "mc_n", None),
                "eps": _float_or_none(getattr(args, "mc_eps", None)),
                "delta": _float_or_none(getattr(args, "mc_delta", None)),
                "seed": mc_seed,
            },
        )
    if kind == "blackwell":
        return make_house("blackwell", T, {"delta": _float_or_none(getattr(args, "bw_delta", None))})
    return make_house(kind, T)


def _write_text(path: str, text: str) -> None:
    with open(path, "w", encoding="utf-8") as fp:
        fp.write(text)


def _emit_transcript(transcript: Transcript, path: str | None, fmt: str) -> None:
    if path is None:
        return
    if fmt == "json":
        _write_text(path, transcript.to_json() + "\n")
    else:
        lines = [TRANSCRIPT_CSV_HEADER] + list(transcript.csv_rows())
        _write_text(path, "\n".join(lines) + "\n")


def _figure_path(out: str) -> str:
    stem, _ = os.path.splitext(out)
    return stem + ".png"


# ---------------------------------------------------------------------------
# simulate
# ---------------------------------------------------------------------------


def cmd_simulate(args) -> int:
    config = GameConfig(args.T, args.gamma)
    if args.gambler.startswith("exhaustive"):
        bits, _ = exhaustive_worst_case(lambda: _make_house(args.house, args.T, args), args.T)
        gambler = ReplayGambler([float(b) for b in bits])
    else:
        gambler = make_gambler(args.gambler, args.T, args.gamma)
    house = _make_house(args.house, args.T, args)
    transcript = play_game(house, gambler, config)
    loss = game_loss(transcript)
    _emit_transcript(transcript, args.out, args.format)
    if args.trace_out is not None:
        if args.house != "blackwell":
            raise DomainError("--trace-out is only meaningful with --house blackwell")
        dp = house.delta
        rows = blackwell_trace(transcript, dp)
        lines = [TRACE_CSV_HEADER] + [
            f'{r["t"]},{r["phi1"]!r},{r["phi2"]!r},{r["region"]},{r["r"]!r},{r["bound"]!r}'
            for r in rows
        ]
        _write_text(args.trace_out, "\n".join(lines) + "\n")
        if args.plot:
            from .plotting import render_blackwell_trace_figure

            render_blackwell_trace_figure(rows, _figure_path(args.trace_out))
    if args.plot and args.out is not None:
        from .plotting import render_transcript_figure

        render_transcript_figure(transcript, _figure_path(args.out))
    summary = {"loss": loss, "gain": house_gain(loss, config)}
    print(json.dumps(summary, sort_keys=True))
    return 0


# ---------------------------------------------------------------------------
# sweep
# ---------------------------------------------------------------------------


def _worst_loss(kind: str, T: int, args) -> float:
    """Worst-case loss over decisive play: exhaustive when enumerable, else a battery."""
    if T <= args.exhaustive_limit:
        _, loss = exhaustive_worst_case(lambda: _make_house(kind, T, args), T)
        return loss
    worst = -math.inf
    batteries = [lambda: GreedyGambler(T), lambda: ConstantGambler(1.0), lambda: ConstantGambler(0.0), lambda: AlternatingGambler()]
    for factory in batteries:
        transcript = play_game(_make_house(kind, T, args), factory(), GameConfig(T, args.gamma))
        worst = max(worst, game_loss(transcript))
    return worst


def _bound_for(kind: str, T: int) -> float | None:
    if kind in ("optimal", "expected", "mc"):
        return (T + math.sqrt(T)) / T
    if kind == "blackwell":
        if T > 32:
            return 1.0 + 2.0 * (delta_for_horizon(T).delta_cap - 1.0)
        return None
    if kind in ("kt", "uniform"):
        return 2.0
    return None


def cmd_sweep(args) -> int:
    horizons = [int(x) for x in args.T.split(",") if x]
    houses = [h.strip() for h in args.house.split(",") if h.strip()]
    for h in houses:
        if h not in HOUSE_KINDS:
            raise DomainError(f"unknown house kind {h!r}")
    items = [(T, h) for T in horizons for h in houses]

    def run(item):
        T, kind = item
        try:
            loss = _worst_loss(kind, T, args)
        except DomainError as exc:
            # e.g. the blackwell schedule needs T > 32; skip the cell rather
            # than failing the whole sweep (an explicit --bw-delta covers it)
            print(f"warning: skipping T={T} house={kind}: {exc}", file=sys.stderr)
            return None
        return {
            "T": T,
            "house": kind,
            "worst_loss": loss,
            "normalized_loss": loss / T,
            "bound": _bound_for(kind, T),
        }

    max_workers = min(len(items), int(os.environ.get("BIBALANCE_THREADS", os.cpu_count() or 1)))
    if max_workers > 1:
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            rows = [row for row in pool.map(run, items) if row is not None]
    else:
        rows = [row for row in map(run, items) if row is not None]

    if args.format == "json":
        text = json.dumps(rows) + "\n"
    else:
        lines = [SWEEP_CSV_HEADER]
        for r in rows:
            bound = "" if r["bound"] is None else repr(r["bound"])
            lines.append(f'{r["T"]},{r["house"]},{r["worst_loss"]!r},{r["normalized_loss"]!r},{bound}')
        text = "\n".join(lines) + "\n"
    if args.out:
        _write_text(args.out, text)
        if args.plot:
            from .plotting import render_sweep_figure

            render_sweep_figure(rows, _figure_path(args.out))
    else:
        sys.stdout.write(text)
    return 0


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------


def _verify_grid_minimax(args) -> OracleReport:
    T = args.T if args.T is not None else 2
    res = args.res if args.res is not None else 1e-3
    value = grid_minimax(GridSpec(resolution=res, horizon=T))
    target = T + math.sqrt(T)
    err = abs(value - target)
    tol = args.tol if args.tol is not None else GRID_MINIMAX_TOL[T]
    return OracleReport(
        check="grid-minimax",
        horizon=T,
        max_abs_err=err,
        passed=err <= tol,
        details={"value": value, "target": target, "resolution": res},
    )


def _verify_equalizer(args) -> OracleReport:
    sol = equalizer_solve_T2()
    interior = all(0.0 < r < 1.0 for r in (sol.r1, sol.r2_0, sol.r2_1))
    return OracleReport(
        check="equalizer-t2",
        horizon=2,
        max_abs_err=sol.residual,
        passed=interior and sol.residual <= 1e-10,
        details={"r1": sol.r1, "r2_0": sol.r2_0, "r2_1": sol.r2_1, "loss": sol.loss},
    )


def cmd_verify(args) -> int:
    checks = {
        "optimal-loss": lambda: verify_optimal_loss(args.T if args.T is not None else 12),
        "subtree-balance": lambda: verify_subtree_balance(args.T if args.T is not None else 4),
        "jensen": lambda: verify_jensen_domination(
            args.T if args.T is not None else 8, args.samples, args.seed or 0
        ),
        "grid-minimax": lambda: _verify_grid_minimax(args),
        "equalizer-t2": lambda: _verify_equalizer(args),
        "decisive-maximizer": lambda: decisive_maximizer_check(),
        "blackwell-partition": lambda: blackwell_partition_check(args.points, args.seed or 0),
        "blackwell-projection": lambda: blackwell_projection_check(
            min(args.points, 500) if args.points else 500, args.seed or 0
        ),
        "blackwell-bound": lambda: blackwell_bound_check(args.T if args.T is not None else 64),
        "kt-counterexample": lambda: kt_counterexample_check(args.T if args.T is not None else 8),
        "mc-concentration": lambda: mc_concentration_check(
            T=args.T if args.T is not None else 10,
            epsilon=args.eps if args.eps is not None else 0.02,
            delta=args.delta if args.delta is not None else 0.05,
            n_trials=args.trials,
            base_seed=args.seed or 0,
        ),
    }
    if args.check not in checks:
        print(
            f"error: unknown check {args.check!r}; known: {', '.join(sorted(checks))}",
            file=sys.stderr,
        )
        return 2
    report = checks[args.check]()
    print(json.dumps(report.to_json_dict(), sort_keys=True))
    return 0 if report.passed else 1


# ---------------------------------------------------------------------------
# play
# ---------------------------------------------------------------------------


def cmd_play(args) -> int:
    config = GameConfig(args.T, args.gamma)
    house = _make_house(args.house, args.T, args)
    gambler = make_gambler("interactive", args.T, args.gamma)
    transcript = play_game(house, gambler, config)
    g = args.gamma
    l0, l1 = transcript.accumulated.as_tuple()
    print(f"game over after {args.T} rounds (overround {g})")
    print(f"  if team 0 wins: house pays {l0 / g:.6f}, net gain {args.T - l0 / g:.6f}")
    print(f"  if team 1 wins: house pays {l1 / g:.6f}, net gain {args.T - l1 / g:.6f}")
    return 0


# ---------------------------------------------------------------------------
# compare
# ---------------------------------------------------------------------------


def cmd_compare(args) -> int:
    houses = [h.strip() for h in args.house.split(",") if h.strip()]
    config = GameConfig(args.T, args.gamma)
    rows = []
    for kind in houses:
        house = _make_house(kind, args.T, args)
        gambler = make_gambler(args.gambler, args.T, args.gamma)
        transcript = play_game(house, gambler, config)
        loss = game_loss(transcript)
        rows.append(
            {
                "house": kind,
                "loss": loss,
                "normalized_loss": loss / args.T,
                "gain": house_gain(loss, config),
            }
        )
    if args.format == "json":
        text = json.dumps(rows) + "\n"
    else:
        lines = [COMPARE_CSV_HEADER]
        for r in rows:
            lines.append(f'{r["house"]},{r["loss"]!r},{r["normalized_loss"]!r},{r["gain"]!r}')
        text = "\n".join(lines) + "\n"
    if args.out:
        _write_text(args.out, text)
        if args.plot:
            from .plotting import render_compare_figure

            render_compare_figure(rows, _figure_path(args.out))
    else:
        sys.stdout.write(text)
    return 0


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def _add_common(sub, horizon_required=True, horizon_list=False):
    if horizon_list:
        sub.add_argument("--T", required=True, help="comma-separated horizons, e.g. 4,16,64")
    else:
        sub.add_argument("--T", type=int, required=horizon_required, help="number of rounds")
    sub.add_argument("--gamma", type=float, default=1.0, help="overround parameter (default 1.0)")
    sub.add_argument("--seed", type=int, default=0, help="seed for seeded strategies")
    sub.add_argument("--out", default=None, help="output file path")
    sub.add_argument("--format", choices=("csv", "json"), default="json")
    sub.add_argument("--mc-n", type=int, default=None, help="Monte Carlo copies")
    sub.add_argument("--mc-seed", type=int, default=None, help="Monte Carlo seed (defaults to --seed)")
    sub.add_argument("--mc-eps", type=float, default=None, help="Monte Carlo accuracy target")
    sub.add_argument("--mc-delta", type=float, default=None, help="Monte Carlo failure probability")
    sub.add_argument("--bw-delta", type=float, default=None, help="explicit approachability cap in (1,2)")
    sub.add_argument("--plot", action="store_true", help="render figures next to the output file")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bibalance",
        description="binary online bookmaking: optimal odds updating, baselines, and verifiers",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("simulate", help="play one game and write the transcript")
    _add_common(p)
    p.add_argument("--house", default="optimal", help=f"house kind: {', '.join(HOUSE_KINDS)}")
    p.add_argument("--gambler", default="greedy", help="gambler id (see README)")
    p.add_argument("--trace-out", default=None, help="blackwell per-round trace CSV")
    p.set_defaults(func=cmd_simulate)

    p = subs.add_parser("sweep", help="worst-case losses across horizons and houses")
    _add_common(p, horizon_list=True)
    p.add_argument("--house", default="optimal", help="comma-separated house kinds")
    p.add_argument(
        "--exhaustive-limit",
        type=int,
        default=16,
        help="largest horizon searched exhaustively (battery beyond)",
    )
    p.set_defaults(func=cmd_sweep, format="csv")

    p = subs.add_parser("verify", help="run a named brute-force verification")
    p.add_argument("check", help="check name, e.g. optimal-loss")
    p.add_argument("--T", type=int, default=None)
    p.add_argument("--res", type=float, default=None, help="grid resolution")
    p.add_argument("--tol", type=float, default=None, help="override pass tolerance")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--points", type=int, default=100_000)
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--eps", type=float, default=None)
    p.add_argument("--delta", type=float, default=None)
    p.set_defaults(func=cmd_verify)

    p = subs.add_parser("play", help="interactive game against a chosen house")
    _add_common(p)
    p.add_argument("--house", default="optimal")
    p.set_defaults(func=cmd_play)

    p = subs.add_parser("compare", help="one gambler against several houses")
    _add_common(p)
    p.add_argument("--house", default="optimal,uniform", help="comma-separated house kinds")
    p.add_argument("--gambler", default="greedy")
    p.set_defaults(func=cmd_compare, format="csv")

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ProtocolError as exc:
        print(f"protocol error: {exc}", file=sys.stderr)
        return 3
    except GameAbort as exc:
        print(f"aborted: {exc}", file=sys.stderr)
        return 4
    except (DomainError, CapacityError, InfeasibleError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except BookmakingError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
