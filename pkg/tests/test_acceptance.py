"""Acceptance suite: one test per criterion, each printing a pass/fail line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the per-criterion
lines. Tolerances and runtime limits are pinned here; nothing is deferred to
later calibration.
"""

import math
import time

import numpy as np

from bibalance.balance import build_bibalanced_tree, involution, root_fixed_point
from bibalance.monte_carlo import MonteCarloHouse, required_samples
from bibalance.oracle import (
    GridSpec,
    blackwell_bound_check,
    blackwell_partition_check,
    blackwell_projection_check,
    grid_minimax,
    kt_counterexample_check,
    mc_concentration_check,
    verify_jensen_domination,
)
from bibalance.strategies import (
    OptimalDecisiveHouse,
    all_decisive_sequences,
    decisive_loss_batch,
    iter_skeleton_odds,
    optimal_decisive_init,
    optimal_decisive_step,
)


def report(number: int, name: str, ok: bool, detail: str = ""):
    status = "PASS" if ok else "FAIL"
    print(f"criterion {number:2d} [{name}]: {status}  {detail}".rstrip())
    assert ok, f"criterion {number} ({name}) failed: {detail}"


class TestAcceptance:
    def test_criterion_01_optimal_loss_reproduction(self):
        t0 = time.perf_counter()
        worst_rel = 0.0
        for T in range(1, 13):
            target = T + math.sqrt(T)
            l0, l1 = decisive_loss_batch(T, all_decisive_sequences(T))
            loss = np.maximum(l0, l1)
            worst_rel = max(worst_rel, float(np.max(np.abs(loss - target))) / target)
        elapsed = time.perf_counter() - t0
        ok = worst_rel <= 1e-9 and elapsed < 10.0
        report(1, "optimal loss, exhaustive T=1..12", ok,
               f"max rel err {worst_rel:.3e}, {elapsed:.2f}s")

    def test_criterion_02_large_horizon_stability(self):
        T = 100_000
        target = T + math.sqrt(T)
        rng = np.random.default_rng(20240)
        bits = (rng.random((100, T)) < 0.5).astype(np.int8)
        t0 = time.perf_counter()
        l0, l1 = decisive_loss_batch(T, bits)
        elapsed = time.perf_counter() - t0
        worst_rel = float(np.max(np.abs(np.maximum(l0, l1) - target))) / target
        ok = worst_rel <= 1e-6 and elapsed < 5.0
        report(2, "large-T stability at T=1e5", ok,
               f"max rel err {worst_rel:.3e}, {elapsed:.2f}s")

    def test_criterion_03_closed_form_odds(self):
        sqrt2, sqrt3 = math.sqrt(2.0), math.sqrt(3.0)
        worst = 0.0
        s2 = optimal_decisive_init(2)
        worst = max(worst, abs(0.5 - 1.0 / (s2.b - involution(1, s2.a))))
        worst = max(worst, abs(optimal_decisive_step(s2, 0)[1] - (1.0 - 1.0 / sqrt2)))
        worst = max(worst, abs(optimal_decisive_step(s2, 1)[1] - 1.0 / sqrt2))
        tree2 = build_bibalanced_tree(2, 2.0 + sqrt2)
        worst = max(worst, abs(tree2.odds[""] - 0.5))
        worst = max(worst, abs(tree2.odds["0"] - (1.0 - 1.0 / sqrt2)))
        worst = max(worst, abs(tree2.odds["1"] - 1.0 / sqrt2))
        tree3 = build_bibalanced_tree(3, 3.0 + sqrt3)
        worst = max(worst, abs(tree3.odds["0"] - (3.0 - sqrt3) / 4.0))
        worst = max(worst, abs(tree3.odds["00"] - (3.0 - sqrt3) / 6.0))
        worst = max(worst, abs(tree3.odds["01"] - (3.0 - sqrt3) / 2.0))
        s3 = optimal_decisive_init(3)
        s30, r2 = optimal_decisive_step(s3, 0)
        worst = max(worst, abs(r2 - (3.0 - sqrt3) / 4.0))
        worst = max(worst, abs(optimal_decisive_step(s30, 0)[1] - (3.0 - sqrt3) / 6.0))
        worst = max(worst, abs(optimal_decisive_step(s30, 1)[1] - (3.0 - sqrt3) / 2.0))
        ok = worst <= 1e-12
        report(3, "closed-form odds at T=2 and T=3", ok, f"max abs err {worst:.3e}")

    def test_criterion_04_grid_minimax_oracle(self):
        t0 = time.perf_counter()
        v2 = grid_minimax(GridSpec(resolution=1e-3, horizon=2))
        err2 = abs(v2 - (2.0 + math.sqrt(2.0)))
        v3 = grid_minimax(GridSpec(resolution=2e-3, horizon=3))
        err3 = abs(v3 - (3.0 + math.sqrt(3.0)))
        elapsed = time.perf_counter() - t0
        ok = err2 <= 1e-2 and err3 <= 2e-2 and elapsed < 60.0
        report(4, "independent grid minimax", ok,
               f"T=2 err {err2:.2e}, T=3 err {err3:.2e}, {elapsed:.1f}s")

    def test_criterion_05_decisive_optimality_bound(self):
        details = []
        ok = True
        for T in (4, 8, 12):
            rep = verify_jensen_domination(T, n_samples=1000, seed=T)
            target = T + math.sqrt(T)
            ok = ok and rep.passed
            ok = ok and rep.details["max_loss"] <= target + 1e-9
            ok = ok and abs(rep.details["responsive_loss"] - T) <= 1e-9 * T
            details.append(f"T={T} max {rep.details['max_loss']:.6f} <= {target:.6f}")
        report(5, "expected strategy never beaten by continuous bets", ok, "; ".join(details))

    def test_criterion_06_odds_bounds(self):
        worst = 0.0
        ok = True
        for T in range(1, 13):
            lo = 1.0 / (T + math.sqrt(T))
            hi = 1.0 - lo
            for _, r in iter_skeleton_odds(T):
                if r < lo - 1e-12 or r > hi + 1e-12:
                    ok = False
                worst = max(worst, lo - r, r - hi)
        report(6, "odds stay within [1/(T+sqrt(T)), 1-1/(T+sqrt(T))]", ok,
               f"worst overshoot {worst:.3e}")

    def test_criterion_07_monte_carlo_concentration(self):
        t0 = time.perf_counter()
        n = required_samples(0.02, 0.05, 10)
        rep = mc_concentration_check(
            T=10, epsilon=0.02, delta=0.05, n_trials=200, base_seed=77, slack=2.0
        )
        # decisive inputs agree with the decisive engine exactly, any N and seed
        exact = True
        for n_copies in (1, 33):
            for seed in (0, 9):
                house = MonteCarloHouse(6, n_copies=n_copies, seed=seed)
                engine = OptimalDecisiveHouse(6)
                bets = [None, 1.0, 0.0, 0.0, 1.0, 1.0]
                for q in bets:
                    if house.next_odds(q) != engine.next_odds(q):
                        exact = False
        elapsed = time.perf_counter() - t0
        ok = rep.passed and exact and elapsed < 120.0
        report(7, "Monte Carlo concentration at N=required_samples", ok,
               f"N={n}, deviation fraction {rep.details['fraction']:.4f} <= 0.10, "
               f"decisive exact={exact}, {elapsed:.1f}s")

    def test_criterion_08_kt_counterexample(self):
        ok = True
        details = []
        for T in (4, 8, 16):
            rep = kt_counterexample_check(T)
            ok = ok and rep.passed and rep.details["loss_vector"][1] == 2.0 * T
            details.append(f"T={T} loss {rep.details['loss_vector'][1]:.1f}")
        report(8, "add-half baseline loses exactly 2T on 0^(T-1)1", ok, "; ".join(details))

    def test_criterion_09_blackwell_bound_partition_projection(self):
        t0 = time.perf_counter()
        ok = True
        details = []
        for T in (64, 512, 4096):
            rep = blackwell_bound_check(T, n_random=100)
            ok = ok and rep.passed
            details.append(f"T={T} final {rep.details['worst_final_loss'] / T:.4f} "
                           f"<= {rep.details['final_normalized_bound']:.4f}")
        part = blackwell_partition_check(n_points=100_000, seed=3)
        ok = ok and part.passed
        proj = blackwell_projection_check(n_points=500, seed=3, grid_n=2000, tol=2e-3)
        ok = ok and proj.passed
        elapsed = time.perf_counter() - t0
        report(9, "approachability bound, partition, projection", ok,
               "; ".join(details) + f"; partition ok={part.passed}; "
               f"projection err {proj.max_abs_err:.2e}; {elapsed:.1f}s")

    def test_criterion_10_involution_property_suite(self):
        rng = np.random.default_rng(5)
        worst = 0.0
        ok = True
        for d in range(1, 65):
            xs = d + 10 ** rng.uniform(-3, 3, size=1000)
            for x in xs:
                err = abs(involution(d, involution(d, float(x))) - x)
                tol = 1e-9 * max(1.0, abs(x))
                if err > tol:
                    ok = False
                worst = max(worst, err / max(1.0, abs(x)))
        horizons = [1, 2, 3, 10, 100, 1000, 10**4, 10**5, 10**6]
        horizons += [int(t) for t in rng.integers(2, 10**6, size=100)]
        fp_worst = 0.0
        for T in horizons:
            x = root_fixed_point(T)
            err = abs(involution(T, x) - x)
            if err > 1e-9 * T:
                ok = False
            fp_worst = max(fp_worst, err / T)
        report(10, "involution identity and fixed points up to T=1e6", ok,
               f"max rel involution err {worst:.3e}, max fixed-point err {fp_worst:.3e}")
