"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line."""
import math
import time

import numpy as np

from conftest import random_schedule
from stirapopt.core import SystemParams
from stirapopt.dynamics import IntegratorConfig, simulate_adiabatic, simulate_full, simulate_reduced
from stirapopt.optimal import (
    closed_form_efficiency,
    optimal_efficiency_from_root,
    optimality_brute_check,
    singular_slope,
    solve,
    solve_theta0,
    synthesize_schedule,
    verify_singular_conditions,
)
from stirapopt.protocols import (
    SigmoidParams,
    constant_asymptotic_efficiency,
    constant_closed_form,
    constant_schedule,
    sigmoid_schedule,
)

FULL_GRID = list(range(5, 55, 5)) + list(range(100, 1100, 100))


def best_time(fn, repeat=20):
    best = math.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def warm_kernels():
    s = synthesize_schedule(1.0)
    simulate_reduced(s)
    simulate_adiabatic(s)


def test_c01_transcendental_root(criterion):
    theta0 = solve_theta0(250.0)
    u_s = singular_slope(theta0)
    elapsed = best_time(lambda: singular_slope(solve_theta0(250.0)))
    ok = abs(theta0 - 0.012370) < 1e-6 and abs(u_s - 0.006184) < 1e-6 and elapsed < 1e-3
    criterion("1 transcendental root", ok, f"theta0={theta0:.9f} u_s={u_s:.9f} time={elapsed * 1e3:.3f} ms")


def test_c02_closed_form_efficiency(criterion):
    eff = solve(250).efficiency
    diffs = []
    for T in (0.01, 1, 10, 250, 1000):
        sol = solve(T)
        diffs.append(abs(closed_form_efficiency(sol) - optimal_efficiency_from_root(sol.theta0)))
    ok = abs(eff - 0.962) < 1e-3 and max(diffs) < 1e-12
    criterion("2 closed-form efficiency", ok, f"eff(250)={eff:.6f} max form gap={max(diffs):.2e}")


def test_c03_oracle_equivalence(criterion):
    warm_kernels()
    worst_gap, worst_time = 0.0, 0.0
    for T in (10, 100, 250):
        cf = solve(T).efficiency
        for sim in (simulate_reduced, simulate_adiabatic):
            t0 = time.perf_counter()
            eff = sim(synthesize_schedule(T)).efficiency
            worst_time = max(worst_time, time.perf_counter() - t0)
            worst_gap = max(worst_gap, abs(eff - cf))
    ok = worst_gap < 1e-6 and worst_time < 1.0
    criterion("3 ODE oracle equivalence", ok, f"max gap={worst_gap:.2e} max time={worst_time:.3f} s")


def test_c04_brute_force_optimality(criterion):
    cell = (math.pi / 4) / 100_001
    t0 = time.perf_counter()
    offsets = []
    for T in (4, 50, 250):
        best, _ = optimality_brute_check(T, 100_000)
        offsets.append(abs(best - solve_theta0(T)))
    elapsed = time.perf_counter() - t0
    ok = max(offsets) <= cell and elapsed < 5.0
    criterion("4 brute-force optimality", ok, f"max offset={max(offsets) / cell:.3f} cells time={elapsed:.3f} s")


def test_c05_sigmoid_benchmark(criterion):
    eff = simulate_reduced(sigmoid_schedule(SigmoidParams(125, 10, 250))).efficiency
    opt = solve(250).efficiency
    ok = abs(eff - 0.905) < 2e-3 and eff < opt
    criterion("5 sigmoid benchmark", ok, f"sigmoid={eff:.6f} optimal={opt:.6f}")


def test_c06_constant_protocol(criterion):
    gaps = []
    for T in (1, 3, 10, 250):
        s = constant_schedule(T)
        cf = constant_closed_form(T)
        gaps.append(max(abs(simulate_reduced(s).efficiency - cf), abs(simulate_adiabatic(s).efficiency - cf)))
    small = constant_asymptotic_efficiency(0.1, "small")
    rel_small = abs(constant_closed_form(0.1) - small) / small
    abs_large = abs(constant_closed_form(1e4) - constant_asymptotic_efficiency(1e4, "large"))
    ok = max(gaps) < 1e-6 and rel_small < 0.05 and abs_large < 1e-4
    criterion("6 constant protocol", ok,
              f"max ODE gap={max(gaps):.2e} small-T rel={rel_small:.4f} large-T abs={abs_large:.2e}")


def full_gaps(ratio):
    out = {}
    for T in FULL_GRID:
        eff = simulate_full(synthesize_schedule(T), SystemParams(ratio)).efficiency
        out[T] = abs(eff - solve(T).efficiency)
    return out


def test_c07a_full_model_ordering(criterion):
    t0 = time.perf_counter()
    g1, g01 = full_gaps(1.0), full_gaps(0.1)
    elapsed = time.perf_counter() - t0
    bad = [T for T in FULL_GRID if T <= 100 and not g1[T] < g01[T]]
    ok = not bad and elapsed < 120
    criterion("7a full-model ordering (ratio 1 beats 0.1, T<=100)", ok,
              f"violations={bad} time={elapsed:.1f} s")


def test_c07b_full_model_convergence(criterion):
    t0 = time.perf_counter()
    g01 = full_gaps(0.1)
    elapsed = time.perf_counter() - t0
    late = {T: g for T, g in g01.items() if T >= 300}
    worst = max(late, key=late.get)
    ok = late[worst] < 0.02 and elapsed < 120
    criterion("7b full-model convergence (ratio 0.1 within 0.02, T>=300)", ok,
              f"worst T={worst} gap={late[worst]:.5f} time={elapsed:.1f} s")


def test_c08_pmp_verification(criterion):
    tr = verify_singular_conditions(250)
    ok = (tr.max_phi < 1e-10 and tr.max_hc_drift < 1e-10 and tr.adjoint_residual < 1e-6
          and tr.max_feedback_error < 1e-8)
    criterion("8 PMP singular arc", ok,
              f"phi={tr.max_phi:.1e} Hc drift={tr.max_hc_drift:.1e} adjoint={tr.adjoint_residual:.1e} "
              f"feedback={tr.max_feedback_error:.1e}")


def test_c09_invariant_suite(criterion):
    rng = np.random.default_rng(7)
    worst_norm, worst_frame = 0.0, 0.0
    for _ in range(100):
        s = random_schedule(rng, rng.uniform(1.0, 20.0))
        red, adi = simulate_reduced(s), simulate_adiabatic(s)
        full = simulate_full(s, SystemParams(1.0))
        for traj in (red, adi, full):
            worst_norm = max(worst_norm, traj.max_norm_increase, float(np.max(np.diff(traj.norm_squared()))))
        c1, c3 = adi.amplitudes()
        worst_frame = max(worst_frame, float(np.max(np.abs(c1 - red.states[:, 0]))),
                          float(np.max(np.abs(c3 - red.states[:, 1]))))

    s = sigmoid_schedule(SigmoidParams(10, 2, 20))

    def eff(n):
        return simulate_reduced(s, IntegratorConfig(steps_per_unit_time=n, min_steps_per_segment=1)).efficiency

    exact = eff(400)
    ratio = abs(eff(2) - exact) / abs(eff(4) - exact)

    jump_gap = 0.0
    for T in (0.01, 1, 4, 50, 250, 1000, 1e5):
        j0, jT = synthesize_schedule(T).jumps
        jump_gap = max(jump_gap, abs(j0.size - jT.size))
    thetas = np.array([solve_theta0(T) for T in np.logspace(-2, 4, 200)])
    monotone = bool(np.all(np.diff(thetas) < 0))

    ok = worst_norm < 1e-10 and worst_frame < 1e-8 and 10 < ratio < 24 and jump_gap < 1e-12 and monotone
    criterion("9 invariant suite", ok,
              f"norm incr={worst_norm:.1e} frame={worst_frame:.1e} refinement ratio={ratio:.2f} "
              f"jump gap={jump_gap:.1e} monotone={monotone}")


def test_c10_optimal_limits(criterion):
    small = 0.1**2 / 16
    rel_small = abs(solve(0.1).efficiency - small) / small
    abs_large = abs(solve(1e4).efficiency - (1 - math.pi**2 / 1e4))
    ok = rel_small < 0.05 and abs_large < 1e-3
    criterion("10 optimal limits", ok, f"small-T rel={rel_small:.4f} large-T abs={abs_large:.2e}")
