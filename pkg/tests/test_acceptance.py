"""Acceptance suite: one test per desk-scale criterion, each printing a verdict line.

Criterion 6 is known to fail with the canonical logarithmic tail datum: its
scaled sups decay like 1/ln(e + sqrt(t)), which cannot reach a factor 5 over
three time decades.  The test asserts the stated threshold anyway and the
failure message carries the measured values.
"""

import math

import numpy as np
import pytest
from scipy.linalg import solve_banded

from shlab.exponents import ProblemParams, compute_exponents, p_joseph_lundgren
from shlab.harness import (
    default_grid,
    dense_oracle,
    fit_rate,
    run_corollary_small_b,
    run_l2_stability,
    run_psik_stability,
    run_theorem_half_l,
    run_theorem_mth2,
    snapshot_times,
)
from shlab.nonlinear import InitialDataSpec, build_field, comparison_monitor, nonlinear_defect
from shlab.radial_pde import LogGrid, RadialField, assemble_hardy_operator, step_implicit
from shlab.semigroup import WeightedNormSpec, kernel_check_sweep, radial_lq_norm, smoothing_ratio, weighted_norm
from shlab.steady_states import crossings_with_v_infinity, integrate_psi1, v_infinity


def _verdict(num, ok, detail):
    line = f"ACCEPTANCE {num}: {'PASS' if ok else 'FAIL'} - {detail}"
    print(line)
    return line


def test_acceptance_1_exponent_identities():
    for n in range(11, 21):
        p = p_joseph_lundgren(n)
        e = compute_exponents(ProblemParams(n, p))
        assert e.lam == pytest.approx((n - 2) ** 2 / 4, rel=1e-12)
        assert e.sigma == pytest.approx((n - 2) / 2, rel=1e-12)
        assert e.p_F < e.p_st < e.p_S < e.p_JL
    e = compute_exponents(ProblemParams(11, 7.0))
    ok = abs(e.sigma - 13 / 3) <= 1e-12 * (13 / 3) and abs(e.lam - 182 / 9) <= 1e-12 * (182 / 9)
    line = _verdict(1, ok, f"sigma={e.sigma:.12f}, lambda={e.lam:.12f}")
    assert ok, line


def test_acceptance_2_steady_states():
    params = ProblemParams(11, 7.0)
    prof = integrate_psi1(params, r_max=50.0)
    decreasing = bool(np.all(np.diff(prof.values) < 0))
    positive = bool(np.all(prof.values > 0))
    below = bool(np.all(prof.values < v_infinity(prof.radii, params)))
    params3 = ProblemParams(11, 3.0)
    prof3 = integrate_psi1(params3, r_max=50.0)
    crossings = crossings_with_v_infinity(prof3, params3)
    ok = decreasing and positive and below and len(crossings) >= 1
    line = _verdict(2, ok, f"(11,7) decreasing/positive/below={decreasing}/{positive}/{below}; "
                          f"(11,3) crossings={len(crossings)}")
    assert ok, line


def test_acceptance_3_solver_oracle():
    e = compute_exponents(ProblemParams(11, 7.0))
    grid = LogGrid(math.log(1e-2), math.log(1e2), 64)
    op = assemble_hardy_operator(grid, 11, e.sigma, ("neumann", "neumann"))
    prop = dense_oracle(grid, 11, e.sigma, ("neumann", "neumann"))
    W0 = np.exp(-((grid.s - 1.0) ** 2) / (2 * 1.5**2))
    ref = prop.apply(W0, 1.0)

    def stepped_error(dt):
        f = RadialField(grid, W0.copy(), e.sigma, 0.0)
        for _ in range(round(1.0 / dt)):
            f = step_implicit(f, op, None, dt)
        return np.max(np.abs(f.W - ref)) / np.max(np.abs(ref))

    err1 = stepped_error(1e-4)
    err2 = stepped_error(5e-5)
    ratio = err1 / err2
    ok = err1 <= 1e-5 and err2 <= 1e-5 and 1.5 <= ratio <= 2.5
    line = _verdict(3, ok, f"err(1e-4)={err1:.2e}, err(5e-5)={err2:.2e}, ratio={ratio:.2f}")
    assert ok, line


def test_acceptance_4_linear_weighted_decay():
    from shlab.semigroup import decay_series_linear

    e = compute_exponents(ProblemParams(11, 7.0))
    grid = default_grid()
    w0 = build_field(InitialDataSpec.power_tail(0.1, 5.0), e, grid)
    series = decay_series_linear(w0, e, snapshot_times((10.0, 1e4)))
    fit = fit_rate(series, (10.0, 1e4))
    ok = abs(fit.slope + 2.5) <= 0.1 * 2.5 and fit.rms_residual <= 0.1
    line = _verdict(4, ok, f"slope={fit.slope:.4f} (expect -2.5 within 10%), rms={fit.rms_residual:.4f}")
    assert ok, line


def test_acceptance_5_nonlinear_rates_and_comparison():
    e = compute_exponents(ProblemParams(11, 7.0))
    rep_in, rep_out = run_theorem_half_l(11, 7.0, 5.0, 0.1)
    grid = default_grid()
    cfg_times = snapshot_times((1.0, 1e3), 17)
    from shlab.harness import default_config

    viol = comparison_monitor(InitialDataSpec.power_tail(0.1, 5.0), e,
                              default_config(1e3, cfg_times), grid)
    w0_max = float(np.max(build_field(InitialDataSpec.power_tail(0.1, 5.0), e, grid).w()))
    inner_ok = abs(rep_in.fit.slope + 1 / 3) <= 0.15 / 3 and rep_in.fit.rms_residual <= 0.1
    outer_ok = abs(rep_out.fit.slope + 2.5) <= 0.15 * 2.5 and rep_out.fit.rms_residual <= 0.1
    monitor_ok = viol <= 1e-6 * w0_max
    ok = inner_ok and outer_ok and monitor_ok
    line = _verdict(5, ok, f"inner={rep_in.fit.slope:.4f} (expect -1/3), outer={rep_out.fit.slope:.4f} "
                          f"(expect -2.5), violation={viol:.2e} (tol {1e-6 * w0_max:.2e})")
    assert ok, line


def test_acceptance_6_sigma_tail_vanishing():
    rep = run_theorem_mth2(11, 7.0, 0.1)
    m = rep.measurements
    ok = m["monotone"] and m["inner_ratio"] <= 0.2 and m["outer_ratio"] <= 0.2
    line = _verdict(6, ok, f"inner_ratio={m['inner_ratio']:.3f}, outer_ratio={m['outer_ratio']:.3f}, "
                          f"monotone={m['monotone']}; the 1/ln(e+r) tail gives ~1/ln(e+sqrt(t)) decay, "
                          f"ratio ~ ln(e+sqrt(10))/ln(e+100) ~ 0.4 over this window")
    assert ok, line


def test_acceptance_7_supnorm_growth():
    rep = run_corollary_small_b(11, 7.0, 5.0)
    m = rep.measurements
    growth_ok = 0.0 <= rep.fit.slope <= 2.0 * (1 / 36)
    drift_ok = abs(m["drift_slope"] + 1 / 12) <= 0.2 / 12
    barrier_ok = m["barrier_violation"] <= m["barrier_tolerance"]
    ok = m["strictly_increasing"] and growth_ok and drift_ok and barrier_ok
    line = _verdict(7, ok, f"growth={rep.fit.slope:.5f} (expect ~1/36), drift={m['drift_slope']:.5f} "
                          f"(expect -1/12 within 20%), increasing={m['strictly_increasing']}, "
                          f"barrier={m['barrier_violation']:.2e}")
    assert ok, line


def test_acceptance_8_l2_stability():
    rep = run_l2_stability(11, 7.0, InitialDataSpec.annulus(0.1, 1.0, 2.0))
    slope_ok = abs(rep.fit.slope + 7 / 12) <= 0.15 * 7 / 12 and rep.fit.rms_residual <= 0.1
    rep_k = run_psik_stability(11, 7.0, 1.0)
    monotone = rep_k.measurements["monotone_nonincreasing"]
    ok = slope_ok and monotone
    line = _verdict(8, ok, f"l2 slope={rep.fit.slope:.4f} (expect -7/12 within 15%), "
                          f"psi_k gap monotone={monotone}")
    assert ok, line


def test_acceptance_9_kernel_and_smoothing():
    e = compute_exponents(ProblemParams(11, 7.0))
    grid = default_grid()
    res = kernel_check_sweep(0.1, [0.1, 1.0, 10.0, 100.0], 11, e.sigma, grid)
    kernel_ok = res["best_variation"] <= 3.0
    slopes_ok = bool(np.all(np.abs(res["origin_slopes"] + e.sigma) <= 0.05 * e.sigma))
    w0 = build_field(InitialDataSpec.annulus(0.1, 0.25, 0.5), e, grid)
    vals = [smoothing_ratio(w0.copy(), t, 2.0, 1.0, e) for t in (1.0, 10.0, 100.0, 1000.0)]
    smooth_var = max(vals) / min(vals)
    smooth_ok = smooth_var < 3.0
    ok = kernel_ok and slopes_ok and smooth_ok
    line = _verdict(9, ok, f"kernel variation={res['best_variation']:.3f} at c={res['best_c']}, "
                          f"origin slopes ~ {np.mean(res['origin_slopes']):.4f} (expect {-e.sigma:.4f}), "
                          f"smoothing variation={smooth_var:.3f}")
    assert ok, line


def test_acceptance_10_randomized_invariants():
    e = compute_exponents(ProblemParams(11, 7.0))
    rng = np.random.default_rng(2024)
    grid = LogGrid(math.log(1e-2), math.log(1e2), 64)
    op = assemble_hardy_operator(grid, 11, e.sigma, ("neumann", "neumann"))
    m = grid.m_points

    # positivity: 1000 nonnegative fields, one implicit Euler step
    W = rng.random((m, 1000))
    dt = 0.37
    ab = np.zeros((3, m))
    ab[0, 1:] = -dt * op.upper[:-1]
    ab[1, :] = 1.0 - dt * op.diag
    ab[2, :-1] = -dt * op.lower[1:]
    W_new = solve_banded((1, 1), ab, W)
    positivity_ok = bool(np.all(W_new >= -1e-10 * W.max(axis=0)[None, :]))

    # maximum principle for the same 1000 solves
    maxp_ok = bool(
        np.all(W_new <= W.max(axis=0)[None, :] * (1 + 1e-12))
        and np.all(W_new >= W.min(axis=0)[None, :] * (1 - 1e-12) - 1e-14)
    )

    # defect nonnegativity on 1000 random (r, w) pairs
    r = 10 ** rng.uniform(-4, 4, size=1000)
    w = rng.uniform(0, 1, size=1000) * (e.L * r ** (-e.m))
    defect_ok = bool(np.all(nonlinear_defect(w, r, e) >= 0.0))

    # q = 2 weighted norm equals the plain L2 norm, 1000 random fields
    g2 = LogGrid(math.log(1e-3), math.log(1e3), 256)
    q2_ok = True
    for _ in range(1000):
        w_vals = rng.random(g2.m_points)
        f = RadialField(g2, np.exp(e.sigma * g2.s) * w_vals, e.sigma, 0.0)
        t = 10 ** rng.uniform(-1, 3)
        a = weighted_norm(f, WeightedNormSpec(2.0, t), 11)
        b = radial_lq_norm(f, 2.0, 11)
        if abs(a - b) > 1e-12 * b:
            q2_ok = False
            break

    # fit_rate recovers exact power laws to 1e-12
    fit_ok = True
    for _ in range(1000):
        slope = rng.uniform(-4, 4)
        c = 10 ** rng.uniform(-3, 3)
        t = np.geomspace(1.0, 1e4, 16)
        fit = fit_rate(np.column_stack([t, c * t**slope]), (1.0, 1e4))
        if abs(fit.slope - slope) > 1e-12 * max(1.0, abs(slope)):
            fit_ok = False
            break

    ok = positivity_ok and maxp_ok and defect_ok and q2_ok and fit_ok
    line = _verdict(10, ok, f"positivity={positivity_ok}, max_principle={maxp_ok}, "
                           f"defect={defect_ok}, q2_identity={q2_ok}, fit_rate={fit_ok}")
    assert ok, line
