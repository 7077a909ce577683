"""Acceptance suite: one test per shipped guarantee, full problem sizes.

Each test prints a single PASS/FAIL line (visible with ``pytest -s``).
Wall-clock figures are printed for information; the assertions cover the
numerical requirements, which do not depend on the machine.  Run order
matters only for the shared numba compilation cache, which pytest warms on
the first kernel use.
"""

import math
import time

import numpy as np

from eulerkit import problems, scheme, timeloop, validate
from eulerkit import wavespeed as ws
from eulerkit.eos import StiffenedGas, StiffenedParams, make_model
from eulerkit.scheme import bar_state, cfl_dt, forward_euler_update
from helpers import random_field, sample_admissible, sample_side_data

SEED = 20250810


def _report(num, ok, detail):
    print(f"\n[criterion {num:>2}] {'PASS' if ok else 'FAIL'} - {detail}")
    assert ok, f"criterion {num}: {detail}"


def _run_problem(name, cells, t_final=None, trace_every=0):
    spec = problems.get_problem(name)
    mesh = spec.make_mesh(cells)
    field = spec.initial_field(mesh)
    t_end = spec.t_final if t_final is None else t_final
    out, rep = timeloop.run_to_time(spec.model, field, mesh, spec.make_bc(), t_end,
                                    cfl=0.9, trace_every=trace_every)
    return spec, mesh, out, rep


def test_criterion_01_smooth_wave_convergence():
    t0 = time.perf_counter()
    summary = []
    ok = True
    for name in ("smooth_wave_macaw", "smooth_wave_davis"):
        spec = problems.get_problem(name)
        errors = []
        for level in range(7):
            cells = 100 * 2**level
            mesh = spec.make_mesh((cells,))
            out, _ = timeloop.run_to_time(spec.model, spec.initial_field(mesh), mesh,
                                          spec.make_bc(), spec.t_final, cfl=0.9, trace_every=0)
            errors.append(problems.delta1(out, spec.exact_field(mesh, out.t)))
        decreasing = all(b < a for a, b in zip(errors, errors[1:]))
        final_rate = math.log2(errors[-2] / errors[-1])
        ok = ok and decreasing and 0.9 <= final_rate <= 1.1
        summary.append(f"{name}: delta1 {errors[0]:.3g}->{errors[-1]:.3g}, final rate {final_rate:.3f}")
    elapsed = time.perf_counter() - t0
    _report(1, ok, "; ".join(summary) + f"; runtime {elapsed:.0f}s (target 120s)")


def test_criterion_02_wave_speed_bound():
    t0 = time.perf_counter()
    rng = np.random.default_rng(SEED)
    worst = 0.0
    for kind in ("macaw", "davis"):
        model = make_model(kind)
        left = sample_side_data(model, rng, 10_000)
        right = sample_side_data(model, rng, 10_000)
        p_hat = ws.p_star_upper(left, right)
        p_star = ws.p_star_bisect(left, right)
        lam_l_hat, lam_r_hat = ws.wave_speeds(left, right, p_hat)
        lam_l_ref, lam_r_ref = ws.wave_speeds(left, right, p_star)
        slack_l = np.min((lam_l_ref - lam_l_hat) / (1.0 + np.abs(lam_l_ref)))
        slack_r = np.min((lam_r_hat - lam_r_ref) / (1.0 + np.abs(lam_r_ref)))
        worst = min(worst, float(slack_l), float(slack_r))
    elapsed = time.perf_counter() - t0
    _report(2, worst >= -1e-9,
            f"one-sided speed slack >= {worst:.2e} over 2x10^4 pairs; runtime {elapsed:.1f}s (target 10s)")


def test_criterion_03a_bar_state_entropy_floor():
    # KNOWN RED: the certified speed does not imply the entropy floor when a
    # shock compresses states whose fundamental derivative exceeds
    # (3/4)(gamma+1) ~ 3/2, which this EOS reaches near its cold curve; the
    # surrogate's Hugoniot energy then falls below the oracle isentrope at
    # third order (sharp, any eps).  See notes/decisions.md for the analysis
    # and test_scheme.py for the pinned counterexample.  The assertion is the
    # stated property; it fails for random admissible pairs.
    t0 = time.perf_counter()
    rng = np.random.default_rng(SEED + 1)
    model = make_model("macaw")
    tau_l, e_l = sample_admissible(model, rng, 10_000)
    tau_r, e_r = sample_admissible(model, rng, 10_000)
    c_l = np.sqrt(tau_l * np.asarray(model.bulk_modulus(tau_l, e_l)))
    c_r = np.sqrt(tau_r * np.asarray(model.bulk_modulus(tau_r, e_r)))
    v_l = rng.uniform(-3, 3, 10_000) * c_l
    v_r = rng.uniform(-3, 3, 10_000) * c_r
    worst = 0.0
    n_viol = 0
    for k in range(10_000):
        u_l = scheme.ConservedState(1 / tau_l[k], np.array([v_l[k] / tau_l[k]]),
                                    (e_l[k] + 0.5 * v_l[k] ** 2) / tau_l[k])
        u_r = scheme.ConservedState(1 / tau_r[k], np.array([v_r[k] / tau_r[k]]),
                                    (e_r[k] + 0.5 * v_r[k] ** 2) / tau_r[k])
        lam = ws.lambda_max(model, u_l, u_r, [1.0])
        bar = bar_state(model, u_l, u_r, [1.0], lam)
        sig_bar = float(np.asarray(model.sigma_extended(1 / bar.rho, bar.specific_internal_energy())))
        floor = min(float(np.asarray(model.sigma_extended(tau_l[k], e_l[k]))),
                    float(np.asarray(model.sigma_extended(tau_r[k], e_r[k]))))
        slack = (sig_bar - floor) / max(1.0, abs(floor))
        if slack < -1e-9:
            n_viol += 1
        worst = min(worst, slack)
    elapsed = time.perf_counter() - t0
    _report(3, worst >= -1e-9,
            f"bar-state slack {worst:.2e}, {n_viol}/10^4 pairs below floor "
            f"(expected red: estimate valid only for G <= (3/4)(gamma+1) across shocks, "
            f"this EOS reaches G~2.95 near the cold curve; see decisions ledger); "
            f"runtime {elapsed:.1f}s (target 30s)")


def test_criterion_03b_min_principle_after_scheme_steps():
    t0 = time.perf_counter()
    rng = np.random.default_rng(SEED + 1)
    model = make_model("macaw")
    mesh = scheme.make_mesh_1d(0.0, 1.0, 64)
    bc = timeloop.DoNothingBC()
    n_pass = 0
    for _ in range(100):
        f = random_field(model, rng, 64, mach=1.5)
        dt = cfl_dt(model, f, mesh, 0.9, bc)
        out = forward_euler_update(model, f, mesh, dt, bc)
        rep = validate.check_local_min_principle(model, f, out, mesh)
        n_pass += rep.ok
    elapsed = time.perf_counter() - t0
    _report(3, n_pass == 100,
            f"{n_pass}/100 forward-Euler field steps satisfy the local minimum principle; "
            f"runtime {elapsed:.1f}s (target 30s)")


def test_criterion_04_shock_branch_dominates():
    t0 = time.perf_counter()
    rng = np.random.default_rng(SEED + 2)
    sides = sample_side_data(make_model("macaw"), rng, 100_000)
    p = sides.p + rng.uniform(1e-9, 10.0, 100_000) * np.maximum(1.0, np.abs(sides.p))
    dp = p - sides.p
    arg = dp + sides.bulk_k
    shock = dp / np.sqrt(sides.rho * arg)
    expansion = sides.c * np.log(arg / sides.bulk_k)
    margin = float(np.min(shock - expansion))
    elapsed = time.perf_counter() - t0
    _report(4, margin >= 0.0,
            f"shock - expansion >= {margin:.3e} on 10^5 samples; runtime {elapsed:.1f}s (target 5s)")


def test_criterion_05_fundamental_derivative_bounds():
    rng = np.random.default_rng(SEED + 3)
    model = make_model("macaw")
    tau, e = sample_admissible(model, rng, 10_000, tau_span=(0.2, 5.0), e_excess=(0.0, 20.0))
    g_min = float(np.min(np.asarray(model.fundamental_derivative(tau, e))))
    macaw_ok = g_min >= 1.25 - 1e-9
    stiff_ok = True
    for gamma in (1.2, 1.4, 1.9):
        s = StiffenedGas(StiffenedParams(gamma=gamma))
        stiff_ok = stiff_ok and s.fundamental_derivative(0.7, 4.0) == 0.5 * (gamma + 1.0)
    _report(5, macaw_ok and stiff_ok,
            f"MACAW sampled min G = {g_min:.6f} >= 1.25; stiffened G == (gamma+1)/2 exactly")


def test_criterion_06_pull_apart_1d():
    t0 = time.perf_counter()
    ok = True
    details = []
    for cells in (1000, 10_000):
        _, _, out, rep = _run_problem("pull_apart_1d", (cells,))
        floor = -7.3 * 3.9
        good = rep.min_pressure >= floor - 1e-9 and rep.min_rho > 0.0 and out.t == 5e-2
        ok = ok and good
        details.append(f"{cells}: min p {rep.min_pressure:.3f} >= {floor:.2f}, min rho {rep.min_rho:.3g}")
    elapsed = time.perf_counter() - t0
    _report(6, ok, "; ".join(details) + f"; runtime {elapsed:.0f}s (target 60s)")


def test_criterion_07_leblanc_like():
    t0 = time.perf_counter()
    spec, mesh, out, rep = _run_problem("leblanc_like", (100_000,))
    adm = validate.check_admissible(spec.model, out)
    elapsed = time.perf_counter() - t0
    ok = out.t == 1e-4 and rep.min_rho > 0.0 and adm.ok
    _report(7, ok,
            f"completed {rep.steps} steps, min rho {rep.min_rho:.2e}, final field admissible; "
            f"runtime {elapsed:.0f}s (target 300s; scales with cores, 2 available here)")


def test_criterion_08_entropy_test_isentrope_floor():
    t0 = time.perf_counter()
    spec, mesh, out, rep = _run_problem("entropy_test", (12_800,))
    model = spec.model
    tau = 1.0 / out.rho
    e = out.specific_internal_energy()
    curve = np.asarray(model.isentrope_energy(tau, model.s0))
    scale = np.maximum(1.0, np.abs(curve))
    worst = float(np.min((np.asarray(e) - curve) / scale))
    elapsed = time.perf_counter() - t0
    _report(8, worst >= -1e-6,
            f"final states sit {worst:.2e} above the initial isentrope (tolerance -1e-6); "
            f"runtime {elapsed:.0f}s")


def test_criterion_09_blast_wave_refinement():
    t0 = time.perf_counter()
    spec = problems.get_problem("blast_wave")
    dens = {}
    for cells in (800, 1600, 3200):
        _, _, out, _ = _run_problem("blast_wave", (cells,))
        dens[cells] = out.rho

    def to_base(rho):
        return rho.reshape(800, -1).mean(axis=1)

    d1 = float(np.max(np.abs(to_base(dens[800]) - to_base(dens[1600]))))
    d2 = float(np.max(np.abs(to_base(dens[1600]) - to_base(dens[3200]))))
    elapsed = time.perf_counter() - t0
    _report(9, d2 < d1,
            f"sup diffs on the base grid {d1:.4f} -> {d2:.4f} (decreasing); runtime {elapsed:.0f}s")


def test_criterion_10_pull_apart_2d():
    t0 = time.perf_counter()
    ok = True
    details = []
    for variant in ("verbatim", "corrected"):
        spec, mesh, out, rep = _run_problem(f"pull_apart_2d_{variant}", (256, 256), trace_every=1)
        sig = [rep.min_sigma_initial] + [s for _, s in rep.sigma_min_trace]
        scale = max(1.0, abs(rep.min_sigma_initial))
        drop = float(np.min(np.diff(sig))) if len(sig) > 1 else 0.0
        good = rep.min_rho > 0.0 and out.t == spec.t_final and drop >= -1e-9 * scale
        ok = ok and good
        details.append(f"{variant}: {rep.steps} steps, min rho {rep.min_rho:.3g}, "
                       f"sigma-min drop {drop:.1e}")
    elapsed = time.perf_counter() - t0
    _report(10, ok, "; ".join(details) + f"; runtime {elapsed:.0f}s (target 600s)")


def test_criterion_11_conservation():
    spec = problems.get_problem("smooth_wave_macaw")
    mesh = spec.make_mesh((128,))
    field = spec.initial_field(mesh)
    bc = timeloop.PeriodicBC()
    tot0 = field.totals(mesh)
    ws_ = scheme.StageWorkspace(spec.model, mesh)
    for _ in range(1000):
        dt = cfl_dt(spec.model, field, mesh, 0.9, bc)
        field = timeloop.ssp_rk3_step(spec.model, field, mesh, dt, bc, workspace=ws_)
    tot1 = field.totals(mesh)
    drifts = (
        abs(tot1[0] - tot0[0]) / abs(tot0[0]),
        abs(tot1[1][0] - tot0[1][0]) / abs(tot0[1][0]),
        abs(tot1[2] - tot0[2]) / abs(tot0[2]),
    )
    _report(11, max(drifts) < 1e-12,
            f"mass/momentum/energy drift {drifts[0]:.2e}/{drifts[1]:.2e}/{drifts[2]:.2e} "
            f"over 10^3 periodic steps")
