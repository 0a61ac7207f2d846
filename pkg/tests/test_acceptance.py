"""Exit criteria for the package, one test per criterion.

Each test records a PASS/FAIL line (see the "acceptance criteria" section of
the pytest summary) and then asserts it.  Runtimes exclude JIT compilation,
which the session fixture in conftest triggers up front.
"""
import math
import time

import numpy as np
import pytest

from sqkd import attack, qmath, sim, sweep
from sqkd.attack import identity_attack, random_attack
from sqkd.bound import key_rate
from sqkd.depol import DepolScenario, closed_form_statistics, dilation

STATS = ("b", "qz0", "qz1", "p0plus", "p1plus", "pe1", "peminus")


def test_1_noiseless_exactness(record):
    t0 = time.perf_counter()
    r = key_rate(closed_form_statistics(DepolScenario(0.0, 0.0))).r
    tally = sim.run(sim.SimulationConfig(identity_attack(), 100_000, seed=7))
    errors = tally.error_counts()
    raw = tally.raw
    z_errors = int(raw[1, 0, 1] + raw[2, 0, 0] + raw[0, 1, 1])
    dt = time.perf_counter() - t0
    ok = abs(r - 1.0) <= 1e-9 and errors == {"01": 0, "10": 0} and z_errors == 0 and dt < 1.0
    assert record(1, ok, f"noiseless r={r!r}, sim errors={errors}, other error counters={z_errors}, {dt:.2f}s")


def test_2_threshold_zero_bias(record):
    t0 = time.perf_counter()
    tau = sweep.threshold(0.0)
    dt = time.perf_counter() - t0
    ok = abs(tau - 0.1072) <= 1e-3 and dt < 1.0
    assert record(2, ok, f"threshold(b=0)={tau:.6f} (Q_Z={tau / 2:.4%}), target 0.1072+-0.001, {dt:.2f}s")


def test_3_threshold_negative_bias(record):
    t0 = time.perf_counter()
    tau = sweep.threshold(-0.1)
    dt = time.perf_counter() - t0
    tau0 = sweep.threshold(0.0)
    ok = abs(tau - 0.1118) <= 1e-3 and tau > tau0 and dt < 1.0
    assert record(3, ok, f"threshold(b=-0.1)={tau:.6f} > threshold(0)={tau0:.6f}, {dt:.2f}s")


def test_4_bias_cutoff(record):
    t0 = time.perf_counter()
    worst = max(row.report.r for row in sweep.sweep_keyrate([0.33], 0.0, 0.5, 0.001))
    r0 = key_rate(closed_form_statistics(DepolScenario(0.0, 0.325))).r
    dt = time.perf_counter() - t0
    ok = worst <= 0.0 and -0.01 <= r0 <= 0.001 and dt < 2.0
    assert record(4, ok, f"max r(b=0.33, q in [0,0.5])={worst:.5f}; r(q=0, b=0.325)={r0:.5f}, {dt:.2f}s")


def test_5_bound_validity_oracle(record):
    rng = np.random.default_rng(5)
    t0 = time.perf_counter()
    worst_gap = -np.inf
    worst_eta = -np.inf
    positive_eta = 0
    n = 1000
    for i in range(n):
        # alternate Haar-random and low-noise attacks so both eta regimes are exercised
        a = random_attack(4, rng) if i % 2 == 0 else random_attack(4, rng, scale=0.02 + 0.3 * rng.random())
        rep = key_rate(attack.exact_statistics(a))
        exact = attack.exact_conditional_entropy(a) - attack.joint_distribution(a).h_b_given_a()
        worst_gap = max(worst_gap, rep.r - exact)
        worst_eta = max(worst_eta, max(rep.eta, 0.0) ** 2 - abs(attack.h_overlap(a)) ** 2)
        positive_eta += rep.eta > 0
    dt = time.perf_counter() - t0
    ok = worst_gap <= 1e-9 and worst_eta <= 1e-12 and dt < 30.0
    assert record(5, ok, f"{n} attacks (d=4, {positive_eta} with eta>0): max r - (S(B|E)-H(B|A))="
                         f"{worst_gap:.3g}, max eta^2-|<h0|h1>|^2={worst_eta:.3g}, {dt:.2f}s")


def test_6_dilation_correctness(record):
    t0 = time.perf_counter()
    worst_stat = 0.0
    worst_unit = 0.0
    for q in np.linspace(0.0, 1.0, 21):
        for b in np.linspace(-0.45, 0.45, 11):
            s = DepolScenario(q, b)
            a = dilation(s)
            rep = attack.validate(a)
            worst_unit = max(worst_unit, rep.norm0_residual, rep.norm1_residual, rep.orth_residual)
            exact = attack.exact_statistics(a).to_dict()
            closed = closed_form_statistics(s).to_dict()
            worst_stat = max(worst_stat, max(abs(exact[k] - closed[k]) for k in exact))
    dt = time.perf_counter() - t0
    ok = worst_stat <= 1e-12 and worst_unit < 1e-12 and dt < 5.0
    assert record(6, ok, f"21x11 grid: max |exact - closed form|={worst_stat:.3g}, "
                         f"max unitarity residual={worst_unit:.3g}, {dt:.2f}s")


@pytest.mark.slow
def test_7_estimator_convergence(record):
    s = DepolScenario(0.1, 0.0)
    a = dilation(s)
    closed = closed_form_statistics(s)
    r_exact = key_rate(closed).r
    hits = {k: 0 for k in STATS}
    worst_r = 0.0
    t0 = time.perf_counter()
    runs = 100
    for seed in range(runs):
        est = sim.estimate(sim.run(sim.SimulationConfig(a, 1_000_000, seed=seed)))
        for k in STATS:
            hits[k] += abs(getattr(est.stats, k) - getattr(closed, k)) <= 3 * est.stderr[k]
        worst_r = max(worst_r, abs(key_rate(est.stats).r - r_exact))
    dt = time.perf_counter() - t0
    ok = min(hits.values()) >= 99 and worst_r <= 0.02 and dt < 300
    assert record(7, ok, f"{runs} runs x 1e6: within-3SE counts {hits}; max |r_hat - {r_exact:.4f}|="
                         f"{worst_r:.4f}, {dt:.1f}s")


def test_8_eigensolver(record):
    rng = np.random.default_rng(8)
    worst = 0.0
    for _ in range(10_000):
        x, y, z = rng.normal(size=3) + 1j * rng.normal(size=3)
        ax, ay, az = abs(x) ** 2, abs(y) ** 2, abs(z) ** 2
        sigma = np.array([[ax + ay, y * np.conj(z)], [np.conj(y) * z, az]]) / (ax + ay + az)
        q00, q11 = ax / 4, (ay + az) / 4
        rad = math.sqrt(4 * (q00 - q11) ** 2 + ax * ay) / (4 * (q00 + q11))
        w = qmath.eigenvalues_hermitian(sigma)
        worst = max(worst, abs(w[0] - (0.5 + rad)), abs(w[1] - (0.5 - rad)))
    inv = 0.0
    for n in (2, 3, 4, 8, 16):
        for _ in range(20):
            g = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
            rho = g @ g.conj().T
            u, r = np.linalg.qr(rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n)))
            inv = max(inv, abs(qmath.von_neumann_entropy(rho) - qmath.von_neumann_entropy(u @ rho @ u.conj().T)))
    ok = worst <= 1e-12 and inv <= 1e-9
    assert record(8, ok, f"10^4 sigma_C: max |eig - lambda_pm|={worst:.3g}; "
                         f"unitary invariance max diff={inv:.3g}")


def test_9_dual_formula_algebra(record):
    rng = np.random.default_rng(9)
    worst = 0.0
    for _ in range(10_000):
        a = random_attack(4, rng)
        worst = max(worst, float(np.max(np.abs(attack.derive_states(a).g1 - attack.g1_from_e(a)))))
    exact_b0 = all(
        np.array_equal(st.g1, st.f1)
        for st in (attack.derive_states(random_attack(4, rng, b=0.0)) for _ in range(100))
    )
    ok = worst <= 1e-12 and exact_b0
    assert record(9, ok, f"10^4 attacks: max |g1(g-state) - g1(e-form)|={worst:.3g}; b=0 g1==f1 exactly: {exact_b0}")
