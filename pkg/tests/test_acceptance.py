"""Acceptance gate: the eight primary checks, one test (and one
pass/fail line under pytest -v) each. Tolerances are stated inline and
match the module contracts; nothing here is tuned per run.
"""

import math
import time
from dataclasses import replace

import numpy as np
import pytest

from eastplus.analysis import conjecture_experiment, fd_cap_derivative
from eastplus.backends import kernels
from eastplus.core import (
    EnergyProfile,
    ModelConstants,
    SamplingPlan,
    Signal,
    relative_error,
    vectorize,
)
from eastplus.decoder import partition, reconstruct
from eastplus.experiments import evaluate_methods
from eastplus.netsim import run
from eastplus.planner import (
    east_equality_plan,
    east_plus_plan,
    feasibility_check,
    kappa_min,
    theoretical_ell,
)
from eastplus.projection import (
    inner_product_moments,
    project,
    sampling_probabilities,
)
from eastplus.signals import synth_signal
from eastplus.transform import (
    TransformBasis,
    basis_matrix,
    best_k_approx,
    forward,
    peak_to_total_check,
)

CONSTANTS = ModelConstants(k=8, gamma=0.5, eta=0.3, c=0.9, mu=1.0)


def test_criterion_1_projection_moments():
    # 1e5 random matrices at N=16, non-uniform g from a left-skewed beta
    # profile, kappa=0.8: empirical mean of x^T y within 4 standard
    # errors of u^T v and variance within 5% relative of the closed
    # form, for 3 fixed (u, v) pairs, under 60 s.
    start = time.perf_counter()
    n = 16
    rng = np.random.default_rng(2025)
    profile = EnergyProfile(rng.beta(20.0, 2.0, size=n))  # mass near 1
    g = sampling_probabilities(profile, kappa=0.8)
    assert g.std() > 0  # non-uniform by construction
    ell = 8
    n_matrices = 100_000
    seeds = np.arange(n_matrices, dtype=np.uint64)
    for pair in range(3):
        u = rng.normal(size=n)
        v = rng.normal(size=n)
        mean, var = inner_product_moments(u, v, g, ell)
        dots = kernels.inner_products(seeds, ell, g, u, v)
        se = math.sqrt(var / n_matrices)
        mean_gap = abs(float(dots.mean()) - mean)
        var_gap = abs(float(dots.var(ddof=1)) - var)
        assert mean_gap <= 4.0 * se, f"pair {pair}: mean off by {mean_gap / se:.2f} SE"
        assert var_gap <= 0.05 * var, f"pair {pair}: variance off {var_gap / var:.2%}"
    elapsed = time.perf_counter() - start
    assert elapsed < 60.0, f"took {elapsed:.1f}s"
    print(f"[PRIMARY 1] moment agreement over 1e5 matrices in {elapsed:.1f}s: PASS")


def test_criterion_2_recovery_bound():
    # nhat=256, k=8, gamma=0.5, s=0.8 signal; ell from the row-count
    # formula; the fraction of 200 seeded runs violating
    # err <= (1+eps)*eta must stay below 256^-0.5 + 0.10.
    nhat, n, s = 256, 8, 0.8
    epsilon = 2.0
    kappa = 0.8
    profile = EnergyProfile(np.full(n, 0.5))
    signal = synth_signal(nhat, s, 1.0, "dct", seed=77, n=n)
    u = vectorize(signal)
    mu = peak_to_total_check(u, s).ratio  # measured, the honest bound
    constants = ModelConstants(k=8, gamma=0.5, eta=0.3, c=0.9, mu=mu)
    ell = math.ceil(theoretical_ell(constants, profile, kappa, nhat, epsilon))
    g = sampling_probabilities(profile, kappa)
    basis = TransformBasis(kind="dct", dimension=nhat)
    part = partition(ell, constants.gamma, constants.c, nhat)
    assert not part.below_theory
    threshold = (1.0 + epsilon) * constants.eta
    margin = 256.0**-0.5 + 0.10
    violations = 0
    n_runs = 200
    for seed in range(n_runs):
        plan = SamplingPlan(ell=ell, g=g, seed=seed, kappa=kappa)
        x = project(u, plan, m=nhat // n)
        u_hat = reconstruct(x, plan, basis, constants.k, part)
        if relative_error(u, u_hat) > threshold:
            violations += 1
    frac = violations / n_runs
    assert frac <= margin, f"{violations}/{n_runs} violations, margin {margin:.4f}"
    print(
        f"[PRIMARY 2] ell={ell}, violation fraction {frac:.3f} "
        f"<= {margin:.4f}: PASS"
    )


def test_criterion_3_planner_matches_grid():
    # 20 beta profiles at N=8: the 1-D solve within 1% of the value of an
    # exhaustive grid (kappa step 1e-4, integer ell), minimum-energy
    # slack <= 1e-6 * E1, all inside 30 s.
    start = time.perf_counter()
    nhat = 64
    for trial in range(20):
        rng = np.random.default_rng(500 + trial)
        profile = EnergyProfile(0.2 + 0.7 * rng.beta(2.0, 2.0, size=8))
        res = east_plus_plan(profile, CONSTANTS, nhat)
        kmin = kappa_min(profile, nhat)
        kappas = np.arange(kmin, 1.0 + 1e-4, 1e-4)
        kappas[-1] = min(float(kappas[-1]), 1.0)
        log_r = np.log1p(-profile.energy / CONSTANTS.c4)
        caps = (log_r[None, :] / np.log1p(-np.outer(kappas, profile.energy) / profile.total)).min(axis=1)
        ells = np.floor(caps + 1e-9)
        ok = ells >= 1.0
        objs = (
            CONSTANTS.c1
            * math.log(nhat)
            / ells[ok]
            * (2.0 + CONSTANTS.c2 * profile.total / (profile.e_min * kappas[ok]))
        )
        grid_best = float(objs.min())
        assert res.objective <= grid_best + 1e-12  # planner never loses to the grid
        assert grid_best <= 1.01 * res.objective, f"profile {trial}: grid beats by >1%"
        e1 = profile.e_min
        assert res.slack[int(np.argmin(profile.energy))] <= 1e-6 * e1
    elapsed = time.perf_counter() - start
    assert elapsed < 30.0, f"took {elapsed:.1f}s"
    print(f"[PRIMARY 3] 20 profiles vs dense grid in {elapsed:.1f}s: PASS")


def test_criterion_4_cap_derivative_always_positive():
    # 1e3 trials per skew direction: zero non-positive left - right
    # margins, and the analytic sign matches a central finite difference
    # on at least 99.9% of valid points.
    agree = 0
    valid = 0
    for alpha, beta in [(2.0, 20.0), (20.0, 2.0)]:
        report = conjecture_experiment(trials=1000, alpha=alpha, beta=beta, seed=404)
        assert report.all_positive, f"alpha={alpha}: nonpositive margin found"
        for sweep in report.sweeps:
            assert sweep.n_nonpositive == 0
            assert sweep.min_margin > 0
            for sample in sweep.samples:
                fd = fd_cap_derivative(
                    sample.e_over_c4, sample.kappa, sample.e_over_c4 / sample.ratio, 1.0
                )
                if abs(fd) < 1e-12:
                    continue
                valid += 1
                if (fd > 0) == (sample.sign > 0):
                    agree += 1
    assert valid >= 5900
    rate = agree / valid
    assert rate >= 0.999, f"sign agreement only {rate:.4%}"
    print(f"[PRIMARY 4] 6000 margins positive, fd sign agreement {rate:.4%}: PASS")


def test_criterion_5_distributed_equivalence_and_neutrality():
    # 100 random protocol runs deliver the centralized projection bit
    # for bit; with an EAST+ plan the mean consumed energy over 100
    # matrix seeds stays within E_j + 3 stderr for every node.
    rng = np.random.default_rng(60)
    for _ in range(100):
        n = int(rng.integers(2, 7))
        m = int(rng.integers(1, 5))
        ell = int(rng.integers(1, 13))
        signal = Signal(rng.normal(size=(m, n)))
        g = np.clip(rng.uniform(0.05, 1.0, size=n), None, 1.0)
        plan = SamplingPlan(ell=ell, g=g, seed=int(rng.integers(0, 2**63)))
        profile = EnergyProfile(rng.uniform(0.5, 1.5, size=n))
        x, _, _ = run(signal, plan, profile, c4=1.0)
        assert np.array_equal(x, project(vectorize(signal), plan, m=m))

    nhat, n = 256, 8
    rng = np.random.default_rng(61)
    instant = EnergyProfile(0.4 + 0.2 * np.sort(rng.beta(2.0, 2.0, size=n)))
    m = nhat // n
    horizon = instant.scaled(m)
    signal = synth_signal(nhat, 0.8, 1.0, "dct", seed=62, n=n)
    base = east_plus_plan(instant, CONSTANTS, nhat)
    consumed = np.empty((100, n))
    for i in range(100):
        plan = replace(base.plan, seed=1000 + i)
        _, ledger, _ = run(signal, plan, horizon, CONSTANTS.c4)
        consumed[i] = ledger.consumed
    mean = consumed.mean(axis=0)
    stderr = consumed.std(axis=0, ddof=1) / math.sqrt(100)
    slack_sigma = (horizon.energy + 3.0 * stderr) - mean
    assert np.all(slack_sigma >= 0), f"overrun at nodes {np.where(slack_sigma < 0)[0]}"
    print(
        "[PRIMARY 5] 100 bit-identical runs; mean consumption within "
        f"E_j + 3 stderr (min headroom {slack_sigma.min():.4f}): PASS"
    )


# Frozen synthetic-comparison configuration shared by criteria 6 and 7:
# an 8-node skewed harvest-rich profile and a sweep over signal sizes.
_SWEEP = (64, 128, 256, 512, 1024, 2048)


def _frozen_rows():
    rng = np.random.default_rng(42)
    profile = EnergyProfile(0.95 + 0.035 * np.sort(rng.beta(2.0, 5.0, size=8)))
    rows, _ = evaluate_methods(
        profile, CONSTANTS, _SWEEP, n_seeds=20, master_seed=101
    )
    med = {(r.nhat, r.method): r.median_error for r in rows}
    return profile, med


@pytest.fixture(scope="module")
def frozen_eval():
    return _frozen_rows()


def test_criterion_6_beats_baselines_and_scales(frozen_eval):
    # At nhat=64 the planned (ell, kappa) must beat the best of three
    # feasible fixed baselines on 20-seed medians, and the EAST+ medians
    # must fall monotonically over the whole sweep.
    _, med = frozen_eval
    plus64 = med[(64, "EAST+")]
    rivals = {name: med[(64, name)] for name in ("EAST-1", "EAST-2", "EAST-3")}
    best_rival = min(rivals.values())
    assert plus64 <= best_rival, f"EAST+ {plus64:.4f} vs best baseline {best_rival:.4f}"
    meds = [med[(nhat, "EAST+")] for nhat in _SWEEP]
    assert all(a >= b for a, b in zip(meds, meds[1:])), f"not monotone: {meds}"
    print(
        f"[PRIMARY 6] EAST+ {plus64:.4f} <= best baseline {best_rival:.4f}; "
        f"medians {['%.3f' % v for v in meds]} non-increasing: PASS"
    )


def test_criterion_7_equality_variant(frozen_eval):
    # The per-node balance solve leaves zero slack (within 1e-12) and
    # tracks EAST+ reconstruction error within 10% at nhat=2048.
    profile, med = frozen_eval
    for nhat in _SWEEP:
        optimum = east_plus_plan(profile, CONSTANTS, nhat)
        eq = east_equality_plan(profile, optimum.plan.ell, CONSTANTS.c4)
        slack = feasibility_check(eq, profile, CONSTANTS.c4)
        assert np.all(np.abs(slack) <= 1e-12), f"nhat={nhat}: slack {slack}"
    plus = med[(2048, "EAST+")]
    equality = med[(2048, "EAST-Equality")]
    gap = abs(equality - plus) / plus
    assert gap <= 0.10, f"equality {equality:.4f} vs EAST+ {plus:.4f}: {gap:.1%} apart"
    print(f"[PRIMARY 7] zero slack; error gap at 2048 is {gap:.2%} <= 10%: PASS")


def test_criterion_8_transform_suite():
    # Parseval, orthonormality, brute-force best-k (nhat <= 16), the
    # Haar constant signal, and the peak-to-total band on constant and
    # compressible signals.
    rng = np.random.default_rng(80)
    for kind, n in [("haar", 16), ("dct", 12)]:
        basis = TransformBasis(kind=kind, dimension=n)
        psi = basis_matrix(basis)
        assert np.allclose(psi.T @ psi, np.eye(n), atol=1e-12)
        u = rng.normal(size=n)
        theta = forward(basis, u)
        assert abs(float(theta @ theta) - float(u @ u)) <= 1e-12 * float(u @ u)

    import itertools

    theta = rng.normal(size=12)
    for k in (1, 4, 9):
        kept = best_k_approx(theta, k)
        err = float(np.sum((theta - kept) ** 2))
        best = min(
            float(np.sum(np.delete(theta, list(combo)) ** 2))
            for combo in itertools.combinations(range(12), k)
        )
        assert err <= best + 1e-12

    haar = TransformBasis(kind="haar", dimension=16)
    flat = forward(haar, np.full(16, 2.5))
    assert flat[0] == pytest.approx(4.0 * 2.5, abs=1e-12)
    assert np.all(flat[1:] == 0.0)

    # Constant signal sits exactly on the flat-signal bound.
    const = peak_to_total_check(np.full(64, 3.0), s=0.5)
    assert const.passed and const.ratio == pytest.approx(1.0 / 8.0)
    # Compressible draws land between the flat bound and the log bound.
    for seed in range(5):
        u = vectorize(synth_signal(256, 0.8, 1.0, "dct", seed=seed, n=8))
        check = peak_to_total_check(u, s=1)
        assert check.passed  # ratio <= ln(nhat)/sqrt(nhat)
        assert check.ratio >= 1.0 / 16.0  # and above the flat-signal floor
    print("[PRIMARY 8] transform suite exact; peak-to-total band holds: PASS")
