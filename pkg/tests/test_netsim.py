"""Distributed protocol simulator vs the centralized projection."""

import math

import numpy as np
import pytest

from eastplus.backends import kernels
from eastplus.core import EnergyProfile, ModelConstants, SamplingPlan, Signal, vectorize
from eastplus.netsim import (
    BASE,
    KIND_REQUEST,
    KIND_SCALAR,
    KIND_VALUE,
    assign_rows,
    end_to_end,
    run,
)
from eastplus.projection import project, sample_probability
from eastplus.signals import synth_signal
from eastplus.transform import TransformBasis, inverse


def _random_case(seed, n=4, m=3, ell=7):
    rng = np.random.default_rng(seed)
    signal = Signal(rng.normal(size=(m, n)))
    g = np.clip(rng.uniform(0.15, 0.9, size=n), None, 1.0)
    plan = SamplingPlan(ell=ell, g=g, seed=seed)
    profile = EnergyProfile(rng.uniform(0.5, 1.0, size=n))
    return signal, plan, profile


def test_assign_rows_round_robin():
    assert assign_rows(8, 16).tolist() == (list(range(8)) * 2)
    assert assign_rows(8, 3).tolist() == [0, 1, 2]
    assert assign_rows(3, 5).tolist() == [0, 1, 2, 0, 1]
    with pytest.raises(ValueError):
        assign_rows(0, 4)
    with pytest.raises(ValueError):
        assign_rows(4, 0)


def test_base_vector_equals_centralized_projection():
    # The simulator's correctness oracle: bit-identical to project().
    for seed in range(20):
        signal, plan, profile = _random_case(seed)
        x, _, _ = run(signal, plan, profile, c4=1.0)
        ref = project(vectorize(signal), plan, m=signal.m)
        assert np.array_equal(x, ref)


def test_ledger_counts_distinct_node_instant_pairs():
    signal, plan, profile = _random_case(101, n=3, m=4, ell=9)
    _, ledger, trace = run(signal, plan, profile, c4=0.2)
    g_cols = plan.g_columns(signal.m)
    sampled = set()
    nnz_total = 0
    for r in range(plan.ell):
        cols, _ = kernels.row_entries(plan.seed, r, g_cols)
        nnz_total += cols.size
        for q in cols.tolist():
            sampled.add((q // signal.m, q % signal.m))
    counts = [sum(1 for j, h in sampled if j == node) for node in range(3)]
    assert ledger.sample_count.tolist() == counts
    # Energy charged once per distinct pair, c4 each.
    assert np.allclose(ledger.consumed, np.array(counts) * 0.2)
    assert trace.n_sample_requests == nnz_total
    assert trace.n_sample_values == len(sampled)
    assert trace.n_row_scalars == plan.ell
    assert ledger.messages_to_base == plan.ell


def test_repeated_requests_charge_once():
    # g=1 on one node at M=1: every row hits it, it samples once.
    signal = Signal(np.array([[2.0, -1.0]]))
    plan = SamplingPlan(ell=6, g=np.array([1.0, 1.0]), seed=0)
    profile = EnergyProfile([1.0, 1.0])
    _, ledger, trace = run(signal, plan, profile, c4=0.5)
    assert ledger.sample_count.tolist() == [1, 1]
    assert trace.n_sample_requests == 12  # every row asks both nodes
    assert trace.n_sample_values == 2  # but each samples exactly once


def test_trace_order_and_addressing():
    signal, plan, profile = _random_case(7, n=3, m=2, ell=5)
    _, _, trace = run(signal, plan, profile, c4=1.0)
    owners = assign_rows(signal.n, plan.ell)
    row = 0
    for msg in trace.messages:
        if msg.kind == KIND_SCALAR:
            assert msg.receiver == BASE
            assert msg.sender == owners[row]
            row += 1
        elif msg.kind == KIND_REQUEST:
            assert msg.sender == owners[row]  # current row still open
            assert 0 <= msg.receiver < signal.n
        else:
            assert msg.kind == KIND_VALUE
            assert msg.receiver == owners[row]
    assert row == plan.ell


def test_sampling_frequency_matches_closed_form():
    # Node j samples in some row with prob 1 - (1-g_j)^ell; check each
    # node's empirical frequency over many matrix seeds.
    n, ell = 4, 6
    g = np.array([0.1, 0.3, 0.6, 0.9])
    profile = EnergyProfile(np.full(n, 1.0))
    signal = Signal(np.ones((1, n)))
    hits = np.zeros(n)
    n_seeds = 10_000
    for seed in range(n_seeds):
        plan = SamplingPlan(ell=ell, g=g, seed=seed)
        _, ledger, _ = run(signal, plan, profile, c4=1.0)
        hits += ledger.sample_count > 0
    for j in range(n):
        p = sample_probability(float(g[j]), ell)
        se = math.sqrt(p * (1 - p) / n_seeds)
        assert abs(hits[j] / n_seeds - p) < 3.0 * se


def test_ell_zero_edge():
    signal, _, profile = _random_case(9)
    plan = SamplingPlan(ell=0, g=np.full(4, 0.5), seed=1)
    x, ledger, trace = run(signal, plan, profile, c4=1.0)
    assert x.size == 0
    assert np.all(ledger.sample_count == 0)
    assert np.all(ledger.consumed == 0.0)
    assert len(trace.messages) == 0


def test_node_count_mismatch_rejected():
    signal, plan, _ = _random_case(10)
    with pytest.raises(ValueError, match="node count"):
        run(signal, plan, EnergyProfile([1.0, 1.0]), c4=1.0)


def test_end_to_end_deterministic():
    signal = synth_signal(64, 0.8, 1.0, "dct", seed=40, n=4)
    profile = EnergyProfile(np.full(4, 0.9 * 16))
    constants = ModelConstants(k=8, gamma=0.5, eta=0.3, c=0.9, mu=1.0)
    e1 = end_to_end(signal, profile, constants, k=8, seed=2)
    e2 = end_to_end(signal, profile, constants, k=8, seed=2)
    assert e1 == e2


def test_end_to_end_recovers_sparse_signal_with_generous_energy():
    # Energy above c4 on every node at every instant removes the cap;
    # the planner's row budget then drives the error floorward.
    nhat, n = 256, 8
    basis = TransformBasis(kind="dct", dimension=nhat)
    theta = np.zeros(nhat)
    theta[[1, 5, 17, 40, 80, 130, 200, 250]] = [5.0, -4.0, 3.0, -2.5, 2.0, -1.5, 1.2, 1.0]
    u = inverse(basis, theta)
    signal = Signal(u.reshape((nhat // n, n), order="F"))
    profile = EnergyProfile(np.full(n, 1.5 * signal.m))  # 1.5 c4 per instant
    constants = ModelConstants(k=8, gamma=0.5, eta=1.0, c=0.9, mu=1.0)
    err = end_to_end(signal, profile, constants, k=8, seed=6)
    assert err < 1e-2
