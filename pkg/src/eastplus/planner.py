"""Energy-aware choice of the projection count ell and sampling parameter kappa.

The predicted squared error
    F(ell, kappa) = (c1 ln(nhat) / ell) * (2 + c2 * sum(E) / (E_min * kappa))
is strictly decreasing in ell, and energy neutrality caps ell at
    cap_j(kappa) = ln(1 - E_j/c4) / ln(1 - E_j*kappa/sum(E))
per node, so ell*(kappa) = floor(min_j cap_j(kappa)). Within any kappa
interval where that floor is constant, F is strictly decreasing in
kappa, so the optimum sits at a right edge of a constancy interval:
a kappa where some cap_j equals an integer exactly. Those edges solve
    kappa_j(L) = (1 - (1 - E_j/c4)^(1/L)) * sum(E) / E_j,
and enumerating L over its feasible range visits every edge. This is
exhaustive, so the returned plan is the exact minimizer of the reduced
problem rather than a local-search approximation.

kappa is bounded below by sum(E)/(nhat * E_min), which keeps every
column's inclusion probability at least 1/nhat and hence the expected
nonzeros per row at least one. Nodes with E_j >= c4 can sample in every
row without exhausting their budget and contribute no cap.
"""

import math
from dataclasses import dataclass

import numpy as np

from .core import SamplingPlan
from .projection import sampling_probabilities

# Relative slack tolerance: a plan is energy-neutral when
# slack_j >= -SLACK_RTOL * E_j for every node.
SLACK_RTOL = 1e-9

# floor(x) with a guard: values within 1e-9 below an integer round up,
# absorbing the round-trip error of solving cap(kappa) = L for kappa.
_FLOOR_TOL = 1e-9


class TriviallyFeasible(Exception):
    """Raised by ell_cap when E_j >= c4: the node has no sampling cap."""


def _floor_guard(x):
    f = np.floor(x)
    return np.where(x - f > 1.0 - _FLOOR_TOL, f + 1.0, f)


def _sampled_prob(g, ell):
    """1 - (1 - g)^ell elementwise, stable for small g."""
    g = np.asarray(g, dtype=float)
    if ell == 0:
        return np.zeros_like(g)
    out = np.ones_like(g)
    partial = g < 1.0
    out[partial] = -np.expm1(ell * np.log1p(-g[partial]))
    return out


def kappa_min(profile, nhat):
    """Smallest admissible kappa: sum(E)/(nhat * E_min)."""
    return profile.total / (nhat * profile.e_min)


def predicted_error(plan, profile, constants, nhat):
    """Error bound sqrt((c1 ln(nhat)/ell)(2 + c2 sum(E)/(E_min kappa)))."""
    if plan.ell < 1:
        raise ValueError("predicted error needs ell >= 1")
    if plan.kappa is None:
        raise ValueError("plan has no kappa; predicted error applies to "
                         "energy-proportional plans only")
    return math.sqrt(_objective(plan.ell, plan.kappa, profile, constants, nhat))


def _objective(ell, kappa, profile, constants, nhat):
    lead = constants.c1 * math.log(nhat) / ell
    return lead * (2.0 + constants.c2 * profile.total / (profile.e_min * kappa))


def ell_cap(e_j, kappa, profile, c4):
    """Largest real ell keeping a node with energy e_j neutral at this kappa."""
    if not 0 < kappa <= 1:
        raise ValueError("kappa must lie in (0, 1]")
    if e_j <= 0:
        raise ValueError("node energy must be > 0")
    if e_j >= c4:
        raise TriviallyFeasible(
            f"node energy {e_j} >= per-sample cost {c4}: no cap applies"
        )
    return math.log1p(-e_j / c4) / math.log1p(-e_j * kappa / profile.total)


def min_ell_cap(profile, kappa, c4):
    """Tightest cap over all nodes; inf when no node is constrained."""
    capped = profile.energy < c4
    if not np.any(capped):
        return math.inf
    return float(
        _caps_for_kappas(np.array([kappa]), profile.energy[capped], profile.total, c4)[0]
    )


def feasibility_check(plan, profile, c4):
    """Per-node slack E_j - (1 - (1-g_j)^ell) * c4.

    Negative slack beyond SLACK_RTOL * E_j means the node would overdraw
    its harvested budget in expectation.
    """
    if plan.n != profile.n:
        raise ValueError("plan and profile cover different node counts")
    return profile.energy - _sampled_prob(plan.g, plan.ell) * c4


@dataclass(frozen=True)
class PlanResult:
    """An (ell, kappa) choice with its predicted error and slack diagnostics."""

    plan: SamplingPlan
    epsilon: float
    objective: float
    slack: np.ndarray
    binding_node: int | None
    kappa_min: float
    trivially_feasible: bool = False


def _caps_for_kappas(kappas, energy, total, c4):
    """min_j cap_j(kappa) for each kappa; energy holds only capped nodes."""
    log_r = np.log1p(-energy / c4)  # negative
    out = np.empty(kappas.size)
    step = max(1, 4_000_000 // energy.size)
    for i0 in range(0, kappas.size, step):
        block = kappas[i0 : i0 + step, None]
        caps = log_r[None, :] / np.log1p(-energy[None, :] * block / total)
        out[i0 : i0 + step] = caps.min(axis=1)
    return out


def _edge_kappas(levels, energy, total, c4):
    """min_j kappa_j(L) for each level L; the right edge of its interval."""
    r = 1.0 - energy / c4
    out = np.empty(levels.size)
    step = max(1, 4_000_000 // energy.size)
    for i0 in range(0, levels.size, step):
        block = levels[i0 : i0 + step, None]
        edges = -np.expm1(np.log(r)[None, :] / block) * (total / energy[None, :])
        out[i0 : i0 + step] = edges.min(axis=1)
    return out


def east_plus_plan(profile, constants, nhat, seed=0):
    """Jointly optimal (ell, kappa) for this profile and signal dimension."""
    c4 = constants.c4
    total = profile.total
    kmin = kappa_min(profile, nhat)
    if kmin > 1.0:
        raise ValueError(
            "profile too skewed: minimum-energy node cannot support one "
            f"expected nonzero per row (kappa_min = {kmin:.6g} > 1)"
        )

    if profile.e_min >= c4:
        # Every node affords a sample in every row; no cap binds and the
        # error can be driven arbitrarily low. Spend enough rows for a
        # predicted error of 1 at the densest admissible sampling.
        kappa = 1.0
        ell = math.ceil(
            constants.c1 * math.log(nhat) * (2.0 + constants.c2 * total / profile.e_min)
        )
        plan = SamplingPlan(
            ell=ell, g=sampling_probabilities(profile, kappa), seed=seed, kappa=kappa
        )
        return PlanResult(
            plan=plan,
            epsilon=predicted_error(plan, profile, constants, nhat),
            objective=_objective(ell, kappa, profile, constants, nhat),
            slack=feasibility_check(plan, profile, c4),
            binding_node=None,
            kappa_min=kmin,
            trivially_feasible=True,
        )

    capped = profile.energy < c4  # others never bind
    energy = profile.energy[capped]

    ell_hi = float(_floor_guard(_caps_for_kappas(np.array([kmin]), energy, total, c4))[0])
    if ell_hi < 1.0:
        raise ValueError(
            "no feasible ell >= 1: even at kappa_min the minimum-energy node "
            "cannot afford a single expected sample"
        )
    ell_lo = max(1.0, float(_floor_guard(_caps_for_kappas(np.array([1.0]), energy, total, c4))[0]))

    levels = np.arange(ell_lo, ell_hi + 1.0)
    kappas = _edge_kappas(levels, energy, total, c4)
    kappas = np.clip(kappas, None, 1.0)
    kappas = np.unique(kappas[kappas >= kmin])  # ascending, deduplicated

    ells = _floor_guard(_caps_for_kappas(kappas, energy, total, c4))
    usable = ells >= 1.0
    kappas, ells = kappas[usable], ells[usable]
    if kappas.size == 0:
        raise ValueError("no feasible (ell, kappa) with ell >= 1")

    lead = constants.c1 * math.log(nhat)
    objectives = (lead / ells) * (2.0 + constants.c2 * total / (profile.e_min * kappas))
    best = int(np.argmin(objectives))  # ties: smallest kappa

    kappa = float(kappas[best])
    ell = int(ells[best])
    plan = SamplingPlan(
        ell=ell, g=sampling_probabilities(profile, kappa), seed=seed, kappa=kappa
    )
    slack = feasibility_check(plan, profile, c4)
    return PlanResult(
        plan=plan,
        epsilon=math.sqrt(objectives[best]),
        objective=float(objectives[best]),
        slack=slack,
        binding_node=int(np.argmin(slack / profile.energy)),
        kappa_min=kmin,
    )


def east_equality_plan(profile, ell, c4, seed=0):
    """Plan with every node's energy constraint active: (1-(1-g_j)^ell)c4 = E_j.

    The resulting g solve the balance exactly and generally match no
    single kappa, so the plan carries kappa=None.
    """
    if ell < 1:
        raise ValueError("ell must be >= 1")
    if np.any(profile.energy >= c4):
        raise ValueError("equality solve needs E_j < c4 for every node")
    g = -np.expm1(np.log1p(-profile.energy / c4) / ell)
    return SamplingPlan(ell=ell, g=g, seed=seed, kappa=None)


def east_baseline_plan(ell, kappa, profile, constants, nhat, seed=0):
    """Wrap a hand-picked (ell, kappa) pair, rejecting energy-infeasible ones."""
    if ell < 1:
        raise ValueError("ell must be >= 1")
    plan = SamplingPlan(
        ell=ell, g=sampling_probabilities(profile, kappa), seed=seed, kappa=kappa
    )
    slack = feasibility_check(plan, profile, constants.c4)
    if not np.all(slack >= -SLACK_RTOL * profile.energy):
        worst = int(np.argmin(slack / profile.energy))
        raise ValueError(
            f"(ell={ell}, kappa={kappa}) overdraws node {worst}: "
            f"slack {slack[worst]:.3e} of energy {profile.energy[worst]:.3e}"
        )
    return PlanResult(
        plan=plan,
        epsilon=predicted_error(plan, profile, constants, nhat),
        objective=_objective(ell, kappa, profile, constants, nhat),
        slack=slack,
        binding_node=int(np.argmin(slack / profile.energy)),
        kappa_min=kappa_min(profile, nhat),
    )


def theoretical_ell(constants, profile, kappa, nhat, epsilon):
    """Row count sufficient for error epsilon: c1 (2 + c2 max_j 1/g_j) ln(nhat)/eps^2.

    max_j 1/g_j = sum(E)/(E_min kappa); shared by the planner objective
    and the decoder's sufficiency checks. Returns the real value; round
    up to use as a row count.
    """
    if not 0 < kappa <= 1:
        raise ValueError("kappa must lie in (0, 1]")
    maxinv = profile.total / (profile.e_min * kappa)
    return constants.c1 * (2.0 + constants.c2 * maxinv) * math.log(nhat) / epsilon**2
