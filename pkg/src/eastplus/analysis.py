"""Monte-Carlo validation of the cap-monotonicity conjecture.

The planner assumes the energy-neutrality cap on ell is non-decreasing
in node energy, so only the minimum-energy node binds. The derivative of
the cap with respect to E_j (with sum(E) moving along) splits into a
positive left part and a subtracted right part:

    left  = 1 / (c4 (1 - E_j/c4) |ln(1 - E_j kappa / sum(E))|)
    right = |ln(1 - E_j/c4)| |E_j kappa/sum(E)^2 - kappa/sum(E)|
            / ((1 - E_j kappa/sum(E)) ln^2(1 - E_j kappa/sum(E)))

and the conjecture is that left > right throughout the admissible
domain. The experiment samples energy ratios from a beta distribution,
kappa uniformly, and counts sign violations; a central finite difference
of the cap serves as an independent oracle for the analytic parts.
"""

import math
from dataclasses import dataclass

import numpy as np

KAPPA_FLOOR = 1e-9  # below this the log denominators are numerically void

# The derivative depends only on E_j/c4 and E_j kappa/sum(E); the first
# ratio is a free parameter, so experiments sweep it.
E_OVER_C4_SWEEP = (0.1, 0.5, 0.9)


def derivative_parts(e_j, kappa, total, c4):
    """Left and right parts of d(cap)/dE_j at one point.

    The cap's sign is sign(left - right). sum(E) is understood to
    contain E_j, which is where the kappa/sum(E) - E_j kappa/sum(E)^2
    inner derivative comes from.
    """
    if not 0 < e_j < c4:
        raise ValueError("need 0 < E_j < c4")
    if kappa < KAPPA_FLOOR:
        raise ValueError(f"kappa below {KAPPA_FLOOR} is numerically void")
    load = e_j * kappa / total
    if not 0 < load < 1:
        raise ValueError("need 0 < E_j*kappa/sum(E) < 1")
    log_load = math.log1p(-load)
    left = 1.0 / (c4 * (1.0 - e_j / c4) * abs(log_load))
    right = (
        abs(math.log1p(-e_j / c4))
        * abs(e_j * kappa / total**2 - kappa / total)
        / ((1.0 - load) * log_load**2)
    )
    return left, right


def fd_cap_derivative(e_j, kappa, total, c4, step=None):
    """Central finite difference of the cap in E_j, sum(E) moving with it."""
    h = step if step is not None else 1e-6 * e_j

    def cap(e):
        s = total + (e - e_j)
        return math.log1p(-e / c4) / math.log1p(-e * kappa / s)

    return (cap(e_j + h) - cap(e_j - h)) / (2.0 * h)


def sample_beta_profiles(alpha, beta, n, seed):
    """n i.i.d. Beta(alpha, beta) draws, used as energy-ratio proxies."""
    if alpha <= 0 or beta <= 0:
        raise ValueError("beta shape parameters must be > 0")
    rng = np.random.default_rng(seed)
    return rng.beta(alpha, beta, size=n)


@dataclass(frozen=True)
class DerivativeSample:
    """One evaluated point of the derivative decomposition."""

    trial: int
    ratio: float  # E_j / sum(E)
    kappa: float
    e_over_c4: float
    left: float
    right: float

    @property
    def margin(self):
        return self.left - self.right

    @property
    def sign(self):
        return (self.margin > 0) - (self.margin < 0)


@dataclass(frozen=True)
class SweepResult:
    """All trials at one fixed E_j/c4."""

    e_over_c4: float
    samples: tuple

    @property
    def min_margin(self):
        return min(s.margin for s in self.samples)

    @property
    def n_nonpositive(self):
        return sum(1 for s in self.samples if s.sign <= 0)


@dataclass(frozen=True)
class ConjectureReport:
    alpha: float
    beta: float
    seed: int
    trials: int
    sweeps: tuple

    @property
    def all_positive(self):
        return all(s.n_nonpositive == 0 for s in self.sweeps)


def _trial_draw(seed, trial, alpha, beta):
    """(ratio, kappa) for one trial; independent of every other trial."""
    rng = np.random.default_rng(np.random.SeedSequence([seed, trial]))
    ratio = rng.beta(alpha, beta)
    while not 0.0 < ratio < 1.0:
        ratio = rng.beta(alpha, beta)
    kappa = rng.uniform()
    while kappa < KAPPA_FLOOR:
        kappa = rng.uniform()
    return float(ratio), float(kappa)


def conjecture_experiment(trials, alpha, beta, seed, e_over_c4_values=E_OVER_C4_SWEEP):
    """Sign distribution of left - right over random (ratio, kappa) draws.

    c4 is fixed at 1; each trial is evaluated at every swept E_j/c4.
    Trials are seeded independently from the master seed, so any subset
    replays identically.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    draws = [_trial_draw(seed, t, alpha, beta) for t in range(trials)]
    sweeps = []
    for e_over_c4 in e_over_c4_values:
        c4 = 1.0
        e_j = e_over_c4 * c4
        samples = []
        for t, (ratio, kappa) in enumerate(draws):
            total = e_j / ratio
            left, right = derivative_parts(e_j, kappa, total, c4)
            samples.append(
                DerivativeSample(
                    trial=t,
                    ratio=ratio,
                    kappa=kappa,
                    e_over_c4=e_over_c4,
                    left=left,
                    right=right,
                )
            )
        sweeps.append(SweepResult(e_over_c4=e_over_c4, samples=tuple(samples)))
    return ConjectureReport(
        alpha=alpha, beta=beta, seed=seed, trials=trials, sweeps=tuple(sweeps)
    )
