"""Sketching decoder: median-of-means coefficient recovery.

The ell projections are split into ell2 equal groups. Each group g
yields one estimate per coefficient, z_g[i] = x_g^T y_g with
x_g = (1/sqrt(ell1)) Phi_g u and y_g = (1/sqrt(ell1)) Phi_g psi_i, and
the final estimate is the exact median across groups. Groupwise this
collapses to one adjoint application per group: z_g = Psi^T w_g / ell1
where w_g = Phi_g^T (sqrt(ell) x_g), so the decoder costs ell2 sketch
accumulations plus ell2 transforms instead of N-hat projections.
"""

import math
from dataclasses import dataclass

import numpy as np

from .backends import kernels
from .transform import best_k_approx, forward, inverse


@dataclass(frozen=True)
class PartitionSpec:
    """ell2 groups of ell1 rows each; trailing rows beyond ell1*ell2 unused."""

    l1: int
    l2: int
    below_theory: bool = False

    def __post_init__(self):
        if self.l1 < 1 or self.l2 < 1:
            raise ValueError("need l1 >= 1 and l2 >= 1")
        if self.l2 % 2 == 0:
            raise ValueError("l2 must be odd so the median is an order statistic")

    @property
    def rows_used(self):
        return self.l1 * self.l2


def theoretical_group_count(gamma, c, nhat):
    """Smallest odd group count satisfying l2 >= 12(1+gamma)ln(nhat)/c^2."""
    l2 = math.ceil(12.0 * (1.0 + gamma) * math.log(nhat) / c**2)
    return l2 if l2 % 2 else l2 + 1


def partition(ell, gamma, c, nhat):
    """Split ell rows into the theory-sized odd number of groups.

    When ell cannot support the theoretical group count, the partition
    degrades to the largest odd l2 <= ell and is flagged below_theory.
    """
    if ell < 1:
        raise ValueError("ell must be >= 1")
    target = theoretical_group_count(gamma, c, nhat)
    if ell >= target:
        l2 = target
        below = False
    else:
        l2 = ell if ell % 2 else ell - 1
        below = True
    return PartitionSpec(l1=ell // l2, l2=l2, below_theory=below)


@dataclass(frozen=True)
class CoefficientEstimate:
    """Median-of-means estimate with the per-group values kept for diagnostics."""

    theta_hat: np.ndarray
    z: np.ndarray  # shape (l2, nhat): group g's estimate of coefficient i

    def __post_init__(self):
        if self.z.ndim != 2 or self.theta_hat.shape != (self.z.shape[1],):
            raise ValueError("z must be (l2, nhat) with theta_hat of length nhat")


def estimate_coefficients(x, plan, basis, part):
    """Recover all transform coefficients from one projection vector.

    The matrix is regenerated from plan.seed; nothing but x crosses from
    the encoder. basis.dimension fixes N-hat and must be plan.n times a
    whole number of time instants.
    """
    x = np.asarray(x, dtype=float)
    nhat = basis.dimension
    if nhat % plan.n:
        raise ValueError(
            f"basis dimension {nhat} is not a multiple of node count {plan.n}"
        )
    m = nhat // plan.n
    if x.size != plan.ell:
        raise ValueError(f"expected {plan.ell} projections, got {x.size}")
    if part.rows_used > plan.ell:
        raise ValueError(
            f"partition uses {part.rows_used} rows but the plan has {plan.ell}"
        )
    g_cols = plan.g_columns(m)
    raw = x * math.sqrt(plan.ell)  # undo the 1/sqrt(ell) projection scale
    z = np.empty((part.l2, nhat))
    for gi in range(part.l2):
        lo = gi * part.l1
        w = kernels.sketch_scatter(plan.seed, lo, lo + part.l1, g_cols, raw[lo : lo + part.l1])
        z[gi] = forward(basis, w) / part.l1
    theta_hat = np.median(z, axis=0)
    return CoefficientEstimate(theta_hat=theta_hat, z=z)


def reconstruct(x, plan, basis, k, part):
    """Signal estimate: inverse transform of the top-k coefficient estimates."""
    est = estimate_coefficients(x, plan, basis, part)
    return inverse(basis, best_k_approx(est.theta_hat, k))
