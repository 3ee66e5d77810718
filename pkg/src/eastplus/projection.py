"""Sparse random projection matrices and their application.

Entries follow the three-point law: column q with inclusion probability
g takes value +sqrt(1/g) with probability g/2, -sqrt(1/g) with g/2, and
0 otherwise. Every entry is a pure function of (seed, row, column), so a
node can produce its own matrix entries and the sink can regenerate them
without any matrix ever being stored.
"""

import math
from dataclasses import dataclass

import numpy as np

from .backends import kernels
from .core import SamplingPlan


def sampling_probabilities(profile, kappa):
    """Energy-proportional inclusion probabilities g_j = kappa * E_j / sum(E)."""
    if not 0 < kappa <= 1:
        raise ValueError("kappa must lie in (0, 1]")
    g = kappa * profile.energy / profile.total
    # E_j <= sum(E) and kappa <= 1 keep every g_j in (0, 1].
    assert np.all(g <= 1.0)
    return g


@dataclass(frozen=True)
class ProjectionRow:
    """Nonzero entries of one matrix row, regenerable from (seed, r)."""

    r: int
    columns: np.ndarray
    values: np.ndarray

    @property
    def nnz(self):
        return self.columns.size


def generate_row(seed, r, g_cols):
    """Row r of the projection matrix as sparse (column, value) pairs.

    g_cols holds the inclusion probability of each of the N-hat columns
    (a node's g repeated over its M instants).
    """
    if r < 0:
        raise ValueError("row index must be >= 0")
    g_cols = np.ascontiguousarray(g_cols, dtype=float)
    columns, values = kernels.row_entries(seed, r, g_cols)
    return ProjectionRow(r=r, columns=columns, values=values)


def project(u, plan, m=1):
    """x = (1/sqrt(ell)) * Phi u for the plan's ell x N-hat matrix."""
    u = np.ascontiguousarray(u, dtype=float)
    g_cols = plan.g_columns(m)
    if u.size != g_cols.size:
        raise ValueError(
            f"signal length {u.size} does not match N*M = {g_cols.size}"
        )
    return kernels.project(plan.seed, plan.ell, g_cols, u)


def sample_probability(g_j, ell):
    """Probability node j samples at least once over ell rows: 1 - (1-g_j)^ell."""
    if not 0 < g_j <= 1:
        raise ValueError("g_j must lie in (0, 1]")
    if ell < 1:
        raise ValueError("ell must be >= 1")
    return -math.expm1(ell * math.log1p(-g_j)) if g_j < 1 else 1.0


@dataclass(frozen=True)
class UniformMatrixSpec:
    """Energy-oblivious matrix: entries +-sqrt(rho) each w.p. 1/(2*rho)."""

    rho: float
    ell: int
    nhat: int
    seed: int

    def __post_init__(self):
        if self.rho < 1:
            raise ValueError("sparsity parameter rho must be >= 1")
        if self.ell < 0 or self.nhat < 1:
            raise ValueError("need ell >= 0 and nhat >= 1")


def uniform_plan(spec):
    """The uniform matrix as a sampling plan with g = 1/rho per column."""
    return SamplingPlan(
        ell=spec.ell, g=np.full(spec.nhat, 1.0 / spec.rho), seed=spec.seed
    )


def mean_active_sensors_uniform(rho, ell, n):
    """Expected number of sensors that sample at least once: N(1-(1-1/rho)^ell)."""
    if rho < 1:
        raise ValueError("rho must be >= 1")
    if ell < 0:
        raise ValueError("ell must be >= 0")
    if rho == 1:
        return float(n) if ell >= 1 else 0.0
    return n * -math.expm1(ell * math.log1p(-1.0 / rho))


def inner_product_moments(u, v, g_cols, ell):
    """Exact mean and variance of x^T y over the matrix ensemble.

    x, y are the scaled projections of u, v under per-column
    probabilities g_cols with ell rows. Mean is u^T v; the variance is
    (1/ell)((u^T v)^2 + ||u||^2 ||v||^2 + sum(u_q^2 v_q^2 / g_q)
    - 3 sum(u_q^2 v_q^2)).
    """
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    g_cols = np.asarray(g_cols, dtype=float)
    if ell < 1:
        raise ValueError("ell must be >= 1")
    uv = float(np.dot(u, v))
    uu = float(np.dot(u, u))
    vv = float(np.dot(v, v))
    sq = u**2 * v**2
    var = (uv**2 + uu * vv + float(np.sum(sq / g_cols)) - 3.0 * float(np.sum(sq))) / ell
    return uv, var
