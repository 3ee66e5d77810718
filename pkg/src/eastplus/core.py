"""Shared domain types, signal vectorization, and error metrics.

Indexing convention: the docs speak 1-based (row r, column q, node j,
time t_h) to match the usual presentation; every array in code is
0-based. The vectorized layout is column-major: element q = h + (j-1)*M
holds the measurement of node j at time h.
"""

import math
from dataclasses import dataclass

import numpy as np


def _frozen_array(values, dtype=float, ndim=1):
    arr = np.array(values, dtype=dtype)
    if arr.ndim != ndim:
        raise ValueError(f"expected a {ndim}-d array, got shape {arr.shape}")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class Signal:
    """Measurement field: M time instants (rows) x N nodes (columns)."""

    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "values", _frozen_array(self.values, ndim=2))
        if self.values.size == 0:
            raise ValueError("signal must have M >= 1 and N >= 1")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("signal entries must be finite")

    @property
    def m(self):
        return self.values.shape[0]

    @property
    def n(self):
        return self.values.shape[1]

    @property
    def nhat(self):
        return self.values.size


@dataclass(frozen=True)
class EnergyProfile:
    """Per-node energy harvested over the planning horizon.

    Zero-energy nodes are rejected: a dead node would make 1/g_j unbounded
    in every variance and error formula, and is a data-cleaning concern.
    """

    energy: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "energy", _frozen_array(self.energy))
        if self.energy.size == 0:
            raise ValueError("energy profile must cover at least one node")
        if not np.all(np.isfinite(self.energy)) or np.any(self.energy <= 0):
            raise ValueError("every node needs finite energy > 0")

    @property
    def n(self):
        return self.energy.size

    @property
    def total(self):
        return float(self.energy.sum())

    @property
    def e_min(self):
        return float(self.energy.min())

    @property
    def order(self):
        """Node indices sorted by non-decreasing energy (stable)."""
        return np.argsort(self.energy, kind="stable")

    def scaled(self, factor):
        return EnergyProfile(self.energy * factor)


@dataclass(frozen=True)
class SamplingPlan:
    """Projection count ell, per-node inclusion probabilities g, and the seed.

    kappa is the sampling parameter when g has the form kappa*E_j/sum(E);
    it is None for equality-style plans whose g solve the per-node energy
    balance directly and fit no single kappa.
    """

    ell: int
    g: np.ndarray
    seed: int
    kappa: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "g", _frozen_array(self.g))
        if self.ell < 0:
            raise ValueError("ell must be >= 0")
        if np.any(self.g <= 0) or np.any(self.g > 1):
            raise ValueError("probabilities g must lie in (0, 1]")
        if self.kappa is not None and not 0 < self.kappa <= 1:
            raise ValueError("kappa must lie in (0, 1]")

    @property
    def n(self):
        return self.g.size

    def g_columns(self, m):
        """Per-column probabilities for an M-instant signal: g repeated
        blockwise, matching q = h + (j-1)*M."""
        return np.repeat(self.g, m)


@dataclass(frozen=True)
class ModelConstants:
    """Recovery-model constants.

    k: retained coefficients; gamma: failure exponent (success prob
    1 - N^-gamma); eta: best-k error fraction; c: Chernoff constant in
    (0,1); mu: peak-to-total bound; voltage*current*acquisition_time = c4,
    the energy drawn per sample.
    """

    k: int
    gamma: float
    eta: float
    c: float
    mu: float
    voltage: float = 1.0
    current: float = 1.0
    acquisition_time: float = 1.0

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be a positive integer")
        if self.gamma <= 0:
            raise ValueError("gamma must be > 0")
        if not 0 < self.eta <= 1:
            raise ValueError("eta must lie in (0, 1]")
        if not 0 < self.c < 1:
            raise ValueError("c must lie in (0, 1)")
        if self.mu <= 0:
            raise ValueError("mu must be > 0")
        if self.c4 <= 0:
            raise ValueError("c4 = voltage*current*acquisition_time must be > 0")

    @property
    def c1(self):
        return 48.0 * (1.0 + self.gamma) * self.k**2 / (self.c**2 * self.eta**2)

    @property
    def c2(self):
        return self.mu**2

    @property
    def c4(self):
        return self.voltage * self.current * self.acquisition_time

    @classmethod
    def with_c4(cls, k, gamma, eta, c, mu, c4):
        """Constants with the per-sample energy given directly."""
        return cls(k, gamma, eta, c, mu, voltage=c4, current=1.0, acquisition_time=1.0)


@dataclass(frozen=True)
class EnergyLedger:
    """Per-node harvested vs consumed sampling energy from one run."""

    harvested: np.ndarray
    sample_count: np.ndarray
    c4: float
    messages_to_base: int = 0

    def __post_init__(self):
        object.__setattr__(self, "harvested", _frozen_array(self.harvested))
        object.__setattr__(
            self, "sample_count", _frozen_array(self.sample_count, dtype=np.int64)
        )
        if self.harvested.shape != self.sample_count.shape:
            raise ValueError("harvested and sample_count must align")
        if np.any(self.sample_count < 0):
            raise ValueError("sample counts must be >= 0")

    @property
    def consumed(self):
        return self.sample_count * self.c4

    @property
    def neutral(self):
        """True where a node stayed within its harvested budget."""
        return self.consumed <= self.harvested


def vectorize(signal):
    """Flatten an M x N signal to length N-hat = M*N, element q = h + (j-1)*M."""
    return signal.values.flatten(order="F")


def devectorize(u, m, n):
    """Inverse of vectorize."""
    u = np.asarray(u, dtype=float)
    if u.size != m * n:
        raise ValueError(f"vector of length {u.size} does not factor as {m}x{n}")
    return Signal(u.reshape((m, n), order="F"))


def node_of(q, m):
    """Node index (0-based) owning vectorized element q (0-based)."""
    return q // m


def relative_error(u, u_hat):
    """||u - u_hat||^2 / ||u||^2."""
    u = np.asarray(u, dtype=float)
    u_hat = np.asarray(u_hat, dtype=float)
    if u.shape != u_hat.shape:
        raise ValueError("vectors must have the same length")
    denom = float(np.dot(u, u))
    if denom == 0.0 or not math.isfinite(denom):
        raise ValueError("degenerate reference signal")
    diff = u - u_hat
    return float(np.dot(diff, diff)) / denom
