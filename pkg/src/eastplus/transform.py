"""Orthonormal transforms and the signal-model checks.

Two bases are supported: Haar wavelets (dyadic lengths only) and the
orthonormal type-II DCT. Coefficients follow theta = Psi^T u with Psi
holding the basis vectors as columns, so forward/inverse are exact
adjoints of each other.
"""

import math
from dataclasses import dataclass

import numpy as np
import scipy.fft

KINDS = ("haar", "dct")


@dataclass(frozen=True)
class TransformBasis:
    """An orthonormal basis of a given dimension.

    kind: "haar" or "dct". Haar requires dimension to be a power of two.
    """

    kind: str
    dimension: int

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown basis kind {self.kind!r}; use one of {KINDS}")
        if self.dimension < 1:
            raise ValueError("dimension must be >= 1")
        if self.kind == "haar" and self.dimension & (self.dimension - 1):
            raise ValueError("haar basis needs a power-of-two dimension")


def _check_length(basis, vec):
    vec = np.asarray(vec, dtype=float)
    if vec.ndim != 1 or vec.size != basis.dimension:
        raise ValueError(
            f"vector of shape {vec.shape} does not match basis dimension "
            f"{basis.dimension}"
        )
    return vec


def forward(basis, u):
    """Analysis transform: theta = Psi^T u."""
    u = _check_length(basis, u)
    if basis.kind == "dct":
        return scipy.fft.dct(u, type=2, norm="ortho")
    # Haar pyramid: averages cascade down, details recorded per level.
    approx = u
    details = []
    while approx.size > 1:
        even, odd = approx[0::2], approx[1::2]
        details.append((even - odd) / math.sqrt(2.0))
        approx = (even + odd) / math.sqrt(2.0)
    # Layout: [scaling, coarsest detail, ..., finest detail].
    return np.concatenate([approx] + details[::-1])


def inverse(basis, theta):
    """Synthesis transform: u = Psi theta."""
    theta = _check_length(basis, theta)
    if basis.kind == "dct":
        return scipy.fft.idct(theta, type=2, norm="ortho")
    approx = theta[:1]
    pos = 1
    while approx.size < theta.size:
        detail = theta[pos : pos + approx.size]
        pos += approx.size
        merged = np.empty(2 * approx.size)
        merged[0::2] = (approx + detail) / math.sqrt(2.0)
        merged[1::2] = (approx - detail) / math.sqrt(2.0)
        approx = merged
    return approx


def basis_matrix(basis):
    """Dense Psi (basis vectors as columns). O(N^2) memory; test-scale use."""
    eye = np.eye(basis.dimension)
    return np.column_stack([inverse(basis, eye[:, i]) for i in range(basis.dimension)])


def best_k_approx(theta, k):
    """Zero all but the k largest-magnitude coefficients.

    Ties in magnitude keep the lower index. Coefficients that are exactly
    zero are never counted as retained, so the result has
    min(k, nnz(theta)) nonzeros.
    """
    theta = np.asarray(theta, dtype=float)
    if not 1 <= k <= theta.size:
        raise ValueError(f"k must lie in [1, {theta.size}], got {k}")
    order = np.argsort(-np.abs(theta), kind="stable")
    out = np.zeros_like(theta)
    keep = order[:k]
    out[keep] = theta[keep]
    return out


@dataclass(frozen=True)
class CompressibilityFit:
    """Power-law envelope of the sorted coefficient magnitudes.

    |theta|_(rank) <= r * rank**(-1/s) holds for every rank by
    construction (r is the minimal such scale for the fitted s).
    residual is the RMS error of the log-log regression; s = inf marks a
    sequence with no measurable decay.
    """

    r: float
    s: float
    residual: float


def compressibility_fit(theta):
    """Least-squares fit of log|theta|_(rank) against log rank."""
    theta = np.asarray(theta, dtype=float)
    mags = np.sort(np.abs(theta))[::-1]
    mags = mags[mags > 0]
    if mags.size == 0:
        raise ValueError("cannot fit an all-zero coefficient vector")
    ranks = np.arange(1, mags.size + 1, dtype=float)
    if mags.size == 1:
        return CompressibilityFit(r=float(mags[0]), s=math.inf, residual=0.0)
    x = np.log(ranks)
    y = np.log(mags)
    slope, intercept = np.polyfit(x, y, 1)
    residual = float(np.sqrt(np.mean((y - (intercept + slope * x)) ** 2)))
    if slope >= 0.0:
        # Sorted magnitudes never increase; a non-negative slope means flat.
        return CompressibilityFit(r=float(mags[0]), s=math.inf, residual=residual)
    s = -1.0 / float(slope)
    r = float(np.max(mags * ranks ** (1.0 / s)))
    return CompressibilityFit(r=r, s=s, residual=residual)


@dataclass(frozen=True)
class PeakToTotal:
    ratio: float
    bound: float
    passed: bool


def peak_to_total_check(u, s):
    """Compare ||u||_inf / ||u||_2 against the model bound.

    The bound is log(N)/sqrt(N) for s = 1 and 1/sqrt(N) for s < 1, with
    constant factor 1.0; callers needing slack apply their own margin.
    """
    u = np.asarray(u, dtype=float)
    norm = float(np.linalg.norm(u))
    if norm == 0.0:
        raise ValueError("peak-to-total ratio undefined for the zero signal")
    nhat = u.size
    ratio = float(np.max(np.abs(u))) / norm
    if s == 1:
        bound = math.log(nhat) / math.sqrt(nhat)
    else:
        bound = 1.0 / math.sqrt(nhat)
    return PeakToTotal(ratio=ratio, bound=bound, passed=ratio <= bound)
