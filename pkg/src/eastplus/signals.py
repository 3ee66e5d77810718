"""Synthetic compressible signals and CSV ingestion/emission.

Signal CSV: header row of node ids, one row per time instant. Energy
CSV: one row per node, `node_id,energy`, where energy is the per-instant
harvest budget e_j (the horizon budget is e_j times the number of
instants). Floats are written with repr, so emit/ingest round-trips are
exact.
"""

import csv
import math
import warnings

import numpy as np

from .core import EnergyProfile, Signal, devectorize
from .transform import TransformBasis, inverse


def power_law_magnitudes(nhat, s, r):
    """Sorted coefficient magnitudes R * rank^(-1/s)."""
    if not 0 < s <= 1:
        raise ValueError("compressibility s must lie in (0, 1]")
    if r <= 0:
        raise ValueError("scale R must be > 0")
    ranks = np.arange(1, nhat + 1, dtype=float)
    return r * ranks ** (-1.0 / s)


def eta_best_k(nhat, s, k):
    """Exact best-k energy fraction of the power-law generator.

    eta(k) = sum_{rank>k} rank^(-2/s) / sum_{rank<=nhat} rank^(-2/s);
    the scale R cancels.
    """
    if not 1 <= k:
        raise ValueError("k must be >= 1")
    weights = np.arange(1, nhat + 1, dtype=float) ** (-2.0 / s)
    total = float(weights.sum())
    if k >= nhat:
        return 0.0
    return float(weights[k:].sum()) / total


def synth_signal(nhat, s, r, basis_kind, seed, n=1):
    """Signal whose transform coefficients decay as an exact power law.

    Magnitudes R * rank^(-1/s) get random signs and land at random
    coefficient positions; the signal is the inverse transform, reshaped
    to nhat/n instants by n nodes. Draws failing the peak-to-total
    margin ln(nhat)/sqrt(nhat) are resampled up to 10 times.
    """
    if nhat < 2:
        raise ValueError("need nhat >= 2")
    if n < 1 or nhat % n:
        raise ValueError(f"node count {n} must divide nhat {nhat}")
    basis = TransformBasis(kind=basis_kind, dimension=nhat)
    mags = power_law_magnitudes(nhat, s, r)
    margin = math.log(nhat) / math.sqrt(nhat)
    for attempt in range(10):
        rng = np.random.default_rng(np.random.SeedSequence([seed, attempt]))
        signs = rng.integers(0, 2, size=nhat) * 2 - 1
        positions = rng.permutation(nhat)
        theta = np.zeros(nhat)
        theta[positions] = signs * mags
        u = inverse(basis, theta)
        ratio = float(np.max(np.abs(u))) / float(np.linalg.norm(u))
        if ratio <= margin:
            return devectorize(u, nhat // n, n)
    raise ValueError(
        f"peak-to-total ratio stayed above {margin:.4g} after 10 draws; "
        "the requested (nhat, s, basis) concentrates energy too much"
    )


def ingest_signal(path):
    """Signal from CSV: header of node ids, one row per time instant."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise ValueError(f"{path}: empty file")
    header, data = rows[0], rows[1:]
    n = len(header)
    if n == 0 or not data:
        raise ValueError(f"{path}: need a node-id header and at least one data row")
    values = np.empty((len(data), n))
    for h, row in enumerate(data):
        if len(row) != n:
            raise ValueError(
                f"{path}: row {h} has {len(row)} cells, expected {n}"
            )
        for j, cell in enumerate(row):
            if cell.strip() == "":
                raise ValueError(f"{path}: missing measurement at ({h}, {j})")
            try:
                values[h, j] = float(cell)
            except ValueError:
                raise ValueError(
                    f"{path}: non-numeric measurement {cell!r} at ({h}, {j})"
                ) from None
    return Signal(values)


def emit_signal(signal, path, node_ids=None):
    """Write a Signal as CSV; inverse of ingest_signal, bit-exact."""
    ids = node_ids if node_ids is not None else [f"n{j}" for j in range(signal.n)]
    if len(ids) != signal.n:
        raise ValueError("one node id per column required")
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(ids)
        for row in signal.values:
            writer.writerow([repr(float(v)) for v in row])


def segment_signal(signal, m):
    """Split into full m-instant segments; a short remainder is dropped."""
    if m < 1:
        raise ValueError("segment length must be >= 1")
    count, rem = divmod(signal.m, m)
    if rem:
        warnings.warn(
            f"dropping {rem} trailing instants ({signal.m} % {m})", stacklevel=2
        )
    return [Signal(signal.values[i * m : (i + 1) * m]) for i in range(count)]


def ingest_energy(path):
    """EnergyProfile from CSV rows `node_id,energy`; header optional."""
    with open(path, newline="") as fh:
        rows = [row for row in csv.reader(fh) if row]
    if not rows:
        raise ValueError(f"{path}: empty file")
    start = 0
    try:
        float(rows[0][-1])
    except ValueError:
        start = 1  # header row
    energies = []
    for i, row in enumerate(rows[start:]):
        if len(row) < 2:
            raise ValueError(f"{path}: row {i} needs `node_id,energy`")
        try:
            energies.append(float(row[-1]))
        except ValueError:
            raise ValueError(
                f"{path}: non-numeric energy {row[-1]!r} for node {row[0]!r}"
            ) from None
    if not energies:
        raise ValueError(f"{path}: no energy rows")
    return EnergyProfile(energies)


def emit_energy(profile, path, node_ids=None):
    ids = node_ids if node_ids is not None else list(range(profile.n))
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["node", "energy"])
        for node_id, e in zip(ids, profile.energy):
            writer.writerow([node_id, repr(float(e))])
