"""Deterministic simulation of the distributed projection protocol.

Responsibility for the ell matrix rows is spread round-robin over the
nodes. The responsible node regenerates its row from the shared seed,
requests a sample from the owner of every nonzero column, accumulates
u_r = sum_q Phi_rq u_q, and forwards the scalar to the base station. A
node samples at most once per time instant no matter how many rows ask;
the ledger charges c4 exactly once per distinct (node, instant) pair.

Messages model algorithmic traffic only: requests are logged even when a
node addresses itself, a sampled value is announced once when first
taken, and no radio or latency cost exists. The base-assembled vector is
bit-identical to the centralized projection, which is the simulator's
correctness oracle.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .backends import kernels
from .core import EnergyLedger, relative_error, vectorize
from .decoder import partition, reconstruct
from .planner import east_plus_plan
from .transform import TransformBasis

BASE = -1  # receiver id of the base station in message records

KIND_REQUEST = "sample-request"
KIND_VALUE = "sample-value"
KIND_SCALAR = "row-scalar"


@dataclass(frozen=True)
class Message:
    sender: int
    receiver: int
    kind: str
    size: int = 1


@dataclass(frozen=True)
class MessageTrace:
    """Messages in protocol order: rows ascending, columns within a row ascending."""

    messages: tuple

    def count(self, kind):
        return sum(1 for msg in self.messages if msg.kind == kind)

    @property
    def n_row_scalars(self):
        return self.count(KIND_SCALAR)

    @property
    def n_sample_requests(self):
        return self.count(KIND_REQUEST)

    @property
    def n_sample_values(self):
        return self.count(KIND_VALUE)


@dataclass
class NodeSim:
    """One sensor: its horizon energy and the instants it has sampled."""

    node: int
    energy: float
    seed: int
    sampled: set = field(default_factory=set)


@dataclass
class BaseStation:
    """Collects the unscaled row scalars [x_1..x_ell] = Phi u."""

    raw: np.ndarray

    def receive(self, r, value):
        self.raw[r] = value


def assign_rows(n, ell):
    """Round-robin row ownership: row r belongs to node r mod n."""
    if n < 1 or ell < 1:
        raise ValueError("need n >= 1 and ell >= 1")
    return np.arange(ell) % n


def run(signal, plan, profile, c4):
    """Execute the protocol; returns (x at base, EnergyLedger, MessageTrace).

    profile holds each node's energy over the whole signal horizon. An
    energy overrun shows up as negative ledger slack; it is reported,
    never fatal, since avoiding it is the planner's job.
    """
    if plan.n != signal.n or profile.n != signal.n:
        raise ValueError("plan, profile, and signal disagree on node count")
    u = vectorize(signal)
    m = signal.m
    g_cols = plan.g_columns(m)
    nodes = [
        NodeSim(node=j, energy=float(profile.energy[j]), seed=plan.seed)
        for j in range(signal.n)
    ]
    base = BaseStation(raw=np.zeros(plan.ell))
    messages = []
    if plan.ell > 0:
        owner = assign_rows(signal.n, plan.ell)
        for r in range(plan.ell):
            resp = int(owner[r])
            cols, _ = kernels.row_entries(plan.seed, r, g_cols)
            for q in cols.tolist():
                j = q // m
                h = q - j * m
                messages.append(Message(resp, j, KIND_REQUEST))
                if h not in nodes[j].sampled:
                    nodes[j].sampled.add(h)
                    messages.append(Message(j, resp, KIND_VALUE))
            base.receive(r, kernels.row_dot(plan.seed, r, g_cols, u))
            messages.append(Message(resp, BASE, KIND_SCALAR))
    inv = 1.0 / math.sqrt(plan.ell) if plan.ell else 0.0
    x = base.raw * inv
    ledger = EnergyLedger(
        harvested=profile.energy,
        sample_count=np.array([len(node.sampled) for node in nodes]),
        c4=c4,
        messages_to_base=plan.ell,
    )
    return x, ledger, MessageTrace(messages=tuple(messages))


def end_to_end(signal, profile, constants, k, seed=0, basis_kind="dct"):
    """Plan, simulate, decode, and score one signal; returns relative error.

    profile is horizon energy; planning happens on the per-instant share
    E_j / M so the neutrality constraint applies instant by instant.
    """
    per_instant = profile.scaled(1.0 / signal.m) if signal.m > 1 else profile
    plan = east_plus_plan(per_instant, constants, signal.nhat, seed=seed).plan
    x, _, _ = run(signal, plan, profile, constants.c4)
    basis = TransformBasis(kind=basis_kind, dimension=signal.nhat)
    part = partition(plan.ell, constants.gamma, constants.c, signal.nhat)
    u_hat = reconstruct(x, plan, basis, k, part)
    return relative_error(vectorize(signal), u_hat)
