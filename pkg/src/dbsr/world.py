"""Network ground truth: field geometry, node states, deployment."""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum


class Role(Enum):
    MEMBER = "member"
    CLUSTER_HEAD = "cluster_head"


@dataclass(frozen=True)
class Position:
    x: float
    y: float


def distance(a: Position, b: Position) -> float:
    """Euclidean distance in meters."""
    return math.hypot(a.x - b.x, a.y - b.y)


@dataclass
class NodeState:
    """One sensor node. A node whose energy reaches zero is permanently dead."""

    id: int
    pos: Position
    residual_energy: float
    alive: bool = True
    role: Role = Role.MEMBER


@dataclass(frozen=True)
class NetworkConfig:
    field_width: float = 200.0
    field_height: float = 200.0
    node_count: int = 200
    initial_energy: float = 1.0        # J per node
    data_packet_bits: int = 1600       # 200-byte data packet
    control_packet_bits: int = 0       # residual-energy report; 0 = piggybacked, free
    sensing_radius: float = 15.0       # carried in config; no algorithm consumes it
    e_elec: float = 50e-9              # J/bit, transceiver electronics
    e_fs: float = 10e-9                # J/bit/m^2, free-space amplifier
    e_da: float = 5e-9                 # J/bit per fused signal at a cluster head
    seed: int = 1

    def __post_init__(self):
        _positive("field_width", self.field_width)
        _positive("field_height", self.field_height)
        if self.node_count < 1:
            raise ValueError(f"node_count must be >= 1 (got {self.node_count})")
        _positive("initial_energy", self.initial_energy)
        if self.data_packet_bits < 1:
            raise ValueError(f"data_packet_bits must be >= 1 (got {self.data_packet_bits})")
        if self.control_packet_bits < 0:
            raise ValueError(f"control_packet_bits must be >= 0 (got {self.control_packet_bits})")
        _positive("sensing_radius", self.sensing_radius)
        _positive("e_elec", self.e_elec)
        _positive("e_fs", self.e_fs)
        if self.e_da < 0:
            raise ValueError(f"e_da must be >= 0 (got {self.e_da})")
        if not 0 <= self.seed < 2**64:
            raise ValueError(f"seed must be in [0, 2**64) (got {self.seed})")


def _positive(name, value):
    if not value > 0:
        raise ValueError(f"{name} must be > 0 (got {value})")


def deploy(config: NetworkConfig, rng) -> list[NodeState]:
    """Draw node positions independently and uniformly over the field.

    All nodes start alive at full energy in the member role. The same seeded
    rng yields the identical node list on every call.
    """
    xs = rng.uniform(0.0, config.field_width, config.node_count)
    ys = rng.uniform(0.0, config.field_height, config.node_count)
    return [
        NodeState(i, Position(float(x), float(y)), config.initial_energy)
        for i, (x, y) in enumerate(zip(xs, ys))
    ]


class World:
    """Mutable state of one simulation run: nodes, BS position, energy ledger.

    Owned exclusively by a single run; never shared across concurrent runs.
    """

    def __init__(self, config: NetworkConfig, rng):
        self.config = config
        self.nodes = deploy(config, rng)
        self.bs_pos = Position(config.field_width / 2.0, config.field_height / 2.0)
        self.ledger = []  # EnergyLedgerEntry, appended by protocol/sim code

    def alive_nodes(self) -> list[NodeState]:
        return [n for n in self.nodes if n.alive]

    def alive_count(self) -> int:
        return sum(1 for n in self.nodes if n.alive)

    def total_residual(self) -> float:
        return math.fsum(n.residual_energy for n in self.nodes)
