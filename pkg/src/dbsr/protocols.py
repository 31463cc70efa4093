"""One-round clustering and data delivery for LEACH- and HEED-style protocols.

Cluster internals follow the standard formulations: LEACH rotates heads with
a threshold probability and an epoch exclusion list; HEED seeds per-node head
probabilities from residual energy and doubles them until every node is a
head or has heard an announcement. Control traffic (advertisement, join,
scheduling) is charged nothing; only data packets and aggregation cost energy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from .energy import Cause, charge, radio_constants, rx_cost, tx_cost
from .world import Role, World, distance


class ProtocolKind(Enum):
    LEACH = "leach"
    HEED = "heed"


@dataclass(frozen=True)
class LeachParams:
    ch_fraction: float = 0.05  # desired fraction of heads per round

    def __post_init__(self):
        if not 0.0 < self.ch_fraction < 1.0:
            raise ValueError(f"ch_fraction must be in (0, 1) (got {self.ch_fraction})")

    @property
    def round_modulus(self) -> int:
        return math.ceil(1.0 / self.ch_fraction)


@dataclass(frozen=True)
class HeedParams:
    c_prob: float = 0.05
    p_min: float = 1e-4
    max_iterations: int = 20

    def __post_init__(self):
        if not 0.0 < self.p_min <= self.c_prob < 1.0:
            raise ValueError(
                f"need 0 < p_min <= c_prob < 1 (got p_min={self.p_min}, c_prob={self.c_prob})")
        if self.max_iterations < 1:
            raise ValueError(f"max_iterations must be >= 1 (got {self.max_iterations})")


@dataclass(frozen=True)
class ClusterAssignment:
    heads: tuple[int, ...]          # node ids, sorted
    membership: dict[int, int]      # member id -> head id (nearest alive head)


def _debit(world: World, node, amount: float, cause: Cause):
    world.ledger.append(charge(node, amount, cause))


def _build_assignment(world: World, head_ids) -> ClusterAssignment:
    heads = tuple(sorted(head_ids))
    head_nodes = [world.nodes[h] for h in heads]
    membership = {}
    for node in world.alive_nodes():
        if node.id in head_ids:
            node.role = Role.CLUSTER_HEAD
            continue
        node.role = Role.MEMBER
        if not heads:
            continue
        best_id, best_d = heads[0], distance(node.pos, head_nodes[0].pos)
        for h in head_nodes[1:]:
            d = distance(node.pos, h.pos)
            if d < best_d:
                best_id, best_d = h.id, d
        membership[node.id] = best_id
    return ClusterAssignment(heads, membership)


class LeachClustering:
    """Threshold-rotated head election with per-epoch exclusion."""

    def __init__(self, params: LeachParams | None = None):
        self.params = params or LeachParams()
        self._served: set[int] = set()

    def elect(self, world: World, round_index: int, rng) -> ClusterAssignment:
        p = self.params.ch_fraction
        modulus = self.params.round_modulus
        phase = round_index % modulus
        if phase == 0:
            self._served.clear()
        threshold = p / (1.0 - p * phase)
        head_ids = set()
        for node in world.alive_nodes():
            if node.id in self._served:
                continue
            if rng.random() < threshold:
                head_ids.add(node.id)
        self._served.update(head_ids)
        return _build_assignment(world, head_ids)


def heed_initial_prob(residual_energy: float, initial_energy: float,
                      params: HeedParams) -> float:
    """Starting head probability, scaled by residual energy and floored at p_min."""
    return max(params.p_min, params.c_prob * residual_energy / initial_energy)


class HeedClustering:
    """Iterative energy-scaled election.

    Uncovered nodes double their head probability each iteration; a node
    whose probability reaches one becomes a head outright. Announcements
    made in one iteration cover the remaining nodes from the next, so the
    loop ends with every alive node a head or covered.
    """

    def __init__(self, params: HeedParams | None = None):
        self.params = params or HeedParams()

    def elect(self, world: World, round_index: int, rng) -> ClusterAssignment:
        alive = world.alive_nodes()
        prob = {
            n.id: heed_initial_prob(n.residual_energy, world.config.initial_energy,
                                    self.params)
            for n in alive
        }
        head_ids: set[int] = set()
        covered = False
        for _ in range(self.params.max_iterations):
            contenders = [n.id for n in alive if n.id not in head_ids and not covered]
            if not contenders:
                break
            for nid in contenders:
                if prob[nid] >= 1.0 or rng.random() < prob[nid]:
                    head_ids.add(nid)
                else:
                    prob[nid] = min(1.0, 2.0 * prob[nid])
            covered = bool(head_ids)
        return _build_assignment(world, head_ids)


def make_clustering(kind: ProtocolKind, leach_params=None, heed_params=None):
    if kind is ProtocolKind.LEACH:
        return LeachClustering(leach_params)
    return HeedClustering(heed_params)


def run_round(world: World, assignment: ClusterAssignment, bs, config) -> float:
    """Charge all data-plane traffic for one round and return the joules spent.

    Members send one data packet to their head; heads receive, fuse what
    actually arrived plus their own reading, and forward one packet to the
    BS. With no heads, every alive node sends straight to the BS. A node
    that cannot afford an action pays what it has and dies, and that packet
    is lost (the receiver is not charged).
    """
    rc = radio_constants(config)
    bits = config.data_packet_bits
    nodes = world.nodes
    start = len(world.ledger)

    received = {h: 0 for h in assignment.heads}
    for member_id in sorted(assignment.membership):
        member = nodes[member_id]
        if not member.alive:
            continue
        head = nodes[assignment.membership[member_id]]
        cost = tx_cost(bits, distance(member.pos, head.pos), rc)
        delivered = member.residual_energy >= cost
        _debit(world, member, cost, Cause.TX)
        if delivered and head.alive:
            rx = rx_cost(bits, rc)
            heard = head.residual_energy >= rx
            _debit(world, head, rx, Cause.RX)
            if heard:
                received[head.id] += 1

    for head_id in assignment.heads:
        head = nodes[head_id]
        if not head.alive:
            continue
        if rc.e_da > 0:
            _debit(world, head, rc.e_da * bits * (received[head_id] + 1), Cause.AGGREGATE)
            if not head.alive:
                continue
        _debit(world, head, tx_cost(bits, distance(head.pos, bs), rc), Cause.TX)

    if not assignment.heads:
        for node in world.alive_nodes():
            _debit(world, node, tx_cost(bits, distance(node.pos, bs), rc), Cause.TX)

    return math.fsum(e.amount for e in world.ledger[start:])
