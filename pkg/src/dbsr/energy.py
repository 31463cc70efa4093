"""First-order radio cost model and the per-node energy debit ledger."""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum


class Cause(Enum):
    TX = "tx"
    RX = "rx"
    AGGREGATE = "aggregate"
    REPORT = "report"


@dataclass(frozen=True)
class RadioConstants:
    e_elec: float  # J/bit
    e_fs: float    # J/bit/m^2
    e_da: float    # J/bit per fused signal


@dataclass(frozen=True)
class EnergyLedgerEntry:
    node_id: int
    amount: float  # joules actually debited
    cause: Cause


def radio_constants(config) -> RadioConstants:
    return RadioConstants(config.e_elec, config.e_fs, config.e_da)


def tx_cost(k: int, d: float, rc: RadioConstants) -> float:
    """Energy to transmit k bits over d meters: electronics plus d^2 amplifier."""
    if k <= 0:
        raise ValueError(f"packet size must be positive (got {k} bits)")
    if d < 0:
        raise ValueError(f"distance must be nonnegative (got {d})")
    return rc.e_elec * k + rc.e_fs * k * d * d


def rx_cost(k: int, rc: RadioConstants) -> float:
    """Energy to receive k bits (electronics only)."""
    if k <= 0:
        raise ValueError(f"packet size must be positive (got {k} bits)")
    return rc.e_elec * k


def charge(node, amount: float, cause: Cause) -> EnergyLedgerEntry:
    """Debit a node, clamping at zero; a node that reaches zero dies.

    A node that cannot afford the full amount pays what it has. The entry
    records the actual debit, so ledger totals plus final residuals
    reconstruct the initial energy.
    """
    if not node.alive:
        raise RuntimeError(f"attempted to charge dead node {node.id}")
    if amount <= 0:
        raise ValueError(f"charge amount must be positive (got {amount})")
    before = node.residual_energy
    after = before - amount
    if after <= 0.0:
        after = 0.0
        node.alive = False
    node.residual_energy = after
    return EnergyLedgerEntry(node.id, before - after, cause)


def conservation_gap(ledger, nodes, initial_total: float) -> float:
    """Relative imbalance between debits plus residuals and the initial energy."""
    spent = math.fsum(e.amount for e in ledger)
    left = math.fsum(n.residual_energy for n in nodes)
    return abs(spent + left - initial_total) / initial_total
