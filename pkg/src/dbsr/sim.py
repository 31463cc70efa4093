"""Round loop: BS repositioning, election, data delivery, lifetime metrics."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .energy import Cause, charge, conservation_gap, radio_constants, tx_cost
from .ga import GaParams, WeightedSite, run_ga, weight_of
from .protocols import ProtocolKind, make_clustering, run_round
from .world import NetworkConfig, Position, World


@dataclass(frozen=True)
class StaticPolicy:
    """Fixed BS position; defaults to the field center."""

    pos: Position | None = None


@dataclass(frozen=True)
class DbsrPolicy:
    """Reposition the BS every round to the GA optimum for current energies."""

    ga_params: GaParams = GaParams()


@dataclass(frozen=True)
class RoundMetrics:
    round: int
    bs_pos: Position
    total_residual: float
    alive_count: int
    consumed_this_round: float
    heads_count: int


@dataclass(frozen=True)
class LifetimeSummary:
    fnd_round: int | None   # first round after which a node has died
    hna_round: int | None   # first round after which alive count < ceil(n/2)
    last_round: int


def _static_position(policy: StaticPolicy, config: NetworkConfig) -> Position:
    if policy.pos is None:
        return Position(config.field_width / 2.0, config.field_height / 2.0)
    p = policy.pos
    if not (0 <= p.x <= config.field_width and 0 <= p.y <= config.field_height):
        raise ValueError(f"static BS position ({p.x}, {p.y}) lies outside the field")
    return p


def reposition(world: World, policy, rng) -> Position:
    """Choose this round's BS position, charging report traffic if configured.

    Residual-energy reports are free by default (piggybacked); a nonzero
    control_packet_bits charges each alive node one control transmission to
    the current BS position. The DBSR policy weights every alive node by its
    quantized residual energy and runs the GA; a static policy never touches
    the rng stream.
    """
    config = world.config
    if config.control_packet_bits > 0:
        rc = radio_constants(config)
        for node in world.alive_nodes():
            cost = tx_cost(config.control_packet_bits,
                           _dist(node.pos, world.bs_pos), rc)
            world.ledger.append(charge(node, cost, Cause.REPORT))
    if isinstance(policy, StaticPolicy):
        return _static_position(policy, config)
    alive = world.alive_nodes()
    if not alive:
        return world.bs_pos
    sites = [WeightedSite(n.pos, weight_of(n.residual_energy, config.initial_energy))
             for n in alive]
    params = _resolved_ga_params(policy.ga_params, config.node_count)
    pos, _ = run_ga(sites, params, config.field_width, config.field_height, rng)
    return pos


def _dist(a: Position, b: Position) -> float:
    return math.hypot(a.x - b.x, a.y - b.y)


def _resolved_ga_params(params: GaParams, node_count: int) -> GaParams:
    pop = params.population_size if params.population_size is not None else node_count
    gens = params.generations if params.generations is not None else node_count
    if pop == params.population_size and gens == params.generations:
        return params
    return replace(params, population_size=pop, generations=gens)


def simulate(config: NetworkConfig, protocol: ProtocolKind, policy, max_rounds: int,
             *, leach_params=None, heed_params=None):
    """Run one seeded lifetime simulation.

    Each round: reports, reposition, head election, data delivery, metric
    capture. Stops at max_rounds or when no node is alive. Deployment,
    protocol, and GA randomness come from three streams spawned from the
    config seed, so a static run is untouched by anything the GA would draw.
    Raises if the energy ledger fails to balance, so every caller gets the
    conservation check for free.
    """
    if max_rounds < 0:
        raise ValueError(f"max_rounds must be >= 0 (got {max_rounds})")
    if isinstance(policy, StaticPolicy):
        _static_position(policy, config)  # reject out-of-field baselines early
    deploy_seq, proto_seq, ga_seq = np.random.SeedSequence(config.seed).spawn(3)
    world = World(config, np.random.default_rng(deploy_seq))
    rng_proto = np.random.default_rng(proto_seq)
    rng_ga = np.random.default_rng(ga_seq)
    if isinstance(policy, StaticPolicy):
        world.bs_pos = _static_position(policy, config)
    clustering = make_clustering(protocol, leach_params, heed_params)

    n = config.node_count
    half = -(-n // 2)
    metrics: list[RoundMetrics] = []
    fnd = hna = None
    for r in range(1, max_rounds + 1):
        if world.alive_count() == 0:
            break
        ledger_start = len(world.ledger)
        world.bs_pos = reposition(world, policy, rng_ga)
        heads_count = 0
        if world.alive_count() > 0:
            assignment = clustering.elect(world, r - 1, rng_proto)
            run_round(world, assignment, world.bs_pos, config)
            heads_count = len(assignment.heads)
        alive = world.alive_count()
        consumed = math.fsum(e.amount for e in world.ledger[ledger_start:])
        metrics.append(RoundMetrics(r, world.bs_pos, world.total_residual(),
                                    alive, consumed, heads_count))
        if fnd is None and alive < n:
            fnd = r
        if hna is None and alive < half:
            hna = r

    gap = conservation_gap(world.ledger, world.nodes, n * config.initial_energy)
    if gap > 1e-12:
        raise RuntimeError(f"energy ledger out of balance (relative gap {gap:.3e})")
    return metrics, LifetimeSummary(fnd, hna, len(metrics))


@dataclass(frozen=True)
class RunResult:
    run_index: int
    seed: int
    metrics: list[RoundMetrics]
    summary: LifetimeSummary


@dataclass(frozen=True)
class BatchResult:
    results: list[RunResult]
    mean_total_residual: list[float]  # per round, runs past network death frozen
    mean_alive: list[float]
    fnd_median: float
    fnd_mean: float
    hna_median: float
    hna_mean: float


def _lifetime_stats(values):
    # undefined lifetimes (no death within the horizon) rank as +inf
    vals = sorted(math.inf if v is None else float(v) for v in values)
    k = len(vals)
    median = vals[k // 2] if k % 2 else (vals[k // 2 - 1] + vals[k // 2]) / 2.0
    return median, math.fsum(vals) / k


def batch(config: NetworkConfig, protocol: ProtocolKind, policy, runs: int,
          max_rounds: int, *, leach_params=None, heed_params=None) -> BatchResult:
    """Average `runs` simulations seeded seed, seed+1, ... deterministically."""
    if runs < 1:
        raise ValueError(f"runs must be >= 1 (got {runs})")
    results = []
    for i in range(runs):
        cfg = replace(config, seed=config.seed + i)
        metrics, summary = simulate(cfg, protocol, policy, max_rounds,
                                    leach_params=leach_params, heed_params=heed_params)
        results.append(RunResult(i, cfg.seed, metrics, summary))

    horizon = max((len(r.metrics) for r in results), default=0)
    mean_residual, mean_alive = [], []
    for t in range(horizon):
        rows = [r.metrics[t] if t < len(r.metrics) else r.metrics[-1] for r in results]
        mean_residual.append(math.fsum(m.total_residual for m in rows) / runs)
        mean_alive.append(math.fsum(m.alive_count for m in rows) / runs)

    fnd_median, fnd_mean = _lifetime_stats([r.summary.fnd_round for r in results])
    hna_median, hna_mean = _lifetime_stats([r.summary.hna_round for r in results])
    return BatchResult(results, mean_residual, mean_alive,
                       fnd_median, fnd_mean, hna_median, hna_mean)
