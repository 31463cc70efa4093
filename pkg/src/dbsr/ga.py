"""Base-station placement search.

A candidate BS position is a 16-bit genome (8 bits per axis, MSB first)
decoding to an integer grid point, clamped to the field. The objective is the
sum over alive nodes of Euclidean distance weighted by the inverse of the
node's quantized residual energy, so low-energy nodes pull the BS toward
them. The search is a generational GA with fitness-proportionate selection,
a two-segment crossover (one cut per axis), and a paired bit-flip mutation.
An exhaustive scan of the full grid serves as the optimality oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .world import Position

GENOME_BITS = 16
_BIT_WEIGHTS = 2 ** np.arange(7, -1, -1)  # MSB-first byte weights


@dataclass(frozen=True)
class WeightedSite:
    """A node position with its quantized residual-energy weight in 1..10."""

    pos: Position
    w: int

    def __post_init__(self):
        if not 1 <= self.w <= 10:
            raise ValueError(f"site weight must be in [1, 10] (got {self.w})")


@dataclass(frozen=True)
class GaParams:
    population_size: int | None = None  # None: match the network node count
    generations: int | None = None      # None: match the network node count
    crossover_rate: float = 0.80
    mutation_rate: float = 0.09
    big_m: float | None = None          # None: site_count * sqrt(2) * max(field dims)
    elitism: int = 1
    selection_prob: float = 0.90        # stored for completeness; no role in
                                        # cumulative-inversion roulette

    def __post_init__(self):
        if not 0.0 <= self.crossover_rate <= 1.0:
            raise ValueError(f"crossover_rate must be in [0, 1] (got {self.crossover_rate})")
        if not 0.0 <= self.mutation_rate <= 1.0:
            raise ValueError(f"mutation_rate must be in [0, 1] (got {self.mutation_rate})")
        if self.population_size is not None and self.population_size < 2:
            raise ValueError(f"population_size must be >= 2 (got {self.population_size})")
        if self.generations is not None and self.generations < 0:
            raise ValueError(f"generations must be >= 0 (got {self.generations})")
        if self.elitism < 0:
            raise ValueError(f"elitism must be >= 0 (got {self.elitism})")
        if self.big_m is not None and self.big_m <= 0:
            raise ValueError(f"big_m must be > 0 (got {self.big_m})")


# ---------------------------------------------------------------------------
# Genome codec
# ---------------------------------------------------------------------------

def random_chromosome(rng) -> np.ndarray:
    return rng.integers(0, 2, size=GENOME_BITS, dtype=np.uint8)


def encode(x: int, y: int) -> np.ndarray:
    """Pack integer coordinates in 0..255 into a 16-bit genome."""
    if not (0 <= x <= 255 and 0 <= y <= 255):
        raise ValueError(f"coordinates must be in [0, 255] (got {x}, {y})")
    bits = np.empty(GENOME_BITS, dtype=np.uint8)
    bits[:8] = (x >> np.arange(7, -1, -1)) & 1
    bits[8:] = (y >> np.arange(7, -1, -1)) & 1
    return bits


def decode_raw(c: np.ndarray) -> tuple[int, int]:
    """Unsigned integer value of each 8-bit half, before field clamping."""
    return int(c[:8] @ _BIT_WEIGHTS), int(c[8:] @ _BIT_WEIGHTS)


def decode(c: np.ndarray, field_width: float, field_height: float) -> Position:
    """Decoded grid point, clamped onto the field boundary."""
    x, y = decode_raw(c)
    return Position(min(float(x), field_width), min(float(y), field_height))


# ---------------------------------------------------------------------------
# Objective
# ---------------------------------------------------------------------------

def weight_of(residual_energy: float, initial_energy: float) -> int:
    """Quantize a residual-energy fraction to an integer weight in 1..10."""
    if residual_energy <= 0:
        raise ValueError("weight_of expects an alive node (residual_energy > 0)")
    if residual_energy > initial_energy:
        raise ValueError("residual_energy exceeds initial_energy")
    return min(10, max(1, math.ceil(10.0 * residual_energy / initial_energy)))


def _site_arrays(sites):
    if not sites:
        raise ValueError("site list is empty (no alive nodes)")
    sx = np.array([s.pos.x for s in sites])
    sy = np.array([s.pos.y for s in sites])
    inv_w = np.array([1.0 / s.w for s in sites])
    return sx, sy, inv_w


def abf(candidate: Position, sites) -> float:
    """Sum over sites of distance to the candidate, weighted by 1/w."""
    sx, sy, inv_w = _site_arrays(sites)
    return float(np.hypot(sx - candidate.x, sy - candidate.y) @ inv_w)


def fitness(candidate: Position, sites, big_m: float) -> float:
    """big_m minus the weighted distance sum; positive when big_m is large enough."""
    return big_m - abf(candidate, sites)


def default_big_m(site_count: int, field_width: float, field_height: float) -> float:
    """Upper bound on the objective: every term is at most the field diagonal."""
    return site_count * math.sqrt(2.0) * max(field_width, field_height)


# ---------------------------------------------------------------------------
# Selection and variation
# ---------------------------------------------------------------------------

def selection_probabilities(fitnesses) -> list[float]:
    """Fitness-proportionate probabilities, summing to one."""
    f = np.asarray(fitnesses, dtype=float)
    if f.size == 0:
        raise ValueError("fitness list is empty")
    if np.any(f <= 0):
        raise ValueError("all fitness values must be positive")
    return (f / f.sum()).tolist()


def roulette_select(probs, rng) -> int:
    """Cumulative-sum inversion of one uniform draw."""
    cum = np.cumsum(probs)
    u = rng.random()
    return min(int(np.searchsorted(cum, u, side="right")), len(cum) - 1)


def crossover(a: np.ndarray, b: np.ndarray, rng) -> tuple[np.ndarray, np.ndarray]:
    """Exchange the X-half suffix and the Y-half suffix at independent cuts.

    One cut point is drawn per axis, each uniform in 1..7; parents are left
    unmodified.
    """
    cut_x = int(rng.integers(1, 8))
    cut_y = int(rng.integers(1, 8))
    c1, c2 = a.copy(), b.copy()
    c1[cut_x:8], c2[cut_x:8] = b[cut_x:8], a[cut_x:8]
    c1[8 + cut_y:], c2[8 + cut_y:] = b[8 + cut_y:], a[8 + cut_y:]
    return c1, c2


def mutate(c: np.ndarray, rng) -> np.ndarray:
    """Flip one uniformly chosen bit in each 8-bit half (always exactly two)."""
    i = int(rng.integers(0, 8))
    j = 8 + int(rng.integers(0, 8))
    out = c.copy()
    out[i] ^= 1
    out[j] ^= 1
    return out


# ---------------------------------------------------------------------------
# Search loop and oracle
# ---------------------------------------------------------------------------

class _ObjectiveTable:
    """Memoized objective over the 65536-point genome grid for one site set.

    Converged populations re-evaluate the same few genomes every generation,
    so caching by decoded grid point cuts the distance work by an order of
    magnitude without changing any value.
    """

    def __init__(self, sx, sy, inv_w, field_width, field_height):
        self.sx, self.sy, self.inv_w = sx, sy, inv_w
        self.field_width, self.field_height = field_width, field_height
        self.values = np.full(1 << GENOME_BITS, np.nan)

    def eval_population(self, pop: np.ndarray) -> np.ndarray:
        keys = (pop[:, :8] @ _BIT_WEIGHTS) << 8 | (pop[:, 8:] @ _BIT_WEIGHTS)
        vals = self.values[keys]
        miss = np.isnan(vals)
        if miss.any():
            new = np.unique(keys[miss])
            xs = np.minimum(new >> 8, self.field_width)
            ys = np.minimum(new & 0xFF, self.field_height)
            d = np.hypot(xs[:, None] - self.sx[None, :], ys[:, None] - self.sy[None, :])
            self.values[new] = d @ self.inv_w
            vals = self.values[keys]
        return vals


def run_ga(sites, params: GaParams, field_width: float, field_height: float, rng,
           on_generation=None) -> tuple[Position, float]:
    """Evolve BS candidates and return the best-ever position and its objective.

    Each generation copies the `elitism` best genomes unchanged, then fills
    the population with children of roulette-selected parent pairs; each pair
    crosses over with probability crossover_rate (clones otherwise) and each
    child mutates with probability mutation_rate. Draws are consumed in a
    fixed order, so identical (sites, params, seed) reproduce the result.
    `on_generation(gen, best_abf)` is invoked after each generation.
    """
    sx, sy, inv_w = _site_arrays(sites)
    pop_size = params.population_size if params.population_size is not None else len(sites)
    generations = params.generations if params.generations is not None else len(sites)
    if pop_size < 2:
        raise ValueError(f"population_size must be >= 2 (got {pop_size})")
    if params.elitism >= pop_size:
        raise ValueError("elitism must be smaller than the population size")
    big_m = params.big_m if params.big_m is not None else default_big_m(
        len(sites), field_width, field_height)

    table = _ObjectiveTable(sx, sy, inv_w, field_width, field_height)
    pop = rng.integers(0, 2, size=(pop_size, GENOME_BITS), dtype=np.uint8)
    abf_vals = table.eval_population(pop)
    best = int(np.argmin(abf_vals))
    best_abf = float(abf_vals[best])
    best_bits = pop[best].copy()

    n_children = pop_size - params.elitism
    n_pairs = (n_children + 1) // 2
    cols = np.arange(GENOME_BITS)
    for gen in range(generations):
        fit = big_m - abf_vals
        if np.any(fit <= 0):
            raise ValueError("big_m does not exceed every achievable objective value")
        new_pop = np.empty_like(pop)
        if params.elitism:
            keep = np.argsort(abf_vals, kind="stable")[:params.elitism]
            new_pop[:params.elitism] = pop[keep]
        if n_children > 0:
            cum = np.cumsum(fit)
            cum /= cum[-1]
            picks = np.minimum(
                np.searchsorted(cum, rng.random(2 * n_pairs), side="right"),
                pop_size - 1)
            pa, pb = pop[picks[0::2]], pop[picks[1::2]]
            do_cx = rng.random(n_pairs) < params.crossover_rate
            cut_x = rng.integers(1, 8, size=n_pairs)
            cut_y = rng.integers(1, 8, size=n_pairs)
            swap = ((cols >= cut_x[:, None]) & (cols < 8)) | (cols >= 8 + cut_y[:, None])
            swap &= do_cx[:, None]
            children = np.empty((2 * n_pairs, GENOME_BITS), dtype=np.uint8)
            children[0::2] = np.where(swap, pb, pa)
            children[1::2] = np.where(swap, pa, pb)
            children = children[:n_children]
            do_mut = np.nonzero(rng.random(n_children) < params.mutation_rate)[0]
            px = rng.integers(0, 8, size=n_children)
            py = rng.integers(8, 16, size=n_children)
            children[do_mut, px[do_mut]] ^= 1
            children[do_mut, py[do_mut]] ^= 1
            new_pop[params.elitism:] = children
        pop = new_pop
        abf_vals = table.eval_population(pop)
        gen_best = int(np.argmin(abf_vals))
        if abf_vals[gen_best] < best_abf:
            best_abf = float(abf_vals[gen_best])
            best_bits = pop[gen_best].copy()
        if on_generation is not None:
            on_generation(gen, best_abf)

    return decode(best_bits, field_width, field_height), best_abf


def exhaustive_oracle(sites, field_width: float, field_height: float) -> tuple[Position, float]:
    """Global minimum of the objective over every decodable grid position.

    Scans all clamped decodings of the 16-bit genome space; ties break toward
    the smallest x, then the smallest y.
    """
    sx, sy, inv_w = _site_arrays(sites)
    xs = np.unique(np.minimum(np.arange(256.0), field_width))
    ys = np.unique(np.minimum(np.arange(256.0), field_height))
    total = np.zeros((xs.size, ys.size))
    for x0, y0, iw in zip(sx, sy, inv_w):
        total += iw * np.hypot(xs[:, None] - x0, ys[None, :] - y0)
    ix, iy = np.unravel_index(np.argmin(total), total.shape)
    return Position(float(xs[ix]), float(ys[iy])), float(total[ix, iy])
