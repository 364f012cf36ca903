"""Adaptive genetic algorithm for AP-UE antenna selection.

Four strategies share the same generation step:

* ``CMRC`` / ``COSLP`` -- one GA over the whole selection matrix, scored by
  the network sum SE under MRC / OSLP detection.
* ``SMRC`` -- AP ``l`` evolves only its own block in RA loop ``t``
  (``l = t mod L``), with the other blocks frozen at their current best.
* ``PMRC`` -- every AP runs its own GA on its block at the same time, scoring
  candidates as if it were the only AP.

Populations are boolean arrays of shape ``(pop_size, K, width)`` where the
width is ``L*N`` for the centralized strategies and ``N`` for per-AP blocks.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .channel import ChannelRealization
from .detection import MRC, OSLP, SumSEEvaluator
from .scenario import GaConfig
from .selection import ap_block, with_ap_block

STRATEGIES = ("CMRC", "COSLP", "SMRC", "PMRC")
CONVERGENCE_RTOL = 1e-3

Objective = Callable[[np.ndarray], np.ndarray]


class InvalidConfigurationError(ValueError):
    pass


# objectives ----------------------------------------------------------------

def objective_p1(D: np.ndarray, evaluator: SumSEEvaluator) -> np.ndarray:
    """Network sum SE at the end of the stripe."""
    return evaluator.sum_se(D)


def objective_p2(block: np.ndarray, frozen: np.ndarray, l: int, first_loop: bool,
                 evaluator: SumSEEvaluator, cumulative: bool = False) -> np.ndarray:
    """Sequential objective for AP ``l``'s candidate block(s).

    In the first loop the score is the sum SE after APs ``1..l`` (or, with
    ``cumulative``, the sum of the prefix sum SEs ``1..l``); afterwards it is
    the sum SE of the whole stripe with the candidate substituted.
    """
    if evaluator.scheme == MRC:
        upto = l + 1 if first_loop else None
        return evaluator.substituted_sum_se(frozen, l, block, upto, cumulative and first_loop)
    N = evaluator.realization.n_antennas
    D = with_ap_block(frozen, l, block, N)
    if first_loop:
        prefix = evaluator.prefix_sum_se(D, upto=l + 1)
        return prefix.sum(axis=-1) if cumulative else prefix[..., -1]
    return evaluator.sum_se(D)


def objective_p3(block: np.ndarray, l: int, evaluator: SumSEEvaluator) -> np.ndarray:
    """Sum SE seen by AP ``l`` alone, ignoring every other AP."""
    return evaluator.local_sum_se(block, l)


# operators -----------------------------------------------------------------

def tournament_select(fitness: np.ndarray, size: int, rng: np.random.Generator, n: int = 1) -> np.ndarray:
    """Winners of ``n`` tournaments, each over ``size`` distinct random entrants."""
    pop = len(fitness)
    entrants = np.argsort(rng.random((n, pop)), axis=1)[:, :size]
    return entrants[np.arange(n), np.argmax(fitness[entrants], axis=1)]


def select_parents(fitness: np.ndarray, size: int, rng: np.random.Generator) -> np.ndarray:
    """``(pop, 2)`` parent index pairs from ``2*pop`` shuffled tournament winners."""
    pop = len(fitness)
    winners = rng.permutation(tournament_select(fitness, size, rng, 2 * pop))
    pairs = winners.reshape(pop, 2)
    for i in np.flatnonzero(pairs[:, 0] == pairs[:, 1]):
        while pairs[i, 1] == pairs[i, 0]:
            pairs[i, 1] = tournament_select(fitness, size, rng)[0] if size < pop else rng.integers(pop)
    return pairs


def crossover(parent_a: np.ndarray, parent_b: np.ndarray, p_r: float, rng: np.random.Generator,
              mask: np.ndarray | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Uniform masked crossover; with probability ``1 - p_r`` the parents are copied."""
    if rng.random() >= p_r:
        return parent_a.copy(), parent_b.copy()
    if mask is None:
        mask = rng.random(parent_a.shape) < 0.5
    return np.where(mask, parent_a, parent_b), np.where(mask, parent_b, parent_a)


def mutate(individual: np.ndarray, p_m: float, rng: np.random.Generator) -> np.ndarray:
    """Flip every gene independently with probability ``p_m``."""
    return individual ^ (rng.random(individual.shape) < p_m)


def mutate_single_gene(population: np.ndarray, p_m: float, rng: np.random.Generator) -> np.ndarray:
    """With probability ``p_m`` flip one uniformly chosen gene of each individual."""
    pop = len(population)
    flat = population.reshape(pop, -1).copy()
    hit = np.flatnonzero(rng.random(pop) < p_m)
    genes = rng.integers(flat.shape[1], size=len(hit))
    flat[hit, genes] ^= True
    return flat.reshape(population.shape)


def _batch_crossover(a, b, p_r, rng):
    do = rng.random(len(a)) < p_r
    mask = rng.random(a.shape) < 0.5
    mask |= ~do[:, None, None]
    return np.where(mask, a, b), np.where(mask, b, a)


def adapt_probabilities(n_stagnant: int, p_r: float, p_m: float, cfg: GaConfig) -> tuple[float, float]:
    if n_stagnant >= cfg.adapt_after:
        return min(p_r + cfg.crossover_step, cfg.crossover_max), min(p_m + cfg.mutation_step, cfg.mutation_max)
    return cfg.crossover_prob, cfg.mutation_prob


@dataclass
class Generation:
    population: np.ndarray
    fitness: np.ndarray
    offspring_size: int


def evolve_generation(population: np.ndarray, fitness: np.ndarray, objective: Objective, cfg: GaConfig,
                      p_r: float, p_m: float, rng: np.random.Generator) -> Generation:
    """One GA generation with a ``3 * pop`` offspring pool and two elite slots."""
    pop = len(population)
    pairs = select_parents(fitness, cfg.tournament_size, rng)
    c1, c2 = _batch_crossover(population[pairs[:, 0]], population[pairs[:, 1]], p_r, rng)
    children = np.concatenate([c1, c2])
    if cfg.mutation == "single_gene":
        children = mutate_single_gene(children, p_m, rng)
    else:
        children = mutate(children, p_m, rng)
    pool = np.concatenate([children, population])
    pool_fit = np.concatenate([objective(children), fitness])
    rest = tournament_select(pool_fit, cfg.tournament_size, rng, pop - 2)
    keep = np.concatenate([[np.argmax(pool_fit)], rest])
    new_pop = np.concatenate([population[[np.argmax(fitness)]], pool[keep]])
    new_fit = np.concatenate([[fitness.max()], pool_fit[keep]])
    return Generation(new_pop, new_fit, len(pool))


# runs ----------------------------------------------------------------------

@dataclass
class RunTrace:
    """Per RA loop: the strategy's own best objective and the true network sum SE."""

    strategy: str
    objective: np.ndarray
    true_se: np.ndarray
    final_D: np.ndarray
    seed: object = None
    first_loop_generations: int = 0
    evaluations: int = 0
    local_evaluations: int = 0
    full_evaluations: int = 0
    macs: int = 0
    extra: dict = field(default_factory=dict)

    @property
    def n_loops(self) -> int:
        return len(self.objective)

    def loops_to_convergence(self, rtol: float = CONVERGENCE_RTOL) -> int:
        return loops_to_convergence(self.objective, rtol)


def loops_to_convergence(curve: np.ndarray, rtol: float = CONVERGENCE_RTOL) -> int:
    """First RA loop (1-based) from which the curve stays within ``rtol`` of its final value."""
    curve = np.asarray(curve, float)
    if len(curve) == 0:
        return 0
    final = curve[-1]
    off = np.abs(curve - final) > rtol * abs(final)
    idx = np.flatnonzero(off)
    return int(idx[-1] + 2) if len(idx) else 1


def _random_population(rng, pop, shape, density=0.5):
    return rng.random((pop,) + shape) < density


def _seed_individual(population, individual, rng):
    population[rng.integers(len(population))] = individual


def check_strategy(strategy: str) -> str:
    strategy = strategy.upper()
    if strategy not in STRATEGIES:
        if strategy in ("SOSLP", "POSLP"):
            raise InvalidConfigurationError("OSLP detection is only available to the centralized strategy")
        raise InvalidConfigurationError(f"unknown strategy {strategy!r}; expected one of {STRATEGIES}")
    return strategy


def run_strategy(strategy: str, realization: ChannelRealization, cfg: GaConfig,
                 rng: np.random.Generator, warm_start: np.ndarray | None = None) -> RunTrace:
    strategy = check_strategy(strategy)
    K, L, N = realization.estimate.shape
    if warm_start is not None:
        warm_start = np.asarray(warm_start, bool)
        if warm_start.shape != (K, L * N):
            raise InvalidConfigurationError(f"warm start has shape {warm_start.shape}, expected {(K, L * N)}")
    if strategy in ("CMRC", "COSLP"):
        return _run_centralized(strategy, realization, cfg, rng, warm_start)
    if strategy == "SMRC":
        return _run_sequential(realization, cfg, rng, warm_start)
    return _run_parallel(realization, cfg, rng, warm_start)


def _run_centralized(strategy, realization, cfg, rng, warm_start):
    K, L, N = realization.estimate.shape
    ev = SumSEEvaluator(realization, OSLP if strategy == "COSLP" else MRC)
    pop = _random_population(rng, cfg.pop_size, (K, L * N), cfg.init_density)
    if warm_start is not None:
        _seed_individual(pop, warm_start, rng)
    fit = objective_p1(pop, ev)
    p_r, p_m = cfg.crossover_prob, cfg.mutation_prob
    n_i, t = 0, 0
    objective, true_se = [], []
    while t < cfg.max_generations and n_i < cfg.max_stagnant:
        p_r, p_m = adapt_probabilities(n_i, p_r, p_m, cfg)
        prev = fit.max()
        gen = evolve_generation(pop, fit, lambda x: objective_p1(x, ev), cfg, p_r, p_m, rng)
        pop, fit = gen.population, gen.fitness
        t += 1
        n_i = n_i + 1 if abs(fit.max() - prev) < cfg.tolerance else 0
        objective.append(fit.max())
        true_se.append(fit.max())
    best = pop[np.argmax(fit)].copy()
    return RunTrace(strategy, np.array(objective), np.array(true_se), best,
                    evaluations=ev.evaluations, full_evaluations=ev.evaluations, macs=ev.macs)


def _run_sequential(realization, cfg, rng, warm_start):
    K, L, N = realization.estimate.shape
    ev = SumSEEvaluator(realization, MRC)
    report = SumSEEvaluator(realization, MRC)
    best = np.zeros((K, L * N), bool) if warm_start is None else warm_start.copy()
    subpops: list[np.ndarray | None] = [None] * L
    p_r, p_m = cfg.crossover_prob, cfg.mutation_prob
    n_i, t = 0, 0
    objective, true_se = [], []
    first_loop_gens = 0
    prev = None
    while t < L * cfg.max_generations and n_i < L * cfg.max_stagnant:
        l = t % L
        first_loop = t < L
        first_loop_gens += first_loop
        if subpops[l] is None:
            subpops[l] = _random_population(rng, cfg.pop_size, (K, N), cfg.init_density)
            _seed_individual(subpops[l], ap_block(best, l, N), rng)

        def f(x, l=l, first_loop=first_loop, frozen=best):
            return objective_p2(x, frozen, l, first_loop, ev, cfg.cumulative_first_loop)

        p_r, p_m = adapt_probabilities(n_i, p_r, p_m, cfg)
        fit = f(subpops[l])
        gen = evolve_generation(subpops[l], fit, f, cfg, p_r, p_m, rng)
        subpops[l] = gen.population
        value = gen.fitness.max()
        best = with_ap_block(best, l, gen.population[np.argmax(gen.fitness)], N)
        t += 1
        n_i = n_i + 1 if prev is not None and abs(value - prev) < cfg.tolerance else 0
        prev = value
        objective.append(value)
        true_se.append(report.sum_se(best))
    return RunTrace("SMRC", np.array(objective), np.array(true_se), best,
                    first_loop_generations=first_loop_gens, evaluations=ev.evaluations,
                    full_evaluations=ev.evaluations, macs=ev.macs)


def _run_parallel(realization, cfg, rng, warm_start):
    K, L, N = realization.estimate.shape
    ev = SumSEEvaluator(realization, MRC)
    report = SumSEEvaluator(realization, MRC)
    rngs = rng.spawn(L)
    subpops, fits = [], []
    for l in range(L):
        sp = _random_population(rngs[l], cfg.pop_size, (K, N), cfg.init_density)
        if warm_start is not None:
            _seed_individual(sp, ap_block(warm_start, l, N), rngs[l])
        subpops.append(sp)
        fits.append(objective_p3(sp, l, ev))
    p_r = np.full(L, cfg.crossover_prob)
    p_m = np.full(L, cfg.mutation_prob)
    n_i = np.zeros(L, int)
    t = 0
    objective, true_se = [], []
    while t < cfg.max_generations and not np.all(n_i >= cfg.max_stagnant):
        for l in range(L):
            if n_i[l] >= cfg.max_stagnant:
                continue  # this AP has output its solution
            p_r[l], p_m[l] = adapt_probabilities(n_i[l], p_r[l], p_m[l], cfg)
            prev = fits[l].max()
            gen = evolve_generation(subpops[l], fits[l], lambda x, l=l: objective_p3(x, l, ev), cfg,
                                    p_r[l], p_m[l], rngs[l])
            subpops[l], fits[l] = gen.population, gen.fitness
            n_i[l] = n_i[l] + 1 if abs(fits[l].max() - prev) < cfg.tolerance else 0
        t += 1
        best = assemble_blocks([sp[np.argmax(f)] for sp, f in zip(subpops, fits)])
        objective.append(sum(f.max() for f in fits))
        true_se.append(report.sum_se(best))
    best = assemble_blocks([sp[np.argmax(f)] for sp, f in zip(subpops, fits)])
    return RunTrace("PMRC", np.array(objective), np.array(true_se), best,
                    evaluations=ev.local_evaluations, local_evaluations=ev.local_evaluations,
                    full_evaluations=ev.evaluations, macs=ev.macs,
                    extra={"stagnation": n_i.copy()})


def assemble_blocks(blocks: list[np.ndarray]) -> np.ndarray:
    return np.concatenate(blocks, axis=-1)
