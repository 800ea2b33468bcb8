"""Weighted-sum genetic algorithm over synonymous codon choices."""
from __future__ import annotations

import bisect
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from itertools import accumulate
from typing import Callable, Optional

import numpy as np

from .codon_data import CodonTables, CodonUsageTable
from .fasta import parse_fasta
from .metrics import Evaluation, MetricConfig, MetricVector, evaluate_construct, immune_motif_count
from .seq import STANDARD_CODE, Construct, translate, validate_cds

log = logging.getLogger(__name__)

METRIC_KEYS = ("cai", "tai", "cpb", "mfe_global", "unpaired30", "gc", "immune", "utr_balance", "motif", "embed")

DEFAULT_WEIGHTS = dict(cai=0.20, tai=0.15, cpb=0.10, mfe_global=0.15, unpaired30=0.10, gc=0.10,
                       immune=0.10, utr_balance=0.03, motif=0.02, embed=0.05)


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class FitnessWeights:
    w: dict = field(default_factory=lambda: dict(DEFAULT_WEIGHTS))

    def __post_init__(self):
        unknown = set(self.w) - set(METRIC_KEYS)
        if unknown:
            raise ConfigError(f"unknown fitness weight(s): {', '.join(sorted(unknown))}")
        w = {k: float(self.w.get(k, 0.0)) for k in METRIC_KEYS}
        if any(v < 0 for v in w.values()):
            raise ConfigError("fitness weights must be nonnegative")
        total = sum(w.values())
        if abs(total - 1.0) > 1e-9:
            raise ConfigError(f"fitness weights sum to {total!r}, not 1")
        object.__setattr__(self, "w", w)


@dataclass(frozen=True)
class Bands:
    """Target windows used to turn raw metrics into scores in [0, 1]."""

    gc_lo: float = 0.55
    gc_hi: float = 0.70
    gc_halfwidth: float = 0.15
    mfe_lo: float = -360.0
    mfe_hi: float = -330.0
    mfe_halfwidth: float = 100.0
    immune_max: float = 100.0
    motif_lo: float = 90.0
    motif_hi: float = 110.0
    motif_halfwidth: float = 50.0
    utr_lo: float = 0.6
    utr_hi: float = 0.7
    utr_halfwidth: float = 0.3
    cpb_scale: float = 1.0


def band_score(x: float, lo: float, hi: float, halfwidth: float) -> float:
    """1 inside [lo, hi], falling linearly to 0 over ``halfwidth`` outside it."""
    if lo <= x <= hi:
        return 1.0
    dist = lo - x if x < lo else x - hi
    return max(0.0, 1.0 - dist / halfwidth)


def logistic(x: float) -> float:
    if x >= 0:
        return 1.0 / (1.0 + math.exp(-x))
    z = math.exp(x)
    return z / (1.0 + z)


def normalize_metrics(m: MetricVector, bands: Bands = Bands()) -> dict:
    return {
        "cai": m.cai,
        "tai": m.tai,
        "cpb": logistic(m.cpb_raw / bands.cpb_scale),
        "mfe_global": band_score(m.mfe_global, bands.mfe_lo, bands.mfe_hi, bands.mfe_halfwidth),
        "unpaired30": m.unpaired30,
        "gc": band_score(m.gc, bands.gc_lo, bands.gc_hi, bands.gc_halfwidth),
        "immune": 1.0 - min(1.0, m.immune_raw / bands.immune_max),
        "utr_balance": band_score(m.utr_balance, bands.utr_lo, bands.utr_hi, bands.utr_halfwidth),
        "motif": band_score(m.motif_total, bands.motif_lo, bands.motif_hi, bands.motif_halfwidth),
        "embed": m.embed_sim,
    }


def weighted_sum(scores: dict, weights) -> float:
    if not isinstance(weights, FitnessWeights):
        weights = FitnessWeights(dict(weights))
    return sum(weights.w[k] * scores.get(k, 0.0) for k in METRIC_KEYS)


def fitness(m: MetricVector, weights, bands: Bands = Bands()) -> float:
    return min(1.0, max(0.0, weighted_sum(normalize_metrics(m, bands), weights)))


@dataclass
class GaConfig:
    pop_init: int = 220
    pop_cap: int = 1000
    growth_step: int = 20
    mutation_rate: float = 0.2
    per_codon_rate: float = 0.01
    crossover_rate: float = 0.8
    tournament_size: int = 3
    elitism: int = 2
    plateau_eps: float = 1e-4
    plateau_window: int = 5
    max_generations: int = 60
    rng_seed: int = 0

    def __post_init__(self):
        if not 1 <= self.pop_init <= self.pop_cap:
            raise ConfigError("need 1 <= pop_init <= pop_cap")
        for name in ("mutation_rate", "per_codon_rate", "crossover_rate"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ConfigError(f"{name} must lie in [0, 1]")
        if self.tournament_size < 1:
            raise ConfigError("tournament_size must be >= 1")
        if not 0 <= self.elitism <= self.pop_init:
            raise ConfigError("elitism must lie in [0, pop_init]")
        if self.growth_step < 0 or self.max_generations < 1 or self.plateau_window < 1:
            raise ConfigError("growth_step >= 0, max_generations >= 1, plateau_window >= 1 required")


@dataclass
class Individual:
    cds: str
    metrics: Optional[MetricVector] = None
    fitness: Optional[float] = None

    def copy(self) -> "Individual":
        return Individual(self.cds, self.metrics, self.fitness)


@dataclass(frozen=True)
class GenerationStats:
    generation: int
    pop_size: int
    fitness_mean: float
    fitness_max: float
    fitness_min: float
    means: dict
    immune_motifs_mean: float

    def row(self) -> dict:
        out = dict(generation=self.generation, pop_size=self.pop_size, fitness_mean=self.fitness_mean,
                   fitness_max=self.fitness_max, fitness_min=self.fitness_min)
        out.update({f"mean_{k}": v for k, v in self.means.items()})
        out["mean_immune_motifs"] = self.immune_motifs_mean
        return out


# ---------------------------------------------------------------- sampling

class _UsageSampler:
    """Draws codons for a residue with probability proportional to usage."""

    def __init__(self, usage: CodonUsageTable):
        self.families = {}
        for aa in list(STANDARD_CODE.synonym_families) + ["*"]:
            fam = usage.family(aa)
            codons = tuple(fam)
            cum = list(accumulate(fam[c] for c in codons))
            self.families[aa] = (codons, [x / cum[-1] for x in cum])

    def draw(self, aa: str, u: float) -> str:
        codons, cum = self.families[aa]
        return codons[min(bisect.bisect_right(cum, u), len(codons) - 1)]


_SAMPLERS: dict = {}


def _sampler(usage: CodonUsageTable) -> _UsageSampler:
    key = id(usage)
    if key not in _SAMPLERS:
        _SAMPLERS.clear()
        _SAMPLERS[key] = (usage, _UsageSampler(usage))
    return _SAMPLERS[key][1]


def _check_target(target) -> str:
    target = str(target)
    if not target.startswith("M"):
        raise ConfigError("target protein must start with M (the CDS starts with ATG)")
    return target


def seed_population(target, usage: CodonUsageTable, n: int, rng) -> list[Individual]:
    """Usage-weighted back-translations of ``target``, each ending in a usage-sampled stop."""
    target = _check_target(target)
    if n < 1:
        raise ConfigError("n must be >= 1")
    sampler = _sampler(usage)
    out = []
    for _ in range(n):
        u = rng.random(len(target))
        codons = ["ATG"] + [sampler.draw(aa, x) for aa, x in zip(target[1:], u[1:])]
        codons.append(sampler.draw("*", rng.random()))
        out.append(Individual("".join(codons)))
    return out


def import_population(fasta_path, target) -> list[Individual]:
    """Valid records of a FASTA file as individuals; invalid ones are logged and dropped."""
    target = str(target)
    out = []
    for header, seq in parse_fasta(fasta_path):
        seq = seq.upper().replace("U", "T")
        problems = validate_cds(seq, target)
        if problems:
            log.warning("dropping %s: %s", header, ", ".join(problems))
            continue
        out.append(Individual(seq))
    if not out:
        raise ConfigError(f"{fasta_path}: no valid coding sequences for the target")
    return out


def tournament_select(pop: list, k: int, rng) -> Individual:
    """Fittest of ``k`` uniform draws with replacement; ties go to the lowest index."""
    if not pop:
        raise ValueError("empty population")
    if k < 1:
        raise ValueError("tournament size must be >= 1")
    idx = [int(i) for i in rng.integers(0, len(pop), size=k)]
    top = max(pop[i].fitness for i in idx)
    return pop[min(i for i in idx if pop[i].fitness == top)]


def crossover(a: Individual, b: Individual, rng, rate: float = 0.8) -> tuple[Individual, Individual]:
    """Single-point crossover at a codon boundary; children are copies when no crossover happens."""
    if len(a.cds) != len(b.cds):
        raise ValueError("parents differ in length")
    n_codons = len(a.cds) // 3
    if n_codons < 2 or rng.random() >= rate:
        return a.copy(), b.copy()
    cut = 3 * int(rng.integers(1, n_codons))
    return Individual(a.cds[:cut] + b.cds[cut:]), Individual(b.cds[:cut] + a.cds[cut:])


def mutate(ind: Individual, usage: CodonUsageTable, rng, rate: float = 0.2,
           per_codon_rate: float = 0.01) -> Individual:
    """Synonymous substitutions on codons other than the start and the terminal stop."""
    if rng.random() >= rate:
        return ind
    n_codons = len(ind.cds) // 3
    if n_codons <= 2:
        return ind
    hits = np.flatnonzero(rng.random(n_codons - 2) < per_codon_rate) + 1
    if hits.size == 0:
        return ind
    sampler = _sampler(usage)
    codons = [ind.cds[i:i + 3] for i in range(0, len(ind.cds), 3)]
    draws = rng.random(hits.size)
    for pos, u in zip(hits, draws):
        codons[pos] = sampler.draw(STANDARD_CODE.table[codons[pos]], u)
    new = "".join(codons)
    return ind if new == ind.cds else Individual(new)


def slot_rng(seed: int, generation: int, slot: int) -> np.random.Generator:
    return np.random.default_rng([seed, generation, slot])


# -------------------------------------------------------------- evaluation

@dataclass
class Problem:
    """Everything fixed for a run apart from the GA knobs."""

    target: str
    tables: CodonTables
    folder: object
    utr5: str = ""
    utr3: str = ""
    weights: FitnessWeights = field(default_factory=FitnessWeights)
    bands: Bands = field(default_factory=Bands)
    metric_config: MetricConfig = field(default_factory=MetricConfig)

    def construct(self, cds: str) -> Construct:
        return Construct(self.utr5, cds, self.utr3)


_WORKER_PROBLEM: Optional[Problem] = None


def _init_worker(problem: Problem) -> None:
    global _WORKER_PROBLEM
    _WORKER_PROBLEM = problem


def _evaluate_in_worker(cds: str) -> Evaluation:
    p = _WORKER_PROBLEM
    return evaluate_construct(p.construct(cds), p.tables, p.folder, p.metric_config)


class Evaluator:
    """Caches evaluations by CDS; optionally spreads new ones over worker processes.

    Results never depend on the number of workers.
    """

    def __init__(self, problem: Problem, workers: int = 1):
        self.problem = problem
        self.workers = workers
        self.cache: dict[str, Evaluation] = {}
        self._pool = None

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()

    def close(self):
        if self._pool is not None:
            self._pool.shutdown()
            self._pool = None

    def evaluate(self, cds: str) -> Evaluation:
        self.evaluate_many([cds])
        return self.cache[cds]

    def evaluate_many(self, seqs) -> list[Evaluation]:
        todo = list(dict.fromkeys(s for s in seqs if s not in self.cache))
        if todo:
            if self.workers > 1 and len(todo) > 1:
                if self._pool is None:
                    self._pool = ProcessPoolExecutor(self.workers, initializer=_init_worker,
                                                     initargs=(self.problem,))
                chunk = max(1, len(todo) // (4 * self.workers))
                results = list(self._pool.map(_evaluate_in_worker, todo, chunksize=chunk))
            else:
                _init_worker(self.problem)
                results = [_evaluate_in_worker(s) for s in todo]
            self.cache.update(zip(todo, results))
        return [self.cache[s] for s in seqs]

    def score(self, pop: list[Individual]) -> None:
        """Fill in metrics and fitness for individuals that lack them."""
        pending = [ind for ind in pop if ind.fitness is None]
        for ind, ev in zip(pending, self.evaluate_many([ind.cds for ind in pending])):
            ind.metrics = ev.metrics
            ind.fitness = fitness(ev.metrics, self.problem.weights, self.problem.bands)


def generation_stats(generation: int, pop: list[Individual], problem: Problem) -> GenerationStats:
    fits = [ind.fitness for ind in pop]
    n = len(pop)
    means = {name: sum(getattr(ind.metrics, name) for ind in pop) / n for name in MetricVector.names()}
    motifs = sum(immune_motif_count(problem.construct(ind.cds)) for ind in pop) / n
    return GenerationStats(generation, n, sum(fits) / n, max(fits), min(fits), means, motifs)


def evolve_generation(pop: list[Individual], generation: int, config: GaConfig,
                      evaluator: Evaluator) -> tuple[list[Individual], GenerationStats]:
    """Elites plus select -> crossover -> mutate offspring, grown by ``growth_step`` up to the cap."""
    usage = evaluator.problem.tables.usage
    size = min(config.pop_cap, len(pop) + config.growth_step)
    ranked = sorted(range(len(pop)), key=lambda i: (-pop[i].fitness, i))
    new = [pop[i].copy() for i in ranked[:min(config.elitism, size)]]
    slot = 0
    while len(new) < size:
        rng = slot_rng(config.rng_seed, generation, slot)
        a = tournament_select(pop, config.tournament_size, rng)
        b = tournament_select(pop, config.tournament_size, rng)
        for child in crossover(a, b, rng, config.crossover_rate):
            child = mutate(child, usage, rng, config.mutation_rate, config.per_codon_rate)
            if len(new) < size:
                new.append(child)
        slot += 1
    evaluator.score(new)
    return new, generation_stats(generation, new, evaluator.problem)


def check_population(pop: list[Individual], target: str) -> None:
    for ind in pop:
        protein, stop = translate(ind.cds)
        if protein != target or not stop or len(protein) * 3 + 3 != len(ind.cds):
            raise RuntimeError(f"individual no longer encodes the target: {ind.cds[:30]}...")


@dataclass
class RunResult:
    population: list
    stats: list
    top: list                 # [(Individual, Evaluation)], fitness descending
    stop_reason: str
    initial_best: float


def top_k(pop: list[Individual], evaluator: Evaluator, k: int) -> list[tuple[Individual, Evaluation]]:
    seen, out = set(), []
    for i in sorted(range(len(pop)), key=lambda i: (-pop[i].fitness, i)):
        if pop[i].cds in seen:
            continue
        seen.add(pop[i].cds)
        out.append((pop[i], evaluator.evaluate(pop[i].cds)))
        if len(out) == k:
            break
    return out


def run(problem: Problem, config: GaConfig, initial: Optional[list] = None, workers: int = 1,
        top: int = 10, on_generation: Optional[Callable] = None) -> RunResult:
    """Evolve until the best fitness stalls for ``plateau_window`` generations or the limit is hit.

    ``initial`` (e.g. imported sequences) is topped up with seeded individuals
    to ``pop_init`` and truncated to ``pop_cap``.
    """
    target = _check_target(problem.target)
    pop = [Individual(ind.cds if isinstance(ind, Individual) else str(ind)) for ind in (initial or [])]
    pop = pop[:config.pop_cap]
    if len(pop) < config.pop_init:
        rng = np.random.default_rng([config.rng_seed, 0])
        pop += seed_population(target, problem.tables.usage, config.pop_init - len(pop), rng)
    check_population(pop, target)
    if problem.metric_config.reference_cds is None:
        problem = replace(problem, metric_config=replace(problem.metric_config, reference_cds=pop[0].cds))

    stats: list[GenerationStats] = []
    with Evaluator(problem, workers) as evaluator:
        evaluator.score(pop)
        best = [max(ind.fitness for ind in pop)]
        reason = "max_generations"
        for g in range(1, config.max_generations + 1):
            pop, row = evolve_generation(pop, g, config, evaluator)
            check_population(pop, target)
            stats.append(row)
            best.append(row.fitness_max)
            log.info("generation %d: size %d, best %.5f, mean %.5f, mean CAI %.4f",
                     g, row.pop_size, row.fitness_max, row.fitness_mean, row.means["cai"])
            if on_generation:
                on_generation(g, pop, row)
            if len(best) > config.plateau_window and \
                    best[-1] - best[-1 - config.plateau_window] < config.plateau_eps:
                reason = "plateau"
                break
        result_top = top_k(pop, evaluator, top)
    return RunResult(pop, stats, result_top, reason, best[0])


def config_dict(config: GaConfig) -> dict:
    return asdict(config)
