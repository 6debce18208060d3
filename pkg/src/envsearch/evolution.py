"""Evolutionary search over test cases.

Three modes share one loop: a single-objective GA maximizing the
fault-revealing power, a two-objective NSGA-II additionally maximizing
diversity against each offspring's parent, and a random-search baseline
drawing from the same initializer.  Objectives are stored negated so the
whole engine minimizes; feasibility follows the constrained-domination
rule (feasible beats infeasible, lower constraint violation beats higher).
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass
from enum import Enum
from typing import Callable

import numpy as np

from .diversity import jaccard_distance
from .sampling import markov_test_case, random_test_case
from .schema import Element, ScenarioSchema, TestCase


class Mode(str, Enum):
    SO = "SO"
    MO = "MO"
    RANDOM = "RANDOM"


class InitStrategy(str, Enum):
    UNIFORM = "UNIFORM"
    MARKOV = "MARKOV"


class OperatorError(ValueError):
    """Raised when a variation operator's precondition is violated."""


@dataclass
class Individual:
    """A genome with evaluated objectives.

    ``f1``/``f2`` hold the negated raw values (minimization convention);
    ``violation`` is max(0, alpha - fitness), zero when feasible.
    """

    genome: TestCase
    f1: float = 0.0
    f2: float = 0.0
    violation: float = 0.0
    parent_snapshot: TestCase | None = None
    rank: int = -1
    crowding: float = 0.0

    @property
    def raw_f1(self) -> float:
        return -self.f1

    @property
    def raw_f2(self) -> float:
        return -self.f2

    @property
    def feasible(self) -> bool:
        return self.violation <= 0.0


@dataclass(frozen=True)
class EvolutionConfig:
    mode: Mode
    population_size: int
    n_offspring: int
    mutation_rate: float
    crossover_rate: float
    eval_budget: int
    seed: int
    alpha: float
    init: InitStrategy = InitStrategy.UNIFORM

    def __post_init__(self):
        if self.population_size < 2:
            raise ValueError("population_size must be at least 2")
        if self.n_offspring < 1:
            raise ValueError("n_offspring must be at least 1")
        if not (0.0 <= self.mutation_rate <= 1.0):
            raise ValueError("mutation_rate must lie in [0, 1]")
        if not (0.0 <= self.crossover_rate <= 1.0):
            raise ValueError("crossover_rate must lie in [0, 1]")
        # RANDOM only uses population_size as a reporting batch size
        floor = 1 if self.mode == Mode.RANDOM else self.population_size
        if self.eval_budget < floor:
            raise ValueError("eval_budget must cover at least one population")

    def to_dict(self) -> dict:
        return {
            "mode": self.mode.value,
            "population_size": self.population_size,
            "n_offspring": self.n_offspring,
            "mutation_rate": self.mutation_rate,
            "crossover_rate": self.crossover_rate,
            "eval_budget": self.eval_budget,
            "seed": self.seed,
            "alpha": self.alpha,
            "init": self.init.value,
        }


@dataclass
class SearchResult:
    mode: Mode
    best: Individual
    front: list  # MO: Pareto front; SO: 10 fittest; RANDOM: [best]
    history: list  # per-generation best raw fitness
    evaluations_used: int
    wall_time: float


# ---------------------------------------------------------------------------
# variation operators
# ---------------------------------------------------------------------------

def one_point_crossover(p1: TestCase, p2: TestCase, rng: random.Random) -> tuple[TestCase, TestCase]:
    """Swap the tails of two parents from a common cut point.

    The 1-based cut index k is uniform in [1, min(m1, m2) - 1]; elements
    from position k onward change sides, so the children's lengths are the
    parents' lengths swapped.
    """
    m1, m2 = len(p1), len(p2)
    if m1 < 2 or m2 < 2:
        raise OperatorError("crossover parents must have at least 2 elements")
    k = rng.randint(1, min(m1, m2) - 1)
    cut = k - 1
    c1 = list(p1.elements[:cut]) + list(p2.elements[cut:])
    c2 = list(p2.elements[:cut]) + list(p1.elements[cut:])
    limit = p1.schema.max_elements
    return (
        TestCase.create(p1.schema, c1[:limit]),
        TestCase.create(p1.schema, c2[:limit]),
    )


def mutate_exchange(tc: TestCase, rng: random.Random) -> TestCase:
    """Swap two distinct element positions; no-op on length-1 genomes."""
    m = len(tc)
    if m < 2:
        return tc
    i, j = rng.sample(range(m), 2)
    elements = list(tc.elements)
    elements[i], elements[j] = elements[j], elements[i]
    return tc.replace_elements(elements)


def mutate_change_variable(tc: TestCase, schema: ScenarioSchema, rng: random.Random) -> TestCase:
    """Resample one attribute of one element uniformly from its domain.

    Only present cells are eligible.  When the resampled attribute is the
    presence selector, the dependent cells are rebuilt to match the new
    presence pattern (overlapping values kept, newly required ones drawn).
    """
    idx = rng.randrange(len(tc))
    element = tc.elements[idx]
    present = [i for i, v in enumerate(element.values) if v is not None]
    attr_idx = rng.choice(present)
    spec = schema.attributes[attr_idx]
    new_value = spec.domain.sample(rng)
    values = list(element.values)
    values[attr_idx] = new_value

    if schema.presence is not None and spec.name == schema.presence.selector:
        required = schema.presence.required(new_value)
        for i, a in enumerate(schema.attributes):
            if a.name == schema.presence.selector:
                continue
            if a.name in required:
                if values[i] is None:
                    values[i] = a.domain.sample(rng)
            else:
                values[i] = None

    elements = list(tc.elements)
    elements[idx] = Element.create(schema, values)
    return tc.replace_elements(elements)


def mutate_scramble(tc: TestCase, rng: random.Random) -> TestCase:
    """Randomly permute a contiguous window of at least 2 elements."""
    m = len(tc)
    if m < 2:
        return tc
    length = rng.randint(2, m)
    start = rng.randint(0, m - length)
    elements = list(tc.elements)
    window = elements[start:start + length]
    rng.shuffle(window)
    elements[start:start + length] = window
    return tc.replace_elements(elements)


_MUTATIONS = ("exchange", "change_variable", "scramble")


def apply_mutation(tc: TestCase, schema: ScenarioSchema, rng: random.Random) -> TestCase:
    op = rng.choice(_MUTATIONS)
    if op == "exchange":
        return mutate_exchange(tc, rng)
    if op == "change_variable":
        return mutate_change_variable(tc, schema, rng)
    return mutate_scramble(tc, rng)


# ---------------------------------------------------------------------------
# constrained domination, sorting, selection
# ---------------------------------------------------------------------------

def constrained_dominates(a: Individual, b: Individual, mode: Mode) -> bool:
    """Deb's feasibility-first rule; objective dominance among feasibles."""
    if a.violation < b.violation:
        return True
    if a.violation > b.violation:
        return False
    if a.violation > 0.0:
        return False  # equally infeasible
    if mode == Mode.MO:
        return (a.f1 <= b.f1 and a.f2 <= b.f2) and (a.f1 < b.f1 or a.f2 < b.f2)
    return a.f1 < b.f1


def nondominated_sort(pool: list, mode: Mode = Mode.MO) -> list:
    """Fast non-dominated sorting under constrained domination.

    Returns the fronts as lists of individuals (best first); also sets
    ``rank`` on every individual and crowding distances within each front.
    The pairwise domination matrix is evaluated with numpy; it implements
    exactly :func:`constrained_dominates`.
    """
    n = len(pool)
    if n == 0:
        return []
    viol = np.array([ind.violation for ind in pool])
    f1 = np.array([ind.f1 for ind in pool])
    dom = viol[:, None] < viol[None, :]
    feas_pair = (viol[:, None] == viol[None, :]) & (viol[:, None] == 0.0)
    if mode == Mode.MO:
        f2 = np.array([ind.f2 for ind in pool])
        obj = (
            (f1[:, None] <= f1[None, :])
            & (f2[:, None] <= f2[None, :])
            & ((f1[:, None] < f1[None, :]) | (f2[:, None] < f2[None, :]))
        )
    else:
        obj = f1[:, None] < f1[None, :]
    dom |= feas_pair & obj

    count = dom.sum(axis=0)
    assigned = np.zeros(n, dtype=bool)
    fronts = []
    rank = 0
    while not assigned.all():
        current = np.where((count == 0) & ~assigned)[0]
        for i in current:
            pool[i].rank = rank
        fronts.append([pool[i] for i in current])
        assigned[current] = True
        count = count - dom[current].sum(axis=0)
        rank += 1
    for front in fronts:
        assign_crowding(front)
    return fronts


def assign_crowding(front: list) -> None:
    """Crowding distance on (f1, f2); boundary points get infinity."""
    n = len(front)
    for ind in front:
        ind.crowding = 0.0
    if n <= 2:
        for ind in front:
            ind.crowding = float("inf")
        return
    for key in (lambda ind: ind.f1, lambda ind: ind.f2):
        order = sorted(range(n), key=lambda i: key(front[i]))
        lo = key(front[order[0]])
        hi = key(front[order[-1]])
        front[order[0]].crowding = float("inf")
        front[order[-1]].crowding = float("inf")
        if hi == lo:
            continue
        for pos in range(1, n - 1):
            i = order[pos]
            if front[i].crowding != float("inf"):
                front[i].crowding += (key(front[order[pos + 1]]) - key(front[order[pos - 1]])) / (hi - lo)


def tournament_select(population: list, rng: random.Random, mode: Mode = Mode.SO) -> Individual:
    """Binary tournament under constrained domination.

    Feasible beats infeasible, lower violation beats higher; then objective
    comparison (dominance for MO with crowding tie-break, fitness for SO
    with random tie-break).
    """
    if not population:
        raise ValueError("population must be non-empty")
    a = population[rng.randrange(len(population))]
    b = population[rng.randrange(len(population))]
    if a.violation < b.violation:
        return a
    if b.violation < a.violation:
        return b
    if mode == Mode.MO:
        if constrained_dominates(a, b, mode):
            return a
        if constrained_dominates(b, a, mode):
            return b
        if a.crowding > b.crowding:
            return a
        if b.crowding > a.crowding:
            return b
        return a if rng.random() < 0.5 else b
    if a.f1 < b.f1:
        return a
    if b.f1 < a.f1:
        return b
    return a if rng.random() < 0.5 else b


def _dedupe(pool: list) -> tuple[list, list]:
    """Split the pool into genome-distinct individuals (first occurrence
    kept, so parents win ties) and the dropped duplicates."""
    seen = set()
    distinct = []
    dupes = []
    for ind in pool:
        key = tuple(ind.genome.canonical_keys())
        if key in seen:
            dupes.append(ind)
        else:
            seen.add(key)
            distinct.append(ind)
    return distinct, dupes


def mu_plus_lambda_insert(parents: list, offspring: list, population_size: int,
                          mode: Mode = Mode.SO) -> list:
    """Merge parents and offspring, keep the best ``population_size``.

    Genome duplicates are dropped first (keeping the earliest copy, i.e.
    the parent) and only re-admitted if the distinct pool runs short;
    without this the single-objective population collapses to clones of
    one local optimum.  MO then fills front by front and truncates the
    splitting front by crowding distance; SO keeps the lowest
    (violation, f1).  Merging parents first makes ties deterministic and
    elitist.
    """
    pool = list(parents) + list(offspring)
    if len(pool) <= population_size:
        return pool
    distinct, dupes = _dedupe(pool)
    if len(distinct) < population_size:
        short = population_size - len(distinct)
        ranked_dupes = sorted(dupes, key=lambda ind: (ind.violation, ind.f1))
        pool = distinct + ranked_dupes[:short]
    else:
        pool = distinct
    if len(pool) <= population_size:
        return pool
    if mode == Mode.MO:
        survivors = []
        for front in nondominated_sort(pool, mode):
            if len(survivors) + len(front) <= population_size:
                survivors.extend(front)
            else:
                remaining = population_size - len(survivors)
                order = sorted(range(len(front)), key=lambda i: -front[i].crowding)
                survivors.extend(front[i] for i in order[:remaining])
                break
        return survivors
    return sorted(pool, key=lambda ind: (ind.violation, ind.f1))[:population_size]


# ---------------------------------------------------------------------------
# search loop
# ---------------------------------------------------------------------------

@dataclass
class _Evaluator:
    fitness: Callable[[TestCase], float]
    alpha: float
    count: int = 0

    def __call__(self, genome: TestCase, parent: TestCase | None) -> Individual:
        phi = self.fitness(genome)
        self.count += 1
        upsilon = jaccard_distance(genome, parent) if parent is not None else 0.0
        return Individual(
            genome=genome,
            f1=-phi,
            f2=-upsilon,
            violation=max(0.0, self.alpha - phi),
            parent_snapshot=parent,
        )


def _best(population: list) -> Individual:
    return min(population, key=lambda ind: (ind.violation, ind.f1))


def run_search(problem, config: EvolutionConfig) -> SearchResult:
    """Run one search; fully reproducible from ``config.seed``."""
    rng = random.Random(config.seed)
    schema = problem.schema

    if config.init == InitStrategy.MARKOV:
        chain = problem.markov_chain()
        if chain is None:
            raise ValueError(f"problem {problem.name!r} provides no Markov chain")
        sample = lambda: markov_test_case(schema, chain, rng)
    else:
        sample = lambda: random_test_case(schema, rng)

    evaluate = _Evaluator(problem.fitness, config.alpha)
    start = time.perf_counter()
    history: list = []

    if config.mode == Mode.RANDOM:
        best = None
        while evaluate.count < config.eval_budget:
            batch = min(config.population_size, config.eval_budget - evaluate.count)
            for _ in range(batch):
                ind = evaluate(sample(), None)
                if best is None or (ind.violation, ind.f1) < (best.violation, best.f1):
                    best = ind
            history.append(best.raw_f1)
        return SearchResult(
            mode=config.mode,
            best=best,
            front=[best],
            history=history,
            evaluations_used=evaluate.count,
            wall_time=time.perf_counter() - start,
        )

    population = [evaluate(sample(), None) for _ in range(config.population_size)]
    if config.mode == Mode.MO:
        nondominated_sort(population, Mode.MO)
    history.append(max(ind.raw_f1 for ind in population))

    while evaluate.count + config.n_offspring <= config.eval_budget:
        offspring = []
        while len(offspring) < config.n_offspring:
            p1 = tournament_select(population, rng, config.mode)
            p2 = tournament_select(population, rng, config.mode)
            if rng.random() < config.crossover_rate and len(p1.genome) >= 2 and len(p2.genome) >= 2:
                g1, g2 = one_point_crossover(p1.genome, p2.genome, rng)
            else:
                g1, g2 = p1.genome, p2.genome
            for genome, parent in ((g1, p1.genome), (g2, p2.genome)):
                if len(offspring) >= config.n_offspring:
                    break
                if rng.random() < config.mutation_rate:
                    genome = apply_mutation(genome, schema, rng)
                offspring.append(evaluate(genome, parent))
        # survivors keep the ranks/crowding assigned while sorting the merged
        # pool; those are what the next generation's tournaments use
        population = mu_plus_lambda_insert(population, offspring, config.population_size, config.mode)
        history.append(max(ind.raw_f1 for ind in population))

    best = _best(population)
    if config.mode == Mode.MO:
        front = [ind for ind in population if ind.rank == 0]
    else:
        front = sorted(population, key=lambda ind: (ind.violation, ind.f1))[:10]
    return SearchResult(
        mode=config.mode,
        best=best,
        front=front,
        history=history,
        evaluations_used=evaluate.count,
        wall_time=time.perf_counter() - start,
    )
