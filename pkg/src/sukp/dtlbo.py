"""Discrete teaching-learning-based optimization for SUKP.

Each individual carries a real vector ``x`` that the teacher and learner
moves act on, the binary solution ``y`` obtained by thresholding ``x`` at
zero, and the companion vector ``z`` produced by the repair operator.
After every repair ``x`` is redrawn so that its signs agree with the
repaired ``y``.

Besides the two classical phases, every generation runs an elite opposite
search (the complement of the best solution is repaired and may replace it)
and a survival-of-the-fittest step (the worst individual is replaced by a
fresh random one). Each repair plus fitness computation costs one unit of
the evaluation budget ``mfc``; the run stops as soon as the budget is
exceeded.

Randomness comes from a single ``numpy.random.Generator`` (PCG64) seeded
from ``DtlboParams.seed``; :func:`derive_seed` splits a master seed into
per-run seeds.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from sukp.instance import SukpInstance
from sukp.repair import Repairer

MODES = ("item", "element")
TF_RULES = ("random", "1", "2")


def derive_seed(master: int, *indices: int) -> int:
    """Platform-stable 64-bit seed for a (master, indices...) tuple."""
    seq = np.random.SeedSequence([int(master), *map(int, indices)])
    return int(seq.generate_state(1, dtype=np.uint64)[0])


def default_mfc(inst: SukpInstance, popsize: int = 20) -> int:
    return popsize + popsize * max(inst.item_count, inst.element_count)


# ---------------------------------------------------------------------------
# encoding

def binarize(x) -> np.ndarray:
    return np.asarray(x) > 0


def refresh_real(y, rng) -> np.ndarray:
    """Random real vector whose positive coordinates are exactly ``y``'s ones."""
    y = np.asarray(y, dtype=bool)
    u = rng.random(y.shape)
    # rand(0, 1) must stay strictly positive for the ones
    u[u == 0.0] = np.nextafter(0.0, 1.0)
    return np.where(y, u, u - 1.0)


# ---------------------------------------------------------------------------
# moves

def _check_same_length(*vectors):
    sizes = {np.shape(v) for v in vectors}
    if len(sizes) != 1:
        raise ValueError(f"vector shapes differ: {sorted(sizes)}")


def teacher_move(x, x_teacher, x_mean, tf, rng) -> np.ndarray:
    _check_same_length(x, x_teacher, x_mean)
    r = rng.random()
    return np.asarray(x) + r * (np.asarray(x_teacher) - tf * np.asarray(x_mean))


def learner_move(x_i, fit_i, x_k, fit_k, rng) -> np.ndarray:
    _check_same_length(x_i, x_k)
    x_i = np.asarray(x_i)
    x_k = np.asarray(x_k)
    r = rng.random()
    if fit_i > fit_k:
        return x_i + r * (x_i - x_k)
    return x_i + r * (x_k - x_i)


def teaching_factor(rule: str, rng) -> int:
    if rule == "random":
        return 1 + int(round(rng.random()))
    return int(rule)


# ---------------------------------------------------------------------------
# population

@dataclass
class Individual:
    x: np.ndarray
    y: np.ndarray
    z: np.ndarray
    fitness: float


@dataclass(frozen=True)
class DtlboParams:
    """Run configuration.

    ``repair`` defaults to ``"isro"`` in item mode and ``"esro"`` in element
    mode; ``"static"`` (item mode only) gives the static-density baseline.
    ``mfc=None`` means ``popsize + popsize * max(m, n)``. ``eos`` and ``sf``
    toggle the elite opposite search and survival-of-the-fittest steps.
    """

    popsize: int = 20
    mfc: int | None = None
    mode: str = "item"
    seed: int = 0
    tf_rule: str = "random"
    repair: str | None = None
    eos: bool = True
    sf: bool = True

    def resolved(self, inst: SukpInstance) -> "DtlboParams":
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.tf_rule not in TF_RULES:
            raise ValueError(f"tf_rule must be one of {TF_RULES}, got {self.tf_rule!r}")
        if self.popsize < 2:
            raise ValueError("popsize must be at least 2")
        repair = self.repair or ("esro" if self.mode == "element" else "isro")
        if (repair == "esro") != (self.mode == "element"):
            raise ValueError(f"repair {repair!r} does not match mode {self.mode!r}")
        mfc = self.mfc if self.mfc is not None else default_mfc(inst, self.popsize)
        if mfc < self.popsize:
            raise ValueError("mfc must be at least popsize")
        return replace(self, repair=repair, mfc=mfc)


class EvaluationCounter:
    """Budget accounting plus best-so-far tracking."""

    def __init__(self, mfc: int):
        self.mfc = mfc
        self.used = 0
        self.best: Individual | None = None
        self.history: list[tuple[int, float]] = []

    @property
    def exhausted(self) -> bool:
        return self.used > self.mfc

    def charge(self, ind: Individual) -> bool:
        self.used += 1
        if self.best is None or ind.fitness > self.best.fitness:
            self.best = ind
        self.history.append((self.used, self.best.fitness))
        return self.exhausted


@dataclass
class RunResult:
    best: Individual
    evaluations_used: int
    history: list = field(default_factory=list)
    seed: int | None = None

    @property
    def fitness(self) -> float:
        return self.best.fitness


def _evaluate(repair: Repairer, y, rng) -> Individual:
    out = repair(y)
    return Individual(refresh_real(out.solution, rng), out.solution, out.derived, out.objective)


def random_individual(repair: Repairer, rng) -> Individual:
    x = refresh_real(rng.random(repair.dimension) < 0.5, rng)
    return _evaluate(repair, binarize(x), rng)


def teacher_index(population) -> int:
    return int(np.argmax([ind.fitness for ind in population]))


def worst_index(population) -> int:
    fits = np.array([ind.fitness for ind in population])
    return len(fits) - 1 - int(np.argmin(fits[::-1]))


def elite_opposite_search(population, rng, repair: Repairer, counter: EvaluationCounter) -> Individual:
    """Try the complement of the teacher's solution; keep it only if strictly fitter."""
    t = teacher_index(population)
    teacher = population[t]
    temp = _evaluate(repair, ~teacher.y, rng)
    counter.charge(temp)
    if temp.fitness > teacher.fitness:
        population[t] = temp
    return population[t]


def survival_of_fittest(population, rng, repair: Repairer, counter: EvaluationCounter):
    """Replace the worst individual (last one among equals) by a random newcomer."""
    newcomer = random_individual(repair, rng)
    counter.charge(newcomer)
    population[worst_index(population)] = newcomer
    return population


def _teacher_phase(population, teacher, rng, repair, counter, tf_rule) -> bool:
    x_mean = np.mean([ind.x for ind in population], axis=0)
    x_teacher = teacher.x
    for i, ind in enumerate(population):
        tf = teaching_factor(tf_rule, rng)
        x_new = teacher_move(ind.x, x_teacher, x_mean, tf, rng)
        temp = _evaluate(repair, binarize(x_new), rng)
        exhausted = counter.charge(temp)
        if temp.fitness > ind.fitness:
            population[i] = temp
        if exhausted:
            return True
    return False


def _learner_phase(population, rng, repair, counter) -> bool:
    size = len(population)
    for i in range(size):
        k = int(rng.integers(size - 1))
        if k >= i:
            k += 1
        ind, partner = population[i], population[k]
        x_new = learner_move(ind.x, ind.fitness, partner.x, partner.fitness, rng)
        temp = _evaluate(repair, binarize(x_new), rng)
        exhausted = counter.charge(temp)
        if temp.fitness > ind.fitness:
            population[i] = temp
        if exhausted:
            return True
    return False


def run(inst: SukpInstance, params: DtlboParams = DtlboParams(), repair: Repairer | None = None) -> RunResult:
    """Run DTLBO on ``inst`` and return the best individual found.

    A prebuilt ``repair`` for the same instance may be passed to share its
    density table between runs.
    """
    params = params.resolved(inst)
    if repair is None or repair.kind != params.repair or repair.inst is not inst:
        repair = Repairer(inst, params.repair)
    rng = np.random.default_rng(params.seed)
    counter = EvaluationCounter(params.mfc)

    population = []
    for _ in range(params.popsize):
        ind = random_individual(repair, rng)
        counter.charge(ind)
        population.append(ind)

    while not counter.exhausted:
        teacher = population[teacher_index(population)]
        if _teacher_phase(population, teacher, rng, repair, counter, params.tf_rule):
            break
        if _learner_phase(population, rng, repair, counter):
            break
        if params.eos:
            elite_opposite_search(population, rng, repair, counter)
            if counter.exhausted:
                break
        if params.sf:
            survival_of_fittest(population, rng, repair, counter)

    return RunResult(counter.best, counter.used, counter.history, params.seed)
