import numpy as np
import pytest

from conftest import random_instance
from sukp.dtlbo import (
    DtlboParams,
    EvaluationCounter,
    Individual,
    binarize,
    default_mfc,
    derive_seed,
    elite_opposite_search,
    learner_move,
    random_individual,
    refresh_real,
    run,
    survival_of_fittest,
    teacher_index,
    teacher_move,
    teaching_factor,
    worst_index,
)
from sukp.evaluation import is_feasible_elements, is_feasible_items, total_profit_items
from sukp.instance import SukpInstance
from sukp.oracle import exact_bruteforce
from sukp.repair import Repairer


class FixedRand:
    """Stand-in generator returning a constant from ``random()``."""

    def __init__(self, value):
        self.value = value

    def random(self, size=None):
        return self.value if size is None else np.full(size, self.value)


# encoding

def test_binarize_threshold_is_strict():
    assert binarize([0.3, -0.2, 0.0]).tolist() == [True, False, False]
    assert not binarize(-np.ones(4)).any()
    assert binarize(np.full(4, 0.5)).all()


def test_refresh_real_signs_and_range():
    rng = np.random.default_rng(3)
    y = rng.random(1000) < 0.5
    x = refresh_real(y, rng)
    assert np.all((x > 0) == y)
    assert np.all((x > -1) & (x < 1))
    assert np.all(refresh_real(np.ones(50, bool), rng) > 0)


def test_refresh_real_zero_draw_stays_positive():
    x = refresh_real([True, False], FixedRand(0.0))
    assert x[0] > 0 and x[1] == -1.0


def test_refresh_real_reproducible():
    y = np.array([1, 0, 1, 1, 0], bool)
    a = refresh_real(y, np.random.default_rng(9))
    b = refresh_real(y, np.random.default_rng(9))
    assert a.tolist() == b.tolist()


def test_refresh_real_batches():
    y = np.random.default_rng(0).random((7, 11)) < 0.5
    assert np.array_equal(binarize(refresh_real(y, np.random.default_rng(1))), y)


# moves

def test_teacher_move_zero_gap():
    x = np.array([0.2, -0.4, 0.9])
    assert teacher_move(x, x, x, 1, np.random.default_rng(0)).tolist() == x.tolist()


def test_teacher_move_zero_rand():
    x = np.array([0.2, -0.4])
    out = teacher_move(x, [0.9, 0.1], [0.0, 0.3], 2, FixedRand(0.0))
    assert out.tolist() == x.tolist()


def test_teacher_move_hand_value():
    out = teacher_move([0.5, -0.5], [1.0, 0.25], [0.25, 0.5], 2, FixedRand(0.5))
    # x + 0.5 * (teacher - 2 * mean)
    assert out.tolist() == [0.75, -0.875]


def test_teacher_move_scalar_draw():
    rng = np.random.default_rng(4)
    r = np.random.default_rng(4).random()
    out = teacher_move(np.zeros(3), np.ones(3), np.zeros(3), 1, rng)
    assert out.tolist() == [r, r, r]


def test_learner_move_branches():
    xi, xk = np.array([0.5, -0.25]), np.array([-0.5, 0.75])
    assert learner_move(xi, 10, xi, 5, FixedRand(0.7)).tolist() == xi.tolist()
    assert learner_move(xi, 10, xk, 5, FixedRand(1.0)).tolist() == (2 * xi - xk).tolist()
    # tie goes to the "move toward the partner" branch
    assert learner_move(xi, 5, xk, 5, FixedRand(1.0)).tolist() == xk.tolist()
    assert learner_move(xi, 1, xk, 5, FixedRand(0.5)).tolist() == [0.0, 0.25]


def test_moves_reject_length_mismatch():
    with pytest.raises(ValueError):
        teacher_move(np.zeros(3), np.zeros(2), np.zeros(3), 1, FixedRand(0.5))
    with pytest.raises(ValueError):
        learner_move(np.zeros(3), 0, np.zeros(4), 0, FixedRand(0.5))


def test_teaching_factor_rules():
    rng = np.random.default_rng(0)
    draws = {teaching_factor("random", rng) for _ in range(200)}
    assert draws == {1, 2}
    assert teaching_factor("1", rng) == 1 and teaching_factor("2", rng) == 2


# population helpers

def _ind(fit, d=3):
    return Individual(np.zeros(d), np.zeros(d, bool), np.zeros(d, bool), float(fit))


def test_teacher_and_worst_tie_rules():
    pop = [_ind(5), _ind(9), _ind(9), _ind(1), _ind(1)]
    assert teacher_index(pop) == 1
    assert worst_index(pop) == 4
    assert worst_index([_ind(3)] * 4) == 3


def test_survival_replaces_last_of_identical(motif):
    repair = Repairer(motif)
    pop = [_ind(0.0) for _ in range(4)]
    originals = list(pop)
    counter = EvaluationCounter(100)
    survival_of_fittest(pop, np.random.default_rng(0), repair, counter)
    assert len(pop) == 4 and counter.used == 1
    assert pop[:3] == originals[:3] and pop[3] is not originals[3]
    assert is_feasible_items(motif, pop[3].y)


def test_eos_complement_of_all_ones(motif):
    repair = Repairer(motif)
    rng = np.random.default_rng(0)
    teacher = Individual(np.ones(3), np.ones(3, bool), np.zeros(5, bool), -1.0)
    pop = [teacher, _ind(-2.0)]
    counter = EvaluationCounter(10)
    new = elite_opposite_search(pop, rng, repair, counter)
    # complement is empty, repaired to the greedy construction
    assert new.y.tolist() == repair(np.zeros(3, bool)).solution.tolist()
    assert new.fitness == 50 and pop[0] is new and counter.used == 1


def test_eos_keeps_optimal_teacher(motif):
    repair = Repairer(motif)
    opt = exact_bruteforce(motif)
    out = repair(opt.witness)
    teacher = Individual(refresh_real(out.solution, np.random.default_rng(0)), out.solution,
                         out.derived, out.objective)
    pop = [teacher, random_individual(repair, np.random.default_rng(1))]
    kept = elite_opposite_search(pop, np.random.default_rng(2), repair, EvaluationCounter(10))
    assert kept is teacher


def test_eos_equal_fitness_rejected():
    inst = SukpInstance.from_sets([5, 5], [1, 1], [[0], [1]], 1)
    repair = Repairer(inst)
    teacher = Individual(np.array([0.5, -0.5]), np.array([True, False]), np.array([True, False]), 5.0)
    pop = [teacher, _ind(0.0, 2)]
    # complement loads item 1 for the same profit
    assert elite_opposite_search(pop, np.random.default_rng(0), repair, EvaluationCounter(5)) is teacher


# params and runs

def test_params_validation(motif):
    with pytest.raises(ValueError, match="popsize"):
        DtlboParams(popsize=1).resolved(motif)
    with pytest.raises(ValueError, match="mfc"):
        DtlboParams(popsize=10, mfc=5).resolved(motif)
    with pytest.raises(ValueError, match="mode"):
        DtlboParams(mode="bits").resolved(motif)
    with pytest.raises(ValueError, match="does not match"):
        DtlboParams(mode="item", repair="esro").resolved(motif)
    with pytest.raises(ValueError, match="tf_rule"):
        DtlboParams(tf_rule="3").resolved(motif)
    p = DtlboParams().resolved(motif)
    assert p.mfc == 20 + 20 * 5 == default_mfc(motif) and p.repair == "isro"
    assert DtlboParams(mode="element").resolved(motif).repair == "esro"


def test_single_item_instance():
    inst = SukpInstance([7], [3], [[True]], 3)
    res = run(inst, DtlboParams(popsize=4, seed=1))
    assert res.fitness == 7
    assert res.history[3][1] == 7


def test_derive_seed_stable():
    assert derive_seed(0, 0, 0, 0) == derive_seed(0, 0, 0, 0)
    assert len({derive_seed(7, 0, 0, r) for r in range(50)}) == 50
    assert 0 <= derive_seed(2**63, 5) < 2**64


@pytest.mark.parametrize("mode", ["item", "element"])
def test_run_invariants(mode):
    inst = random_instance(42, m_range=(15, 15), n_range=(12, 12))
    params = DtlboParams(popsize=8, mode=mode, seed=5).resolved(inst)
    res = run(inst, params)
    assert params.mfc < res.evaluations_used <= params.mfc + 1
    fits = [f for _, f in res.history]
    assert [t for t, _ in res.history] == list(range(1, res.evaluations_used + 1))
    assert all(a <= b for a, b in zip(fits, fits[1:]))
    assert res.fitness == fits[-1]
    if mode == "item":
        assert is_feasible_items(inst, res.best.y)
        assert total_profit_items(inst, res.best.y) == res.fitness
    else:
        assert is_feasible_elements(inst, res.best.y)
        assert total_profit_items(inst, res.best.z) == res.fitness
    assert np.array_equal(binarize(res.best.x), res.best.y)


@pytest.mark.parametrize("mode", ["item", "element"])
def test_run_deterministic(mode):
    inst = random_instance(7, m_range=(10, 10), n_range=(10, 10))
    a = run(inst, DtlboParams(popsize=6, mode=mode, seed=123))
    b = run(inst, DtlboParams(popsize=6, mode=mode, seed=123))
    assert a.history == b.history
    assert a.best.y.tolist() == b.best.y.tolist() and a.best.x.tolist() == b.best.x.tolist()


def test_run_without_strategies_and_with_shared_repair():
    inst = random_instance(8)
    repair = Repairer(inst, "static")
    res = run(inst, DtlboParams(popsize=5, repair="static", eos=False, sf=False, seed=3), repair)
    assert is_feasible_items(inst, res.best.y)
    assert res.fitness <= exact_bruteforce(inst).optimum


def test_run_finds_optimum_on_tiny_instances():
    hits = 0
    for s in range(20):
        inst = random_instance(500 + s, m_range=(4, 8), n_range=(4, 8))
        hits += run(inst, DtlboParams(seed=s)).fitness == exact_bruteforce(inst).optimum
    assert hits >= 18
