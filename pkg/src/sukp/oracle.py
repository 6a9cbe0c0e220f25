"""Exact solvers for small instances and a solution checker.

Both solvers return the lexicographically smallest optimal item vector
(``y[0]`` most significant, ``0 < 1``), so their witnesses agree.
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass

import numpy as np

from sukp.evaluation import as_bits, is_feasible_items, total_profit_items
from sukp.instance import SukpInstance

BRUTEFORCE_MAX_ITEMS = 24
BRANCH_BOUND_MAX_ITEMS = 40


class InstanceTooLarge(ValueError):
    pass


@dataclass(frozen=True)
class ExactResult:
    optimum: float
    witness: np.ndarray
    explored: int


def exact_bruteforce(inst: SukpInstance, chunk: int = 1 << 14) -> ExactResult:
    """Enumerate all ``2**m`` item subsets."""
    m = inst.item_count
    if m > BRUTEFORCE_MAX_ITEMS:
        raise InstanceTooLarge(f"brute force is limited to {BRUTEFORCE_MAX_ITEMS} items, got {m}")
    member = inst.membership.astype(np.int32)
    shifts = np.arange(m - 1, -1, -1, dtype=np.int64)
    total = 1 << m
    best, best_code = -math.inf, 0
    for lo in range(0, total, chunk):
        codes = np.arange(lo, min(lo + chunk, total), dtype=np.int64)
        bits = ((codes[:, None] >> shifts) & 1).astype(bool)
        covered = (bits.astype(np.int32) @ member) > 0
        weight = covered @ inst.weights
        profit = bits @ inst.profits
        profit = np.where(weight <= inst.capacity, profit, -np.inf)
        k = int(np.argmax(profit))
        if profit[k] > best:
            best, best_code = float(profit[k]), int(codes[k])
    witness = ((best_code >> shifts) & 1).astype(bool)
    return ExactResult(best, witness, total)


def _slack(value):
    # keeps float rounding in the fractional bound from pruning a tight optimum
    return 1e-9 * max(1.0, abs(value))


class _BranchAndBound:
    def __init__(self, inst: SukpInstance):
        self.inst = inst
        self.m = inst.item_count
        self.member = inst.membership
        self.memberf = inst.membership.astype(np.float64)
        self.w = inst.weights
        self.p = inst.profits
        self.explored = 0

    def bound(self, depth, covered, load, profit):
        """Admissible upper bound on any completion of the current node."""
        if depth == self.m:
            return profit
        room = self.inst.capacity - load
        outside = ~covered
        rest = self.memberf[depth:][:, outside]
        w_out = self.w[outside]
        extra = rest @ w_out
        fits = extra <= room
        if not fits.any():
            return profit
        p_fit = self.p[depth:][fits]
        plain = profit + p_fit.sum()
        # share each element's weight among the fitting items that need it
        sub = rest[fits]
        freq = sub.sum(axis=0)
        share = np.divide(w_out, freq, out=np.zeros_like(w_out), where=freq > 0)
        cost = sub @ share
        free = cost <= 0
        frac = profit + p_fit[free].sum()
        left = room
        order = np.argsort(-(p_fit[~free] / cost[~free]), kind="stable")
        for p, c in zip(p_fit[~free][order], cost[~free][order]):
            if c <= left:
                frac += p
                left -= c
            else:
                frac += p * left / c
                break
        return min(plain, frac)

    def _children(self, depth, covered, load):
        elems = self.inst.elements_of(depth)
        new = elems[~covered[elems]]
        add = self.w[new].sum()
        return new, load + add

    def maximize(self, depth, covered, load, profit, best):
        """Include-first search for the optimal value."""
        self.explored += 1
        if profit > best:
            best = profit
        if depth == self.m or self.bound(depth, covered, load, profit) + _slack(best) <= best:
            return best
        new, new_load = self._children(depth, covered, load)
        if new_load <= self.inst.capacity:
            covered[new] = True
            best = self.maximize(depth + 1, covered, new_load, profit + self.p[depth], best)
            covered[new] = False
        return self.maximize(depth + 1, covered, load, profit, best)

    def first_witness(self, depth, covered, load, profit, target, chosen):
        """Exclude-first search for the lexicographically smallest optimum."""
        self.explored += 1
        if profit >= target:
            return True
        if depth == self.m or self.bound(depth, covered, load, profit) + _slack(target) < target:
            return False
        if self.first_witness(depth + 1, covered, load, profit, target, chosen):
            return True
        new, new_load = self._children(depth, covered, load)
        if new_load <= self.inst.capacity:
            covered[new] = True
            chosen[depth] = True
            if self.first_witness(depth + 1, covered, new_load, profit + self.p[depth], target, chosen):
                return True
            chosen[depth] = False
            covered[new] = False
        return False


def exact_branch_bound(inst: SukpInstance) -> ExactResult:
    """Depth-first include/exclude search with profit and weight-share bounds."""
    m = inst.item_count
    if m > BRANCH_BOUND_MAX_ITEMS:
        raise InstanceTooLarge(f"branch and bound is limited to {BRANCH_BOUND_MAX_ITEMS} items, got {m}")
    limit = sys.getrecursionlimit()
    sys.setrecursionlimit(max(limit, 4 * m + 100))
    try:
        bb = _BranchAndBound(inst)
        covered = np.zeros(inst.element_count, dtype=bool)
        optimum = bb.maximize(0, covered, 0.0, 0.0, 0.0)
        witness = np.zeros(m, dtype=bool)
        bb.first_witness(0, covered, 0.0, 0.0, optimum, witness)
    finally:
        sys.setrecursionlimit(limit)
    return ExactResult(float(optimum), witness, bb.explored)


def verify_solution(inst: SukpInstance, sol, claimed_profit: float) -> bool:
    """True iff the item vector is feasible and its profit equals the claim."""
    try:
        y = as_bits(sol, inst.item_count)
    except ValueError:
        return False
    if not is_feasible_items(inst, y):
        return False
    return math.isclose(total_profit_items(inst, y), claimed_profit, rel_tol=1e-12, abs_tol=1e-9)
