"""Objective, feasibility and value-density measures for both encodings.

Two solution encodings are used throughout the package, both as boolean
numpy vectors:

* item solutions (length ``m``): ``y[i]`` says whether item ``i`` is loaded;
* element solutions (length ``n``): ``y[j]`` says whether element ``j`` is loaded.

Element sets passed as ``loaded`` may be a boolean mask of length ``n``, an
iterable of element indices, or ``None`` for the empty set.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from sukp.instance import SukpInstance


def as_bits(sol, size: int, what: str = "solution") -> np.ndarray:
    """Coerce ``sol`` to a boolean vector of length ``size``."""
    bits = np.asarray(sol)
    if bits.ndim != 1 or bits.size != size:
        raise ValueError(f"{what} must be a vector of length {size}, got shape {bits.shape}")
    if bits.dtype != bool:
        bits = bits != 0
    return bits


def element_mask(inst: SukpInstance, loaded) -> np.ndarray:
    n = inst.element_count
    if loaded is None:
        return np.zeros(n, dtype=bool)
    arr = np.asarray(loaded)
    if arr.dtype == bool:
        return as_bits(arr, n, "element mask")
    mask = np.zeros(n, dtype=bool)
    mask[np.fromiter(loaded, dtype=np.int64)] = True
    return mask


# ---------------------------------------------------------------------------
# item encoding

def covered_elements(inst: SukpInstance, sol) -> np.ndarray:
    """Boolean mask of the union of the selected items' elements."""
    y = as_bits(sol, inst.item_count)
    return inst.membership[y].any(axis=0)


def total_weight_items(inst: SukpInstance, sol) -> float:
    return float(inst.weights[covered_elements(inst, sol)].sum())


def total_profit_items(inst: SukpInstance, sol) -> float:
    y = as_bits(sol, inst.item_count)
    return float(inst.profits[y].sum())


def is_feasible_items(inst: SukpInstance, sol) -> bool:
    return total_weight_items(inst, sol) <= inst.capacity


# ---------------------------------------------------------------------------
# element encoding

def items_from_elements(inst: SukpInstance, sol) -> np.ndarray:
    """Items whose every element is selected (``U_i`` subset of ``B``)."""
    b = as_bits(sol, inst.element_count)
    return ~(inst.membership & ~b).any(axis=1)


def total_profit_elements(inst: SukpInstance, sol) -> float:
    return float(inst.profits[items_from_elements(inst, sol)].sum())


def total_weight_elements(inst: SukpInstance, sol) -> float:
    b = as_bits(sol, inst.element_count)
    return float(inst.weights[b].sum())


def dangling_elements(inst: SukpInstance, sol) -> np.ndarray:
    """Selected elements that belong to no fully selected item."""
    b = as_bits(sol, inst.element_count)
    full = items_from_elements(inst, b)
    return b & ~inst.membership[full].any(axis=0)


def is_feasible_elements(inst: SukpInstance, sol) -> bool:
    b = as_bits(sol, inst.element_count)
    if inst.weights[b].sum() > inst.capacity:
        return False
    return not dangling_elements(inst, b).any()


# ---------------------------------------------------------------------------
# densities

@dataclass(frozen=True)
class DensityTable:
    """Static per-instance density data.

    ``fe`` counts how many items contain each element, ``uwe`` is the
    element weight spread over those items, ``avdi`` is each item's profit
    over the sum of its elements' unit weights and ``ave`` is the profit
    apportioned to each element by weight share within its items.
    """

    fe: np.ndarray
    uwe: np.ndarray
    avdi: np.ndarray
    ave: np.ndarray


def _density(profit: float, denom: float) -> float:
    # zero remaining cost: the item is free to take, rank it above everything
    return np.inf if denom == 0 else profit / denom


def build_density_table(inst: SukpInstance) -> DensityTable:
    fe = inst.membership.sum(axis=0)
    if (fe == 0).any():
        raise ValueError("every element must belong to at least one item")
    uwe = inst.weights / fe
    avdi = np.array(
        [_density(inst.profits[i], uwe[inst.elements_of(i)].sum()) for i in range(inst.item_count)]
    )
    # profit per unit weight of each item, zero-weight items excluded
    item_w = np.array([inst.weights[inst.elements_of(i)].sum() for i in range(inst.item_count)])
    share = np.divide(inst.profits, item_w, out=np.zeros_like(item_w), where=item_w > 0)
    ave = np.array(
        [share[inst.items_of(j)].sum() * inst.weights[j] for j in range(inst.element_count)]
    )
    for a in (fe, uwe, avdi, ave):
        a.setflags(write=False)
    return DensityTable(fe=fe, uwe=uwe, avdi=avdi, ave=ave)


def rvdi(inst: SukpInstance, table: DensityTable, item: int, loaded=None) -> float:
    """Profit of ``item`` over the unit weights of its elements not yet loaded.

    Returns ``inf`` when nothing of the item is left outside the knapsack.
    """
    loaded = element_mask(inst, loaded)
    elems = inst.elements_of(item)
    return _density(inst.profits[item], table.uwe[elems[~loaded[elems]]].sum())


def rvdi_all(inst: SukpInstance, table: DensityTable, loaded=None) -> np.ndarray:
    loaded = element_mask(inst, loaded)
    return np.array([rvdi(inst, table, i, loaded) for i in range(inst.item_count)])


def _outside_weight(inst: SukpInstance, item: int, loaded: np.ndarray) -> float:
    elems = inst.elements_of(item)
    return inst.weights[elems[~loaded[elems]]].sum()


def rvde(inst: SukpInstance, table: DensityTable, element: int, loaded=None) -> float:
    """Relative value density of an element outside the knapsack.

    Sums, over the items containing ``element``, the item profit divided by
    the weight of that item's elements still outside. Items with no outside
    weight left contribute nothing.
    """
    loaded = element_mask(inst, loaded)
    total = 0.0
    for i in inst.items_of(element):
        w = _outside_weight(inst, i, loaded)
        if w > 0:
            total += inst.profits[i] / w
    return total


def rvde_all(inst: SukpInstance, table: DensityTable, loaded=None) -> np.ndarray:
    loaded = element_mask(inst, loaded)
    return np.array([rvde(inst, table, j, loaded) for j in range(inst.element_count)])
