"""Greedy repair-and-optimize operators.

Every operator turns an arbitrary candidate bit vector into a feasible
solution in two passes: first over the candidate's selected positions, then
over the rest, loading greedily by value density whenever capacity allows.

``isro``
    item encoding, densities recomputed against the elements already loaded;
``esro``
    element encoding, followed by dangling-element deletion and refill rounds;
``static_greedy_repair``
    item encoding ranked once by the static absolute density (baseline).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from sukp import _kernels
from sukp.evaluation import DensityTable, as_bits, build_density_table
from sukp.instance import SukpInstance


@dataclass(frozen=True)
class RepairOutcome:
    """A repaired solution.

    ``solution`` is in the operator's own encoding; ``derived`` is the
    companion vector (covered elements for item solutions, completed items
    for element solutions); ``objective`` is the total item profit.
    """

    solution: np.ndarray
    derived: np.ndarray
    objective: float
    weight: float


def _objective(inst, items):
    return float(inst.profits[items].sum())


def isro(inst: SukpInstance, table: DensityTable, candidate) -> RepairOutcome:
    y0 = as_bits(candidate, inst.item_count, "item candidate")
    y, covered, load = _kernels.isro_kernel(
        inst.item_ptr, inst.item_idx, inst.elem_ptr, inst.elem_idx,
        inst.profits, inst.weights, table.uwe, inst.capacity, y0,
    )
    return RepairOutcome(y, covered, _objective(inst, y), load)


def esro(inst: SukpInstance, table: DensityTable, candidate) -> RepairOutcome:
    b0 = as_bits(candidate, inst.element_count, "element candidate")
    b, z, load = _kernels.esro_kernel(
        inst.item_ptr, inst.item_idx, inst.elem_ptr, inst.elem_idx,
        inst.profits, inst.weights, inst.capacity, b0,
    )
    return RepairOutcome(b, z, _objective(inst, z), load)


def static_order(table: DensityTable) -> np.ndarray:
    """Items by decreasing absolute density, ties by index."""
    return np.argsort(-table.avdi, kind="stable")


def static_greedy_repair(
    inst: SukpInstance, table: DensityTable, candidate, order: np.ndarray | None = None
) -> RepairOutcome:
    y0 = as_bits(candidate, inst.item_count, "item candidate")
    if order is None:
        order = static_order(table)
    y, covered, load = _kernels.static_kernel(
        inst.item_ptr, inst.item_idx, inst.weights, inst.capacity, y0, order
    )
    return RepairOutcome(y, covered, _objective(inst, y), load)


class Repairer:
    """Operator bound to one instance, callable on candidate vectors.

    ``kind`` is ``"isro"``, ``"esro"`` or ``"static"``. The encoding follows
    from the kind: element vectors for ``esro``, item vectors otherwise.
    """

    KINDS = ("isro", "esro", "static")

    def __init__(self, inst: SukpInstance, kind: str = "isro", table: DensityTable | None = None):
        if kind not in self.KINDS:
            raise ValueError(f"unknown repair kind {kind!r}; expected one of {self.KINDS}")
        self.inst = inst
        self.kind = kind
        self.table = table if table is not None else build_density_table(inst)
        self._order = static_order(self.table) if kind == "static" else None

    @property
    def mode(self) -> str:
        return "element" if self.kind == "esro" else "item"

    @property
    def dimension(self) -> int:
        return self.inst.element_count if self.kind == "esro" else self.inst.item_count

    def __call__(self, candidate) -> RepairOutcome:
        if self.kind == "isro":
            return isro(self.inst, self.table, candidate)
        if self.kind == "esro":
            return esro(self.inst, self.table, candidate)
        return static_greedy_repair(self.inst, self.table, candidate, self._order)
