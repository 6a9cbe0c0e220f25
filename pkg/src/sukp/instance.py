"""Set-union knapsack instances: data model, text format, generator, validation.

An instance has ``m`` items and ``n`` elements. Item ``i`` carries profit
``profits[i]`` and is the element subset ``U_i`` given by row ``i`` of the
boolean ``membership`` matrix; element ``j`` carries weight ``weights[j]``.
All indices are zero-based.

The canonical text format (``SUKP1``)::

    SUKP1
    m n
    C
    p_1 ... p_m
    w_1 ... w_n
    <m rows of n characters '0'/'1'>
    # key=value            (optional metadata lines)
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

MAGIC = "SUKP1"
PROFIT_RANGE = (1, 500)
WEIGHT_RANGE = (1, 100)


class InstanceFormatError(ValueError):
    """Raised by :func:`parse_instance` on malformed or invalid text."""

    def __init__(self, lineno: int, reason: str):
        self.lineno = lineno
        self.reason = reason
        super().__init__(f"line {lineno}: {reason}")


class Violation(NamedTuple):
    code: str
    index: int | None = None

    def __str__(self):
        return self.code if self.index is None else f"{self.code}({self.index})"


@dataclass(frozen=True)
class InstanceMeta:
    name: str
    density: float | None = None
    capacity_ratio: float | None = None
    seed: int | None = None


def instance_name(m: int, n: int, density: float, capacity_ratio: float) -> str:
    """Benchmark-style name, e.g. ``sukp100_85_0.10_0.75``."""
    return f"sukp{m}_{n}_{density:.2f}_{capacity_ratio:.2f}"


def _frozen(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


def _csr(mask: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    counts = mask.sum(axis=1)
    ptr = np.zeros(mask.shape[0] + 1, dtype=np.int64)
    np.cumsum(counts, out=ptr[1:])
    idx = np.nonzero(mask)[1].astype(np.int64)
    return _frozen(ptr), _frozen(idx)


@dataclass(frozen=True, eq=False)
class SukpInstance:
    """Immutable SUKP instance.

    Construction only checks array shapes; use :func:`validate_instance` for
    the semantic invariants (no empty item, no orphan element, capacity
    within total weight, finite nonnegative data).

    Besides the dense ``membership`` matrix, compressed row/column index
    arrays are precomputed: the elements of item ``i`` are
    ``item_idx[item_ptr[i]:item_ptr[i + 1]]`` and the items containing
    element ``j`` are ``elem_idx[elem_ptr[j]:elem_ptr[j + 1]]``.
    """

    profits: np.ndarray
    weights: np.ndarray
    membership: np.ndarray
    capacity: float
    meta: InstanceMeta | None = field(default=None, compare=False)

    def __post_init__(self):
        profits = np.array(self.profits, dtype=np.float64).ravel()
        weights = np.array(self.weights, dtype=np.float64).ravel()
        membership = np.array(self.membership, dtype=bool)
        if membership.ndim != 2 or membership.shape != (profits.size, weights.size):
            raise ValueError(
                f"membership shape {membership.shape} does not match "
                f"{profits.size} profits x {weights.size} weights"
            )
        if profits.size == 0 or weights.size == 0:
            raise ValueError("instance needs at least one item and one element")
        set_ = object.__setattr__
        set_(self, "profits", _frozen(profits))
        set_(self, "weights", _frozen(weights))
        set_(self, "membership", _frozen(membership))
        set_(self, "capacity", float(self.capacity))
        item_ptr, item_idx = _csr(membership)
        elem_ptr, elem_idx = _csr(membership.T)
        set_(self, "item_ptr", item_ptr)
        set_(self, "item_idx", item_idx)
        set_(self, "elem_ptr", elem_ptr)
        set_(self, "elem_idx", elem_idx)

    @classmethod
    def from_sets(cls, profits, weights, items, capacity, meta=None) -> "SukpInstance":
        """Build from an iterable of element-index collections, one per item."""
        items = [list(u) for u in items]
        membership = np.zeros((len(items), len(weights)), dtype=bool)
        for i, u in enumerate(items):
            membership[i, u] = True
        return cls(profits, weights, membership, capacity, meta)

    @property
    def item_count(self) -> int:
        return self.profits.size

    @property
    def element_count(self) -> int:
        return self.weights.size

    @property
    def name(self) -> str | None:
        return self.meta.name if self.meta else None

    def elements_of(self, item: int) -> np.ndarray:
        return self.item_idx[self.item_ptr[item]:self.item_ptr[item + 1]]

    def items_of(self, element: int) -> np.ndarray:
        return self.elem_idx[self.elem_ptr[element]:self.elem_ptr[element + 1]]

    def __eq__(self, other):
        if not isinstance(other, SukpInstance):
            return NotImplemented
        return (
            self.capacity == other.capacity
            and np.array_equal(self.profits, other.profits)
            and np.array_equal(self.weights, other.weights)
            and np.array_equal(self.membership, other.membership)
        )

    __hash__ = None

    def __repr__(self):
        label = f" {self.name!r}" if self.name else ""
        return (
            f"<SukpInstance{label} m={self.item_count} n={self.element_count} "
            f"C={_fmt_number(self.capacity)}>"
        )


def validate_instance(inst: SukpInstance) -> list[Violation]:
    """Return every invariant violation; an empty list means the instance is valid."""
    out = []
    for name, arr in (("profit", inst.profits), ("weight", inst.weights)):
        for j in np.flatnonzero(~np.isfinite(arr)):
            out.append(Violation(f"nonfinite-{name}", int(j)))
        for j in np.flatnonzero(arr < 0):
            out.append(Violation(f"negative-{name}", int(j)))
    if not math.isfinite(inst.capacity):
        out.append(Violation("nonfinite-capacity"))
    elif inst.capacity < 0:
        out.append(Violation("negative-capacity"))
    for i in np.flatnonzero(~inst.membership.any(axis=1)):
        out.append(Violation("empty-item", int(i)))
    for j in np.flatnonzero(~inst.membership.any(axis=0)):
        out.append(Violation("orphan-element", int(j)))
    if inst.capacity > inst.weights.sum():
        out.append(Violation("capacity-exceeds-total"))
    return out


def _fmt_number(x: float) -> str:
    x = float(x)
    if x.is_integer() and abs(x) < 2**53:
        return str(int(x))
    return repr(x)


def serialize_instance(inst: SukpInstance) -> str:
    lines = [
        MAGIC,
        f"{inst.item_count} {inst.element_count}",
        _fmt_number(inst.capacity),
        " ".join(map(_fmt_number, inst.profits)),
        " ".join(map(_fmt_number, inst.weights)),
    ]
    lines.extend("".join("1" if b else "0" for b in row) for row in inst.membership)
    meta = inst.meta
    if meta is not None:
        lines.append(f"# name={meta.name}")
        if meta.density is not None:
            lines.append(f"# density={meta.density!r}")
        if meta.capacity_ratio is not None:
            lines.append(f"# capacity_ratio={meta.capacity_ratio!r}")
        if meta.seed is not None:
            lines.append(f"# seed={meta.seed}")
    return "\n".join(lines) + "\n"


def _numbers(line: str, lineno: int, count: int, what: str) -> list[float]:
    tokens = line.split()
    if len(tokens) != count:
        raise InstanceFormatError(lineno, f"expected {count} {what}, found {len(tokens)}")
    try:
        return [float(t) for t in tokens]
    except ValueError as exc:
        raise InstanceFormatError(lineno, f"bad number in {what}: {exc}") from None


def parse_instance(text: str) -> SukpInstance:
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if len(lines) < 5:
        raise InstanceFormatError(len(lines) + 1, "truncated header")
    if lines[0].strip() != MAGIC:
        raise InstanceFormatError(1, f"expected {MAGIC!r} header, got {lines[0]!r}")
    dims = lines[1].split()
    if len(dims) != 2 or not all(d.isdigit() for d in dims):
        raise InstanceFormatError(2, "expected two positive integers 'm n'")
    m, n = map(int, dims)
    if m < 1 or n < 1:
        raise InstanceFormatError(2, "item and element counts must be positive")
    (capacity,) = _numbers(lines[2], 3, 1, "capacity value")
    profits = _numbers(lines[3], 4, m, "profits")
    weights = _numbers(lines[4], 5, n, "weights")

    if len(lines) < 5 + m:
        raise InstanceFormatError(len(lines) + 1, f"expected {m} membership rows")
    membership = np.zeros((m, n), dtype=bool)
    for i in range(m):
        lineno = 6 + i
        row = lines[5 + i].strip()
        if len(row) != n or set(row) - {"0", "1"}:
            raise InstanceFormatError(lineno, f"membership row must be {n} characters of 0/1")
        membership[i] = np.frombuffer(row.encode(), dtype=np.uint8) == ord("1")
        if not membership[i].any():
            raise InstanceFormatError(lineno, f"item {i} is empty")

    meta_fields = {}
    for k, line in enumerate(lines[5 + m:], start=6 + m):
        if not line.strip():
            continue
        if not line.startswith("#") or "=" not in line:
            raise InstanceFormatError(k, "trailing lines must be '# key=value' comments")
        key, _, value = line[1:].strip().partition("=")
        meta_fields[key.strip()] = value.strip()

    meta = None
    if "name" in meta_fields:
        try:
            meta = InstanceMeta(
                name=meta_fields["name"],
                density=float(meta_fields["density"]) if "density" in meta_fields else None,
                capacity_ratio=(
                    float(meta_fields["capacity_ratio"]) if "capacity_ratio" in meta_fields else None
                ),
                seed=int(meta_fields["seed"]) if "seed" in meta_fields else None,
            )
        except ValueError as exc:
            raise InstanceFormatError(6 + m, f"bad metadata: {exc}") from None

    inst = SukpInstance(profits, weights, membership, capacity, meta)
    for v in validate_instance(inst):
        if v.code == "orphan-element":
            raise InstanceFormatError(6, f"element {v.index} belongs to no item")
        if v.code == "capacity-exceeds-total":
            raise InstanceFormatError(3, "capacity exceeds total element weight")
        line_of = {"profit": 4, "weight": 5, "capacity": 3}
        raise InstanceFormatError(line_of[v.code.rsplit("-", 1)[1]], f"invalid value: {v}")
    return inst


def read_instance(path) -> SukpInstance:
    with open(path, encoding="utf-8") as fh:
        return parse_instance(fh.read())


def write_instance(inst: SukpInstance, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(serialize_instance(inst))


def generate_instance(
    m: int, n: int, density: float, capacity_ratio: float, seed: int
) -> SukpInstance:
    """Random instance in the style of the ``sukp{m}_{n}_{a}_{b}`` benchmarks.

    Profits are uniform integers in [1, 500] and weights uniform integers in
    [1, 100]. One membership entry is placed per row and per column first
    (tiled random permutations), the remaining cells are then switched on
    independently so that the expected number of entries is
    ``density * m * n``. Capacity is ``capacity_ratio * sum(weights)``
    rounded half-up.
    """
    if m < 1 or n < 1:
        raise ValueError("m and n must be positive")
    if not 0 < density <= 1 or not 0 < capacity_ratio <= 1:
        raise ValueError("density and capacity_ratio must lie in (0, 1]")
    base = max(m, n)
    target = density * m * n
    if target + 1e-9 < base:
        raise ValueError(
            f"density {density} gives {target:g} entries; at least {base} are "
            f"needed to cover every item and element"
        )
    rng = np.random.default_rng(seed)
    profits = rng.integers(PROFIT_RANGE[0], PROFIT_RANGE[1] + 1, size=m)
    weights = rng.integers(WEIGHT_RANGE[0], WEIGHT_RANGE[1] + 1, size=n)

    membership = np.zeros((m, n), dtype=bool)
    rows = np.resize(rng.permutation(m), base)
    cols = np.resize(rng.permutation(n), base)
    membership[rows, cols] = True
    free = m * n - base
    p_fill = min(1.0, max(0.0, (target - base) / free)) if free else 0.0
    membership |= rng.random((m, n)) < p_fill

    capacity = math.floor(capacity_ratio * float(weights.sum()) + 0.5)
    meta = InstanceMeta(instance_name(m, n, density, capacity_ratio), density, capacity_ratio, seed)
    return SukpInstance(profits, weights, membership, capacity, meta)
