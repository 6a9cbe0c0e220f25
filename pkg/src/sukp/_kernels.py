"""Compiled greedy loops behind :mod:`sukp.repair`.

Instances are passed in compressed form: ``item_ptr/item_idx`` list the
elements of each item, ``elem_ptr/elem_idx`` the items of each element.
Argmax scans run in ascending index order with a strict ``>``, so ties go to
the lowest index.
"""

import numpy as np
from numba import njit


@njit(cache=True)
def _item_density(i, item_ptr, item_idx, covered, uwe, profits):
    rwi = 0.0
    for q in range(item_ptr[i], item_ptr[i + 1]):
        e = item_idx[q]
        if not covered[e]:
            rwi += uwe[e]
    if rwi == 0.0:
        return np.inf
    return profits[i] / rwi


@njit(cache=True)
def _uncovered_weight(i, item_ptr, item_idx, covered, weights):
    add = 0.0
    for q in range(item_ptr[i], item_ptr[i + 1]):
        e = item_idx[q]
        if not covered[e]:
            add += weights[e]
    return add


@njit(cache=True)
def isro_kernel(item_ptr, item_idx, elem_ptr, elem_idx, profits, weights, uwe, capacity, candidate):
    m = profits.size
    n = weights.size
    y = np.zeros(m, dtype=np.bool_)
    covered = np.zeros(n, dtype=np.bool_)
    load = 0.0
    dens = np.empty(m)
    for i in range(m):
        dens[i] = _item_density(i, item_ptr, item_idx, covered, uwe, profits)
    stamp = np.zeros(m, dtype=np.int64)
    touched = np.empty(m, dtype=np.int64)
    tick = 0

    for phase in range(2):
        in_pass = candidate.copy() if phase == 0 else ~candidate
        remaining = 0
        for i in range(m):
            if in_pass[i]:
                remaining += 1
        while remaining > 0:
            best = -1
            best_d = 0.0
            for i in range(m):
                if in_pass[i] and (best < 0 or dens[i] > best_d):
                    best = i
                    best_d = dens[i]
            in_pass[best] = False
            remaining -= 1
            add = _uncovered_weight(best, item_ptr, item_idx, covered, weights)
            if load + add <= capacity:
                y[best] = True
                load += add
                tick += 1
                k = 0
                for q in range(item_ptr[best], item_ptr[best + 1]):
                    e = item_idx[q]
                    if covered[e]:
                        continue
                    covered[e] = True
                    for r in range(elem_ptr[e], elem_ptr[e + 1]):
                        i2 = elem_idx[r]
                        if stamp[i2] != tick:
                            stamp[i2] = tick
                            touched[k] = i2
                            k += 1
                for t in range(k):
                    i2 = touched[t]
                    dens[i2] = _item_density(i2, item_ptr, item_idx, covered, uwe, profits)
    return y, covered, load


@njit(cache=True)
def static_kernel(item_ptr, item_idx, weights, capacity, candidate, order):
    m = candidate.size
    y = np.zeros(m, dtype=np.bool_)
    covered = np.zeros(weights.size, dtype=np.bool_)
    load = 0.0
    for phase in range(2):
        want = phase == 0
        for i in order:
            if candidate[i] != want:
                continue
            add = _uncovered_weight(i, item_ptr, item_idx, covered, weights)
            if load + add <= capacity:
                y[i] = True
                load += add
                for q in range(item_ptr[i], item_ptr[i + 1]):
                    covered[item_idx[q]] = True
    return y, covered, load


# ---------------------------------------------------------------------------
# element loading

@njit(cache=True)
def _refresh_item(i, item_ptr, item_idx, inside, weights, profits, contrib):
    ow = 0.0
    for q in range(item_ptr[i], item_ptr[i + 1]):
        e = item_idx[q]
        if not inside[e]:
            ow += weights[e]
    contrib[i] = profits[i] / ow if ow > 0.0 else 0.0


@njit(cache=True)
def _refresh_element(j, elem_ptr, elem_idx, contrib, rv):
    s = 0.0
    for r in range(elem_ptr[j], elem_ptr[j + 1]):
        s += contrib[elem_idx[r]]
    rv[j] = s


@njit(cache=True)
def _propagate(changed, nchanged, item_ptr, item_idx, elem_ptr, elem_idx, inside,
               weights, profits, contrib, rv, istamp, estamp, tick):
    """Recompute item contributions and element densities around ``changed``."""
    for a in range(nchanged):
        e = changed[a]
        for r in range(elem_ptr[e], elem_ptr[e + 1]):
            i = elem_idx[r]
            if istamp[i] != tick:
                istamp[i] = tick
                _refresh_item(i, item_ptr, item_idx, inside, weights, profits, contrib)
    for a in range(nchanged):
        e = changed[a]
        for r in range(elem_ptr[e], elem_ptr[e + 1]):
            i = elem_idx[r]
            for q in range(item_ptr[i], item_ptr[i + 1]):
                j = item_idx[q]
                if estamp[j] != tick:
                    estamp[j] = tick
                    _refresh_element(j, elem_ptr, elem_idx, contrib, rv)


@njit(cache=True)
def esro_kernel(item_ptr, item_idx, elem_ptr, elem_idx, profits, weights, capacity, candidate):
    m = profits.size
    n = weights.size
    inside = np.zeros(n, dtype=np.bool_)
    in_a = np.zeros(m, dtype=np.bool_)
    count_in = np.zeros(m, dtype=np.int64)
    contrib = np.empty(m)
    rv = np.empty(n)
    istamp = np.zeros(m, dtype=np.int64)
    estamp = np.zeros(n, dtype=np.int64)
    changed = np.empty(n, dtype=np.int64)
    tick = 0
    load = 0.0
    for i in range(m):
        _refresh_item(i, item_ptr, item_idx, inside, weights, profits, contrib)
    for j in range(n):
        _refresh_element(j, elem_ptr, elem_idx, contrib, rv)

    # passes: 0 = candidate's ones, 1 = candidate's zeros, 2.. = refill over E - B
    phase = 0
    while True:
        if phase == 0:
            in_pass = candidate.copy()
        elif phase == 1:
            in_pass = ~candidate
        else:
            in_pass = ~inside
        remaining = 0
        for j in range(n):
            if in_pass[j]:
                remaining += 1
        while remaining > 0:
            best = -1
            best_d = 0.0
            for j in range(n):
                if in_pass[j] and (best < 0 or rv[j] > best_d):
                    best = j
                    best_d = rv[j]
            in_pass[best] = False
            remaining -= 1
            if load + weights[best] <= capacity:
                inside[best] = True
                load += weights[best]
                for r in range(elem_ptr[best], elem_ptr[best + 1]):
                    count_in[elem_idx[r]] += 1
                tick += 1
                changed[0] = best
                _propagate(changed, 1, item_ptr, item_idx, elem_ptr, elem_idx, inside,
                           weights, profits, contrib, rv, istamp, estamp, tick)
        if phase == 0:
            phase = 1
            continue

        # derive items wholly inside B
        flag = False
        for i in range(m):
            if not in_a[i] and count_in[i] == item_ptr[i + 1] - item_ptr[i]:
                in_a[i] = True
                flag = True
        if phase >= 2 and not flag:
            # refill completed no item: its elements all dangle, drop them
            for j in range(n):
                if inside[j]:
                    keep = False
                    for r in range(elem_ptr[j], elem_ptr[j + 1]):
                        if in_a[elem_idx[r]]:
                            keep = True
                            break
                    if not keep:
                        inside[j] = False
            break

        # delete dangling elements
        k = 0
        for j in range(n):
            if inside[j]:
                keep = False
                for r in range(elem_ptr[j], elem_ptr[j + 1]):
                    if in_a[elem_idx[r]]:
                        keep = True
                        break
                if not keep:
                    inside[j] = False
                    for r in range(elem_ptr[j], elem_ptr[j + 1]):
                        count_in[elem_idx[r]] -= 1
                    changed[k] = j
                    k += 1
        if k == 0:
            break
        load = 0.0
        for j in range(n):
            if inside[j]:
                load += weights[j]
        tick += 1
        _propagate(changed, k, item_ptr, item_idx, elem_ptr, elem_idx, inside,
                   weights, profits, contrib, rv, istamp, estamp, tick)
        phase = 2

    load = 0.0
    for j in range(n):
        if inside[j]:
            load += weights[j]
    return inside, in_a, load
