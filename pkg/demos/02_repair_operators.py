"""
Repair operators side by side
=============================

The same random candidates go through the dynamic item repair, the static
baseline and (in element encoding) the element repair.
"""

import numpy as np

from sukp import Repairer, exact_bruteforce, generate_instance

inst = generate_instance(16, 14, 0.25, 0.5, seed=3)
opt = exact_bruteforce(inst).optimum
print(f"{inst.name}: optimum {opt:g}")

rng = np.random.default_rng(0)
repairs = {kind: Repairer(inst, kind) for kind in Repairer.KINDS}
for trial in range(5):
    line = []
    for kind, repair in repairs.items():
        cand = rng.random(repair.dimension) < 0.5
        line.append(f"{kind}={repair(cand).objective:g}")
    print(f"candidate {trial}:", "  ".join(line))

# an empty candidate is pure greedy construction
for kind in ("isro", "static"):
    out = repairs[kind](np.zeros(inst.item_count, bool))
    print(f"greedy {kind}: profit {out.objective:g}, weight {out.weight:g} of {inst.capacity:g}")
