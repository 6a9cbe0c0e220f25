"""
Instances and value densities
=============================

Build a small instance by hand, look at its static densities, then watch the
relative density of an item change as elements get loaded.
"""

import numpy as np

from sukp import SukpInstance, build_density_table, serialize_instance
from sukp.evaluation import rvdi_all

# three items over five elements; items 0 and 1 share elements 0 and 3
inst = SukpInstance.from_sets(
    profits=[30, 20, 10],
    weights=[4, 6, 2, 8, 5],
    items=[[0, 2, 3], [0, 3, 4], [1]],
    capacity=20,
)
print(serialize_instance(inst))

table = build_density_table(inst)
print("element frequency:", table.fe)
print("unit weights:     ", table.uwe)
print("static densities: ", np.round(table.avdi, 3))

# once item 0 is in, item 1 only pays for element 4
loaded = inst.membership[0]
print("relative densities after loading item 0:", rvdi_all(inst, table, loaded))
