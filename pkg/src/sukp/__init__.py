"""Set-union knapsack solvers: self-adjusting greedy repair inside discrete TLBO."""

from sukp.dtlbo import DtlboParams, Individual, RunResult, run
from sukp.evaluation import (
    DensityTable,
    build_density_table,
    covered_elements,
    is_feasible_elements,
    is_feasible_items,
    items_from_elements,
    total_profit_elements,
    total_profit_items,
    total_weight_items,
)
from sukp.instance import (
    InstanceMeta,
    SukpInstance,
    generate_instance,
    parse_instance,
    read_instance,
    serialize_instance,
    validate_instance,
    write_instance,
)
from sukp.oracle import exact_branch_bound, exact_bruteforce, verify_solution
from sukp.repair import RepairOutcome, Repairer, esro, isro, static_greedy_repair

__version__ = "0.1.0"
