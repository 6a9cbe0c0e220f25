"""
Running DTLBO and ranking variants
==================================

A handful of runs per variant on two generated instances, then Friedman
ranks of the per-instance means.
"""

from sukp import DtlboParams, generate_instance, run
from sukp.bench import ExperimentConfig, rank_rows, run_experiment

inst = generate_instance(40, 35, 0.1, 0.75, seed=1)
res = run(inst, DtlboParams(seed=7))
print(f"{inst.name}: best {res.fitness:g} after {res.evaluations_used} evaluations")
print("first improvements:", res.history[:: max(1, len(res.history) // 6)])

config = ExperimentConfig(
    instances=["gen:30:30:0.1:0.5:1", "gen:30:30:0.1:0.75:2", "gen:25:30:0.15:0.5:3"],
    algorithms=["I-DTLBO", "E-DTLBO", "S-DTLBO"],
    runs=5,
    master_seed=0,
)
rows = run_experiment(config)
for r in rows:
    print(f"{r.instance:<22} {r.algorithm:<8} best {r.best:>7g} mean {r.mean:>9.2f} std {r.std:.2f}")

ranks = rank_rows(rows)
for name, rank in zip(ranks.algorithms, ranks.avg_ranks):
    print(f"{name:<8} average rank {rank:.2f}")
