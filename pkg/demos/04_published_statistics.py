"""
Ranks from the published mean table
===================================

The shipped table of mean results over 30 benchmark instances is ranked
with the Friedman test and the Nemenyi critical difference.
"""

from sukp.stats import friedman_ranks, nemenyi_cd, paper_means

instances, algorithms, means = paper_means()
table = friedman_ranks(means, algorithms)

for name, rank in sorted(zip(algorithms, table.avg_ranks), key=lambda t: t[1]):
    print(f"{name:<8} {rank:.3f}")
print(f"Friedman chi-square {table.friedman_statistic:.2f}, p = {table.p_value:.2g}")

cd = nemenyi_cd(len(algorithms), len(instances))
print(f"critical difference {cd:.3f}")
for name, diff in table.differences("I-DTLBO").items():
    print(f"I-DTLBO vs {name:<8} {diff:.3f}  significant: {abs(diff) > cd}")
