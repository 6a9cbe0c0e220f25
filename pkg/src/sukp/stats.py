"""Friedman ranks and the Nemenyi critical difference.

Algorithms are compared on a matrix of per-instance scores (rows are
instances, columns are algorithms, higher is better).
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from importlib import resources

import numpy as np
from scipy import stats

# Critical values q_alpha of the Nemenyi test (studentized range / sqrt(2),
# infinite degrees of freedom), as tabulated by Demsar (2006).
NEMENYI_Q = {
    0.05: {2: 1.960, 3: 2.343, 4: 2.569, 5: 2.728, 6: 2.850, 7: 2.949, 8: 3.031, 9: 3.102, 10: 3.164},
    0.10: {2: 1.645, 3: 2.052, 4: 2.291, 5: 2.459, 6: 2.589, 7: 2.693, 8: 2.780, 9: 2.855, 10: 2.920},
}


def nemenyi_q(k: int, alpha: float = 0.05) -> float:
    if alpha not in NEMENYI_Q:
        raise ValueError(f"alpha must be one of {sorted(NEMENYI_Q)}, got {alpha}")
    table = NEMENYI_Q[alpha]
    if k not in table:
        raise ValueError(f"no tabulated Nemenyi constant for k={k} (supported: 2..{max(table)})")
    return table[k]


def studentized_q(k: int, alpha: float = 0.05) -> float:
    """Nemenyi constant computed from the studentized range distribution."""
    return float(stats.studentized_range.ppf(1.0 - alpha, k, np.inf) / np.sqrt(2.0))


def nemenyi_cd(k: int, n_instances: int, alpha: float = 0.05) -> float:
    """Critical difference between average ranks of ``k`` algorithms over ``n_instances``."""
    if n_instances < 1:
        raise ValueError("n_instances must be positive")
    return nemenyi_q(k, alpha) * np.sqrt(k * (k + 1) / (6.0 * n_instances))


@dataclass(frozen=True)
class RankTable:
    algorithms: tuple
    avg_ranks: np.ndarray
    friedman_statistic: float
    p_value: float
    nemenyi_cd: float
    alpha: float = 0.05

    def rank_of(self, algorithm: str) -> float:
        return float(self.avg_ranks[self.algorithms.index(algorithm)])

    @property
    def leader(self) -> str:
        return self.algorithms[int(np.argmin(self.avg_ranks))]

    def differences(self, reference: str | None = None) -> dict:
        """Average-rank gap of every other algorithm to ``reference``."""
        reference = reference or self.leader
        base = self.rank_of(reference)
        return {a: float(r - base) for a, r in zip(self.algorithms, self.avg_ranks) if a != reference}

    def significant(self, reference: str | None = None) -> dict:
        return {a: abs(d) > self.nemenyi_cd for a, d in self.differences(reference).items()}


def friedman_ranks(means, algorithms=None, alpha: float = 0.05) -> RankTable:
    """Average Friedman ranks (1 = best, ties share the mean rank) and the chi-square test."""
    x = np.asarray(means, dtype=np.float64)
    if x.ndim != 2:
        raise ValueError(f"expected an instances x algorithms matrix, got shape {x.shape}")
    n, k = x.shape
    if k < 2 or n < 2:
        raise ValueError(f"need at least 2 algorithms and 2 instances, got {k} and {n}")
    if not np.isfinite(x).all():
        raise ValueError("score matrix contains non-finite values")
    if algorithms is None:
        algorithms = tuple(f"A{j + 1}" for j in range(k))
    algorithms = tuple(algorithms)
    if len(algorithms) != k:
        raise ValueError(f"{len(algorithms)} algorithm names for {k} columns")

    ranks = stats.rankdata(-x, method="average", axis=1)
    avg = ranks.mean(axis=0)
    chi2 = 12.0 * n / (k * (k + 1)) * (np.sum(avg**2) - k * (k + 1) ** 2 / 4.0)
    p = float(stats.chi2.sf(chi2, k - 1))
    try:
        cd = nemenyi_cd(k, n, alpha)
    except ValueError:
        cd = float("nan")
    return RankTable(algorithms, avg, float(chi2), p, float(cd), alpha)


def parse_means_csv(text: str) -> tuple[list, list, np.ndarray]:
    """Parse ``instance,<alg1>,<alg2>,...`` text into (instances, algorithms, matrix)."""
    rows = list(csv.reader(io.StringIO(text)))
    rows = [r for r in rows if r and not r[0].startswith("#")]
    if len(rows) < 2:
        raise ValueError("means file needs a header and at least one row")
    header, body = rows[0], rows[1:]
    algorithms = [h.strip() for h in header[1:]]
    instances, values = [], []
    for lineno, r in enumerate(body, start=2):
        if len(r) != len(header):
            raise ValueError(f"line {lineno}: expected {len(header)} fields, found {len(r)}")
        instances.append(r[0].strip())
        try:
            values.append([float(v) for v in r[1:]])
        except ValueError as exc:
            raise ValueError(f"line {lineno}: {exc}") from None
    return instances, algorithms, np.array(values)


def read_means_csv(path) -> tuple[list, list, np.ndarray]:
    with open(path, newline="", encoding="utf-8") as fh:
        return parse_means_csv(fh.read())


def paper_means() -> tuple[list, list, np.ndarray]:
    """Published mean results on the 30 benchmark instances (six algorithms)."""
    text = resources.files("sukp").joinpath("data/paper_means.csv").read_text(encoding="utf-8")
    return parse_means_csv(text)
