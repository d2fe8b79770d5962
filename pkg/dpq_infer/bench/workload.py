"""
Synthetic workloads: skewed cell popularity, multinomial queries and a
hierarchical bootstrap history.
"""
import math

import numpy as np

from dpq_infer.data.cube import CountCube, LinearQuery
from dpq_infer.exceptions import ContractError
from dpq_infer.privacy.mechanism import answer_history

MAX_TRIALS = 10


def cell_distribution(n):
    """
    Cell popularity 0.9 * 10^-floor(j/10) for cell j (0-based), normalized.
    Every block of ten cells is ten times rarer than the one before.
    """
    if n < 1:
        raise ContractError("n must be positive, got {}".format(n))
    raw = 0.9 * np.power(10.0, -(np.arange(n) // 10))
    return raw / math.fsum(raw)


def generate_queries(n, count, source, max_trials=MAX_TRIALS):
    """
    Each query distributes n_t trials over the cells by cell_distribution,
    n_t uniform on {1..max_trials}; coefficient j counts the trials on cell j.
    """
    if count < 0:
        raise ContractError("count must be nonnegative, got {}".format(count))
    p = cell_distribution(n)
    gen = source.generator
    trials = gen.integers(1, max_trials + 1, size=count)
    return [LinearQuery(gen.multinomial(int(t), p)) for t in trials]


def generate_requirements(count, epsilon_range, source):
    """Half-widths epsilon with 2 epsilon uniform on `epsilon_range`."""
    low, high = epsilon_range
    return 0.5 * source.generator.uniform(low, high, size=count)


def random_cube(n, source, max_count=1000):
    """Counts uniform on {0..max_count}."""
    return CountCube(source.generator.integers(0, max_count + 1, size=n))


def tree_levels(n):
    """
    Cell ranges [lo, hi) of a binary partition tree, level by level.
    The last level holds every single cell; ranges that are already single
    cells are only emitted there.
    """
    levels = []
    current = [(0, n)]
    while any(hi - lo > 1 for lo, hi in current):
        levels.append([(lo, hi) for lo, hi in current if hi - lo > 1])
        split = []
        for lo, hi in current:
            if hi - lo > 1:
                mid = (lo + hi + 1) // 2
                split.extend([(lo, mid), (mid, hi)])
            else:
                split.append((lo, hi))
        current = split
    levels.append(current)
    return levels


def build_hier_history(cube, total_alpha, source):
    """
    Answers every node of the partition tree over the cube's cells. Each
    level gets total_alpha / depth; nodes of a level are disjoint, so the
    history costs total_alpha overall.
    """
    if not total_alpha > 0:
        raise ContractError("total_alpha must be positive, got {}".format(total_alpha))
    levels = tree_levels(cube.n)
    level_alpha = total_alpha / len(levels)
    queries = []
    for level in levels:
        for lo, hi in level:
            row = np.zeros(cube.n)
            row[lo:hi] = 1.0
            queries.append(LinearQuery(row))
    return answer_history(cube, queries, [level_alpha] * len(queries), source)
