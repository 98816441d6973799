"""Exhaustive reference computations for small instances."""

import itertools

import numpy as np

from netbalance.models.instance import BlockInstance
from netbalance.models.scenario import FORBIDDEN


def random_instance(rng: np.random.Generator, max_k: int = 5, max_n: int = 5, max_r: int = 3,
                    forbid_prob: float = 0.25, min_n: int = 2) -> BlockInstance:
    """Small instance with half-integer scores (all sums exact in floating point)"""
    K = int(rng.integers(1, max_k + 1))
    n = int(rng.integers(min_n, max_n + 1))
    scores = rng.integers(-6, 7, size=(K, n)) / 2.0
    if forbid_prob > 0:
        forbidden = rng.random((K, n)) < forbid_prob
        forbidden[np.arange(K), rng.integers(0, n, size=K)] = False
        scores = np.where(forbidden, FORBIDDEN, scores)
    allowed = np.isfinite(scores).sum(axis=1)
    demands = np.array([rng.integers(0, min(max_r, a) + 1) for a in allowed])
    return BlockInstance.from_scores(scores, demands)


def profiles_of(instance: BlockInstance, k: int) -> list[tuple[tuple[int, ...], float]]:
    """Every feasible profile of customer k with its score <rho_k, u>"""
    allowed = np.flatnonzero(instance.allowed[k])
    options = []
    for chosen in itertools.combinations(allowed.tolist(), int(instance.demands[k])):
        bits = [0] * instance.n
        for i in chosen:
            bits[i] = 1
        options.append((tuple(bits), float(sum(instance.scores[k, i] for i in chosen))))
    return options


def decomposition_table(instance: BlockInstance) -> dict[tuple[int, ...], float]:
    """Every achievable N mapped to max sum_k <rho_k, u_k> over its decompositions"""
    table = {tuple([0] * instance.n): 0.0}
    for k in range(instance.K):
        extended = {}
        for N, value in table.items():
            for bits, score in profiles_of(instance, k):
                key = tuple(a + b for a, b in zip(N, bits))
                total = value + score
                if key not in extended or total > extended[key]:
                    extended[key] = total
        table = extended
    return table


def compositions(total: int, n: int):
    """All nonnegative integer vectors of length n summing to total"""
    for bars in itertools.combinations(range(total + n - 1), n - 1):
        previous = -1
        parts = []
        for bar in bars:
            parts.append(bar - previous - 1)
            previous = bar
        parts.append(total + n - 1 - previous - 1)
        yield tuple(parts)


def all_profiles(n: int, R: int) -> list[np.ndarray]:
    out = []
    for chosen in itertools.combinations(range(n), R):
        bits = np.zeros(n, dtype=np.int8)
        bits[list(chosen)] = 1
        out.append(bits)
    return out
