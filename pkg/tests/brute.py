"""Independent brute-force references used as test oracles.

Nothing here imports the code under test except plain data types.
"""
import itertools
import math


def injections(n, m):
    return itertools.permutations(range(m), n)


def brute_max_sum(w):
    n, m = len(w), len(w[0]) if w else 0
    best = -math.inf
    for perm in injections(n, m):
        total = 0.0
        for i, g in enumerate(perm):
            total += w[i][g]
        best = max(best, total)
    return best


def brute_min_sum(w):
    n, m = len(w), len(w[0]) if w else 0
    best = math.inf
    for perm in injections(n, m):
        total = 0.0
        for i, g in enumerate(perm):
            total += w[i][g]
        best = min(best, total)
    return best


def brute_bottleneck(w):
    n, m = len(w), len(w[0]) if w else 0
    return max(min(w[i][g] for i, g in enumerate(perm)) for perm in injections(n, m))


def subsets(m):
    for r in range(m + 1):
        yield from (frozenset(c) for c in itertools.combinations(range(m), r))


def has_balanced_partition(s):
    z = sum(s)
    if z % 2:
        return False
    return any(
        sum(x for x, pick in zip(s, picks) if pick) * 2 == z
        for picks in itertools.product((0, 1), repeat=len(s))
    )


def direct_power_mean(xs, p):
    """Textbook definition, no log-space tricks."""
    n = len(xs)
    if p == 0:
        return math.prod(xs) ** (1 / n)
    if p == -math.inf:
        return min(xs)
    return (sum(x**p for x in xs) / n) ** (1 / p)


def all_allocations(n, m):
    """Every assignment of goods to agents, as tuples of bundles."""
    for owner in itertools.product(range(n), repeat=m):
        yield tuple(frozenset(g for g in range(m) if owner[g] == i) for i in range(n))
