import itertools
import math

import pytest

from brute import subsets
from fairpmean.errors import InputError
from fairpmean.exact import exact_optimum
from fairpmean.generators import (
    KINDS,
    gen_partition_reduction,
    gen_random,
    gen_xos_hard,
    partition_target,
    random_blocks,
)
from fairpmean.serialization import dumps_instance
from fairpmean.valuations import check_axioms


def literal_clause_max(n, delta, T, block=None):
    """Max over the explicit additive clauses: indicators of small sets, the
    flat clause with weight abar on every good, and optionally the block."""
    m = n * n
    limit = (1 + delta) * n ** (4 * delta)
    abar = (1 + delta) / n ** (1 - 2 * delta)
    best = abar * len(T)
    for k in range(m + 1):
        if k > limit:
            break
        for S in itertools.combinations(range(m), k):
            best = max(best, float(len(T & set(S))))
    if block is not None:
        best = max(best, float(len(T & block)))
    return best


# ------------------------------------------------------------------ random


@pytest.mark.parametrize("kind", KINDS)
def test_same_seed_same_instance(kind):
    assert dumps_instance(gen_random(kind, 3, 6, 42)) == dumps_instance(gen_random(kind, 3, 6, 42))
    assert dumps_instance(gen_random(kind, 3, 6, 42)) != dumps_instance(gen_random(kind, 3, 6, 43))


def test_additive_passes_axioms():
    inst = gen_random("additive", 2, 4, 7)
    assert all(check_axioms(o, 4) == [] for o in inst.oracles)


def test_xos_values_equal_clause_max_exhaustively():
    inst = gen_random("xos", 2, 10, 3, clauses=3)
    for o in inst.oracles:
        assert len(o.clauses) == 3
        for s in subsets(10):
            expected = max(sum(c[g] for g in s) for c in o.clauses) if s else 0.0
            assert o.value(s) == pytest.approx(expected, rel=1e-12, abs=1e-12)


def test_zero_prob_produces_zeros():
    inst = gen_random("additive", 1, 200, 0, zero_prob=0.5)
    zeros = sum(v == 0 for v in inst.oracles[0].values)
    assert 60 < zeros < 140


@pytest.mark.parametrize(
    "kwargs",
    [dict(kind="nope"), dict(kind="xos", clauses=0), dict(kind="additive", zero_prob=1.0), dict(kind="additive", n=0)],
)
def test_bad_parameters(kwargs):
    args = dict(kind="additive", n=2, m=3, seed=0)
    args.update(kwargs)
    kind = args.pop("kind")
    with pytest.raises(InputError):
        gen_random(kind, **args)


# ---------------------------------------------------------------- xos hard


@pytest.mark.parametrize("n", [2, 3])
@pytest.mark.parametrize("delta", [0.1, 0.2, 0.24])
def test_closed_form_equals_literal_definition(n, delta):
    identical = gen_xos_hard(n, delta, seed=1, identical=True)
    spread = gen_xos_hard(n, delta, seed=1)
    for T in subsets(n * n):
        assert identical.oracles[0].value(T) == pytest.approx(literal_clause_max(n, delta, T), rel=1e-12)
        for i in range(n):
            expected = literal_clause_max(n, delta, T, spread.blocks[i])
            assert spread.oracles[i].value(T) == pytest.approx(expected, rel=1e-12)


def test_blocks_partition_the_goods():
    blocks = random_blocks(4, 9)
    assert all(len(b) == 4 for b in blocks)
    assert frozenset().union(*blocks) == frozenset(range(16))
    assert sum(len(b) for b in blocks) == 16


def test_own_block_is_worth_n():
    inst = gen_xos_hard(3, 0.1, seed=5)
    for i, block in enumerate(inst.blocks):
        assert inst.value(i, block) == 3


def test_hard_f_small_sets():
    o = gen_xos_hard(3, 0.1, identical=True).oracles[0]
    assert o.value(set()) == 0
    assert o.value({4}) == 1


@pytest.mark.parametrize("identical", [True, False])
def test_hard_family_passes_axioms(identical):
    inst = gen_xos_hard(3, 0.1, seed=2, identical=identical)
    for o in inst.oracles:
        assert check_axioms(o, 9, samples=300, seed=3) == []


@pytest.mark.parametrize("delta", [0.0, 0.25, -0.1])
def test_hard_family_rejects_delta(delta):
    with pytest.raises(InputError):
        gen_xos_hard(3, delta)


def test_hard_family_rejects_single_agent():
    with pytest.raises(InputError):
        gen_xos_hard(1, 0.1)


# --------------------------------------------------------------- partition


def test_partition_shape():
    inst = gen_partition_reduction([3, 1, 2, 2])
    assert inst.n == inst.m == 4
    assert inst.oracles[0].values == inst.oracles[1].values == (3.0, 1.0, 2.0, 2.0)
    for o in inst.oracles[2:]:
        assert all(o.value(s) == 0 for s in subsets(4))


def test_partition_pair_attains_target():
    inst = gen_partition_reduction([1, 1])
    res = exact_optimum(inst, 0.5)
    assert inst.target_welfare(0.5) == 1
    assert res.welfare == pytest.approx(1, rel=1e-12)
    assert sorted(res.allocation.to_lists()) == [[0], [1]]


def test_partition_odd_total_falls_short():
    inst = gen_partition_reduction([1, 1, 1])
    res = exact_optimum(inst, 0.5)
    assert res.welfare < inst.target_welfare(0.5) * (1 - 1e-9)


def test_partition_target_formula():
    assert partition_target([2, 2, 4], 0.25) == pytest.approx((2 / 3) ** 4 * 4)
    with pytest.raises(InputError):
        partition_target([1, 1], 1.0)


@pytest.mark.parametrize("s", [[], [5], [1, 0], [2, -1]])
def test_partition_rejects_bad_input(s):
    with pytest.raises(InputError):
        gen_partition_reduction(s)


def test_partition_target_is_an_upper_bound():
    # the target is the welfare of a perfectly balanced split, never exceeded
    for s in ([1, 2, 3], [4, 1, 1], [2, 3]):
        inst = gen_partition_reduction(s)
        for p in (0.25, 0.5, 0.75):
            assert exact_optimum(inst, p).welfare <= inst.target_welfare(p) * (1 + 1e-12)
            assert not math.isnan(inst.target_welfare(p))
