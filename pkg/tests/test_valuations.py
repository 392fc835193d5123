import threading

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from brute import subsets
from fairpmean.errors import InputError
from fairpmean.generators import KINDS, gen_random
from fairpmean.valuations import (
    AdditiveOracle,
    BudgetAdditiveOracle,
    CountingOracle,
    CoverageOracle,
    Instance,
    ValuationOracle,
    XOSOracle,
    check_axioms,
)


class SquareStub(ValuationOracle):
    """Superadditive on purpose: v(S) = |S|**2."""

    kind = "stub"

    def _evaluate(self, goods):
        return float(len(goods) ** 2)


class NonMonotoneStub(ValuationOracle):
    kind = "stub"

    def _evaluate(self, goods):
        return 1.0 if len(goods) == 1 else 0.0


def test_additive_value():
    assert AdditiveOracle([5, 4, 3]).value({0, 2}) == 8


@pytest.mark.parametrize(
    "oracle",
    [
        AdditiveOracle([5, 4, 3]),
        XOSOracle([[3, 0, 1], [0, 2, 2]]),
        BudgetAdditiveOracle([2, 2, 2], 3),
        CoverageOracle(4, [[0, 1], [1], [3]]),
    ],
)
def test_empty_set_is_zero(oracle):
    assert oracle.value(set()) == 0


def test_xos_takes_best_clause():
    assert XOSOracle([[3, 0], [0, 2]]).value({0, 1}) == 3


def test_budget_additive_caps():
    o = BudgetAdditiveOracle([2, 2], 3)
    assert o.value({0}) == 2
    assert o.value({0, 1}) == 3


def test_coverage_counts_union():
    o = CoverageOracle(5, [[0, 1], [1, 2], [4]])
    assert o.value({0, 1}) == 3
    assert o.value({0, 1, 2}) == 4


@pytest.mark.parametrize("bad", [{3}, {-1}, {0, 7}])
def test_out_of_range_index(bad):
    with pytest.raises(InputError):
        AdditiveOracle([1, 2, 3]).value(bad)


def test_rejects_negative_values():
    with pytest.raises(InputError):
        AdditiveOracle([1, -2])


def test_instance_needs_matching_ground_sets():
    with pytest.raises(InputError):
        Instance(2, 3, (AdditiveOracle([1, 2, 3]), AdditiveOracle([1, 2])))
    with pytest.raises(InputError):
        Instance(2, 2, (AdditiveOracle([1, 2]),))


# -------------------------------------------------------------------- axioms


def test_additive_has_no_violations():
    assert check_axioms(AdditiveOracle([1.5, 0, 2, 7.25]), 4, samples=50, seed=3) == []


def test_budget_additive_has_no_violations():
    assert check_axioms(BudgetAdditiveOracle([2, 2], 3), 2, samples=10, seed=0) == []


def test_superadditive_stub_is_caught_with_witness():
    found = check_axioms(SquareStub(4), 4, samples=10, seed=0)
    sub = [v for v in found if v.axiom == "subadditive"]
    assert sub
    assert (sub[0].a, sub[0].b) == (frozenset({0}), frozenset({1}))


def test_sampled_mode_also_catches_superadditivity():
    found = check_axioms(SquareStub(20), 20, samples=50, seed=1)
    assert any(v.axiom == "subadditive" for v in found)


def test_non_monotone_stub_is_caught():
    found = check_axioms(NonMonotoneStub(3), 3)
    assert any(v.axiom == "monotone" for v in found)


@pytest.mark.parametrize("kind", KINDS)
@pytest.mark.parametrize("seed", range(5))
def test_generated_oracles_satisfy_axioms_exhaustively(kind, seed):
    inst = gen_random(kind, 2, 8, seed, zero_prob=0.2 if seed % 2 else 0.0)
    for o in inst.oracles:
        assert check_axioms(o, inst.m) == []


@pytest.mark.parametrize("kind", KINDS)
def test_generated_oracles_satisfy_axioms_sampled(kind):
    inst = gen_random(kind, 1, 25, 11)
    assert check_axioms(inst.oracles[0], 25, samples=300, seed=4) == []


@settings(max_examples=30, deadline=None)
@given(
    clauses=st.lists(
        st.lists(st.floats(0, 10, allow_nan=False), min_size=6, max_size=6), min_size=1, max_size=4
    )
)
def test_xos_matches_clause_enumeration(clauses):
    o = XOSOracle(clauses)
    for s in subsets(6):
        expected = max(sum(c[g] for g in s) for c in clauses) if s else 0.0
        assert o.value(s) == pytest.approx(expected, rel=1e-12, abs=1e-12)


def test_xos_exhaustive_m12():
    inst = gen_random("xos", 1, 12, 5, clauses=4)
    o = inst.oracles[0]
    for s in subsets(12):
        expected = max(sum(c[g] for g in s) for c in o.clauses) if s else 0.0
        assert o.value(s) == pytest.approx(expected, rel=1e-12, abs=1e-12)


# -------------------------------------------------------------------- counting


def test_counting_is_value_transparent():
    inner = AdditiveOracle([1, 2, 3, 4])
    c = CountingOracle(inner)
    for k, s in enumerate(subsets(4), start=1):
        assert c.value(s) == inner.value(s)
        assert c.count == k
    c.reset()
    assert c.count == 0


def test_counting_under_threads():
    c = CountingOracle(AdditiveOracle([1.0] * 5))

    def work():
        for _ in range(2000):
            c.value({1, 2})

    threads = [threading.Thread(target=work) for _ in range(8)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert c.count == 16000
