import json
import random

import pytest

from ellis_lab.residues import a0, a1
from ellis_lab.trees import (
    ChainExhausted,
    ChainStep,
    CosetTree,
    OnInfiniteBranch,
    dyadic_branch_bits,
    dyadic_branch_tree,
    inner,
    is_irreducible,
    is_periodic_on,
    lcm_chain,
    leaf,
    linearize,
    nonperiodicity_chain,
    random_tree,
    reduce,
    reduce_in_order,
    reducible_infinite_pair,
    reducible_pair,
    ternary_branch_tree,
    valuation_tree,
    verify_chain,
    verify_step,
)

WINDOW = range(-128, 129)


def dyadic_oracle(k, bits):
    """Value by the first binary digit where k leaves the branch."""
    for n, b in enumerate(bits):
        if (k >> n) & 1 != b:
            return n % 2
    raise AssertionError("k on the branch")


def test_dyadic_tree_leaf_values():
    t = dyadic_branch_tree()
    assert t.validate() == []
    assert (t.evaluate(0), t.evaluate(3), t.evaluate(9)) == (0, 1, 0)
    leaves = [(2, 0, 0), (4, 3, 1), (8, 1, 0), (16, 5, 1)]
    for m, r, v in leaves:
        assert all(t.evaluate(r + j * m) == v for j in range(-20, 20))
    bits = dyadic_branch_bits(24)
    assert bits[:4] == [1, 0, 1, 1]
    assert [t.evaluate(k) for k in WINDOW] == [dyadic_oracle(k, bits) for k in WINDOW]


def test_validate_reports_violations():
    sib = CosetTree(inner(1, 0, leaf(2, 0, 0), inner(2, 1, leaf(4, 1, 0), leaf(6, 3, 1))))
    assert any(v.rule == "sibling subgroup mismatch" for v in sib.validate())
    overlap = CosetTree(inner(1, 0, leaf(2, 0, 0), leaf(2, 2, 1)))
    assert any(v.rule == "not disjoint" for v in overlap.validate())
    gap = CosetTree(inner(1, 0, leaf(3, 0, 0), leaf(3, 1, 1)))
    assert any("partition" in v.rule for v in gap.validate())
    assert any("isolated" in v.rule for v in valuation_tree().validate())


def test_unresolved_point_raises():
    t = valuation_tree()
    with pytest.raises(OnInfiniteBranch):
        t.evaluate(0)
    assert valuation_tree(1).evaluate(0) == 1


def test_to_pfset_examples():
    t = dyadic_branch_tree()
    s = t.to_pfset()
    assert all(s.membership(k) == t.evaluate(k) for k in range(-256, 257))
    assert valuation_tree(0).to_pfset().equals(a0())
    assert valuation_tree(1).to_pfset().equals(a1())
    whole = CosetTree(leaf(1, 0, 1)).to_pfset()
    assert all(whole.membership(k) == 1 for k in range(-5, 6))


def test_linearize_examples():
    t = dyadic_branch_tree()
    assert linearize(t).to_json() == t.to_json()
    two = CosetTree(inner(1, 0, leaf(2, 0, 0), leaf(2, 1, 1)))
    assert linearize(two).to_json() == two.to_json()
    f3 = ternary_branch_tree()
    assert not f3.is_linear()
    assert [sorted(m) for m in f3.depth_moduli()[:3]] == [[1], [3], [6, 9]]
    lin = linearize(f3)
    assert lin.is_linear() and lin.validate() == []
    assert lcm_chain(f3)[:4] == [1, 3, 18, 54]
    assert all(lin.evaluate(k) == f3.evaluate(k) for k in WINDOW)


def test_reduce_examples():
    t, want = reducible_pair()
    assert reduce(t).to_json() == want.to_json()
    t, want = reducible_infinite_pair()
    assert t.validate() == []
    assert reduce(t).to_json() == want.to_json()
    f1 = dyadic_branch_tree()
    assert reduce(f1).to_json() == f1.to_json()
    const = CosetTree(inner(1, 0, leaf(2, 0, 1), inner(2, 1, leaf(4, 1, 1), leaf(4, 3, 1))))
    assert reduce(const).to_json() == CosetTree(leaf(1, 0, 1)).to_json()


def battery_trees():
    rng = random.Random(2024)
    trees = [random_tree(rng) for _ in range(16)]
    trees += [dyadic_branch_tree(), ternary_branch_tree(10), reducible_infinite_pair(12)[0], valuation_tree(0)]
    return trees


@pytest.mark.parametrize("t", battery_trees())
def test_transformations_preserve_function(t):
    assert t.validate() == []
    lin, red = linearize(t), reduce(t)
    assert lin.is_linear() and lin.validate() == []
    assert red.validate() == [] and is_irreducible(red)
    for k in WINDOW:
        v = t.try_evaluate(k)
        if v is not None:
            assert lin.evaluate(k) == v and red.evaluate(k) == v
    assert reduce(red).to_json() == red.to_json()
    moduli = [ms.pop() for ms in lin.depth_moduli()]
    assert all(b % a == 0 for a, b in zip(moduli, moduli[1:]))


@pytest.mark.parametrize("seed", range(6))
def test_reduce_confluent(seed):
    rng = random.Random(seed)
    t = random_tree(rng, max_depth=5, branch_p=0.7)
    want = reduce(t).to_json()
    for k in range(5):
        assert reduce_in_order(t, random.Random(k)).to_json() == want


def test_json_round_trip():
    for t in (dyadic_branch_tree(8), valuation_tree(1, 6), ternary_branch_tree(4)):
        back = CosetTree.from_json(json.loads(json.dumps(t.to_json())))
        assert back == t


def test_chain_dyadic():
    t = dyadic_branch_tree()
    ev = nonperiodicity_chain(t, 3)
    assert ev.moduli == (2, 4, 8, 16)
    assert [(s.point, s.value) for s in ev.steps] == [(3, 1), (1, 0), (5, 1)]
    assert verify_chain(t, ev)
    long = nonperiodicity_chain(t, 20)
    assert long.excludes_index(16)
    with pytest.raises(ChainExhausted):
        nonperiodicity_chain(dyadic_branch_tree(6), 10)


def test_chain_step_rejects_bad_witness():
    t = dyadic_branch_tree()
    assert not verify_step(t, ChainStep(2, 4, 1, 0))  # 4Z+1 is not constant
    assert verify_step(t, ChainStep(1, 2, 0, 0))
    assert not verify_step(t, ChainStep(2, 6, 3, 1))  # 6 is not in the chain but 2 | 6; 6Z+3 mixes values
    assert not verify_step(t, ChainStep(4, 8, 3, 1))  # 4Z+3 is already constant


def test_ternary_tree_is_periodic_and_chain_exhausts():
    f3 = ternary_branch_tree()
    assert is_irreducible(f3)
    red = reduce(f3)
    assert all(red.evaluate(k) == k % 2 for k in range(-512, 513))
    assert is_periodic_on(red, 2, -512, 512)
    with pytest.raises(ChainExhausted):
        nonperiodicity_chain(reduce(linearize(f3)), 3)


def test_finite_tree_chain_exhausts():
    two = CosetTree(inner(1, 0, leaf(2, 0, 0), leaf(2, 1, 1)))
    with pytest.raises(ChainExhausted):
        nonperiodicity_chain(two, 1)
