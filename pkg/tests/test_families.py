import itertools

import pytest
from hypothesis import given
from hypothesis import strategies as st

from ellis_lab.families import (
    EMPTY,
    NoLimitPointWithinBudget,
    PartialPattern,
    PatternFamily,
    content,
    family_periods,
    family_sg_check,
    family_usg_check,
    limit_point,
    min_replicating_points,
    occurrences,
    occurs,
    verify_limit_point,
    window_source,
)
from ellis_lab.residues import v2

P = PartialPattern.of


def chi_even(k):
    return k % 2 == 0


def chi_a0(k):
    return 0 if k == 0 else v2(k) % 2


def test_occurs_examples():
    theta = PartialPattern.interval(0, [1, 0, 1, 0, 1])
    assert occurs(P({0: 1}), theta)
    alt = PartialPattern.interval(0, [0, 1, 0, 1, 0, 1])
    assert not occurs(P({0: 0, 1: 0}), alt)
    assert occurs(alt, alt)
    assert occurs(EMPTY, alt)


patterns = st.dictionaries(st.integers(-6, 6), st.integers(0, 1), max_size=4).map(P)
words = st.lists(st.integers(0, 1), min_size=1, max_size=14)


@given(patterns, words, st.integers(-20, 20), st.integers(-5, 5))
def test_occurs_shift_invariant_and_matches_scan(eta, bits, g, lo):
    theta = PartialPattern.interval(lo, bits)
    assert occurs(eta, theta) == occurs(eta.shift(g), theta)
    assert occurs(eta, theta) == bool(occurrences(eta, theta))
    sparse = P({k: v for k, v in theta.entries if k % 3})
    assert occurs(eta, sparse) == bool(occurrences(eta, sparse))


def test_json_round_trip():
    fam = content(window_source(chi_even, 8), 2)
    back = PatternFamily.from_json(fam.to_json())
    assert back == fam
    assert PartialPattern.from_json({"0": 1, "3": 0}) == P({0: 1, 3: 0})


def test_content_even_examples():
    fam = content(window_source(chi_even, 8), 2)
    ms = set(fam.members)
    for m in [EMPTY, P({0: 0}), P({0: 1}), P({0: 0, 1: 1}), P({0: 1, 1: 0}), P({0: 0, 2: 0})]:
        assert m in ms
    assert P({0: 1, 2: 0}) not in ms and P({0: 0, 1: 0}) not in ms
    ones = content(window_source(lambda k: True, 8), 2)
    assert all(set(m.vals) <= {1} for m in ones.members)


def test_sg_even_subwindows():
    members = tuple(
        PartialPattern.interval(a, [int(chi_even(k)) for k in range(a, b + 1)])
        for a in range(-16, 17)
        for b in range(a, 17)
    )
    fam = PatternFamily(members, 16)
    rep = family_sg_check(fam, 2)
    assert rep.passed
    assert rep.table == {1: 2, 2: 2}


def test_sg_half_line_fails():
    members = tuple(
        PartialPattern.interval(a, [int(k >= 0) for k in range(a, b + 1)])
        for a in range(-16, 17)
        for b in range(a, 17)
    )
    rep = family_sg_check(PatternFamily(members, 16), 2)
    assert not rep.passed
    bad = {tuple(sorted(e["eta"].items())) for e in rep.entries if e["translates"] < 0}
    assert (("0", 0), ("1", 1)) in bad


def test_vacuous_families():
    assert family_sg_check(PatternFamily((EMPTY,), 4)).passed
    assert family_usg_check(PatternFamily((), 4))["passed"]
    assert family_periods(PatternFamily((EMPTY,), 4)) == list(range(-2, 3))


def test_even_usg_and_periods():
    fam = content(window_source(chi_even, 32), 2)
    usg = family_usg_check(fam, (1, 2))
    assert usg["passed"] and max(usg["table"].values()) <= 2
    assert family_periods(fam) == list(range(-16, 17, 2))


@pytest.mark.parametrize("period", [3, 4, 5])
def test_periodic_sets_bounded_by_period(period):
    fam = content(window_source(lambda k: k % period in (0, 1), 40), 2)
    usg = family_usg_check(fam, (1, 2), span_cap=6)
    assert usg["passed"] and max(usg["table"].values()) <= period
    assert family_periods(fam) == [t for t in range(-20, 21) if t % period == 0]


def test_literal_point_count_exceeds_two():
    # the least |V| as a point count, by exhaustive search over V in [0, 8)
    fam = content(window_source(chi_even, 16), 2)
    assert min_replicating_points(fam, P({0: 0, 1: 1}), 8, 4) == 3
    assert min_replicating_points(fam, P({0: 0, 2: 0}), 8, 4) == 4
    assert min_replicating_points(fam, P({0: 1}), 8, 4) == 2


def test_a0_sg_with_growing_table():
    fam = content(window_source(chi_a0, 64), 3, span=8)
    usg = family_usg_check(fam, (1, 2, 3), span_cap=8)
    assert usg["report"].passed
    assert usg["strictly_growing"]
    assert usg["table"][1] == 4
    assert family_periods(fam) == [0]


def test_limit_points():
    fam = content(window_source(chi_even, 16), 2)
    lp = limit_point(fam, 12)
    assert verify_limit_point(fam, lp)
    a = lp.assignment
    assert all(a[i] != a[i + 1] for i in range(len(a) - 1))
    full = PatternFamily(tuple(PartialPattern.interval(0, b) for b in itertools.product([0, 1], repeat=6)), 3)
    assert len(limit_point(full, 6).assignment) == 6
    sparse = PatternFamily((P({0: 0, 1: 0}), P({0: 1, 1: 1})), 2)
    with pytest.raises(NoLimitPointWithinBudget):
        limit_point(sparse, 3)


def test_limit_point_content_round_trip():
    # a limit point of content(g) has its own content inside content(g)
    src = window_source(chi_a0, 32)
    fam = content(src, 3, span=6)
    lp = limit_point(fam, 10, cap=3)
    f = PartialPattern.interval(0, lp.assignment)
    inner = content(f, 3, span=6)
    assert set(inner.members) <= set(fam.members)
