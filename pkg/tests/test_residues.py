import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ellis_lab import residues
from ellis_lab.residues import (
    GENERIC,
    INCONCLUSIVE,
    NOT_GENERIC,
    ChainMismatch,
    FiltrationChain,
    PfSet,
    State,
    Unresolved,
    a0,
    a1,
    covers,
    genericity_certificate,
    greedy_cover,
    valuation_coset_exponent,
    per_set,
    usg_probe,
    v2,
    verify_certificate,
    window_per,
)


def a0_bit(k):
    return 0 if k == 0 else v2(k) % 2


def test_a0_membership_examples():
    s = a0()
    assert [s.membership(k) for k in (0, 6, 12)] == [0, 1, 0]
    assert a1().membership(0) == 1


def test_a0_matches_valuation_on_window():
    s = a0()
    assert s.window(-4096, 4096) == [a0_bit(k) for k in range(-4096, 4097)]


def test_deep_point_is_unresolved():
    s = a0(max_depth=6)
    with pytest.raises(Unresolved):
        s.membership(2**10)
    assert s.try_member(2**10) is None
    assert s.state(2**10) is State.DEFER


def test_residue_class_and_boolean_ops():
    even = PfSet.residue_class(0, 2)
    three = PfSet.residue_class(1, 3, FiltrationChain.explicit([1, 3, 6]))
    with pytest.raises(ChainMismatch):
        even | three
    c = FiltrationChain.explicit([1, 2, 6])
    e, t = PfSet.residue_class(0, 2, c), PfSet.residue_class(0, 6, c)
    assert (e & t).equals(t)
    assert (e | t).equals(e)
    assert (e - t).window(0, 11) == [int(k % 2 == 0 and k % 6 != 0) for k in range(12)]
    assert (e ^ ~e).equals(PfSet.full(c))


ints = st.integers(-300, 300)


@given(st.integers(0, 7), st.integers(0, 7), ints)
def test_boolean_ops_pointwise(r1, r2, t):
    c = FiltrationChain.power(2, 8)
    x = PfSet.residue_class(r1, 8, c) | a0(8)
    y = PfSet.residue_class(r2 % 4, 4, c).translate(t)
    pts = [k for k in range(-64, 65) if k != 0 and v2(k) < 7]
    for k in pts:
        bx, by = x.membership(k), y.membership(k)
        assert (x | y).membership(k) == (bx | by)
        assert (x & y).membership(k) == (bx & by)
        assert (x ^ y).membership(k) == (bx ^ by)
        assert (~x).membership(k) == 1 - bx


@given(ints, ints)
def test_translate_pointwise(t, k):
    s = a0()
    if k - t != 0:
        assert s.translate(t).membership(k) == s.membership(k - t)
    assert s.translate(t).translate(-t).equals(s)


def test_json_round_trip():
    s = a0() & a0().translate(4)
    assert PfSet.from_json(s.to_json()) == s
    assert FiltrationChain.from_json(s.chain.to_json()) == s.chain


@pytest.mark.parametrize("n", range(1, 9))
def test_a0_intersection_union_of_cosets(n):
    s = a0()
    b = s & s.translate(4**n)
    assert b.is_clopen()
    expect = PfSet.empty(s.chain)
    for k in range(n):
        expect = expect | PfSet.residue_class(2 ** (2 * k + 1), 2 ** (2 * k + 2), s.chain)
    assert b.equals(expect)
    assert b.period() == 4**n


def test_per_set_contains_valuation_coset():
    p = per_set(a0(), {0, 2})
    assert p.contains_coset(4, 8)
    assert valuation_coset_exponent({0, 2}) == 2


def test_per_set_against_window_oracle():
    s = a0()
    bits = {k: a0_bit(k) for k in range(-600, 601)}
    u = [-3, 0, 5]
    per = per_set(s, u)
    ts = [t for t in range(-200, 201) if all(u_ + t == 0 or v2(u_ + t) < 20 for u_ in u)]
    assert {t for t in ts if per.membership(t)} == window_per(bits, u, ts)


def test_certificates():
    c = genericity_certificate(a0())
    assert c.verdict == GENERIC and c.translates == (0, 1, 2, 3) and c.coset == (2, 4)
    assert verify_certificate(a0(), c)
    odd = PfSet.residue_class(1, 2)
    assert genericity_certificate(odd).translates == (0, 1)
    assert genericity_certificate(PfSet.empty()).verdict == NOT_GENERIC
    half = PfSet.half_line(16)
    assert genericity_certificate(per_set(half, {0})).verdict == INCONCLUSIVE
    assert per_set(PfSet.residue_class(0, 2), {0, 1}).equals(PfSet.residue_class(0, 2))


def test_tampered_certificate_rejected():
    c = genericity_certificate(a0())
    bad = type(c)(c.verdict, c.translates[:-1], c.residues, c.modulus, c.depth_reached)
    assert not verify_certificate(a0(), bad)
    shifted = type(c)(c.verdict, c.translates, (3,), c.modulus, c.depth_reached)
    assert not verify_certificate(a0(), shifted)


@given(st.sets(st.integers(0, 31), min_size=1), st.sampled_from([2, 4, 8, 16, 32]))
def test_greedy_cover_covers(rs, m):
    assert covers(greedy_cover(rs, m), rs, m)


def test_usg_probe_shapes():
    r = usg_probe(a0(), [1, 2, 3], samples=20)
    assert r["witness_family_growing"]
    assert usg_probe(PfSet.residue_class(0, 2), [1, 2, 3], samples=10)["table"] == {1: 2, 2: 2, 3: 2}
    assert usg_probe(PfSet.full(), [1, 2], samples=5)["table"] == {1: 1, 2: 1}


@settings(max_examples=40)
@given(st.lists(st.tuples(st.integers(0, 63), st.integers(0, 6)), max_size=4))
def test_periods_in_matches_translate_equality(classes):
    s = residues.PfSet.empty()
    for r, k in classes:
        s = s | residues.PfSet.residue_class(r, 2**k)
    want = [t for t in range(-70, 71) if s.translate(t).equals(s)]
    assert s.periods_in(-70, 70) == want


def test_periods_in_shell_intersection():
    for n in range(1, 4):
        b = a0(10) & a0(10).translate(4**n)
        assert b.periods_in(-100, 100) == [t for t in range(-100, 101) if b.translate(t).equals(b)]
