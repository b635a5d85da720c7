import random

import pytest
from hypothesis import given, strategies as st

from ellis_lab.groups import cyclic, symmetric, find_isomorphism, FiniteGroup
from ellis_lab.wreath import (
    Limit,
    Perm,
    TailPoint,
    Translation,
    WreathFlow,
    associativity_report,
    elem_from_json,
    integer_proximity_probe,
    law_report,
    longest_agreement,
    periodic_sequence,
    points_on,
    random_elem,
    random_point,
)

Z2, Z3, Z4, S3 = cyclic(2), cyclic(3), cyclic(4), symmetric(3)
W = 8


def semidirect(group, a, b):
    """Array multiplication of (s, sigma) pairs on coordinates 0..W-1 plus tails."""
    (s1, t1, p1), (s2, t2, p2) = a, b
    inv1 = [p1.index(n) for n in range(W)]
    s = tuple(group.table[s1[n]][s2[inv1[n]]] for n in range(W))
    return s, group.table[t1][t2], tuple(p1[p2[n]] for n in range(W))


def as_arrays(f):
    return f.s.window(W), f.s.tail, tuple(f.sigma(n) for n in range(W))


def evaluate(group, f, x):
    """f(x) on the window, computed from the definition without the library."""
    t = group.table
    if isinstance(f, Limit):
        return tuple(t[v][x.tail] for v in f.p.window(W)), t[f.p.tail][x.tail]
    inv = [0] * W
    for n in range(W):
        inv[f.sigma(n)] = n
    xs, ss = x.window(W), f.s.window(W)
    return tuple(t[ss[n]][xs[inv[n]]] for n in range(W)), t[f.s.tail][x.tail]


def test_tailpoint_normalises_tail_entries():
    x = TailPoint.of({0: 1, 3: 0, 5: 1}, tail=1)
    assert x.support == ((3, 0),)
    assert x(5) == 1 and x(3) == 0 and x(100) == 1


def test_tailpoint_json_round_trip():
    x = TailPoint.of({2: 1, 4: 2}, tail=0)
    assert TailPoint.from_json(x.to_json()) == x


def test_perm_rejects_non_bijection():
    with pytest.raises(ValueError):
        Perm.of({0: 1, 1: 1})


def test_perm_composition_applies_right_first():
    a, b = Perm.cycle(0, 1), Perm.cycle(1, 2)
    c = a.then_after(b)
    assert [c(n) for n in range(3)] == [a(b(n)) for n in range(3)]
    assert c.then_after(c.inverse()).is_identity()


def test_identity_translation_acts_trivially():
    flow = WreathFlow(S3)
    rng = random.Random(1)
    for _ in range(20):
        x = random_point(S3, rng)
        assert flow.act(flow.identity(), x) == x


def test_limit_reads_tail():
    flow = WreathFlow(Z2)
    x = TailPoint.of({0: 0, 1: 0}, tail=1)
    assert flow.act(Limit(TailPoint.constant(0)), x) == TailPoint.constant(1)


def test_translation_by_local_point_on_constant():
    flow = WreathFlow(Z3)
    s = TailPoint.of({0: 2}, tail=0)
    assert flow.act(Translation(s), TailPoint.constant(0)) == TailPoint.of({0: 2}, 0)


def test_translation_composition_matches_semidirect_arrays():
    rng = random.Random(7)
    for group in (Z2, S3):
        flow = WreathFlow(group)
        for _ in range(100):
            a = Translation(random_point(group, rng), Perm.from_list(rng.sample(range(W), W)))
            b = Translation(random_point(group, rng), Perm.from_list(rng.sample(range(W), W)))
            assert as_arrays(flow.compose(a, b)) == semidirect(group, as_arrays(a), as_arrays(b))


def test_composition_matches_pointwise_evaluation():
    rng = random.Random(11)
    for group in (Z2, Z3, S3):
        flow = WreathFlow(group)
        for _ in range(100):
            f, g = random_elem(group, rng), random_elem(group, rng)
            x = random_point(group, rng)
            inner = flow.act(g, x)
            assert evaluate(group, flow.compose(f, g), x) == evaluate(group, f, inner)


def test_left_composition_with_limit_on_ten_points():
    rng = random.Random(3)
    flow = WreathFlow(S3)
    for _ in range(10):
        f, p = random_elem(S3, rng), random_point(S3, rng)
        comp = flow.compose(f, Limit(p))
        assert comp == Limit(flow.act(f, p))
        for _ in range(10):
            x = random_point(S3, rng)
            assert flow.act(comp, x) == flow.act(f, flow.act(Limit(p), x))


def test_limit_with_identity_tail_is_idempotent_exhaustive():
    flow = WreathFlow(Z2)
    for p in points_on(Z2, W, tails=[0]):
        assert flow.compose(Limit(p), Limit(p)) == Limit(p)


def test_limit_with_other_tail_is_not_idempotent():
    flow = WreathFlow(Z2)
    p = TailPoint.constant(1)
    assert flow.compose(Limit(p), Limit(p)) == Limit(TailPoint.constant(0))


def test_proximal_cases():
    flow = WreathFlow(Z3)
    x = TailPoint.of({0: 1, 4: 2}, 0)
    y = TailPoint.of({1: 2}, 0)
    assert flow.proximal(x, y) and flow.proximal(x, x)
    assert not flow.proximal(x, TailPoint.constant(1))


def test_proximality_witness_makes_points_agree():
    flow = WreathFlow(S3)
    rng = random.Random(5)
    for _ in range(30):
        x, y = random_point(S3, rng), random_point(S3, rng)
        y = TailPoint.of(y.support, x.tail) if rng.random() < 0.7 else y
        w = flow.proximality_witness(x, y)
        if x.tail != y.tail:
            assert w is None
            continue
        top = max(x.coords | y.coords, default=0)
        fx, fy = flow.act(w, x), flow.act(w, y)
        assert fx.window(top + 1) == fy.window(top + 1) == (S3.identity,) * (top + 1)


def test_distinct_tails_never_agree_outside_supports():
    x, y = TailPoint.of({0: 1}, 0), TailPoint.of({0: 0}, 1)
    assert all(x(n) != y(n) for n in range(1, 200))


@pytest.mark.parametrize("group", [Z2, Z3, Z4, S3], ids=lambda g: g.name)
def test_ellis_group_table_is_group_itself(group):
    rng = random.Random(group.order)
    base = TailPoint.of(random_point(group, rng).support, group.identity)
    report = WreathFlow(group).ellis_group_table(base)
    assert report["isomorphic"] and report["psi_multiplicative"] and report["idempotent"]
    assert find_isomorphism(FiniteGroup(report["table"]), group) is not None


def test_ellis_group_table_z2_and_z3_exact():
    assert WreathFlow(Z2).ellis_group_table()["table"] == [[0, 1], [1, 0]]
    assert WreathFlow(Z3).ellis_group_table()["table"] == [list(r) for r in Z3.table]


def test_ellis_group_rejects_bad_base():
    with pytest.raises(ValueError):
        WreathFlow(Z2).ellis_group(TailPoint.constant(1))


def test_law_report_exhaustive_z2():
    r = law_report(Z2, width=W, exhaustive=True)
    assert r["bases"] == 512 and r["ok"], r


@pytest.mark.parametrize("group", [Z3, Z4, S3], ids=lambda g: g.name)
def test_law_report_sampled(group):
    assert law_report(group, exhaustive=False, samples=100)["ok"]


@pytest.mark.parametrize("group", [Z2, S3], ids=lambda g: g.name)
def test_associativity_sampled(group):
    assert associativity_report(group, triples=200)["ok"]


def test_limits_form_a_left_ideal():
    flow = WreathFlow(S3)
    rng = random.Random(2)
    for _ in range(50):
        f, p = random_elem(S3, rng), random_point(S3, rng)
        assert isinstance(flow.compose(f, Limit(p)), Limit)
        q = random_point(S3, rng)
        assert flow.compose(flow.ideal_mover(p, q), Limit(p)) == Limit(q)


def test_stabilizing_partner_for_every_kind_of_map():
    flow = WreathFlow(Z4)
    rng = random.Random(9)
    for _ in range(50):
        f, p = random_elem(Z4, rng, limit_p=0.5), random_point(Z4, rng)
        fp = flow.stabilizing_partner(f, p)
        assert flow.compose(fp, flow.compose(f, Limit(p))) == Limit(p)


@given(st.integers(0, 2 ** 30))
def test_element_json_round_trip(seed):
    rng = random.Random(seed)
    f = random_elem(S3, rng)
    assert elem_from_json(f.to_json()) == f


@given(st.integers(0, 2 ** 30))
def test_action_is_a_monoid_action(seed):
    rng = random.Random(seed)
    flow = WreathFlow(S3)
    a, b, c = (random_elem(S3, rng) for _ in range(3))
    x = random_point(S3, rng)
    assert flow.compose(flow.compose(a, b), c) == flow.compose(a, flow.compose(b, c))
    assert flow.act(flow.compose(a, b), x) == flow.act(a, flow.act(b, x))


def test_integer_probe_distinct_periodic_points_have_short_runs():
    x = periodic_sequence([0, 1])
    y = periodic_sequence([0, 0, 1])
    r = integer_proximity_probe(x, y, 256)
    assert r["longest_run"] < 6 and not r["whole_window"]


def test_integer_probe_sees_long_agreement():
    x = lambda n: 0
    y = lambda n: 1 if n in (-100, 3, 90) else 0
    assert longest_agreement(x, y, -128, 128) == 102
    assert integer_proximity_probe(x, y, 128)["agrees_on"][64]
