import random

import pytest
from hypothesis import given, settings, strategies as st

from ellis_lab.cones import (
    EVERYTHING,
    NOTHING,
    ConeSet,
    DepthBudgetExceeded,
    NotApplicable,
    ball,
    ball_size,
    basic_intersection,
    certificate_battery,
    complement,
    cone,
    contains_set,
    evaluate,
    intersect,
    inverse,
    mul,
    normalize,
    parse,
    power,
    random_translators,
    random_word,
    show,
    translate,
    translate_cone,
    two_generic_certificate,
    union,
    x_orbit,
)

BALL4 = ball(4)
BALL6 = ball(6)


def brute(expr, words):
    return frozenset(w for w in words if evaluate(expr, w))


def members(s: ConeSet, words):
    return frozenset(w for w in words if s.member(w))


def test_ball_counts_reduced_words():
    for r in range(6):
        words = ball(r)
        assert len(words) == len(set(words)) == ball_size(r)
        assert all(all(a != -b for a, b in zip(w, w[1:])) for w in words)
    assert ball_size(8) == 13121


def test_parse_show_round_trip():
    assert parse("xXy") == parse("y")
    assert show(parse("xyXY")) == "xyXY"
    assert parse("e") == ()
    with pytest.raises(ValueError):
        parse("xz")


def test_inverse_translate_of_x_cone():
    s = normalize({"translate": ["X", {"cone": "x"}]})
    expected = union(cone("x"), cone("y"), cone("Y"), ConeSet((), ((),)))
    assert s == expected
    assert members(s, BALL4) == brute({"translate": ["X", {"cone": "x"}]}, BALL4)


def test_complement_of_cone():
    s = complement(cone("x"))
    assert s == union(cone("y"), cone("X"), cone("Y"), ConeSet((), ((),)))


def test_nested_cones_intersect():
    assert intersect(cone("x"), cone("xy")) == cone("xy")


def test_membership_examples():
    assert cone("x").member(parse("xyx"))
    assert not cone("x").member(parse("y"))
    assert union(cone("y"), ConeSet((), ((),))).member(())


def test_whole_group_and_empty():
    assert union(*(cone(a) for a in "xyXY"), ConeSet((), ((),))).is_everything()
    assert intersect(cone("x"), cone("y")).is_empty()
    assert complement(EVERYTHING) == NOTHING


def test_translate_cone_rule_against_brute_force():
    rng = random.Random(4)
    for _ in range(200):
        g, w = random_word(rng, 4), random_word(rng, 3)
        comp, root = translate_cone(g, w)
        got = frozenset(v for v in BALL6 if (v[: len(root)] == root) != comp)
        want = frozenset(v for v in BALL6 if mul(inverse(g), v)[: len(w)] == w)
        # words near the rim can leave the ball after translation, so compare inside radius 6 - |g|
        inner = frozenset(v for v in BALL6 if len(v) <= 6 - len(g))
        assert got & inner == want & inner


def random_expr(rng, depth=3):
    if depth == 0 or rng.random() < 0.25:
        kind = rng.random()
        word = show(random_word(rng, 2))
        if kind < 0.15:
            return {"point": word}
        return {"cone": word}
    op = rng.choice(["and", "or", "not", "translate", "translate"])
    if op == "not":
        return {"not": random_expr(rng, depth - 1)}
    if op == "translate":
        return {"translate": [show(random_word(rng, 2)), random_expr(rng, depth - 1)]}
    return {op: [random_expr(rng, depth - 1) for _ in range(rng.randint(1, 3))]}


@settings(max_examples=80)
@given(st.integers(0, 2 ** 32))
def test_normalize_preserves_membership_on_ball(seed):
    rng = random.Random(seed)
    expr = random_expr(rng)
    # translators and roots have length at most 2 per level, depth at most 3
    assert members(normalize(expr), BALL6) == brute(expr, BALL6)


@settings(max_examples=40)
@given(st.integers(0, 2 ** 32))
def test_normal_form_is_canonical(seed):
    rng = random.Random(seed)
    a, b = random_expr(rng), random_expr(rng)
    lhs = normalize({"not": {"or": [a, b]}})
    rhs = normalize({"and": [{"not": a}, {"not": b}]})
    assert lhs == rhs
    assert ConeSet.from_json(lhs.to_json()) == lhs


@settings(max_examples=40)
@given(st.integers(0, 2 ** 32))
def test_translation_is_an_action(seed):
    rng = random.Random(seed)
    s = normalize(random_expr(rng))
    g, h = random_word(rng, 3), random_word(rng, 3)
    assert translate(g, translate(h, s)) == translate(mul(g, h), s)
    assert translate(inverse(g), translate(g, s)) == s


def test_budget():
    deep = {"translate": ["xy" * 20, {"cone": "x" * 30}]}
    with pytest.raises(DepthBudgetExceeded):
        normalize(deep, budget=64)
    normalize(deep, budget=80)


def test_certificate_for_inverse_translate():
    b = normalize({"translate": ["X", {"cone": "x"}]})
    cert = two_generic_certificate(b, radius=8)
    assert cert.n == 1 and cert.verified and cert.checked == 13121


def test_certificate_for_whole_group():
    cert = two_generic_certificate(EVERYTHING, radius=6)
    assert cert.n == 0 and cert.verified


@pytest.mark.parametrize("word,k", [("xy", 1), ("x", 0), ("xyy", 2), ("xYYY", -3), ("xyxY", -1)])
def test_least_exponent_is_one_past_trailing_power(word, k):
    a = parse(word)
    b = normalize(basic_intersection([a], []))
    cert = two_generic_certificate(b, radius=8)
    assert cert.verified
    assert cert.n == abs(k) + 1 > abs(k)


def test_certificate_rejects_sets_missing_identity():
    with pytest.raises(NotApplicable):
        two_generic_certificate(cone("x"))
    with pytest.raises(NotApplicable):
        two_generic_certificate(NOTHING)


def test_cover_fails_when_shift_is_wrong():
    # the cover is a real check: without the y-shift a proper subset never covers
    b = normalize(basic_intersection([parse("xy")], []))
    from ellis_lab.cones import verify_cover
    assert not verify_cover(b, (), 6)[0]
    assert verify_cover(b, power((2,), 3), 6)[0]


def test_battery_of_thirty_intersections():
    report = certificate_battery(count=30, seed=0, radius=8)
    assert report["ok"]
    assert len(report["cases"]) == 30
    assert all(c["certificate"]["checked"] == 13121 for c in report["cases"])


def test_random_translators_respect_sides():
    rng = random.Random(1)
    for _ in range(50):
        pos, neg = random_translators(rng)
        assert all(cone("x").member(a) for a in pos)
        assert not any(cone("x").member(b) for b in neg)


def test_x_orbit_is_pairwise_distinct():
    orbit = x_orbit(8)
    assert len(set(orbit)) == 9
    assert orbit[3] == cone("xxxx")


def test_contains_set():
    assert contains_set(cone("x"), cone("xy"))
    assert not contains_set(cone("xy"), cone("x"))
