"""Cone sets in the free group on ``x, y``.

Letters are ``x = 1``, ``y = 2`` and their inverses ``-1``, ``-2``; a word is a
tuple of letters with no adjacent inverse pair.  ``T_w`` is the set of reduced
words starting with ``w`` (``T_e`` is the whole group).

Sets in the algebra generated by cones are stored as tries.  A node is either
a bool (the whole cone below it is in or out) or a pair ``(self_in, children)``
where ``children`` lists one subtree per letter that may follow the node.
Tries are kept collapsed, so equal sets have equal tries.
"""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, Sequence, Union

X, Y = 1, 2
LETTERS = (1, 2, -1, -2)
_NAMES = {1: "x", 2: "y", -1: "X", -2: "Y"}
_CODES = {v: k for k, v in _NAMES.items()}

Word = tuple[int, ...]
Trie = Union[bool, tuple]


class DepthBudgetExceeded(Exception):
    pass


class NotApplicable(Exception):
    pass


# -- words --------------------------------------------------------------------


def reduce(letters: Iterable[int]) -> Word:
    out: list[int] = []
    for a in letters:
        if a not in _NAMES:
            raise ValueError(f"bad letter {a!r}")
        if out and out[-1] == -a:
            out.pop()
        else:
            out.append(a)
    return tuple(out)


def parse(text: str) -> Word:
    """``"xyX"`` -> reduced word; capitals are inverses, ``"e"`` or ``""`` is the identity."""
    if text in ("", "e"):
        return ()
    try:
        return reduce(_CODES[c] for c in text)
    except KeyError as exc:
        raise ValueError(f"bad letter in {text!r}") from exc


def show(w: Sequence[int]) -> str:
    return "".join(_NAMES[a] for a in w) or "e"


def inverse(w: Sequence[int]) -> Word:
    return tuple(-a for a in reversed(w))


def mul(*words: Sequence[int]) -> Word:
    return reduce(itertools.chain(*words))


def power(w: Sequence[int], n: int) -> Word:
    base = tuple(w) if n >= 0 else inverse(w)
    return reduce(base * abs(n))


def next_letters(w: Sequence[int]) -> tuple[int, ...]:
    return tuple(a for a in LETTERS if not w or a != -w[-1])


def ball(radius: int) -> list[Word]:
    """All reduced words of length at most ``radius``, shortest first."""
    out: list[Word] = [()]
    layer: list[Word] = [()]
    for _ in range(radius):
        layer = [w + (a,) for w in layer for a in next_letters(w)]
        out.extend(layer)
    return out


def ball_size(radius: int) -> int:
    return 1 if radius == 0 else 1 + 2 * (3 ** radius - 1)


def trailing_y_exponent(w: Sequence[int]) -> int:
    """``k`` in ``w = u y^k`` with ``u`` not ending in ``y`` or ``Y``."""
    k = 0
    for a in reversed(w):
        if abs(a) != Y:
            break
        k += 1 if a == Y else -1
    return k


def leading_y_exponent(w: Sequence[int]) -> int:
    return trailing_y_exponent(inverse(w)) * -1


# -- tries ----------------------------------------------------------------------


def _split(self_in: bool, children: Sequence[tuple[int, Trie]]) -> Trie:
    children = tuple(children)
    if all(c is self_in for _, c in children):
        return self_in
    return (self_in, children)


def _expand(t: Trie, prefix_last: int | None) -> tuple[bool, tuple[tuple[int, Trie], ...]]:
    if isinstance(t, bool):
        letters = next_letters(() if prefix_last is None else (prefix_last,))
        return t, tuple((a, t) for a in letters)
    return t


def _binary(a: Trie, b: Trie, op, last: int | None = None) -> Trie:
    if isinstance(a, bool) and isinstance(b, bool):
        return op(a, b)
    ra, ca = _expand(a, last)
    rb, cb = _expand(b, last)
    return _split(op(ra, rb), [(l, _binary(x, y, op, l)) for (l, x), (_, y) in zip(ca, cb)])


def _complement(t: Trie) -> Trie:
    if isinstance(t, bool):
        return not t
    return (not t[0], tuple((l, _complement(c)) for l, c in t[1]))


def _along(w: Word, bottom: Trie, top: bool = False) -> Trie:
    """Trie that is ``bottom`` below ``w`` and ``top`` elsewhere (including the path)."""
    t = bottom
    for i in range(len(w) - 1, -1, -1):
        prefix = w[:i]
        t = _split(top, [(a, t if a == w[i] else top) for a in next_letters(prefix)])
    return t


def trie_cone(w: Word) -> Trie:
    return _along(w, True)


def trie_point(w: Word) -> Trie:
    return _along(w, (True, tuple((a, False) for a in next_letters(w))))


def trie_member(t: Trie, w: Sequence[int]) -> bool:
    for a in w:
        if isinstance(t, bool):
            return t
        t = dict(t[1])[a]
    return t if isinstance(t, bool) else t[0]


def trie_depth(t: Trie) -> int:
    if isinstance(t, bool):
        return 0
    return 1 + max(trie_depth(c) for _, c in t[1])


def _pieces(t: Trie, prefix: Word = ()) -> Iterator[tuple[str, Word]]:
    """Disjoint decomposition into full cones and single points."""
    if t is True:
        yield "cone", prefix
    elif t is False:
        return
    else:
        if t[0]:
            yield "point", prefix
        for a, c in t[1]:
            yield from _pieces(c, prefix + (a,))


def translate_cone(g: Word, w: Word) -> tuple[bool, Word]:
    """``g T_w`` as ``(complemented, root)``: either ``T_root`` or ``G \\ T_root``.

    When ``g`` cancels all of ``w`` the translate is ``G \\ T_{gw c}`` with ``c``
    inverse of the last letter of ``w``; otherwise it is ``T_{gw}``.
    """
    r = mul(g, w)
    if w and len(r) == len(g) - len(w):
        return True, r + (-w[-1],)
    if not w:
        return False, ()
    return False, r


def trie_translate(g: Word, t: Trie) -> Trie:
    out: Trie = False
    for kind, u in _pieces(t):
        if kind == "point":
            piece = trie_point(mul(g, u))
        else:
            comp, root = translate_cone(g, u)
            piece = trie_cone(root)
            if comp:
                piece = _complement(piece)
        out = _binary(out, piece, lambda a, b: a or b)
    return out


# -- public set type --------------------------------------------------------------


@dataclass(frozen=True)
class ConeSet:
    """Normal form: ``(union of T_c for c in cones) - minus_points + plus_points``.

    ``cones`` are the shortest words ``u`` with ``T_u`` minus the set finite, so
    the form is canonical.
    """

    cones: tuple[Word, ...]
    plus_points: tuple[Word, ...] = ()
    minus_points: tuple[Word, ...] = ()

    @classmethod
    def from_trie(cls, t: Trie) -> ConeSet:
        cones: list[Word] = []
        plus: list[Word] = []
        minus: list[Word] = []

        def cofinite(node: Trie) -> bool:
            if isinstance(node, bool):
                return node
            return all(cofinite(c) for _, c in node[1])

        def holes(node: Trie, prefix: Word):
            if isinstance(node, bool):
                return
            if not node[0]:
                minus.append(prefix)
            for a, c in node[1]:
                holes(c, prefix + (a,))

        def walk(node: Trie, prefix: Word):
            if cofinite(node):
                cones.append(prefix)
                holes(node, prefix)
            elif not isinstance(node, bool):
                if node[0]:
                    plus.append(prefix)
                for a, c in node[1]:
                    walk(c, prefix + (a,))

        walk(t, ())
        key = lambda w: (len(w), w)
        return cls(tuple(sorted(cones, key=key)), tuple(sorted(plus, key=key)), tuple(sorted(minus, key=key)))

    def to_trie(self) -> Trie:
        t: Trie = False
        for c in self.cones:
            t = _binary(t, trie_cone(c), lambda a, b: a or b)
        for p in self.minus_points:
            t = _binary(t, trie_point(p), lambda a, b: a and not b)
        for p in self.plus_points:
            t = _binary(t, trie_point(p), lambda a, b: a or b)
        return t

    def member(self, w: Sequence[int]) -> bool:
        w = tuple(w)
        if w in self._plus:
            return True
        if w in self._minus:
            return False
        roots = self._roots
        return any(w[:k] in roots for k in range(min(len(w), self._longest) + 1))

    @property
    def _roots(self) -> frozenset[Word]:
        return _cached(self, "_r", lambda: frozenset(self.cones))

    @property
    def _plus(self) -> frozenset[Word]:
        return _cached(self, "_p", lambda: frozenset(self.plus_points))

    @property
    def _minus(self) -> frozenset[Word]:
        return _cached(self, "_m", lambda: frozenset(self.minus_points))

    @property
    def _longest(self) -> int:
        return _cached(self, "_l", lambda: max((len(c) for c in self.cones), default=-1))

    def is_empty(self) -> bool:
        return not self.cones and not self.plus_points

    def is_everything(self) -> bool:
        return self.cones == ((),) and not self.minus_points

    def __str__(self) -> str:
        parts = [f"T_{show(c)}" if c else "G" for c in self.cones]
        parts += ["{" + show(p) + "}" for p in self.plus_points]
        s = " + ".join(parts) or "0"
        if self.minus_points:
            s += " - {" + ", ".join(show(p) for p in self.minus_points) + "}"
        return s

    def to_json(self) -> dict:
        return {"cones": [show(c) for c in self.cones], "plus": [show(p) for p in self.plus_points],
                "minus": [show(p) for p in self.minus_points]}

    @classmethod
    def from_json(cls, data: Mapping) -> ConeSet:
        raw = cls(tuple(parse(c) for c in data["cones"]), tuple(parse(p) for p in data.get("plus", ())),
                  tuple(parse(p) for p in data.get("minus", ())))
        return cls.from_trie(raw.to_trie())


def _cached(obj, name, make):
    try:
        return obj.__dict__[name]
    except KeyError:
        val = make()
        object.__setattr__(obj, name, val)
        return val


def cone(w: Word | str) -> ConeSet:
    return ConeSet.from_trie(trie_cone(parse(w) if isinstance(w, str) else tuple(w)))


EVERYTHING = ConeSet(((),))
NOTHING = ConeSet(())


# -- expressions -------------------------------------------------------------------


def expr_depth(expr) -> int:
    """Total length of translators and cone roots in an expression tree."""
    if isinstance(expr, str):
        return 0
    (op, arg), = expr.items()
    if op in ("cone", "point"):
        return len(parse(arg))
    if op == "translate":
        return len(parse(arg[0])) + expr_depth(arg[1])
    if op == "not":
        return expr_depth(arg)
    return sum(expr_depth(a) for a in arg)


def _eval_trie(expr) -> Trie:
    if expr == "all":
        return True
    if expr == "none":
        return False
    (op, arg), = expr.items()
    if op == "cone":
        return trie_cone(parse(arg))
    if op == "point":
        return trie_point(parse(arg))
    if op == "translate":
        return trie_translate(parse(arg[0]), _eval_trie(arg[1]))
    if op == "not":
        return _complement(_eval_trie(arg))
    if op in ("and", "or"):
        f = (lambda a, b: a and b) if op == "and" else (lambda a, b: a or b)
        t: Trie = op == "and"
        for a in arg:
            t = _binary(t, _eval_trie(a), f)
        return t
    raise ValueError(f"unknown operator {op!r}")


def normalize(expr, budget: int = 64) -> ConeSet:
    """Canonical ConeSet of an expression tree of cone/point/translate/and/or/not."""
    depth = expr_depth(expr)
    if depth > budget:
        raise DepthBudgetExceeded(f"expression depth {depth} exceeds budget {budget}")
    return ConeSet.from_trie(_eval_trie(expr))


def evaluate(expr, w: Word) -> bool:
    """Membership straight from the definitions, without normal forms."""
    if expr == "all":
        return True
    if expr == "none":
        return False
    (op, arg), = expr.items()
    if op == "cone":
        r = parse(arg)
        return w[: len(r)] == r
    if op == "point":
        return w == parse(arg)
    if op == "translate":
        return evaluate(arg[1], mul(inverse(parse(arg[0])), w))
    if op == "not":
        return not evaluate(arg, w)
    if op == "and":
        return all(evaluate(a, w) for a in arg)
    if op == "or":
        return any(evaluate(a, w) for a in arg)
    raise ValueError(f"unknown operator {op!r}")


def translate(g: Word | str, s: ConeSet) -> ConeSet:
    g = parse(g) if isinstance(g, str) else tuple(g)
    return ConeSet.from_trie(trie_translate(g, s.to_trie()))


def intersect(*sets: ConeSet) -> ConeSet:
    t: Trie = True
    for s in sets:
        t = _binary(t, s.to_trie(), lambda a, b: a and b)
    return ConeSet.from_trie(t)


def union(*sets: ConeSet) -> ConeSet:
    t: Trie = False
    for s in sets:
        t = _binary(t, s.to_trie(), lambda a, b: a or b)
    return ConeSet.from_trie(t)


def complement(s: ConeSet) -> ConeSet:
    return ConeSet.from_trie(_complement(s.to_trie()))


def contains_set(big: ConeSet, small: ConeSet) -> bool:
    return _binary(small.to_trie(), big.to_trie(), lambda a, b: a and not b) is False


# -- 2-genericity -------------------------------------------------------------------


def y_cones(n: int) -> ConeSet:
    return union(cone(power((Y,), n)), cone(power((Y,), -n)))


@dataclass(frozen=True)
class TwoGenericCertificate:
    n: int
    shift: Word
    radius: int
    verified: bool
    checked: int

    def to_json(self) -> dict:
        return {"n": self.n, "shift": show(self.shift), "radius": self.radius,
                "verified": self.verified, "checked": self.checked}


def least_y_exponent(b: ConeSet) -> int:
    """Least ``n`` with ``T_{y^n} + T_{Y^n}`` inside ``b`` (``n = 0`` means ``b = G``)."""
    if b.is_everything():
        return 0
    t = b.to_trie()
    for n in range(1, trie_depth(t) + 2):
        if contains_set(b, y_cones(n)):
            return n
    raise NotApplicable("no pair of y-cones lies inside the set")


def verify_cover(b: ConeSet, shift: Word, radius: int) -> tuple[bool, int]:
    """Check that ``b`` and ``shift * b`` together hold every word of the ball."""
    back = inverse(shift)
    words = ball(radius)
    ok = all(b.member(w) or b.member(mul(back, w)) for w in words)
    return ok, len(words)


def two_generic_certificate(b: ConeSet, radius: int = 8) -> TwoGenericCertificate:
    if b.is_empty() or not b.member(()):
        raise NotApplicable("the set must contain the identity")
    n = least_y_exponent(b)
    shift = power((Y,), 2 * n - 1) if n else ()
    ok, checked = verify_cover(b, shift, radius)
    if n:
        ok = ok and all(b.member(w) for w in ball(radius) if w[:n] in (power((Y,), n), power((Y,), -n)))
    return TwoGenericCertificate(n, shift, radius, ok, checked)


def exponent_bound(positive: Iterable[Word], negative: Iterable[Word]) -> int:
    """Upper bound on the y-exponent read off the translators.

    ``positive`` words ``a`` lie in ``T_x`` and contribute ``a^-1 T_x``;
    ``negative`` words ``b`` lie outside it and contribute ``b^-1 (G - T_x)``.
    """
    bound = 1
    for a in positive:
        bound = max(bound, abs(trailing_y_exponent(a)) + 1)
    for b in negative:
        bound = max(bound, abs(leading_y_exponent(mul(inverse(b), (X,)))) + 1)
    return bound


def basic_intersection(positive: Sequence[Word], negative: Sequence[Word]) -> dict:
    """Expression for the intersection of ``a^-1 T_x`` and ``b^-1 (G - T_x)``."""
    parts = [{"translate": [show(inverse(a)), {"cone": "x"}]} for a in positive]
    parts += [{"translate": [show(inverse(b)), {"not": {"cone": "x"}}]} for b in negative]
    return {"and": parts} if parts else "all"


def random_word(rng: random.Random, max_len: int) -> Word:
    w: list[int] = []
    for _ in range(rng.randint(0, max_len)):
        w.append(rng.choice(next_letters(w)))
    return tuple(w)


def random_translators(rng: random.Random, max_each: int = 3, max_len: int = 4) -> tuple[list[Word], list[Word]]:
    """Seeded translators ``a`` in ``T_x`` and ``b`` outside it."""
    pos, neg = [], []
    for _ in range(rng.randint(1, max_each)):
        w = random_word(rng, max_len - 1)
        while w and w[0] == -X:
            w = random_word(rng, max_len - 1)
        pos.append(mul((X,), w))
    for _ in range(rng.randint(0, max_each)):
        w = random_word(rng, max_len)
        while w[:1] == (X,):
            w = random_word(rng, max_len)
        neg.append(w)
    return pos, neg


def certificate_battery(count: int = 30, seed: int = 0, radius: int = 8) -> dict:
    rng = random.Random(f"cones:{seed}")
    cases = []
    for i in range(count):
        pos, neg = random_translators(rng)
        expr = basic_intersection(pos, neg)
        b = normalize(expr)
        cert = two_generic_certificate(b, radius)
        bound = exponent_bound(pos, neg)
        cases.append({"positive": [show(a) for a in pos], "negative": [show(w) for w in neg],
                      "set": b.to_json(), "certificate": cert.to_json(), "bound": bound,
                      "within_bound": cert.n <= bound})
    ok = all(c["certificate"]["verified"] and c["within_bound"] for c in cases)
    return {"cases": cases, "ok": ok, "seed": seed, "radius": radius}


def x_orbit(n_max: int = 8) -> list[ConeSet]:
    """``x^n T_x`` for ``0 <= n <= n_max``."""
    a = cone("x")
    return [translate(power((X,), n), a) for n in range(n_max + 1)]
