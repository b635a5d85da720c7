"""Symbolic enveloping semigroup of the shift-and-permute flow on eventually
constant sequences.

Points are sequences ``x: N -> G`` that agree with a constant ``tail`` outside a
finite support.  The acting group is ``G^N x Sym(N)`` with
``<s, sigma> . x = s * (x o sigma^-1)``.  Besides the translations, the
enveloping semigroup holds the limit maps ``x -> p * const(x(u))`` for a
non-principal ultrafilter ``u``.  On eventually constant points every such
``u`` reads off the tail, so one symbolic ``u`` is fixed and ``Limit(p)``
stands for all of them.

The integer-indexed variant is only probed: points agreeing on arbitrarily long
intervals are reported on a finite window, with no claim about its Ellis group.
"""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from typing import Callable, Iterable, Iterator, Mapping, Sequence, Union

from .groups import FiniteGroup, find_isomorphism, is_homomorphism


@dataclass(frozen=True)
class TailPoint:
    """Eventually constant sequence; ``support`` lists coordinates off the tail."""

    support: tuple[tuple[int, int], ...]
    tail: int

    @classmethod
    def of(cls, values: Mapping[int, int] | Iterable[tuple[int, int]] = (), tail: int = 0) -> TailPoint:
        items = values.items() if isinstance(values, Mapping) else values
        d = {}
        for n, g in items:
            if n < 0:
                raise ValueError("coordinates are natural numbers")
            d[int(n)] = int(g)
        return cls(tuple(sorted((n, g) for n, g in d.items() if g != tail)), int(tail))

    @classmethod
    def constant(cls, g: int) -> TailPoint:
        return cls((), int(g))

    @classmethod
    def from_window(cls, window: Sequence[int], tail: int) -> TailPoint:
        return cls.of(enumerate(window), tail)

    def __call__(self, n: int) -> int:
        for k, g in self.support:
            if k == n:
                return g
        return self.tail

    def as_dict(self) -> dict[int, int]:
        return dict(self.support)

    @property
    def coords(self) -> frozenset[int]:
        return frozenset(k for k, _ in self.support)

    def window(self, width: int) -> tuple[int, ...]:
        d = self.as_dict()
        return tuple(d.get(n, self.tail) for n in range(width))

    def to_json(self) -> dict:
        return {"support": [list(e) for e in self.support], "tail": self.tail}

    @classmethod
    def from_json(cls, data: Mapping) -> TailPoint:
        return cls.of([tuple(e) for e in data["support"]], data["tail"])


@dataclass(frozen=True)
class Perm:
    """Finitely supported permutation of N, stored as its moved pairs ``(n, sigma(n))``."""

    moves: tuple[tuple[int, int], ...] = ()

    @classmethod
    def of(cls, mapping: Mapping[int, int] | Iterable[tuple[int, int]]) -> Perm:
        items = mapping.items() if isinstance(mapping, Mapping) else mapping
        d = {int(a): int(b) for a, b in items}
        if sorted(d) != sorted(d.values()):
            raise ValueError("not a permutation of its support")
        return cls(tuple(sorted((a, b) for a, b in d.items() if a != b)))

    @classmethod
    def cycle(cls, *points: int) -> Perm:
        return cls.of({a: points[(i + 1) % len(points)] for i, a in enumerate(points)})

    @classmethod
    def from_list(cls, images: Sequence[int]) -> Perm:
        return cls.of(enumerate(images))

    def __call__(self, n: int) -> int:
        for a, b in self.moves:
            if a == n:
                return b
        return n

    def inverse(self) -> Perm:
        return Perm(tuple(sorted((b, a) for a, b in self.moves)))

    def then_after(self, other: Perm) -> Perm:
        """``self o other``: apply ``other`` first."""
        pts = {a for a, _ in self.moves} | {a for a, _ in other.moves}
        return Perm.of({n: self(other(n)) for n in pts})

    @property
    def moved(self) -> frozenset[int]:
        return frozenset(a for a, _ in self.moves)

    def is_identity(self) -> bool:
        return not self.moves


IDENTITY = Perm()


@dataclass(frozen=True)
class Translation:
    s: TailPoint
    sigma: Perm = IDENTITY

    def to_json(self) -> dict:
        return {"kind": "translation", "s": self.s.to_json(), "sigma": [list(m) for m in self.sigma.moves]}


@dataclass(frozen=True)
class Limit:
    p: TailPoint

    def to_json(self) -> dict:
        return {"kind": "limit", "p": self.p.to_json()}


EnvElem = Union[Translation, Limit]


def elem_from_json(data: Mapping) -> EnvElem:
    if data["kind"] == "limit":
        return Limit(TailPoint.from_json(data["p"]))
    return Translation(TailPoint.from_json(data["s"]), Perm.of([tuple(m) for m in data["sigma"]]))


class WreathFlow:
    """The flow ``G^N`` over a finite group ``G`` with its symbolic semigroup."""

    def __init__(self, group: FiniteGroup):
        self.group = group
        self.e = group.identity

    # -- pointwise operations -------------------------------------------------

    def mul(self, x: TailPoint, y: TailPoint) -> TailPoint:
        t = self.group.table
        dx, dy = x.as_dict(), y.as_dict()
        coords = set(dx) | set(dy)
        return TailPoint.of(
            ((n, t[dx.get(n, x.tail)][dy.get(n, y.tail)]) for n in coords), t[x.tail][y.tail]
        )

    def inv(self, x: TailPoint) -> TailPoint:
        inv = self.group.inverse
        return TailPoint.of(((n, inv[g]) for n, g in x.support), inv[x.tail])

    def times_constant(self, x: TailPoint, g: int) -> TailPoint:
        """``x * const(g)``."""
        t = self.group.table
        return TailPoint.of(((n, t[v][g]) for n, v in x.support), t[x.tail][g])

    def permute(self, sigma: Perm, x: TailPoint) -> TailPoint:
        """``x o sigma^-1``: the value at ``sigma(n)`` is ``x(n)``."""
        d = x.as_dict()
        coords = set(d) | sigma.moved
        return TailPoint.of(((sigma(n), d.get(n, x.tail)) for n in coords), x.tail)

    # -- the semigroup --------------------------------------------------------

    def act(self, f: EnvElem, x: TailPoint) -> TailPoint:
        if isinstance(f, Limit):
            return self.times_constant(f.p, x.tail)
        return self.mul(f.s, self.permute(f.sigma, x))

    def compose(self, f: EnvElem, g: EnvElem) -> EnvElem:
        """``f o g`` (apply ``g`` first)."""
        if isinstance(g, Limit):
            return Limit(self.act(f, g.p))
        if isinstance(f, Limit):
            return Limit(self.times_constant(f.p, g.s.tail))
        return Translation(self.mul(f.s, self.permute(f.sigma, g.s)), f.sigma.then_after(g.sigma))

    def identity(self) -> Translation:
        return Translation(TailPoint.constant(self.e))

    def proximal(self, x: TailPoint, y: TailPoint) -> bool:
        # Eventually constant points agree infinitely often iff their tails agree.
        return x.tail == y.tail

    def proximality_witness(self, x: TailPoint, y: TailPoint) -> Translation | None:
        """A translation sending both points to agree with ``e`` on ``[0, K]``.

        Here ``K`` is the largest coordinate in either support, so the witness
        exists exactly when the tails agree.
        """
        if not self.proximal(x, y):
            return None
        dx, dy = x.as_dict(), y.as_dict()
        top = max(set(dx) | set(dy), default=0)
        # Spend the coordinates 0..top on indices above every support, where x = y.
        agree = list(range(top + 1, 2 * top + 2))
        sigma = Perm.of({**{a: b for a, b in zip(agree, range(top + 1))},
                         **{b: a for a, b in zip(agree, range(top + 1))}})
        s = self.inv(self.permute(sigma, x))
        return Translation(s, sigma)

    def stabilizing_partner(self, f: EnvElem, p: TailPoint) -> Translation:
        """``f'`` with ``f' o f o Limit(p) = Limit(p)``: multiply by ``p * f(p)^-1``."""
        return Translation(self.mul(p, self.inv(self.act(f, p))))

    def ideal_mover(self, p: TailPoint, q: TailPoint) -> Translation:
        """A translation carrying ``Limit(p)`` to ``Limit(q)`` under left composition."""
        return Translation(self.mul(q, self.inv(p)))

    # -- the Ellis group ------------------------------------------------------

    def ellis_group(self, base: TailPoint) -> list[Limit]:
        if base.tail != self.e:
            raise ValueError("the base point must have tail e")
        return [Limit(self.times_constant(base, g)) for g in range(self.group.order)]

    def ellis_group_table(self, base: TailPoint | None = None) -> dict:
        base = TailPoint.constant(self.e) if base is None else base
        elems = self.ellis_group(base)
        index = {el: i for i, el in enumerate(elems)}
        table = [[index[self.compose(a, b)] for b in elems] for a in elems]
        psi_ok = is_homomorphism(self.group.table, table, list(range(self.group.order)))
        iso = find_isomorphism(FiniteGroup(table, check=True), self.group)
        return {
            "group": self.group.name,
            "base": base.to_json(),
            "table": table,
            "psi_multiplicative": psi_ok,
            "idempotent": index[self.compose(elems[self.e], elems[self.e])] == self.e,
            "isomorphism": iso,
            "isomorphic": iso is not None,
        }


# -- sampling and enumeration -----------------------------------------------------


def points_on(group: FiniteGroup, width: int, tails: Iterable[int] | None = None) -> Iterator[TailPoint]:
    """Every point whose support lies in ``[0, width)``."""
    tails = range(group.order) if tails is None else tails
    for t in tails:
        for w in itertools.product(range(group.order), repeat=width):
            yield TailPoint.from_window(w, t)


def random_point(group: FiniteGroup, rng: random.Random, width: int = 8) -> TailPoint:
    return TailPoint.from_window([rng.randrange(group.order) for _ in range(width)], rng.randrange(group.order))


def random_perm(rng: random.Random, width: int = 8) -> Perm:
    pts = list(range(width))
    rng.shuffle(pts)
    return Perm.from_list(pts)


def random_elem(group: FiniteGroup, rng: random.Random, width: int = 8, limit_p: float = 0.3) -> EnvElem:
    if rng.random() < limit_p:
        return Limit(random_point(group, rng, width))
    return Translation(random_point(group, rng, width), random_perm(rng, width))


# -- checks -------------------------------------------------------------------


def _window_oracle(group: FiniteGroup, f: EnvElem, x: TailPoint, width: int) -> tuple[tuple[int, ...], int]:
    """Direct array evaluation of ``f(x)`` on ``[0, width)`` and the tail.

    Permutations must keep ``[0, width)`` inside itself.
    """
    t = group.table
    xs, xt = x.window(width), x.tail
    if isinstance(f, Limit):
        return tuple(t[v][xt] for v in f.p.window(width)), t[f.p.tail][xt]
    inv = [0] * width
    for n in range(width):
        inv[f.sigma(n)] = n
    ss = f.s.window(width)
    return tuple(t[ss[n]][xs[inv[n]]] for n in range(width)), t[f.s.tail][xt]


def law_report(group: FiniteGroup, width: int = 8, exhaustive: bool = True, samples: int = 200,
               seed: int = 0) -> dict:
    """Check the composition laws on points supported in ``[0, width)``.

    With ``exhaustive`` every such base point ``p`` is used; the maps ``f`` run
    over a seeded family of translations and limits.  Results are compared both
    symbolically and against a direct array evaluation of the maps.
    """
    flow = WreathFlow(group)
    rng = random.Random(f"{seed}:{group.name}")
    e = group.identity
    if exhaustive:
        bases = list(points_on(group, width))
    else:
        bases = [random_point(group, rng, width) for _ in range(samples)]
    fs: list[EnvElem] = [flow.identity(), Translation(TailPoint.constant(e), Perm.cycle(*range(width)))]
    fs += [random_elem(group, rng, width) for _ in range(6)]
    consts = [TailPoint.constant(g) for g in range(group.order)]
    fails = {"left_limit": 0, "pointwise": 0, "idempotent": 0, "stabilizer": 0, "ideal": 0}
    checked = 0
    for p in bases:
        lp = Limit(p)
        if p.tail == e and flow.compose(lp, lp) != lp:
            fails["idempotent"] += 1
        for f in fs:
            checked += 1
            comp = flow.compose(f, lp)
            if comp != Limit(flow.act(f, p)):
                fails["left_limit"] += 1
            # f o Limit(p) depends on x only through its tail, so constants suffice.
            for c in consts:
                inner = flow.act(lp, c)
                if _window_oracle(group, comp, c, width) != _window_oracle(group, f, inner, width):
                    fails["pointwise"] += 1
            fp = flow.stabilizing_partner(f, p)
            if flow.compose(fp, comp) != lp:
                fails["stabilizer"] += 1
        q = bases[rng.randrange(len(bases))]
        if flow.compose(flow.ideal_mover(p, q), lp) != Limit(q):
            fails["ideal"] += 1
    return {"group": group.name, "bases": len(bases), "maps": len(fs), "pairs": checked,
            "failures": fails, "ok": not any(fails.values())}


def associativity_report(group: FiniteGroup, triples: int = 300, seed: int = 0, width: int = 8) -> dict:
    flow = WreathFlow(group)
    rng = random.Random(f"assoc:{seed}:{group.name}")
    bad_assoc = bad_action = 0
    for _ in range(triples):
        a, b, c = (random_elem(group, rng, width) for _ in range(3))
        if flow.compose(flow.compose(a, b), c) != flow.compose(a, flow.compose(b, c)):
            bad_assoc += 1
        x = random_point(group, rng, width)
        if flow.act(flow.compose(a, b), x) != flow.act(a, flow.act(b, x)):
            bad_action += 1
    return {"group": group.name, "triples": triples, "non_associative": bad_assoc,
            "action_mismatch": bad_action, "ok": bad_assoc == 0 and bad_action == 0}


# -- the integer-indexed variant ---------------------------------------------------


def longest_agreement(x: Callable[[int], int], y: Callable[[int], int], lo: int, hi: int) -> int:
    """Length of the longest run in ``[lo, hi)`` where ``x`` and ``y`` agree."""
    best = run = 0
    for n in range(lo, hi):
        run = run + 1 if x(n) == y(n) else 0
        best = max(best, run)
    return best


def integer_proximity_probe(x: Callable[[int], int], y: Callable[[int], int], radius: int,
                            lengths: Sequence[int] | None = None) -> dict:
    """Which interval lengths the two sequences agree on inside ``[-radius, radius)``.

    Proximality asks for agreement on arbitrarily long intervals; a window can
    only report the runs it sees, so this is evidence and never a verdict.
    """
    run = longest_agreement(x, y, -radius, radius)
    lengths = list(lengths) if lengths is not None else [2 ** k for k in range(radius.bit_length() + 1)]
    return {"radius": radius, "longest_run": run, "agrees_on": {L: run >= L for L in lengths},
            "whole_window": run >= 2 * radius}


def periodic_sequence(values: Sequence[int]) -> Callable[[int], int]:
    """The periodic sequence repeating ``values`` (continuous for the profinite topology)."""
    m = len(values)
    return lambda n: values[n % m]
