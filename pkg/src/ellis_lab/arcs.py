"""Finite unions of arcs and points on the circle, with exact rational angles.

Angles are fractions of a full turn in ``[0, 1)``.  A set is stored by its
breakpoints: for each breakpoint ``x`` (sorted) we keep whether ``x`` itself is
in the set and whether the open gap right after ``x`` is.  The gap before the
first breakpoint is the gap after the last one, because the circle wraps.
A set without breakpoints is empty or the whole circle.

Regular open sets carry the Boolean operations ``join = rho(U | V)``,
``meet = U & V`` and ``perp = interior of the complement``, where ``rho`` is
interior of closure.  ``d_plus`` turns each open arc ``(a, b)`` into ``[a, b)``
and ``d_minus`` into ``(a, b]``.
"""
from __future__ import annotations

import bisect
import enum
import time
from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import Iterable, Sequence

from . import kernels
from .groups import cyclic, find_isomorphism, FiniteGroup

Angle = Fraction


def angle(x) -> Fraction:
    if type(x) is Fraction and 0 <= x < 1:
        return x
    if isinstance(x, str):
        x = Fraction(x)
    return Fraction(x) % 1


class Kind(enum.Enum):
    EMPTY = "empty"
    FULL = "full"
    REGULAR_OPEN = "regular_open"
    HALF_OPEN_PLUS = "half_open_plus"
    HALF_OPEN_MINUS = "half_open_minus"
    GENERAL = "general"


Break = tuple[Fraction, bool, bool]


@dataclass(frozen=True)
class ArcSet:
    whole: bool
    breaks: tuple[Break, ...]

    # -- construction -----------------------------------------------------------

    @classmethod
    def _make(cls, breaks: Iterable[Break]) -> ArcSet:
        br = sorted(breaks)
        if not br:
            return cls(False, ())
        keep = [b for i, b in enumerate(br) if not (b[1] == b[2] == br[i - 1][2])]
        if not keep:
            return cls(br[0][2], ())
        return cls(False, tuple(keep))

    @classmethod
    def empty(cls) -> ArcSet:
        return cls(False, ())

    @classmethod
    def full(cls) -> ArcSet:
        return cls(True, ())

    @classmethod
    def point(cls, x) -> ArcSet:
        return cls._make([(angle(x), True, False)])

    @classmethod
    def arc(cls, a, b, left_closed: bool = False, right_closed: bool = False) -> ArcSet:
        """Arc from ``a`` counterclockwise to ``b``.

        With ``a == b`` the open arc is the circle minus ``a``; a closed end then
        gives the whole circle.  ``b = 1`` is allowed and means a full turn.
        """
        a, b = Fraction(a), Fraction(b)
        if angle(a) == angle(b):
            if a == b and left_closed and right_closed:
                return cls.point(a)
            if left_closed or right_closed:
                return cls.full()
            return cls._make([(angle(a), False, True)])
        return cls._make([(angle(a), left_closed, True), (angle(b), right_closed, False)])

    @classmethod
    def open(cls, a, b) -> ArcSet:
        return cls.arc(a, b)

    @classmethod
    def plus(cls, a, b) -> ArcSet:
        return cls.arc(a, b, True, False)

    @classmethod
    def minus(cls, a, b) -> ArcSet:
        return cls.arc(a, b, False, True)

    @classmethod
    def union_of(cls, parts: Iterable[ArcSet]) -> ArcSet:
        out = cls.empty()
        for p in parts:
            out = out | p
        return out

    # -- pointwise queries ------------------------------------------------------

    @property
    def _xs(self) -> list[Fraction]:
        try:
            return self.__dict__["_xs_cache"]
        except KeyError:
            xs = [b[0] for b in self.breaks]
            object.__setattr__(self, "_xs_cache", xs)
            return xs

    def _gap_before(self, i: int) -> bool:
        return self.breaks[i - 1][2]

    def values_at(self, x) -> tuple[bool, bool, bool]:
        """(gap before ``x``, ``x`` itself, gap after ``x``)."""
        x = angle(x)
        if not self.breaks:
            return self.whole, self.whole, self.whole
        xs = self._xs
        i = bisect.bisect_left(xs, x)
        if i < len(xs) and xs[i] == x:
            return self._gap_before(i), self.breaks[i][1], self.breaks[i][2]
        g = self.breaks[i - 1][2]
        return g, g, g

    def __contains__(self, x) -> bool:
        return self.values_at(x)[1]

    def right_germ(self, x) -> bool:
        """True if the set holds ``[x, x + eps)`` minus ``x`` for small ``eps``."""
        return self.values_at(x)[2]

    def left_germ(self, x) -> bool:
        return self.values_at(x)[0]

    # -- Boolean structure -------------------------------------------------------

    def _combine(self, other: ArcSet, f) -> ArcSet:
        xs = sorted({b[0] for b in self.breaks} | {b[0] for b in other.breaks})
        if not xs:
            return ArcSet(f(self.whole, other.whole), ())
        out = []
        for x in xs:
            _, pa, ga = self.values_at(x)
            _, pb, gb = other.values_at(x)
            out.append((x, f(pa, pb), f(ga, gb)))
        return ArcSet._make(out)

    def __or__(self, other: ArcSet) -> ArcSet:
        return self._combine(other, lambda u, v: u or v)

    def __and__(self, other: ArcSet) -> ArcSet:
        return self._combine(other, lambda u, v: u and v)

    def __sub__(self, other: ArcSet) -> ArcSet:
        return self._combine(other, lambda u, v: u and not v)

    def __xor__(self, other: ArcSet) -> ArcSet:
        return self._combine(other, lambda u, v: u != v)

    def complement(self) -> ArcSet:
        return ArcSet(not self.whole, tuple((x, not p, not g) for x, p, g in self.breaks))

    def _repoint(self, rule) -> ArcSet:
        n = len(self.breaks)
        return ArcSet._make(
            (x, rule(self.breaks[i - 1][2], p, g), g) for i, (x, p, g) in enumerate(self.breaks)
        ) if n else self

    def closure(self) -> ArcSet:
        return self._repoint(lambda gb, p, ga: gb or p or ga)

    def interior(self) -> ArcSet:
        return self._repoint(lambda gb, p, ga: gb and p and ga)

    def rotate(self, g) -> ArcSet:
        g = angle(g)
        return ArcSet._make(((x + g) % 1, p, q) for x, p, q in self.breaks) if self.breaks else self

    # -- classification ------------------------------------------------------------

    @property
    def kind(self) -> Kind:
        if not self.breaks:
            return Kind.FULL if self.whole else Kind.EMPTY
        rows = [(self.breaks[i - 1][2], p, g) for i, (_, p, g) in enumerate(self.breaks)]
        if all(p == (gb and ga) for gb, p, ga in rows):
            return Kind.REGULAR_OPEN
        if all(p == ga and gb != ga for gb, p, ga in rows):
            return Kind.HALF_OPEN_PLUS
        if all(p == gb and gb != ga for gb, p, ga in rows):
            return Kind.HALF_OPEN_MINUS
        return Kind.GENERAL

    def is_regular_open(self) -> bool:
        return self.kind in (Kind.REGULAR_OPEN, Kind.EMPTY, Kind.FULL)

    def is_half_open_plus(self) -> bool:
        return self.kind in (Kind.HALF_OPEN_PLUS, Kind.EMPTY, Kind.FULL)

    def is_half_open_minus(self) -> bool:
        return self.kind in (Kind.HALF_OPEN_MINUS, Kind.EMPTY, Kind.FULL)

    def finite_difference(self, other: ArcSet) -> bool:
        """True when the two sets differ in finitely many points."""
        return not any(g for _, _, g in (self ^ other).breaks) and not (self ^ other).whole

    # -- arc presentation ---------------------------------------------------------

    def arcs(self) -> list[tuple[Fraction, Fraction, str]]:
        """Maximal arcs as ``(left, right, code)`` with code in ``oo/co/oc/cc``.

        Isolated points appear as ``(x, x, "cc")``; the whole circle is
        ``(0, 1, "co")`` and the circle minus a point ``x`` is ``(x, x, "oo")``.
        """
        if not self.breaks:
            return [(Fraction(0), Fraction(1), "co")] if self.whole else []
        br = list(self.breaks)
        n = len(br)
        starts = [i for i in range(n) if not br[i - 1][2]]
        if not starts:
            holes = [x for x, _, _ in br]
            return [(h, holes[(i + 1) % len(holes)], "oo") for i, h in enumerate(holes)]
        out = []
        left: tuple[Fraction, str] | None = None
        for k in range(n):
            x, p, g = br[(starts[0] + k) % n]
            if left is None:
                if g:
                    left = (x, "c" if p else "o")
                elif p:
                    out.append((x, x, "cc"))
            elif not g:
                out.append((left[0], x, left[1] + ("c" if p else "o")))
                left = None
            elif not p:
                out.append((left[0], x, left[1] + "o"))
                left = (x, "o")
        return sorted(out)

    def to_json(self) -> list[list[str]]:
        return [[str(a), str(b), c] for a, b, c in self.arcs()]

    @classmethod
    def from_json(cls, data: Sequence[Sequence[str]]) -> ArcSet:
        out = cls.empty()
        for a, b, code in data:
            if Fraction(a) == Fraction(b) and code == "cc":
                out = out | cls.point(a)
            else:
                out = out | cls.arc(a, b, code[0] == "c", code[1] == "c")
        return out

    def __str__(self) -> str:
        if not self.breaks:
            return "S1" if self.whole else "0"
        parts = []
        for a, b, c in self.arcs():
            if c == "cc" and a == b:
                parts.append("{" + str(a) + "}")
            else:
                parts.append(("[" if c[0] == "c" else "(") + f"{a},{b}" + ("]" if c[1] == "c" else ")"))
        return " + ".join(parts)

    # -- grid export --------------------------------------------------------------

    def on_grid(self, grid: int) -> tuple:
        """The kernel encoding on ``Z/grid``; every breakpoint must lie on the grid."""
        out = []
        for x, p, g in self.breaks:
            k = x * grid
            if k.denominator != 1:
                raise ValueError(f"breakpoint {x} is not on the grid 1/{grid}")
            out.append((int(k), int(p), int(g)))
        return (int(self.whole) if not out else 0, tuple(out))

    @classmethod
    def from_grid(cls, enc: tuple, grid: int) -> ArcSet:
        whole, br = enc
        if not br:
            return cls(bool(whole), ())
        return cls._make((Fraction(k, grid), bool(p), bool(g)) for k, p, g in br)


# -- regular open algebra -------------------------------------------------------


def rho(a: ArcSet) -> ArcSet:
    """Interior of the closure."""
    return a.closure().interior()


def join(u: ArcSet, v: ArcSet) -> ArcSet:
    return rho(u | v)


def meet(u: ArcSet, v: ArcSet) -> ArcSet:
    return u & v


def perp(u: ArcSet) -> ArcSet:
    return u.complement().interior()


def d_plus(u: ArcSet) -> ArcSet:
    """``(a, b) -> [a, b)`` arcwise: a point is in iff the gap after it is."""
    return u._repoint(lambda gb, p, ga: ga)


def d_minus(u: ArcSet) -> ArcSet:
    return u._repoint(lambda gb, p, ga: gb)


# -- rational grids ---------------------------------------------------------------


def angles_up_to(denominator: int) -> list[Fraction]:
    """All angles in ``[0, 1)`` with denominator at most ``denominator``."""
    return sorted({Fraction(k, m) for m in range(1, denominator + 1) for k in range(m)})


def one_arc_sets(denominator: int) -> list[tuple[Fraction, Fraction]]:
    pts = angles_up_to(denominator)
    return [(a, b) for a in pts for b in pts if a != b]


def grid_for(denominator: int) -> int:
    return lcm(*range(1, denominator + 1))


def law_sweep(denominator: int = 8) -> dict:
    """Boolean-algebra laws for (join, meet, perp) on all triples of one-arc sets."""
    grid = grid_for(denominator)
    arcs = [(int(a * grid), int(b * grid)) for a, b in one_arc_sets(denominator)]
    t0 = time.perf_counter()
    fails, triples = kernels.ro_law_sweep(arcs, grid)
    return {"denominator": denominator, "grid": grid, "arcs": len(arcs), "triples": triples,
            "failures": dict(fails), "ok": not any(fails.values()), "backend": kernels.BACKEND,
            "seconds": time.perf_counter() - t0}


def tidy_round_trip(denominator: int = 8) -> dict:
    """``rho . d_plus = id`` on regular open one- and two-arc sets, and the converse."""
    pts = angles_up_to(denominator)
    singles = [ArcSet.open(a, b) for a, b in one_arc_sets(denominator)]
    pairs = [u | v for i, u in enumerate(singles[::7]) for v in singles[i::11]]
    ros = [ArcSet.empty(), ArcSet.full()] + singles + [rho(s) for s in pairs]
    bad_rd = sum(rho(d_plus(u)) != u for u in ros)
    bad_rd_minus = sum(rho(d_minus(u)) != u for u in ros)
    halfs = [d_plus(u) for u in ros]
    bad_dr = sum(d_plus(rho(h)) != h for h in halfs)
    bad_kind = sum(not h.is_half_open_plus() for h in halfs)
    return {"denominator": denominator, "points": len(pts), "sets": len(ros),
            "rho_after_d_plus": bad_rd, "rho_after_d_minus": bad_rd_minus,
            "d_plus_after_rho": bad_dr, "not_half_open": bad_kind,
            "ok": bad_rd == bad_rd_minus == bad_dr == bad_kind == 0}


# -- the circle Ellis group ----------------------------------------------------------


@dataclass(frozen=True)
class CircleType:
    """The type ``g . rho*(e_side)`` restricted to half-open-plus sets.

    ``side = +1`` contains exactly the sets holding a right germ at ``g``;
    ``side = -1`` those holding a left germ.
    """

    point: Fraction
    side: int = 1

    def holds(self, a: ArcSet) -> bool:
        return a.right_germ(self.point) if self.side > 0 else a.left_germ(self.point)

    def d(self, a: ArcSet) -> ArcSet:
        """``{h : h^-1 A in q}``: the germ-holding points of ``A``, rotated by ``-g``."""
        germs = d_plus(a) if self.side > 0 else d_minus(a)
        return germs.rotate(-self.point)


def star_holds(p: CircleType, q: CircleType, a: ArcSet) -> bool:
    """Membership of ``a`` in ``p * q``: ``d_q(a)`` belongs to ``p``."""
    return p.holds(q.d(a))


def probe_family(x: Fraction, scale: int) -> list[ArcSet]:
    """Half-open arcs finely around ``x`` that separate it from nearby points."""
    out = []
    for k in (2, 7):
        d = Fraction(1, k * scale)
        out += [ArcSet.plus(x, x + d), ArcSet.plus(x - d, x), ArcSet.plus(x - d, x + d),
                ArcSet.plus(x + d, x - d), ArcSet.plus(x + d, x + 2 * d)]
    return out


def ellis_circle(denominator: int = 12) -> dict:
    """Check that ``*`` on the types ``q_g`` is rotation addition.

    For all pairs of rotations with denominators up to the bound, ``q_g * q_h``
    is compared with ``q_{g+h}`` on a fixed family of half-open arcs and on
    probes around ``g + h``.  Each cyclic subgroup ``(1/m)Z/Z`` gives a
    composition table that must be the cyclic group of order ``m``.  The minus
    side is checked to send half-open-plus sets to half-open-minus ones.
    """
    t0 = time.perf_counter()
    rots = angles_up_to(denominator)
    fixed = [ArcSet.plus(a, b) for a, b in one_arc_sets(min(denominator, 6))]
    fixed += [ArcSet.plus(a, b) | ArcSet.plus(c, d)
              for (a, b), (c, d) in zip(one_arc_sets(4), reversed(one_arc_sets(4)))]
    mismatches = []
    closed_plus = closed_minus = True
    for h in rots:
        qh = CircleType(h, 1)
        dq = [qh.d(a) for a in fixed]
        closed_plus &= all(s.is_half_open_plus() for s in dq)
        closed_minus &= all(CircleType(h, -1).d(a).is_half_open_minus() for a in fixed)
        for g in rots:
            qg = CircleType(g, 1)
            target = CircleType((g + h) % 1, 1)
            ok = all(qg.holds(s) == target.holds(a) for s, a in zip(dq, fixed))
            probes = probe_family(target.point, lcm(g.denominator, h.denominator, denominator))
            ok &= all(star_holds(qg, qh, a) == target.holds(a) for a in probes)
            if not ok:
                mismatches.append([str(g), str(h)])
    tables = {}
    for m in range(1, denominator + 1):
        elems = [Fraction(k, m) for k in range(m)]
        index = {x: i for i, x in enumerate(elems)}
        table = []
        for g in elems:
            row = []
            for h in elems:
                p, q = CircleType(g), CircleType(h)
                # identify p * q among the subgroup by its germ at each candidate point
                hits = [i for i, x in enumerate(elems)
                        if all(star_holds(p, q, a) == CircleType(x).holds(a) for a in probe_family(x, m))]
                row.append(hits[0] if len(hits) == 1 else -1)
            table.append(row)
        expect = [[(i + j) % m for j in range(m)] for i in range(m)]
        iso = table == expect and (m == 1 or find_isomorphism(FiniteGroup(table), cyclic(m)) is not None)
        tables[m] = {"table": table, "table_ok": table == expect, "isomorphic": bool(iso)}
    identity_ok = all(star_holds(CircleType(Fraction(0)), CircleType(g), a) == CircleType(g).holds(a)
                      for g in rots for a in fixed)
    ok = not mismatches and closed_plus and closed_minus and identity_ok and all(
        t["table_ok"] and t["isomorphic"] for t in tables.values())
    return {"denominator": denominator, "rotations": len(rots), "pairs": len(rots) ** 2,
            "mismatches": mismatches, "plus_closed": closed_plus, "minus_lands_in_minus": closed_minus,
            "identity": identity_ok, "cyclic_tables": {str(k): v for k, v in tables.items()},
            "ok": ok, "seconds": time.perf_counter() - t0}
