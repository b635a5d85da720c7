"""Families of finite 0/1 patterns on the integers and their genericity checks.

Shifts act additively: ``(g . theta)(x) = theta(x + g)``, so ``eta`` occurs in
``theta`` when ``eta(x) = theta(x + g)`` on ``dom eta`` for some ``g``.

The unbounded quantifiers over a family are read inside a finite universe.
Probes are the intervals ``[0, L)``; a member reaches probe ``L`` when its
domain holds ``L`` consecutive points.  "Cofinally many" means "some member
reaching the top probe" and "sufficiently large" means "every member reaching
the top probe", where the top probe is the longest run of any member.
"""
from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from . import kernels


class BudgetExceeded(Exception):
    pass


class NoLimitPointWithinBudget(Exception):
    pass


@dataclass(frozen=True, order=True)
class PartialPattern:
    entries: tuple[tuple[int, int], ...]

    @classmethod
    def of(cls, mapping: Mapping[int, int] | Iterable[tuple[int, int]]) -> PartialPattern:
        items = mapping.items() if isinstance(mapping, Mapping) else mapping
        d = {int(k): int(v) for k, v in items}
        if any(v not in (0, 1) for v in d.values()):
            raise ValueError("pattern values must be bits")
        return cls(tuple(sorted(d.items())))

    @classmethod
    def interval(cls, lo: int, bits: Sequence[int]) -> PartialPattern:
        return cls.of((lo + i, b) for i, b in enumerate(bits))

    @property
    def dom(self) -> tuple[int, ...]:
        return tuple(k for k, _ in self.entries)

    @property
    def vals(self) -> tuple[int, ...]:
        return tuple(v for _, v in self.entries)

    def __len__(self) -> int:
        return len(self.entries)

    @property
    def span(self) -> int:
        return self.entries[-1][0] - self.entries[0][0] if self.entries else 0

    def shift(self, g: int) -> PartialPattern:
        """g . eta, i.e. the pattern x -> eta(x + g)."""
        return PartialPattern(tuple((k - g, v) for k, v in self.entries))

    def canonical(self) -> PartialPattern:
        return self.shift(self.entries[0][0]) if self.entries else self

    def as_dict(self) -> dict[int, int]:
        return dict(self.entries)

    def longest_run(self) -> int:
        best = run = 0
        prev = None
        for k in self.dom:
            run = run + 1 if prev is not None and k == prev + 1 else 1
            best = max(best, run)
            prev = k
        return best

    def is_interval(self) -> bool:
        return not self.entries or self.span + 1 == len(self.entries)

    def to_json(self) -> dict[str, int]:
        return {str(k): v for k, v in self.entries}

    @classmethod
    def from_json(cls, d: Mapping[str, int]) -> PartialPattern:
        return cls.of((int(k), v) for k, v in d.items())

    def __repr__(self) -> str:
        return "{" + ", ".join(f"{k}:{v}" for k, v in self.entries) + "}"


EMPTY = PartialPattern(())


def occurrences(eta: PartialPattern, theta: PartialPattern) -> list[int]:
    """All g with eta(x) = theta(x + g) on dom eta."""
    if not eta.entries:
        return [0]
    t = theta.as_dict()
    k0, _ = eta.entries[0]
    out = []
    for p in theta.dom:
        g = p - k0
        if all(t.get(k + g) == v for k, v in eta.entries):
            out.append(g)
    return out


def occurs(eta: PartialPattern, theta: PartialPattern) -> bool:
    if not eta.entries:
        return True
    if theta.is_interval() and theta.entries:
        c = eta.canonical()
        if c.span >= len(theta):
            return False
        return kernels.first_occurrence(list(theta.vals), list(c.dom), list(c.vals)) >= 0
    return bool(occurrences(eta, theta))


# -- families ------------------------------------------------------------------------


@dataclass(frozen=True)
class PatternFamily:
    """Explicit members, or the content of a single windowed source assignment.

    A content family holds every restriction of every shift of ``source``.
    All of them are restrictions of the source, and the conditions checked
    below pass from a pattern to its restrictions, so checks run on the
    source alone.
    """

    members: tuple[PartialPattern, ...]
    radius: int
    source: PartialPattern | None = None

    def __post_init__(self):
        for m in self.members + ((self.source,) if self.source else ()):
            if m.span > 2 * self.radius:
                raise ValueError(f"member {m} does not fit the universe of radius {self.radius}")

    @property
    def top_probe(self) -> int:
        pool = [self.source] if self.source is not None else list(self.members)
        return max((m.longest_run() for m in pool), default=0)

    def large_members(self) -> list[PartialPattern]:
        """Members reaching the top probe."""
        if self.source is not None:
            return [self.source]
        top = self.top_probe
        return [m for m in self.members if m.longest_run() == top]

    def occurs_cofinally(self, eta: PartialPattern) -> bool:
        return any(occurs(eta, m) for m in self.large_members())

    def to_json(self) -> dict:
        d: dict = {"radius": self.radius, "members": [m.to_json() for m in self.members]}
        if self.source is not None:
            d["source"] = {"lo": self.source.entries[0][0], "bits": list(self.source.vals)}
        return d

    @classmethod
    def from_json(cls, d: Mapping) -> PatternFamily:
        src = d.get("source")
        source = PartialPattern.interval(src["lo"], src["bits"]) if src else None
        return cls(tuple(PartialPattern.from_json(m) for m in d.get("members", ())), int(d["radius"]), source)


def window_source(pred, radius: int) -> PartialPattern:
    """The assignment k -> pred(k) on [-radius, radius]."""
    return PartialPattern.interval(-radius, [int(bool(pred(k))) for k in range(-radius, radius + 1)])


def content(f: PartialPattern, bound: int, span: int | None = None) -> PatternFamily:
    """Patterns of size at most bound occurring in f, up to shift, with f kept as source."""
    if not f.is_interval():
        raise ValueError("content needs an interval source")
    n = len(f)
    span = n - 1 if span is None else min(span, n - 1)
    bits = f.vals
    seen: set[PartialPattern] = {EMPTY}
    for size in range(1, bound + 1):
        for rest in itertools.combinations(range(1, span + 1), size - 1):
            offs = (0,) + rest
            width = offs[-1]
            for g in range(n - width):
                seen.add(PartialPattern(tuple((o, bits[g + o]) for o in offs)))
    radius = (n - 1 + 1) // 2
    return PatternFamily(tuple(sorted(seen)), radius, f)


# -- strong genericity -------------------------------------------------------------------


def translate_set(dom: Sequence[int], k: int) -> list[int]:
    """V = dom + [0, k)."""
    return sorted({d + j for d in dom for j in range(k)})


def _replicates(theta: PartialPattern, eta: PartialPattern, k: int) -> int | None:
    """None if every placement of V = dom eta + [0,k) inside dom theta holds eta; else a bad shift."""
    c = eta.canonical()
    v = translate_set(c.dom, k)
    t = theta.as_dict()
    dom = set(t)
    lo = min(dom, default=0)
    hi = max(dom, default=-1)
    offsets = [h for h in range(-c.span, v[-1] + 1) if all(h + d in set(v) for d in c.dom)]
    for g in range(lo - v[0], hi - v[-1] + 1):
        if not all(x + g in dom for x in v):
            continue
        if not any(all(t[h + g + d] == val for d, val in c.entries) for h in offsets):
            return g
    return None


def min_translates(family: PatternFamily, eta: PartialPattern, kmax: int) -> tuple[int, int, object]:
    """Least k for which dom eta + [0,k) replicates eta in every large member.

    Returns ``(k, |V|, None)`` or ``(-1, -1, (member index, shift))``.
    """
    c = eta.canonical()
    if family.source is not None:
        bits = list(family.source.vals)
        k, bad = kernels.min_translates(bits, list(c.dom), list(c.vals), kmax)
        if k > 0:
            return k, len(translate_set(c.dom, k)), None
        return -1, -1, (0, family.source.entries[0][0] + bad)
    members = family.large_members()
    last = None
    for k in range(1, kmax + 1):
        bad = None
        for i, m in enumerate(members):
            g = _replicates(m, c, k)
            if g is not None:
                bad = (i, g)
                break
        if bad is None:
            return k, len(translate_set(c.dom, k)), None
        last = bad
    return -1, -1, last


def candidates(family: PatternFamily, size_cap: int, span_cap: int, limit: int = 200_000) -> list[PartialPattern]:
    """Canonical patterns with 1 <= size <= size_cap and span <= span_cap occurring cofinally."""
    out: set[PartialPattern] = set()
    for m in family.large_members():
        t = m.as_dict()
        dom = m.dom
        for p in dom:
            near = [q for q in dom if p < q <= p + span_cap]
            for size in range(1, size_cap + 1):
                for rest in itertools.combinations(near, size - 1):
                    pos = (p,) + rest
                    out.add(PartialPattern(tuple((q - p, t[q]) for q in pos)))
                    if len(out) > limit:
                        raise BudgetExceeded(f"more than {limit} candidate patterns")
    return sorted(out, key=lambda e: (len(e), e.span, e.entries))


def default_kmax(family: PatternFamily, eta: PartialPattern) -> int:
    """V may be at most half the universe wide, so it can avoid any one region."""
    return max(0, family.radius + 1 - eta.canonical().span)


@dataclass
class FamilyReport:
    passed: bool
    entries: list[dict]
    table: dict[int, int | None]
    point_table: dict[int, int | None]
    params: dict
    timing: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "passed": self.passed,
            "entries": self.entries,
            "table": {str(k): v for k, v in self.table.items()},
            "point_table": {str(k): v for k, v in self.point_table.items()},
            "params": self.params,
        }


def family_sg_check(family: PatternFamily, size_cap: int = 2, span_cap: int = 8,
                    kmax: int | None = None) -> FamilyReport:
    """For each cofinal eta find the least k with V = dom eta + [0,k) working.

    ``table`` maps |eta| to the largest k needed (the number of translates of
    dom eta making up V); ``point_table`` gives the matching largest |V|.
    """
    start = time.perf_counter()
    entries = []
    table: dict[int, int | None] = {}
    points: dict[int, int | None] = {}
    ok = True
    for eta in candidates(family, size_cap, span_cap):
        km = default_kmax(family, eta) if kmax is None else kmax
        k, npts, bad = min_translates(family, eta, km)
        e = {"eta": eta.to_json(), "translates": k, "points": npts}
        if k < 0:
            ok = False
            e["falsifier"] = {"member": bad[0], "shift": bad[1]} if bad else None
            table[len(eta)] = None
            points[len(eta)] = None
        else:
            if table.get(len(eta), 0) is not None:
                table[len(eta)] = max(table.get(len(eta)) or 0, k)
                points[len(eta)] = max(points.get(len(eta)) or 0, npts)
        entries.append(e)
    params = {
        "radius": family.radius,
        "size_cap": size_cap,
        "span_cap": span_cap,
        "kmax": kmax if kmax is not None else "half-universe",
        "top_probe": family.top_probe,
    }
    return FamilyReport(ok, entries, dict(sorted(table.items())), dict(sorted(points.items())), params,
                        {"seconds": time.perf_counter() - start})


def family_usg_check(family: PatternFamily, buckets: Sequence[int] = (1, 2), span_cap: int = 8,
                     kmax: int | None = None) -> dict:
    rep = family_sg_check(family, max(buckets, default=0), span_cap, kmax)
    table = {b: rep.table.get(b, 0) for b in buckets}
    vals = [table[b] for b in buckets]
    bounded = rep.passed and all(v is not None for v in vals)
    growing = all(a is not None and b is not None and a < b for a, b in zip(vals, vals[1:]))
    return {
        "passed": bounded,
        "table": table,
        "point_table": {b: rep.point_table.get(b, 0) for b in buckets},
        "strictly_growing": growing,
        "report": rep,
    }


# -- periods ----------------------------------------------------------------------------


def family_periods(family: PatternFamily, bound: int | None = None) -> list[int]:
    """Shifts t in [-bound, bound] for which no large member shows f(x) != f(x+t).

    The default bound is half the radius: near the edge of the universe only a
    handful of pairs are visible and most shifts would pass vacuously.
    """
    bound = family.radius // 2 if bound is None else bound
    out = [0]
    for t in range(-bound, bound + 1):
        if t == 0:
            continue
        bad1 = PartialPattern.of({0: 0, t: 1})
        bad2 = PartialPattern.of({0: 1, t: 0})
        if not family.occurs_cofinally(bad1) and not family.occurs_cofinally(bad2):
            out.append(t)
    return sorted(out)


# -- limit points ---------------------------------------------------------------------------


@dataclass
class LimitPoint:
    assignment: list[int]
    checked: int
    cap: int

    def to_json(self) -> dict:
        return {"assignment": self.assignment, "checked_patterns": self.checked, "cap": self.cap}


def limit_point(family: PatternFamily, window: int, cap: int = 3, budget: int = 100_000) -> LimitPoint:
    """Backtracking search for bits on [0, window) whose small sub-patterns all occur cofinally."""
    cache: dict[PartialPattern, bool] = {}
    checks = 0

    def good(eta: PartialPattern) -> bool:
        nonlocal checks
        c = eta.canonical()
        if c not in cache:
            checks += 1
            if checks > budget:
                raise NoLimitPointWithinBudget(f"more than {budget} occurrence checks")
            cache[c] = family.occurs_cofinally(c)
        return cache[c]

    assign: list[int] = []
    nodes = 0

    def consistent(i: int) -> bool:
        for size in range(0, cap):
            for rest in itertools.combinations(range(i), size):
                pos = rest + (i,)
                if not good(PartialPattern(tuple((p, assign[p]) for p in pos))):
                    return False
        return True

    def search(i: int) -> bool:
        nonlocal nodes
        if i == window:
            return True
        for b in (0, 1):
            nodes += 1
            if nodes > budget:
                raise NoLimitPointWithinBudget("backtracking budget exhausted")
            assign.append(b)
            if consistent(i) and search(i + 1):
                return True
            assign.pop()
        return False

    if not search(0):
        raise NoLimitPointWithinBudget(f"no assignment of length {window} with cap {cap}")
    return LimitPoint(list(assign), checks, cap)


def verify_limit_point(family: PatternFamily, lp: LimitPoint) -> bool:
    a = lp.assignment
    for size in range(1, lp.cap + 1):
        for pos in itertools.combinations(range(len(a)), size):
            if not family.occurs_cofinally(PartialPattern(tuple((p, a[p]) for p in pos))):
                return False
    return True


# -- raw minimal |V| -------------------------------------------------------------------------


def min_replicating_points(family: PatternFamily, eta: PartialPattern, width: int, max_size: int) -> int | None:
    """Least |V| over all V inside [0, width) replicating eta in the large members (exhaustive)."""
    c = eta.canonical()
    for size in range(len(c), max_size + 1):
        for rest in itertools.combinations(range(1, width), size - 1):
            v = (0,) + rest
            if _set_replicates(family, c, v):
                return size
    return None


def _set_replicates(family: PatternFamily, eta: PartialPattern, v: Sequence[int]) -> bool:
    vset = set(v)
    offsets = [h for h in range(-eta.span, v[-1] + 1) if all(h + d in vset for d in eta.dom)]
    if not offsets:
        return False
    for m in family.large_members():
        t = m.as_dict()
        dom = set(t)
        lo, hi = min(dom), max(dom)
        for g in range(lo, hi - v[-1] + 1):
            if not all(x + g in dom for x in v):
                continue
            if not any(all(t[h + g + d] == val for d, val in eta.entries) for h in offsets):
                return False
    return True
