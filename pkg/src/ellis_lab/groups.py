"""Finite groups as multiplication tables, with subgroup and isomorphism search."""
from __future__ import annotations

from collections import deque
from itertools import permutations, product
from typing import Iterable, Sequence


class FiniteGroup:
    """Group on ``range(order)`` given by a Cayley table."""

    def __init__(self, table: Sequence[Sequence[int]], name: str = "", check: bool = True):
        self.table = tuple(tuple(int(x) for x in row) for row in table)
        self.order = len(self.table)
        self.name = name
        n = self.order
        if check:
            for row in self.table:
                if len(row) != n or sorted(row) != list(range(n)):
                    raise ValueError("table is not a Latin square")
            for j in range(n):
                if sorted(row[j] for row in self.table) != list(range(n)):
                    raise ValueError("table is not a Latin square")
        ident = [e for e in range(n) if all(self.table[e][x] == x for x in range(n))]
        if not ident:
            raise ValueError("no identity element")
        self.identity = ident[0]
        self.inverse = tuple(self.table[g].index(self.identity) for g in range(n))
        if check and not self.is_associative():
            raise ValueError("table is not associative")

    def mul(self, a: int, b: int) -> int:
        return self.table[a][b]

    def is_associative(self) -> bool:
        t = self.table
        r = range(self.order)
        return all(t[t[a][b]][c] == t[a][t[b][c]] for a in r for b in r for c in r)

    def element_order(self, g: int) -> int:
        k, x = 1, g
        while x != self.identity:
            x = self.table[x][g]
            k += 1
        return k

    # -- subsets as bitmasks -------------------------------------------------

    def left(self, g: int, mask: int) -> int:
        """Bitmask of g*A."""
        out = 0
        for a in _bits(mask):
            out |= 1 << self.table[g][a]
        return out

    def right(self, mask: int, g: int) -> int:
        """Bitmask of A*g."""
        out = 0
        for a in _bits(mask):
            out |= 1 << self.table[a][g]
        return out

    @property
    def full_mask(self) -> int:
        return (1 << self.order) - 1

    # -- subgroups -----------------------------------------------------------

    def generated(self, gens: Iterable[int]) -> frozenset[int]:
        elems = {self.identity}
        frontier = deque([self.identity])
        gens = list(gens)
        while frontier:
            x = frontier.popleft()
            for g in gens:
                y = self.table[x][g]
                if y not in elems:
                    elems.add(y)
                    frontier.append(y)
        return frozenset(elems)

    def subgroups(self) -> list[frozenset[int]]:
        """All subgroups, found by adjoining one element at a time."""
        start = frozenset({self.identity})
        seen = {start}
        queue = deque([start])
        while queue:
            h = queue.popleft()
            for g in range(self.order):
                if g not in h:
                    k = self.generated(set(h) | {g})
                    if k not in seen:
                        seen.add(k)
                        queue.append(k)
        return sorted(seen, key=lambda s: (len(s), sorted(s)))

    def is_normal(self, h: frozenset[int]) -> bool:
        t, inv = self.table, self.inverse
        return all(t[t[g][x]][inv[g]] in h for g in range(self.order) for x in h)

    def normal_subgroups(self) -> list[frozenset[int]]:
        return [h for h in self.subgroups() if self.is_normal(h)]

    def quotient(self, n: frozenset[int]) -> tuple[FiniteGroup, list[int]]:
        """G/N together with the projection (element -> coset index)."""
        cosets: list[frozenset[int]] = []
        proj = [-1] * self.order
        for g in range(self.order):
            if proj[g] < 0:
                c = frozenset(self.table[g][x] for x in n)
                for x in c:
                    proj[x] = len(cosets)
                cosets.append(c)
        rep = [min(c) for c in cosets]
        table = [[proj[self.table[a][b]] for b in rep] for a in rep]
        return FiniteGroup(table, f"{self.name}/N", check=False), proj

    # -- serialisation ---------------------------------------------------------

    def to_json(self) -> dict:
        return {"order": self.order, "table": [list(r) for r in self.table], "name": self.name}

    @classmethod
    def from_json(cls, data: dict) -> FiniteGroup:
        g = cls(data["table"], data.get("name", ""))
        if "order" in data and data["order"] != g.order:
            raise ValueError("order does not match the table")
        return g

    def __repr__(self) -> str:
        return f"FiniteGroup({self.name or self.order})"


def _bits(mask: int):
    i = 0
    while mask:
        if mask & 1:
            yield i
        mask >>= 1
        i += 1


def bits(mask: int) -> list[int]:
    return list(_bits(mask))


def mask_of(elems: Iterable[int]) -> int:
    m = 0
    for e in elems:
        m |= 1 << e
    return m


# -- constructors -------------------------------------------------------------


def cyclic(n: int) -> FiniteGroup:
    return FiniteGroup([[(a + b) % n for b in range(n)] for a in range(n)], f"Z/{n}", check=False)


def from_permutations(gens: Sequence[Sequence[int]], name: str = "") -> FiniteGroup:
    """Group generated by permutations (composition: apply right factor first)."""
    gens = [tuple(g) for g in gens]
    k = len(gens[0])
    ident = tuple(range(k))
    elems = [ident]
    seen = {ident}
    queue = deque([ident])
    while queue:
        p = queue.popleft()
        for g in gens:
            q = tuple(p[g[x]] for x in range(k))
            if q not in seen:
                seen.add(q)
                elems.append(q)
                queue.append(q)
    index = {p: i for i, p in enumerate(elems)}
    table = [[index[tuple(a[b[x]] for x in range(k))] for b in elems] for a in elems]
    return FiniteGroup(table, name, check=False)


def symmetric(k: int) -> FiniteGroup:
    return from_permutations([tuple(p) for p in permutations(range(k))], f"S{k}")


def dihedral(n: int) -> FiniteGroup:
    """Symmetries of the n-gon, order 2n."""
    rot = tuple((x + 1) % n for x in range(n))
    ref = tuple((-x) % n for x in range(n))
    return from_permutations([rot, ref], f"D{n}")


def quaternion() -> FiniteGroup:
    """Q8 via unit quaternions +-1, +-i, +-j, +-k."""
    names = ["1", "i", "j", "k"]
    mult = {
        ("1", x): (1, x) for x in names
    }
    mult.update({(x, "1"): (1, x) for x in names})
    mult.update({
        ("i", "i"): (-1, "1"), ("j", "j"): (-1, "1"), ("k", "k"): (-1, "1"),
        ("i", "j"): (1, "k"), ("j", "k"): (1, "i"), ("k", "i"): (1, "j"),
        ("j", "i"): (-1, "k"), ("k", "j"): (-1, "i"), ("i", "k"): (-1, "j"),
    })
    elems = [(s, x) for s in (1, -1) for x in names]
    index = {e: i for i, e in enumerate(elems)}
    table = []
    for s1, x1 in elems:
        row = []
        for s2, x2 in elems:
            s, x = mult[(x1, x2)]
            row.append(index[(s * s1 * s2, x)])
        table.append(row)
    return FiniteGroup(table, "Q8", check=False)


def direct_product(g: FiniteGroup, h: FiniteGroup) -> FiniteGroup:
    n = h.order
    table = [
        [g.table[a // n][b // n] * n + h.table[a % n][b % n] for b in range(g.order * n)]
        for a in range(g.order * n)
    ]
    return FiniteGroup(table, f"{g.name}x{h.name}", check=False)


def standard_groups() -> dict[str, FiniteGroup]:
    out = {f"Z{n}": cyclic(n) for n in range(2, 13)}
    out.update({"S3": symmetric(3), "D4": dihedral(4), "Q8": quaternion()})
    return out


# -- isomorphism search ------------------------------------------------------


def generating_set(g: FiniteGroup) -> list[int]:
    """Greedy small generating set, preferring elements of large order."""
    gens: list[int] = []
    span = frozenset({g.identity})
    for x in sorted(range(g.order), key=lambda x: (-g.element_order(x), x)):
        if x not in span:
            gens.append(x)
            span = g.generated(gens)
            if len(span) == g.order:
                break
    return gens


def _extend(src: FiniteGroup, dst: FiniteGroup, gens: Sequence[int], images: Sequence[int]):
    """Extend generator images to a map by BFS on words; None if inconsistent."""
    phi = {src.identity: dst.identity}
    queue = deque([src.identity])
    while queue:
        x = queue.popleft()
        for s, t in zip(gens, images):
            y = src.table[x][s]
            img = dst.table[phi[x]][t]
            if y in phi:
                if phi[y] != img:
                    return None
            else:
                phi[y] = img
                queue.append(y)
    if len(phi) != src.order:
        return None
    return [phi[x] for x in range(src.order)]


def is_homomorphism(src_table, dst_table, phi: Sequence[int]) -> bool:
    n = len(src_table)
    return all(phi[src_table[a][b]] == dst_table[phi[a]][phi[b]] for a in range(n) for b in range(n))


def find_isomorphism(src: FiniteGroup, dst: FiniteGroup) -> list[int] | None:
    """An isomorphism src -> dst as a list of images, or None."""
    if src.order != dst.order:
        return None
    if sorted(map(src.element_order, range(src.order))) != sorted(map(dst.element_order, range(dst.order))):
        return None
    gens = generating_set(src)
    orders = [src.element_order(s) for s in gens]
    candidates = [[t for t in range(dst.order) if dst.element_order(t) == o] for o in orders]
    for images in product(*candidates):
        phi = _extend(src, dst, gens, images)
        if phi is not None and len(set(phi)) == src.order and is_homomorphism(src.table, dst.table, phi):
            return phi
    return None


def table_is_group(table: Sequence[Sequence[int]]) -> bool:
    try:
        FiniteGroup(table, check=True)
    except ValueError:
        return False
    return True
