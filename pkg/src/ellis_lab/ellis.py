"""Stone duality and Ellis semigroups for finite groups.

A G-algebra on a finite group is stored by its atoms (disjoint bitmasks
covering the group).  Ultrafilters of a finite algebra are its atoms, so
points of the Stone space are atom indices throughout.
"""
from __future__ import annotations

import random
import time
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from . import kernels
from .groups import (
    FiniteGroup,
    bits,
    find_isomorphism,
    is_homomorphism,
    mask_of,
    standard_groups,
    table_is_group,
)

MEMBER_CAP = 1 << 16


class NotInAlgebra(Exception):
    """A computed set is not a member of the algebra it was expected in."""

    def __init__(self, mask: int):
        super().__init__(f"set {bits(mask)} is not in the algebra")
        self.mask = mask


class BudgetExceeded(Exception):
    pass


@dataclass(frozen=True)
class GAlgebra:
    group: FiniteGroup
    atoms: tuple[int, ...]
    d_closed: bool
    atom_of: tuple[int, ...] = field(repr=False, compare=False)

    @classmethod
    def from_atoms(cls, group: FiniteGroup, atoms: Iterable[int]) -> GAlgebra:
        atoms = tuple(sorted(a for a in atoms if a))
        owner = [-1] * group.order
        for i, a in enumerate(atoms):
            for x in bits(a):
                if owner[x] >= 0:
                    raise ValueError("atoms overlap")
                owner[x] = i
        if -1 in owner:
            raise ValueError("atoms do not cover the group")
        proto = cls(group, atoms, False, tuple(owner))
        closed = all(proto.contains(group.right(a, g)) for a in atoms for g in range(group.order))
        return cls(group, atoms, closed, tuple(owner))

    @property
    def n_atoms(self) -> int:
        return len(self.atoms)

    @property
    def n_members(self) -> int:
        return 1 << len(self.atoms)

    def contains(self, mask: int) -> bool:
        """Whether mask is a union of atoms."""
        rest = mask
        for x in bits(mask):
            if rest >> x & 1:
                a = self.atoms[self.atom_of[x]]
                if a & ~mask:
                    return False
                rest &= ~a
        return True

    def below(self, mask: int) -> list[int]:
        """Indices of atoms contained in mask."""
        return [i for i, a in enumerate(self.atoms) if a & mask == a]

    def union(self, idx: Iterable[int]) -> int:
        m = 0
        for i in idx:
            m |= self.atoms[i]
        return m

    def members(self) -> list[int]:
        if self.n_members > MEMBER_CAP:
            raise BudgetExceeded(f"{self.n_members} members exceed the cap {MEMBER_CAP}")
        out = []
        for sel in range(self.n_members):
            out.append(self.union(i for i in range(self.n_atoms) if sel >> i & 1))
        return out

    def translation_map(self, g: int) -> tuple[int, ...]:
        """pi_g on atoms: atom c goes to the atom containing g * c."""
        t = self.group.table
        return tuple(self.atom_of[t[g][(a & -a).bit_length() - 1]] for a in self.atoms)

    def is_subalgebra_of(self, other: GAlgebra) -> bool:
        return all(other.contains(a) for a in self.atoms)

    def check_closure(self, exhaustive: bool = False) -> bool:
        """Closure under union, complement and left translation.

        With ``exhaustive`` every member is checked, otherwise atoms suffice.
        """
        g_ = self.group
        if exhaustive:
            ms = self.members()
            mset = set(ms)
            full = g_.full_mask
            for a in ms:
                if full & ~a not in mset:
                    return False
                if any(g_.left(g, a) not in mset for g in range(g_.order)):
                    return False
                if self.d_closed and any(g_.right(a, g) not in mset for g in range(g_.order)):
                    return False
            return all(a | b in mset for a in ms for b in ms) and all(
                self.union(self.below(a)) == a for a in ms
            )
        return all(self.contains(g_.left(g, a)) for a in self.atoms for g in range(g_.order))

    def key(self) -> tuple[int, ...]:
        return self.atoms

    def to_json(self) -> dict:
        return {"atoms": [bits(a) for a in self.atoms], "d_closed": self.d_closed}


def generate_algebra(group: FiniteGroup, seeds: Iterable[Iterable[int] | int], two_sided: bool = False) -> GAlgebra:
    """Least G-algebra containing the seeds, by worklist refinement.

    Every set pulled from the worklist splits the current atoms; its left
    (and, if ``two_sided``, right) translates are queued in turn.
    """
    masks = [s if isinstance(s, int) else mask_of(s) for s in seeds]
    full = group.full_mask
    atoms = {full}
    seen: set[int] = set()
    work = [m & full for m in masks]
    while work:
        s = work.pop()
        if s in seen:
            continue
        seen.add(s)
        nxt = set()
        for a in atoms:
            inside, outside = a & s, a & ~s
            if inside:
                nxt.add(inside)
            if outside:
                nxt.add(outside)
        atoms = nxt
        for g in range(group.order):
            t = group.left(g, s)
            if t not in seen:
                work.append(t)
            if two_sided:
                t = group.right(s, g)
                if t not in seen:
                    work.append(t)
    return GAlgebra.from_atoms(group, atoms)


def generate_by_closure(group: FiniteGroup, seeds: Iterable[Iterable[int] | int], two_sided: bool = False) -> frozenset[int]:
    """Member set of the generated algebra by naive closure (small groups only)."""
    full = group.full_mask
    members = {0, full}
    members.update(s if isinstance(s, int) else mask_of(s) for s in seeds)
    while True:
        new = set(members)
        for a in members:
            new.add(full & ~a)
            for g in range(group.order):
                new.add(group.left(g, a))
                if two_sided:
                    new.add(group.right(a, g))
        for a in list(new):
            for b in list(new):
                new.add(a | b)
        if len(new) > MEMBER_CAP:
            raise BudgetExceeded("closure exceeds the member cap")
        if new == members:
            return frozenset(members)
        members = new


def d_closure(alg: GAlgebra) -> GAlgebra:
    return generate_algebra(alg.group, alg.atoms, two_sided=True)


# -- d_q and the star product -------------------------------------------------


def d_op(alg: GAlgebra, q: int, mask: int, strict: bool = False) -> int:
    """d_q(A) = {h : h^-1 A in q}, i.e. the h with h * atom_q inside A."""
    g_ = alg.group
    atom = alg.atoms[q]
    out = 0
    for h in range(g_.order):
        if g_.left(h, atom) & ~mask == 0:
            out |= 1 << h
    if strict and not alg.contains(out):
        raise NotInAlgebra(out)
    return out


def d_principal(group: FiniteGroup, g: int, mask: int) -> int:
    """d for the principal ultrafilter at g: the right translate A g^-1."""
    return group.right(mask, group.inverse[g])


def star(outer: GAlgebra, inner: GAlgebra, p: int, q: int) -> int:
    """p * q where p is a point of S(outer) and q of S(inner).

    The result is the unique atom c of ``inner`` whose d_q-image lies in the
    ultrafilter p.  For a d-closed algebra pass it as both arguments.
    """
    ap = outer.atoms[p]
    hits = [c for c in range(inner.n_atoms) if ap & ~d_op(inner, q, inner.atoms[c]) == 0]
    if len(hits) != 1:
        raise ValueError(f"p*q is not an ultrafilter ({len(hits)} atoms)")
    return hits[0]


def star_table(alg: GAlgebra) -> list[list[int]]:
    if not alg.d_closed:
        raise ValueError("star needs a d-closed algebra")
    return [[star(alg, alg, p, q) for q in range(alg.n_atoms)] for p in range(alg.n_atoms)]


def star_is_associative(table: Sequence[Sequence[int]]) -> bool:
    r = range(len(table))
    return all(table[table[a][b]][c] == table[a][table[b][c]] for a in r for b in r for c in r)


def product_set(group: FiniteGroup, a: int, b: int) -> int:
    out = 0
    for x in bits(a):
        for y in bits(b):
            out |= 1 << group.table[x][y]
    return out


def check_product_rule(alg: GAlgebra) -> int:
    """Count violations of: A in p, B in q, AB in the algebra implies AB in p*q."""
    g_ = alg.group
    table = star_table(alg)
    ms = alg.members()
    bad = 0
    for a in ms:
        for b in ms:
            ab = product_set(g_, a, b)
            if not alg.contains(ab):
                continue
            for p in alg.below(a):
                for q in alg.below(b):
                    c = alg.atoms[table[p][q]]
                    bad += c & ~ab != 0
    return bad


# -- enveloping monoid --------------------------------------------------------


@dataclass(frozen=True)
class EnvMonoid:
    carrier: tuple[tuple[int, ...], ...]
    generators: tuple[int, ...]
    table: tuple[tuple[int, ...], ...]

    @property
    def size(self) -> int:
        return len(self.carrier)

    @classmethod
    def from_maps(cls, gens: Sequence[Sequence[int]]) -> EnvMonoid:
        carrier = kernels.transformation_closure([tuple(g) for g in gens])
        index = {m: i for i, m in enumerate(carrier)}
        table = kernels.compose_table(carrier)
        return cls(
            tuple(tuple(m) for m in carrier),
            tuple(index[tuple(g)] for g in gens),
            tuple(tuple(r) for r in table),
        )

    def index(self, m: Sequence[int]) -> int:
        return self.carrier.index(tuple(m))


def envelope(group: FiniteGroup, alg: GAlgebra) -> EnvMonoid:
    """Transformation monoid on atoms generated by the translations pi_g."""
    return EnvMonoid.from_maps([alg.translation_map(g) for g in range(group.order)])


def ell_check(alg: GAlgebra) -> dict:
    """Check that p -> (q -> p*q) maps S(A^d) bijectively and multiplicatively onto E(S(A))."""
    dc = d_closure(alg)
    env = envelope(alg.group, alg)
    maps = [tuple(star(dc, alg, p, q) for q in range(alg.n_atoms)) for p in range(dc.n_atoms)]
    bijective = len(set(maps)) == dc.n_atoms and set(maps) == set(env.carrier)
    dtable = star_table(dc)
    multiplicative = all(
        maps[dtable[p][r]] == tuple(maps[p][x] for x in maps[r])
        for p in range(dc.n_atoms)
        for r in range(dc.n_atoms)
    )
    return {"bijective": bijective, "multiplicative": multiplicative, "size": dc.n_atoms}


# -- minimal ideals -------------------------------------------------------------


@dataclass(frozen=True)
class IdealStructure:
    ideals: tuple[frozenset[int], ...]
    idempotents: tuple[tuple[int, ...], ...]
    groups: dict
    ellis_group: FiniteGroup
    clauses: dict

    @property
    def ok(self) -> bool:
        return all(self.clauses.values())


def _sub_table(table, elems: Sequence[int]) -> list[list[int]]:
    pos = {x: i for i, x in enumerate(elems)}
    return [[pos[table[a][b]] for b in elems] for a in elems]


def ideal_structure(m: EnvMonoid) -> IdealStructure:
    t = m.table
    n = m.size
    orbit = [frozenset(t[s][a] for s in range(n)) for a in range(n)]
    ideals: list[frozenset[int]] = []
    for a in range(n):
        ia = orbit[a]
        if ia not in ideals and all(orbit[b] == ia for b in ia):
            ideals.append(ia)
    ideals.sort(key=min)
    idem = [tuple(sorted(u for u in i if t[u][u] == u)) for i in ideals]
    clauses = {"i": all(len(j) > 0 for j in idem)}
    groups: dict = {}
    union_ok = True
    group_ok = True
    for i, js in zip(ideals, idem):
        covered: set[int] = set()
        for u in js:
            ui = sorted({t[u][x] for x in i})
            if covered & set(ui):
                union_ok = False
            covered |= set(ui)
            try:
                grp = FiniteGroup(_sub_table(t, ui), check=True)
                if ui[grp.identity] != u:
                    group_ok = False
            except (ValueError, KeyError):
                group_ok = False
                continue
            groups[u] = (tuple(ui), grp)
        union_ok &= covered == set(i)
    clauses["ii"] = union_ok and group_ok
    reps = list(groups.values())
    base = reps[0][1] if reps else FiniteGroup([[0]])
    clauses["iii"] = bool(reps) and all(find_isomorphism(base, g) is not None for _, g in reps)
    clauses["iv"] = all(
        any(t[u][v] == v and t[v][u] == u for v in jj) for ji in idem for u in ji for jj in idem
    )
    return IdealStructure(tuple(ideals), tuple(idem), groups, base, clauses)


# -- image algebras ---------------------------------------------------------------


def almost_periodic_points(alg: GAlgebra) -> list[int]:
    """Atoms whose orbit is a minimal subflow of S(alg)."""
    g_ = alg.group
    maps = [alg.translation_map(g) for g in range(g_.order)]
    orbit = [frozenset(mp[c] for mp in maps) for c in range(alg.n_atoms)]
    return [c for c in range(alg.n_atoms) if all(orbit[b] == orbit[c] for b in orbit[c])]


def image_algebra(alg: GAlgebra, u: int) -> GAlgebra:
    """d_u[alg] as a subalgebra: the images of atoms partition the group."""
    imgs = [d_op(alg, u, a) for a in alg.atoms]
    return GAlgebra.from_atoms(alg.group, imgs)


def is_generic(group: FiniteGroup, mask: int) -> bool:
    cover = 0
    for g in range(group.order):
        cover |= group.left(g, mask)
    return cover == group.full_mask


def generic_subalgebras(alg: GAlgebra, subgroups: Sequence[frozenset[int]] | None = None) -> list[GAlgebra]:
    """All G-subalgebras of alg whose non-zero members are generic.

    Atoms of a G-algebra on a finite group are the left cosets of the atom
    through the identity, which is a subgroup; so candidates are coset
    algebras of subgroups, kept when they sit inside ``alg``.
    """
    g_ = alg.group
    subgroups = g_.subgroups() if subgroups is None else subgroups
    out = []
    for k in subgroups:
        atoms = {g_.left(g, mask_of(k)) for g in range(g_.order)}
        cand = GAlgebra.from_atoms(g_, atoms)
        if not cand.is_subalgebra_of(alg) or not cand.check_closure():
            continue
        if all(is_generic(g_, a) for a in cand.atoms):
            out.append(cand)
    return out


def maximal(algs: Sequence[GAlgebra]) -> list[GAlgebra]:
    return [a for a in algs if not any(b.key() != a.key() and a.is_subalgebra_of(b) for b in algs)]


def image_algebras(alg: GAlgebra, subgroups=None) -> dict:
    if not alg.d_closed:
        raise ValueError("image algebras need a d-closed algebra")
    imgs: dict[tuple, GAlgebra] = {}
    for u in almost_periodic_points(alg):
        b = image_algebra(alg, u)
        imgs.setdefault(b.key(), b)
    gens = maximal(generic_subalgebras(alg, subgroups))
    images = sorted(imgs.values(), key=GAlgebra.key)
    gens = sorted(gens, key=GAlgebra.key)
    antichain = all(not (a.key() != b.key() and a.is_subalgebra_of(b)) for a in images for b in images)
    return {
        "images": images,
        "maximal_generic": gens,
        "coincide": [a.key() for a in images] == [b.key() for b in gens],
        "antichain": antichain,
    }


def ellis_from_image(alg: GAlgebra, image: GAlgebra, ideals: IdealStructure | None = None) -> dict:
    """The group of points q of S(image) with d_q[image] inside image, under star."""
    pts = [
        q for q in range(image.n_atoms)
        if all(image.contains(d_op(image, q, a)) for a in image.atoms)
    ]
    pos = {q: i for i, q in enumerate(pts)}
    try:
        table = [[pos[star(image, image, p, q)] for q in pts] for p in pts]
        grp = FiniteGroup(table, check=True)
        is_group = True
    except (ValueError, KeyError):
        return {"is_group": False, "isomorphic": False, "table": None}
    if ideals is None:
        ideals = ideal_structure(envelope(alg.group, alg))
    iso = find_isomorphism(grp, ideals.ellis_group)
    return {"is_group": is_group, "isomorphic": iso is not None, "table": [list(r) for r in table], "iso": iso}


# -- finite projective-limit check ---------------------------------------------------


def pf_ell_check(group: FiniteGroup, alg: GAlgebra, ideals: IdealStructure | None = None, normals=None) -> dict:
    dc = d_closure(alg)
    normals = group.normal_subgroups() if normals is None else normals
    inside = [n for n in normals if dc.contains(mask_of(n))]
    least = [n for n in inside if all(n <= m for m in inside)]
    if not least:
        return {"least_exists": False, "isomorphic": False}
    nmin = least[0]
    quot, _ = group.quotient(nmin)
    if ideals is None:
        ideals = ideal_structure(envelope(group, alg))
    iso = find_isomorphism(ideals.ellis_group, quot)
    return {
        "least_exists": True,
        "normal_subgroup": sorted(nmin),
        "quotient_order": quot.order,
        "isomorphic": iso is not None,
        "iso": iso,
        "ellis_table": [list(r) for r in ideals.ellis_group.table],
    }


@dataclass
class FiniteReport:
    group: str
    index: int
    seeds: list[list[int]]
    checks: dict

    @property
    def ok(self) -> bool:
        return all(self.checks.values())


def finite_checks(group: FiniteGroup, seeds: Sequence[Sequence[int]], two_sided: bool = False,
                  subgroups=None, normals=None) -> dict:
    """Every finite-scale check for one algebra, as a name -> bool map."""
    return finite_case(group, seeds, two_sided, subgroups, normals)[0]


def finite_case(group: FiniteGroup, seeds: Sequence[Sequence[int]], two_sided: bool = False,
                subgroups=None, normals=None) -> tuple[dict, dict]:
    """The checks of :func:`finite_checks` plus a certificate for the Ellis group.

    The certificate holds the atoms of the generated algebra, the ideal group
    table, the least normal subgroup in the d-closure and an isomorphism onto
    the quotient, all of which :func:`verify_ellis_certificate` re-checks.
    """
    alg = generate_algebra(group, seeds, two_sided)
    dc = d_closure(alg)
    env = envelope(group, alg)
    ideals = ideal_structure(env)
    checks = {f"ellis_{k}": v for k, v in ideals.clauses.items()}
    checks["closure"] = alg.check_closure() and dc.d_closed
    if dc.n_atoms <= 12:
        checks["star_associative"] = star_is_associative(star_table(dc))
    ell = ell_check(alg)
    checks["ell_bijective"] = ell["bijective"]
    checks["ell_multiplicative"] = ell["multiplicative"]
    imgs = image_algebras(dc, subgroups)
    checks["images_are_maximal_generic"] = imgs["coincide"]
    checks["images_antichain"] = imgs["antichain"]
    checks["image_group_iso"] = all(
        ellis_from_image(dc, b, ideal_structure(envelope(group, dc)))["isomorphic"] for b in imgs["images"]
    )
    checks["image_group_matches_flow"] = all(
        ellis_from_image(alg, b, ideals)["isomorphic"] for b in imgs["images"]
    )
    pf = pf_ell_check(group, alg, ideals, normals)
    checks["normal_least_exists"] = pf["least_exists"]
    checks["pf_ell"] = pf["isomorphic"]
    cert = {
        "atoms": [bits(a) for a in alg.atoms],
        "ideal_maps": [list(env.carrier[i]) for i in next(iter(ideals.groups.values()))[0]],
        "ellis_table": [list(r) for r in ideals.ellis_group.table],
        "normal_subgroup": pf.get("normal_subgroup"),
        "iso": pf.get("iso"),
    }
    return checks, cert


def verify_ellis_certificate(group: FiniteGroup, cert: dict) -> bool:
    """Re-check an Ellis certificate: a group table, a normal subgroup, an isomorphism onto G/N."""
    try:
        atoms = [mask_of(a) for a in cert["atoms"]]
        alg = GAlgebra.from_atoms(group, atoms)
        table = cert["ellis_table"]
        n = frozenset(cert["normal_subgroup"])
        iso = cert["iso"]
    except (KeyError, TypeError, ValueError):
        return False
    atom_set = set(alg.atoms)
    if not all(group.left(g, a) in atom_set for g in range(group.order) for a in alg.atoms):
        return False
    if not table_is_group(table):
        return False
    # on a finite group the enveloping monoid is the set of translations
    maps = [tuple(m) for m in cert.get("ideal_maps", [])]
    translations = {alg.translation_map(g) for g in range(group.order)}
    if len(maps) != len(table) or len(set(maps)) != len(maps) or not set(maps) <= translations:
        return False
    pos = {m: i for i, m in enumerate(maps)}
    for i, f in enumerate(maps):
        for j, g in enumerate(maps):
            if pos.get(tuple(f[x] for x in g)) != table[i][j]:
                return False
    if group.identity not in n or not all(group.mul(a, b) in n for a in n for b in n):
        return False
    if not n or not group.is_normal(n) or not d_closure(alg).contains(mask_of(n)):
        return False
    quot, _ = group.quotient(n)
    if not isinstance(iso, list) or len(iso) != len(table) or sorted(iso) != list(range(quot.order)):
        return False
    return is_homomorphism(table, quot.table, iso)


def random_subset(group: FiniteGroup, rng: random.Random) -> list[int]:
    return sorted(x for x in range(group.order) if rng.random() < 0.5)


def battery(groups: dict[str, FiniteGroup] | None = None, per_group: int = 50, seed: int = 0,
            certificates: bool = False) -> dict:
    """Seeded random subsets per group through :func:`finite_case`.

    With ``certificates`` every case carries its seeds and Ellis certificate.
    """
    groups = standard_groups() if groups is None else groups
    start = time.perf_counter()
    failures = []
    certs = []
    cases = 0
    for name, grp in groups.items():
        subs = grp.subgroups()
        normals = [h for h in subs if grp.is_normal(h)]
        for i in range(per_group):
            rng = random.Random(f"{seed}:{name}:{i}")
            seeds = [random_subset(grp, rng)]
            checks, cert = finite_case(grp, seeds, subgroups=subs, normals=normals)
            cases += 1
            bad = [k for k, v in checks.items() if not v]
            if bad:
                failures.append({"group": name, "index": i, "seeds": seeds, "failed": bad})
            if certificates:
                certs.append({"group": name, "index": i, "seeds": seeds, "checks": sorted(checks),
                              "certificate": cert})
    out = {
        "cases": cases,
        "failures": failures,
        "seed": seed,
        "timing": {"seconds": time.perf_counter() - start},
    }
    if certificates:
        out["certificates"] = certs
    return out
