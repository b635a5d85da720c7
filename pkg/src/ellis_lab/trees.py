"""Valued trees of cosets over the integers.

Each node is a coset ``rep + modulus*Z``.  Leaves carry a bit.  A node may be
marked as a *branch* stub: the explicit tree stops there although the real
tree continues along an infinite branch.  A stub optionally knows the common
value of every leaf below it (``tail``), which is the case for self-similar
generators whose elided subtree is constant.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass, field, replace
from typing import Iterator, Sequence

from .residues import FiltrationChain, PfSet


class OnInfiniteBranch(Exception):
    def __init__(self, point: int):
        super().__init__(f"{point} descends a flagged branch with no recorded value")
        self.point = point


class DepthBudgetExceeded(Exception):
    pass


class ChainExhausted(Exception):
    pass


@dataclass(frozen=True)
class Node:
    modulus: int
    rep: int
    value: int | None = None
    children: tuple[Node, ...] = ()
    branch: bool = False
    tail: int | None = None

    @property
    def is_leaf(self) -> bool:
        return self.value is not None

    def contains(self, k: int) -> bool:
        return (k - self.rep) % self.modulus == 0

    def to_json(self) -> dict:
        d: dict = {"modulus": self.modulus, "rep": self.rep % self.modulus}
        if self.value is not None:
            d["value"] = self.value
        elif self.branch:
            d["branch"] = True
            if self.tail is not None:
                d["tail"] = self.tail
        else:
            d["children"] = [c.to_json() for c in self.children]
        return d

    @classmethod
    def from_json(cls, d: dict) -> Node:
        kids = tuple(cls.from_json(c) for c in d.get("children", ()))
        return cls(
            int(d["modulus"]),
            int(d["rep"]),
            d.get("value"),
            kids,
            bool(d.get("branch", False)),
            d.get("tail"),
        )


def leaf(m: int, r: int, v: int) -> Node:
    return Node(m, r % m, v)


def inner(m: int, r: int, *children: Node) -> Node:
    return Node(m, r % m, None, tuple(children))


def stub(m: int, r: int, tail: int | None = None) -> Node:
    return Node(m, r % m, None, (), True, tail)


@dataclass(frozen=True)
class Violation:
    path: tuple[int, ...]
    rule: str

    def __str__(self) -> str:
        return f"{list(self.path)}: {self.rule}"


@dataclass(frozen=True)
class ChainStep:
    coarse: int
    fine: int
    point: int
    value: int

    def to_json(self) -> dict:
        return {"coarse": self.coarse, "fine": self.fine, "point": self.point, "value": self.value}


@dataclass(frozen=True)
class ChainEvidence:
    moduli: tuple[int, ...]
    steps: tuple[ChainStep, ...]

    @property
    def length(self) -> int:
        return len(self.steps)

    def excludes_index(self, index: int) -> bool:
        """A period lattice of this index would bound every such chain by it."""
        return self.length > index

    def to_json(self) -> dict:
        return {"moduli": list(self.moduli), "steps": [s.to_json() for s in self.steps]}


@dataclass(frozen=True)
class CosetTree:
    root: Node
    exceptions: dict = field(default_factory=dict)

    # -- traversal ---------------------------------------------------------------

    def walk(self) -> Iterator[tuple[tuple[int, ...], Node]]:
        stack = [((), self.root)]
        while stack:
            path, node = stack.pop()
            yield path, node
            for i in reversed(range(len(node.children))):
                stack.append((path + (i,), node.children[i]))

    def at(self, path: Sequence[int]) -> Node:
        node = self.root
        for i in path:
            node = node.children[i]
        return node

    @property
    def branch_flags(self) -> list[tuple[int, ...]]:
        return [p for p, n in self.walk() if n.branch]

    @property
    def depth(self) -> int:
        return max(len(p) for p, _ in self.walk())

    def size(self) -> int:
        return sum(1 for _ in self.walk())

    def depth_moduli(self) -> list[set[int]]:
        out: list[set[int]] = []
        for p, n in self.walk():
            while len(out) <= len(p):
                out.append(set())
            out[len(p)].add(n.modulus)
        return out

    def is_linear(self) -> bool:
        return all(len(ms) == 1 for ms in self.depth_moduli())

    # -- evaluation --------------------------------------------------------------

    def locate(self, k: int) -> tuple[tuple[int, ...], Node]:
        node, path = self.root, ()
        while node.children:
            for i, c in enumerate(node.children):
                if c.contains(k):
                    node, path = c, path + (i,)
                    break
            else:
                raise ValueError(f"{k} is in no child of {node.rep}+{node.modulus}Z")
        return path, node

    def evaluate(self, k: int) -> int:
        _, node = self.locate(k)
        if node.is_leaf:
            return node.value
        if k in self.exceptions:
            return self.exceptions[k]
        if node.tail is not None:
            return node.tail
        raise OnInfiniteBranch(k)

    def try_evaluate(self, k: int) -> int | None:
        try:
            return self.evaluate(k)
        except OnInfiniteBranch:
            return None

    def window(self, lo: int, hi: int) -> list[int | None]:
        return [self.try_evaluate(k) for k in range(lo, hi + 1)]

    # -- validation ----------------------------------------------------------------

    def validate(self, window: int = 4096) -> list[Violation]:
        bad: list[Violation] = []
        if (self.root.modulus, self.root.rep) != (1, 0):
            bad.append(Violation((), "root is not the whole group"))
        for path, node in self.walk():
            kinds = (node.value is not None) + bool(node.children) + node.branch
            if kinds != 1:
                bad.append(Violation(path, "node must be exactly one of leaf, inner, branch"))
            if node.value is not None and node.value not in (0, 1):
                bad.append(Violation(path, "leaf value is not a bit"))
            if not node.children:
                continue
            mods = {c.modulus for c in node.children}
            if len(mods) > 1:
                bad.append(Violation(path, "sibling subgroup mismatch"))
            for i, c in enumerate(node.children):
                if c.modulus <= node.modulus or c.modulus % node.modulus:
                    bad.append(Violation(path + (i,), "modulus is not a proper multiple of the parent"))
                elif (c.rep - node.rep) % node.modulus:
                    bad.append(Violation(path + (i,), "coset not contained in the parent"))
            if len(mods) == 1:
                m = mods.pop()
                reps = [c.rep % m for c in node.children]
                if len(set(reps)) < len(reps):
                    bad.append(Violation(path, "not disjoint"))
                elif m % node.modulus == 0 and len(reps) != m // node.modulus:
                    bad.append(Violation(path, "children do not partition the parent"))
        for path, node in self.walk():
            if node.branch and node.tail is None:
                pts = _coset_points(node.rep, node.modulus, -window, window)
                if len(pts) > 1 or any(p not in self.exceptions for p in pts):
                    bad.append(Violation(path, "flagged branch not isolated in window"))
        for p in self.exceptions:
            try:
                _, node = self.locate(p)
            except ValueError:
                continue
            if node.is_leaf:
                bad.append(Violation((), f"exception {p} lies in a leaf"))
        return bad

    # -- conversion -------------------------------------------------------------------

    def to_pfset(self) -> PfSet:
        bad = self.validate()
        if bad:
            raise ValueError("invalid tree: " + "; ".join(map(str, bad)))
        t = self if self.is_linear() else linearize(self)
        moduli = [ms.pop() for ms in t.depth_moduli()]
        chain = _chain_for(moduli)
        levels: dict[int, tuple[list[int], list[int]]] = {}
        for path, node in t.walk():
            v = node.value if node.is_leaf else node.tail
            if v is None:
                continue
            ins, outs = levels.setdefault(len(path), ([], []))
            (ins if v else outs).append(node.rep)
        depth = len(moduli) - 1
        pf = PfSet(chain, levels, {}, depth)
        exc = {p: b for p, b in t.exceptions.items() if pf.try_member(p) is None}
        return PfSet(chain, levels, exc, depth).normalized()

    def to_json(self) -> dict:
        d = self.root.to_json()
        d["branch_flags"] = [list(p) for p in self.branch_flags]
        if self.exceptions:
            d["exceptions"] = [[p, v] for p, v in sorted(self.exceptions.items())]
        return d

    @classmethod
    def from_json(cls, d: dict) -> CosetTree:
        root = Node.from_json(d)
        t = cls(root, {int(p): int(v) for p, v in d.get("exceptions", ())})
        for path in d.get("branch_flags", ()):
            node = t.at(path)
            if not node.branch:
                if node.children or node.value is not None:
                    raise ValueError(f"branch flag {path} is not on a stub")
                t = t.replace_at(tuple(path), replace(node, branch=True))
        return t

    def replace_at(self, path: tuple[int, ...], new: Node) -> CosetTree:
        def rec(node: Node, p: tuple[int, ...]) -> Node:
            if not p:
                return new
            kids = list(node.children)
            kids[p[0]] = rec(kids[p[0]], p[1:])
            return replace(node, children=tuple(kids))

        return CosetTree(rec(self.root, path), dict(self.exceptions))


def _coset_points(r: int, m: int, lo: int, hi: int) -> list[int]:
    first = lo + (r - lo) % m
    return list(range(first, hi + 1, m))


def _chain_for(moduli: Sequence[int]) -> FiltrationChain:
    base = moduli[1] if len(moduli) > 1 else 2
    if all(m == base**n for n, m in enumerate(moduli)):
        return FiltrationChain.power(base, len(moduli) - 1)
    return FiltrationChain.explicit(moduli)


# -- shape helpers -------------------------------------------------------------------


def leaf_values(node: Node) -> set[int | None]:
    """Values reachable below node; None stands for an unknown branch tail."""
    if node.is_leaf:
        return {node.value}
    if node.branch:
        return {node.tail}
    out: set[int | None] = set()
    for c in node.children:
        out |= leaf_values(c)
    return out


def is_homogeneous(node: Node) -> bool:
    vals = leaf_values(node)
    return len(vals) == 1 and None not in vals


# -- linearize ---------------------------------------------------------------------------


def lcm_chain(t: CosetTree) -> list[int]:
    """Distinct values of lcm(moduli at depth <= n)."""
    out = [1]
    acc = 1
    for ms in t.depth_moduli():
        for m in ms:
            acc = math.lcm(acc, m)
        if acc != out[-1]:
            out.append(acc)
    return out


def linearize(t: CosetTree, max_nodes: int = 200_000) -> CosetTree:
    """Split every node into cosets of the lcm chain so moduli depend only on depth."""
    chain = lcm_chain(t)
    count = 0

    def classify(r: int, m: int) -> tuple[str, int | None]:
        node = t.root
        while True:
            if node.is_leaf:
                return "leaf", node.value
            if node.branch:
                return "branch", node.tail
            cm = node.children[0].modulus
            if m % cm:
                return "inner", None
            node = next(c for c in node.children if c.contains(r))

    def build(r: int, k: int) -> Node:
        nonlocal count
        count += 1
        if count > max_nodes:
            raise DepthBudgetExceeded(f"linearization exceeds {max_nodes} nodes")
        m = chain[k]
        kind, v = classify(r, m)
        if kind == "leaf":
            return leaf(m, r, v)
        if kind == "branch" or k + 1 >= len(chain):
            return stub(m, r, v)
        step = chain[k + 1]
        return inner(m, r, *(build(r + j * m, k + 1) for j in range(step // m)))

    return CosetTree(build(0, 0), dict(t.exceptions))


# -- reduce --------------------------------------------------------------------------------


def _effective(node: Node, exceptions: dict) -> int | None:
    """Value of f on the whole coset of a leaf or a stub, if it is constant."""
    if node.is_leaf:
        return node.value
    if node.branch and node.tail is not None:
        inside = {v for p, v in exceptions.items() if node.contains(p)}
        if inside <= {node.tail}:
            return node.tail
    return None


def _drop_covered(root: Node, exceptions: dict) -> CosetTree:
    t = CosetTree(root, {})
    keep = {p: v for p, v in exceptions.items() if not t.locate(p)[1].is_leaf}
    return CosetTree(root, keep)


def reduce(t: CosetTree) -> CosetTree:
    """Collapse every minimal homogeneous node into a leaf (bottom-up)."""
    exc = t.exceptions

    def rec(node: Node) -> Node:
        if node.branch:
            v = _effective(node, exc)
            return node if v is None else leaf(node.modulus, node.rep, v)
        if not node.children:
            return node
        kids = tuple(rec(c) for c in node.children)
        if all(c.is_leaf for c in kids) and len({c.value for c in kids}) == 1:
            return leaf(node.modulus, node.rep, kids[0].value)
        return replace(node, children=kids)

    return _drop_covered(rec(t.root), exc)


def reduce_in_order(t: CosetTree, rng: random.Random) -> CosetTree:
    """Collapse one homogeneous node at a time, picked at random; for confluence tests."""
    cur = t
    while True:
        ready = []
        for p, n in cur.walk():
            if n.branch and _effective(n, cur.exceptions) is not None:
                ready.append(p)
            elif n.children and all(c.is_leaf for c in n.children) and len({c.value for c in n.children}) == 1:
                ready.append(p)
        if not ready:
            break
        p = rng.choice(ready)
        n = cur.at(p)
        v = _effective(n, cur.exceptions) if n.branch else n.children[0].value
        cur = cur.replace_at(p, leaf(n.modulus, n.rep, v))
    return _drop_covered(cur.root, cur.exceptions)


def is_irreducible(t: CosetTree) -> bool:
    """No non-leaf node on which f is constant (stubs count by their known tail)."""
    for _, n in t.walk():
        if n.branch and _effective(n, t.exceptions) is not None:
            return False
        if n.children and is_homogeneous(n):
            inside = {v for p, v in t.exceptions.items() if n.contains(p)}
            if inside <= leaf_values(n):
                return False
    return True


# -- non-periodicity evidence -------------------------------------------------------------


def _constant_on(t: CosetTree, r: int, m: int, samples: int) -> int | None | bool:
    """Common value of f on samples of r + mZ, False when two values occur."""
    seen = set()
    for j in range(-samples, samples + 1):
        v = t.try_evaluate(r + j * m)
        if v is not None:
            seen.add(v)
        if len(seen) > 1:
            return False
    return seen.pop() if seen else None


def verify_step(t: CosetTree, step: ChainStep, samples: int = 16) -> bool:
    if step.fine % step.coarse or step.fine == step.coarse:
        return False
    fine = _constant_on(t, step.point, step.fine, samples)
    coarse = _constant_on(t, step.point, step.coarse, samples)
    return fine is not False and fine == step.value and coarse is False


def nonperiodicity_chain(t: CosetTree, depth: int, samples: int = 16) -> ChainEvidence:
    """Follow an infinite branch and certify depth strict refinements of constancy sets."""
    if not t.is_linear():
        raise ChainExhausted("tree is not linear")
    node = t.root
    path: list[Node] = [node]
    while True:
        nxt = next((c for c in node.children if _has_stub(c)), None)
        nxt = nxt or next((c for c in node.children if c.children), None)
        if nxt is None:
            break
        path.append(nxt)
        node = nxt
    if len(path) < 2:
        raise ChainExhausted("tree has no infinite branch")
    steps = []
    moduli = [path[1].modulus]
    n = 1
    while len(steps) < depth:
        if n >= len(path) or not path[n].children:
            raise ChainExhausted(f"explicit branch ends after {len(steps)} steps")
        b = path[n]
        found = _shallowest_leaf(b, path[n + 1] if n + 1 < len(path) else None)
        if found is None:
            raise ChainExhausted(f"no leaf below the branch at depth {n}")
        d, lf = found
        step = ChainStep(b.modulus, lf.modulus, lf.rep, lf.value)
        if not verify_step(t, step, samples):
            raise ChainExhausted(f"witness {lf.rep}+{lf.modulus}Z does not certify a strict step")
        steps.append(step)
        moduli.append(lf.modulus)
        n += d
    return ChainEvidence(tuple(moduli), tuple(steps))


def _has_stub(node: Node) -> bool:
    return node.branch or any(_has_stub(c) for c in node.children)


def _shallowest_leaf(b: Node, skip: Node | None) -> tuple[int, Node] | None:
    frontier = [c for c in b.children if c is not skip]
    d = 1
    while frontier:
        for c in frontier:
            if c.is_leaf:
                return d, c
        frontier = [g for c in frontier for g in c.children]
        d += 1
    return None


def verify_chain(t: CosetTree, ev: ChainEvidence, samples: int = 16) -> bool:
    if list(ev.moduli[1:]) != [s.fine for s in ev.steps]:
        return False
    if any(a.fine != b.coarse for a, b in zip(ev.steps, ev.steps[1:])):
        return False
    return all(verify_step(t, s, samples) for s in ev.steps)


def is_periodic_on(t: CosetTree, period: int, lo: int, hi: int) -> bool:
    vals = {k: t.try_evaluate(k) for k in range(lo, hi + 1)}
    return all(
        vals[k] is None or vals.get(k + period) is None or vals[k] == vals[k + period] for k in vals
    )


# -- named example trees ---------------------------------------------------------------------


DYADIC_PREFIX = (1, 0, 1, 1)


def dyadic_branch_bits(depth: int) -> list[int]:
    """Binary digits of the branch target: the given prefix, then 0, 1, 0, 1, ...

    The alternating tail keeps the target out of Z (integers have eventually
    constant digits).
    """
    bits = list(DYADIC_PREFIX)
    while len(bits) < depth:
        bits.append((len(bits) - len(DYADIC_PREFIX)) % 2)
    return bits[:depth]


def dyadic_branch_tree(depth: int = 24) -> CosetTree:
    """Leaves split off a 2-adic branch, valued 0, 1, 0, ... by depth."""
    bits = dyadic_branch_bits(depth)
    target = sum(b << i for i, b in enumerate(bits))

    def build(n: int) -> Node:
        m = 1 << n
        r = target % m
        if n == depth:
            return stub(m, r)
        on = target % (2 * m)
        off = on ^ m
        kids = sorted([leaf(2 * m, off, n % 2), build(n + 1)], key=lambda c: c.rep)
        return inner(m, r, *kids)

    return CosetTree(build(0))


def reducible_pair() -> tuple[CosetTree, CosetTree]:
    """Finite tree with homogeneous children and its reduction."""
    t = CosetTree(inner(1, 0,
        inner(2, 0, leaf(6, 0, 1), leaf(6, 2, 1), leaf(6, 4, 1)),
        inner(2, 1, leaf(4, 1, 0), leaf(4, 3, 0)),
    ))
    return t, CosetTree(inner(1, 0, leaf(2, 0, 1), leaf(2, 1, 0)))


def reducible_infinite_pair(depth: int = 24) -> tuple[CosetTree, CosetTree]:
    """Infinite tree whose whole right subtree is valued 1, and its reduction."""

    def build(m: int, r: int, n: int) -> Node:
        if n == depth:
            return stub(m, r, 1)
        k = 3 if n % 2 == 0 else 2
        kids = [leaf(k * m, r + j * m, 1) for j in range(1, k)]
        kids.append(build(k * m, r, n + 1))
        return inner(m, r, *sorted(kids, key=lambda c: c.rep))

    t = CosetTree(inner(1, 0, build(2, 0, 1), leaf(2, 1, 0)))
    return t, CosetTree(inner(1, 0, leaf(2, 0, 1), leaf(2, 1, 0)))


def ternary_branch_tree(depth: int = 24) -> CosetTree:
    """Non-linear irreducible infinite tree founding k -> k mod 2.

    The branch runs along -1/2 in the 3-adic integers; every coset that
    leaves it splits into its even and odd halves.
    """

    def target(n: int) -> int:
        return (3**n - 1) // 2

    def build(n: int) -> Node:
        m = 3**n
        r = target(n)
        if n == depth:
            return stub(m, r)
        kids = []
        for j in range(3):
            c = r + j * m
            if c % (3 * m) == target(n + 1) % (3 * m):
                kids.append(build(n + 1))
            else:
                halves = sorted([leaf(6 * m, c, c % 2), leaf(6 * m, c + 3 * m, (c + 3 * m) % 2)], key=lambda x: x.rep)
                kids.append(inner(3 * m, c, *halves))
        return inner(m, r, *sorted(kids, key=lambda x: x.rep % x.modulus))

    return CosetTree(build(0))


def valuation_tree(zero_value: int | None = None, depth: int = 24) -> CosetTree:
    """Leaves 2^n(2Z+1) valued n mod 2; the branch converges to 0."""

    def build(n: int) -> Node:
        m = 1 << n
        if n == depth:
            return stub(m, 0)
        return inner(m, 0, leaf(2 * m, m, n % 2), build(n + 1))

    exc = {} if zero_value is None else {0: zero_value}
    return CosetTree(build(0), exc)


def random_tree(rng: random.Random, max_depth: int = 4, branch_p: float = 0.5) -> CosetTree:
    """Random finite valid tree (possibly non-linear) for property tests."""

    def build(m: int, r: int, d: int) -> Node:
        if d >= max_depth or rng.random() > branch_p:
            return leaf(m, r, rng.randint(0, 1))
        k = rng.choice([2, 2, 3])
        return inner(m, r, *(build(k * m, r + j * m, d + 1) for j in range(k)))

    k = rng.choice([2, 3])
    return CosetTree(inner(1, 0, *(build(k, j, 1) for j in range(k))))
