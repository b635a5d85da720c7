"""Exact subsets of the integers described by residues along a divisibility chain.

A :class:`PfSet` records, for each depth ``n`` of a chain ``1 = m_0 | m_1 | ...``,
which residues mod ``m_n`` are decided to be inside (``IN``) or outside (``OUT``)
the set.  Residues never decided are deferred (``DEFER``) and split into their
lifts at the next depth.  A finite list of exceptional points gives values on
deferred regions, which is how sets such as ``{k : v2(k) odd}`` (undefined only
along the branch converging to 0) become exactly evaluable.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from itertools import combinations, product
from random import Random
from typing import Callable, Iterable, Iterator, Sequence


class State(enum.Enum):
    IN = 1
    OUT = 0
    DEFER = -1


IN, OUT, DEFER = State.IN, State.OUT, State.DEFER


class Unresolved(Exception):
    """Raised when a point lies in a deferred residue and is not an exception."""

    def __init__(self, point: int, depth: int):
        super().__init__(f"{point} is unresolved at depth {depth}")
        self.point = point
        self.depth = depth


class ChainMismatch(ValueError):
    pass


@dataclass(frozen=True)
class FiltrationChain:
    """Strictly increasing divisibility chain of moduli starting at 1."""

    moduli: tuple[int, ...]
    base: int | None = None  # set when the chain is base**n (serialised as a rule)

    def __post_init__(self):
        m = self.moduli
        if not m or m[0] != 1:
            raise ValueError("chain must start at 1")
        for a, b in zip(m, m[1:]):
            if b <= a or b % a:
                raise ValueError(f"{b} is not a proper multiple of {a}")

    @classmethod
    def power(cls, base: int = 2, max_depth: int = 24) -> FiltrationChain:
        return cls(tuple(base**n for n in range(max_depth + 1)), base)

    @classmethod
    def explicit(cls, moduli: Iterable[int]) -> FiltrationChain:
        return cls(tuple(int(m) for m in moduli))

    @property
    def max_depth(self) -> int:
        return len(self.moduli) - 1

    def __getitem__(self, n: int) -> int:
        return self.moduli[n]

    def depth_of(self, modulus: int) -> int:
        try:
            return self.moduli.index(modulus)
        except ValueError:
            raise ChainMismatch(f"modulus {modulus} is not in the chain") from None

    def merge(self, other: FiltrationChain) -> FiltrationChain:
        """The longer of two chains, provided one is a prefix of the other."""
        short, long_ = sorted((self, other), key=lambda c: len(c.moduli))
        if long_.moduli[: len(short.moduli)] != short.moduli:
            raise ChainMismatch("filtrations are incompatible")
        return long_

    def to_json(self) -> dict:
        if self.base is not None:
            return {"rule": "pow", "base": self.base, "max_depth": self.max_depth}
        return {"explicit": list(self.moduli)}

    @classmethod
    def from_json(cls, data: dict) -> FiltrationChain:
        if "explicit" in data:
            return cls.explicit(data["explicit"])
        if data.get("rule", "pow") != "pow":
            raise ValueError(f"unknown chain rule {data.get('rule')!r}")
        return cls.power(int(data.get("base", 2)), int(data.get("max_depth", 24)))


def _kleene(op: str, states: Sequence[State]) -> State:
    if op == "not":
        (s,) = states
        return {IN: OUT, OUT: IN, DEFER: DEFER}[s]
    if op == "or":
        if IN in states:
            return IN
        return OUT if all(s is OUT for s in states) else DEFER
    if op == "and":
        if OUT in states:
            return OUT
        return IN if all(s is IN for s in states) else DEFER
    if op == "xor":
        if DEFER in states:
            return DEFER
        return IN if sum(s is IN for s in states) % 2 else OUT
    raise ValueError(op)


def _bit_op(op: str, bits: Sequence[int | None]) -> int | None:
    states = [DEFER if b is None else (IN if b else OUT) for b in bits]
    s = _kleene(op, states)
    return None if s is DEFER else int(s is IN)


class PfSet:
    """An exactly represented subset of the integers.

    ``levels[n]`` is a pair ``(inside, outside)`` of residue sets mod ``chain[n]``;
    only residues decided for the first time at depth ``n`` are stored there.
    """

    __slots__ = ("chain", "depth_used", "_in", "_out", "exceptions")

    def __init__(
        self,
        chain: FiltrationChain,
        levels: dict[int, tuple[Iterable[int], Iterable[int]]] | None = None,
        exceptions: dict[int, int] | Iterable[tuple[int, int]] | None = None,
        depth_used: int | None = None,
        *,
        check: bool = True,
    ):
        levels = levels or {}
        if depth_used is None:
            depth_used = max(levels, default=0)
        if depth_used > chain.max_depth:
            raise ChainMismatch(f"depth {depth_used} exceeds chain depth {chain.max_depth}")
        self.chain = chain
        self.depth_used = depth_used
        ins, outs = [], []
        for n in range(depth_used + 1):
            i, o = levels.get(n, ((), ()))
            m = chain[n]
            ins.append(frozenset(r % m for r in i))
            outs.append(frozenset(r % m for r in o))
        self._in = tuple(ins)
        self._out = tuple(outs)
        if isinstance(exceptions, dict):
            exc = dict(exceptions)
        else:
            exc = {int(p): int(b) for p, b in (exceptions or ())}
        self.exceptions = {p: 1 if b else 0 for p, b in sorted(exc.items())}
        if check:
            self._check()

    # -- construction helpers ------------------------------------------------

    def _check(self) -> None:
        for n in range(self.depth_used + 1):
            if self._in[n] & self._out[n]:
                raise ValueError(f"residues both in and out at depth {n}")
            for r in self._in[n] | self._out[n]:
                if n and self._resolved_above(r, n) is not None:
                    raise ValueError(f"residue {r} mod {self.chain[n]} decided twice")
        for p in self.exceptions:
            if self._resolved_above(p, self.depth_used + 1) is not None:
                raise ValueError(f"exception {p} lies in a decided residue")

    def _resolved_above(self, k: int, depth: int) -> tuple[State, int] | None:
        for n in range(min(depth, self.depth_used + 1)):
            r = k % self.chain[n]
            if r in self._in[n]:
                return IN, n
            if r in self._out[n]:
                return OUT, n
        return None

    @classmethod
    def empty(cls, chain: FiltrationChain | None = None) -> PfSet:
        return cls(chain or FiltrationChain.power(), {0: ((), (0,))})

    @classmethod
    def full(cls, chain: FiltrationChain | None = None) -> PfSet:
        return cls(chain or FiltrationChain.power(), {0: ((0,), ())})

    @classmethod
    def residue_class(cls, r: int, m: int, chain: FiltrationChain | None = None) -> PfSet:
        """The coset ``r + mZ`` (``m`` must occur in the chain)."""
        chain = chain or FiltrationChain.power()
        depth = chain.depth_of(m)
        return cls.from_predicate(chain, depth, lambda k: (k - r) % m == 0)

    @classmethod
    def from_predicate(cls, chain: FiltrationChain, depth: int, pred: Callable[[int], bool]) -> PfSet:
        """Set that is a union of residues mod ``chain[depth]``, given pointwise."""
        m = chain[depth]
        inside = [r for r in range(m) if pred(r)]
        outside = [r for r in range(m) if not pred(r)]
        return cls(chain, {depth: (inside, outside)}, depth_used=depth).normalized()

    @classmethod
    def half_line(cls, window: int, chain: FiltrationChain | None = None) -> PfSet:
        """``{k >= 0}`` known only through its values on ``[-window, window]``."""
        exc = {k: int(k >= 0) for k in range(-window, window + 1)}
        return cls(chain or FiltrationChain.power(), {}, exc, depth_used=0)

    # -- queries ---------------------------------------------------------------

    def state(self, k: int) -> State:
        hit = self._resolved_above(k, self.depth_used + 1)
        return DEFER if hit is None else hit[0]

    def residue_state(self, r: int, depth: int) -> State:
        """State of the whole coset ``r + chain[depth] Z``."""
        hit = self._resolved_above(r, min(depth, self.depth_used) + 1)
        return DEFER if hit is None else hit[0]

    def membership(self, k: int) -> int:
        if k in self.exceptions:
            return self.exceptions[k]
        s = self.state(k)
        if s is DEFER:
            raise Unresolved(k, self.depth_used)
        return int(s is IN)

    __contains__ = membership

    def try_member(self, k: int) -> int | None:
        try:
            return self.membership(k)
        except Unresolved:
            return None

    def window(self, lo: int, hi: int) -> list[int | None]:
        return [self.try_member(k) for k in range(lo, hi + 1)]

    def levels(self) -> Iterator[tuple[int, frozenset[int], frozenset[int]]]:
        for n in range(self.depth_used + 1):
            yield n, self._in[n], self._out[n]

    def deferred(self) -> list[int]:
        """Residues mod ``chain[depth_used]`` that are still undecided."""
        out = [0]
        for n in range(self.depth_used + 1):
            m = self.chain[n]
            if n:
                step = self.chain[n - 1]
                out = [r + j * step for r in out for j in range(m // step)]
            out = [r for r in out if r not in self._in[n] and r not in self._out[n]]
        return out

    def has_defer(self) -> bool:
        return bool(self.deferred())

    def contains_coset(self, c: int, m: int) -> bool:
        """True iff ``c + mZ`` is decided IN by the representation."""
        return self.residue_state(c, self.chain.depth_of(m)) is IN

    # -- algebra ------------------------------------------------------------

    def _compatible(self, others: Sequence[PfSet]) -> FiltrationChain:
        chain = self.chain
        for o in others:
            chain = chain.merge(o.chain)
        return chain

    @staticmethod
    def combine(op: str, sets: Sequence[PfSet]) -> PfSet:
        """Apply a Boolean connective, walking only the undecided frontier."""
        chain = sets[0]._compatible(sets[1:])
        limit = max(s.depth_used for s in sets)
        ins: dict[int, set[int]] = {}
        outs: dict[int, set[int]] = {}
        stack = [(0, 0, (DEFER,) * len(sets))]
        while stack:
            n, r, parent = stack.pop()
            states = tuple(
                p if p is not DEFER or n > s.depth_used else _local(s, n, r)
                for s, p in zip(sets, parent)
            )
            res = _kleene(op, states)
            if res is IN:
                ins.setdefault(n, set()).add(r)
            elif res is OUT:
                outs.setdefault(n, set()).add(r)
            elif n < limit and any(st is DEFER and n < s.depth_used for s, st in zip(sets, states)):
                m, m1 = chain[n], chain[n + 1]
                for j in range(m1 // m - 1, -1, -1):
                    stack.append((n + 1, r + j * m, states))
        levels = {n: (ins.get(n, ()), outs.get(n, ())) for n in set(ins) | set(outs)}
        result = PfSet(chain, levels, depth_used=limit, check=False)
        exc = {}
        for p in sorted({p for s in sets for p in s.exceptions}):
            if result.state(p) is DEFER:
                b = _bit_op(op, [s.try_member(p) for s in sets])
                if b is not None:
                    exc[p] = b
        result.exceptions = exc
        return result.normalized()

    def __or__(self, other: PfSet) -> PfSet:
        return PfSet.combine("or", [self, other])

    def __and__(self, other: PfSet) -> PfSet:
        return PfSet.combine("and", [self, other])

    def __xor__(self, other: PfSet) -> PfSet:
        return PfSet.combine("xor", [self, other])

    def __invert__(self) -> PfSet:
        return self.complement()

    def __sub__(self, other: PfSet) -> PfSet:
        return self & ~other

    def complement(self) -> PfSet:
        levels = {n: (o, i) for n, i, o in self.levels()}
        exc = {p: 1 - b for p, b in self.exceptions.items()}
        return PfSet(self.chain, levels, exc, self.depth_used, check=False)

    def translate(self, t: int) -> PfSet:
        """The set ``t + S``."""
        levels = {
            n: ([r + t for r in i], [r + t for r in o]) for n, i, o in self.levels()
        }
        exc = {p + t: b for p, b in self.exceptions.items()}
        return PfSet(self.chain, levels, exc, self.depth_used, check=False)

    def normalized(self) -> PfSet:
        """Merge residues whose lifts are all decided the same way one level down."""
        ins = [set(x) for x in self._in]
        outs = [set(x) for x in self._out]
        for n in range(self.depth_used - 1, -1, -1):
            m = self.chain[n]
            k = self.chain[n + 1] // m
            for side in (ins, outs):
                counts: dict[int, int] = {}
                for r in side[n + 1]:
                    counts[r % m] = counts.get(r % m, 0) + 1
                for r, c in counts.items():
                    if c == k:
                        side[n].add(r)
                        side[n + 1].difference_update(r + j * m for j in range(k))
        levels = {n: (ins[n], outs[n]) for n in range(self.depth_used + 1)}
        return PfSet(self.chain, levels, self.exceptions, self.depth_used, check=False)

    def is_empty(self) -> bool | None:
        """True/False when decidable from the representation, else None."""
        if any(self._in) or any(self.exceptions.values()):
            return False
        return None if self.has_defer() else True

    def equals(self, other: PfSet) -> bool | None:
        """Set equality: decided structurally or through the symmetric difference."""
        if self.normalized() == other.normalized():
            return True
        return (self ^ other).is_empty()

    def is_clopen(self) -> bool:
        return not self.has_defer() and not self.exceptions

    def period(self) -> int:
        """Generator ``d`` of ``Per(S) = dZ`` for a fully decided set."""
        if not self.is_clopen():
            raise Unresolved(0, self.depth_used)
        m, bits = self._one_period()
        for d in _divisors(m):
            if bits[d:] + bits[:d] == bits:
                return d
        return m

    def _one_period(self) -> tuple[int, bytearray]:
        """Membership bits over ``[0, m)`` for the deepest decided modulus ``m``."""
        top = max((n for n, i, o in self.levels() if i or o), default=0)
        m = self.chain[top]
        bits = bytearray(m)
        for n, inside, _ in self.levels():
            for r in inside:
                r %= self.chain[n]
                bits[r :: self.chain[n]] = b"\x01" * len(range(r, m, self.chain[n]))
        return m, bits

    def periods_in(self, lo: int, hi: int) -> list[int]:
        """All ``t`` in ``[lo, hi]`` with ``t + S = S``, by rotating one period."""
        if not self.is_clopen():
            raise Unresolved(0, self.depth_used)
        m, bits = self._one_period()
        word = int(bytes(reversed(bits)).translate(_DIGITS), 2)
        full = (1 << m) - 1
        out = []
        for t in range(lo, hi + 1):
            k = t % m
            if ((word << k) | (word >> (m - k))) & full == word:
                out.append(t)
        return out

    # -- serialisation -----------------------------------------------------

    def to_json(self) -> dict:
        return {
            "chain": self.chain.to_json(),
            "levels": [
                {"depth": n, "in": sorted(i), "out": sorted(o)}
                for n, i, o in self.levels()
                if i or o
            ],
            "depth_used": self.depth_used,
            "exceptions": [[p, b] for p, b in self.exceptions.items()],
        }

    @classmethod
    def from_json(cls, data: dict) -> PfSet:
        chain = FiltrationChain.from_json(data.get("chain", {"rule": "pow", "base": 2, "max_depth": 24}))
        levels = {int(lv["depth"]): (lv.get("in", []), lv.get("out", [])) for lv in data.get("levels", [])}
        depth = data.get("depth_used")
        exc = [tuple(e) for e in data.get("exceptions", [])]
        return cls(chain, levels, exc, depth)

    def __eq__(self, other) -> bool:
        if not isinstance(other, PfSet):
            return NotImplemented
        return self.to_json() == other.to_json()

    def __hash__(self):
        return hash((self.chain, self._in, self._out, tuple(self.exceptions.items())))

    def __repr__(self) -> str:
        parts = []
        for n, i, o in self.levels():
            if i:
                parts.append(f"{sorted(i)}+{self.chain[n]}Z")
        extra = f", exceptions={self.exceptions}" if self.exceptions else ""
        return f"PfSet({' u '.join(parts) or 'empty'}{extra}, depth={self.depth_used})"


_DIGITS = bytes.maketrans(b"\x00\x01", b"01")


def _local(s: PfSet, n: int, r: int) -> State:
    m = s.chain[n]
    rr = r % m
    if rr in s._in[n]:
        return IN
    if rr in s._out[n]:
        return OUT
    return DEFER


def _divisors(m: int) -> list[int]:
    small = [d for d in range(1, math.isqrt(m) + 1) if m % d == 0]
    return sorted(set(small + [m // d for d in small]))


# -- the valuation sets ------------------------------------------------------


def v2(k: int) -> int:
    if k == 0:
        raise ValueError("v2(0) is infinite")
    return (k & -k).bit_length() - 1


def valuation_set(zero_bit: int = 0, max_depth: int = 24, base: int = 2) -> PfSet:
    """``{k : v_p(k) odd}`` with the value at 0 given by ``zero_bit``."""
    chain = FiltrationChain.power(base, max_depth)
    levels = {}
    for n in range(1, max_depth + 1):
        m_prev = chain[n - 1]
        # residues j*m_prev with 0 < j < base have valuation exactly n-1
        rs = [j * m_prev for j in range(1, base)]
        levels[n] = (rs, []) if (n - 1) % 2 else ([], rs)
    return PfSet(chain, levels, {0: zero_bit}, max_depth)


def a0(max_depth: int = 24) -> PfSet:
    return valuation_set(0, max_depth)


def a1(max_depth: int = 24) -> PfSet:
    return valuation_set(1, max_depth)


# -- periods and certificates -----------------------------------------------


def per_set(s: PfSet, u_set: Iterable[int]) -> PfSet:
    """``Per_U(chi_S) = {t : chi_S(u + t) = chi_S(u) for all u in U}``."""
    parts = []
    for u in sorted(set(u_set)):
        bit = s.membership(u)
        part = s if bit else s.complement()
        parts.append(part.translate(-u))
    if not parts:
        return PfSet.full(s.chain)
    if len(parts) == 1:
        return parts[0].normalized()
    return PfSet.combine("and", parts)


@dataclass(frozen=True)
class GenericityCertificate:
    verdict: str  # GenericWithWitness | NotGeneric | Inconclusive
    translates: tuple[int, ...] = ()
    residues: tuple[int, ...] = ()  # residues mod `modulus` decided inside the set
    modulus: int = 1
    depth_reached: int = 0

    @property
    def coset(self) -> tuple[int, int] | None:
        return (self.residues[0], self.modulus) if self.residues else None

    def to_json(self) -> dict:
        return {
            "verdict": self.verdict,
            "translates": list(self.translates),
            "residues": list(self.residues),
            "modulus": self.modulus,
            "depth_reached": self.depth_reached,
        }

    @classmethod
    def from_json(cls, d: dict) -> GenericityCertificate:
        return cls(d["verdict"], tuple(d["translates"]), tuple(d["residues"]), d["modulus"], d["depth_reached"])


GENERIC, NOT_GENERIC, INCONCLUSIVE = "GenericWithWitness", "NotGeneric", "Inconclusive"


def greedy_cover(residues: Iterable[int], m: int) -> list[int]:
    """Translates t with ``{t + r mod m}`` covering Z/m, chosen greedily."""
    rs = sorted({r % m for r in residues})
    if not rs:
        raise ValueError("nothing to cover with")
    uncovered = set(range(m))
    picked = []
    while uncovered:
        best_t, best = 0, -1
        for t in range(m):
            gain = sum((t + r) % m in uncovered for r in rs)
            if gain > best:
                best_t, best = t, gain
        picked.append(best_t)
        uncovered.difference_update((best_t + r) % m for r in rs)
    return sorted(picked)


def covers(translates: Iterable[int], residues: Iterable[int], m: int) -> bool:
    hit = {(t + r) % m for t in translates for r in residues}
    return len(hit) == m


def genericity_certificate(s: PfSet) -> GenericityCertificate:
    for n, inside, _ in s.levels():
        if inside:
            m = s.chain[n]
            rs = tuple(sorted(inside))
            return GenericityCertificate(GENERIC, tuple(greedy_cover(rs, m)), rs, m, n)
    if s.has_defer():
        return GenericityCertificate(INCONCLUSIVE, depth_reached=s.depth_used)
    return GenericityCertificate(NOT_GENERIC, depth_reached=s.depth_used)


def verify_certificate(s: PfSet, cert: GenericityCertificate) -> bool:
    """Re-check a certificate against the representation of ``s``."""
    if cert.verdict != GENERIC:
        if cert.verdict == NOT_GENERIC:
            return s.is_empty() is not False and not s.has_defer() and not any(s._in)
        return True
    if not cert.residues or not cert.translates:
        return False
    if not all(s.contains_coset(r, cert.modulus) for r in cert.residues):
        return False
    return covers(cert.translates, cert.residues, cert.modulus)


def valuation_coset_exponent(u_set: Iterable[int]) -> int:
    """Least even N exceeding every v2(u) for nonzero u in U (0 when there are none)."""
    vals = [v2(u) for u in u_set if u]
    if not vals:
        return 0
    top = max(vals) + 1
    return top + (top % 2)


@dataclass
class SGReport:
    entries: list[dict]
    locally_periodic: bool

    def to_json(self) -> dict:
        return {"locally_periodic_up_to_battery": self.locally_periodic, "entries": self.entries}


def strong_genericity_report(s: PfSet, battery: Iterable[Iterable[int]]) -> SGReport:
    entries = []
    for u in battery:
        u = sorted(set(u))
        cert = genericity_certificate(per_set(s, u))
        entries.append({"U": u, "m": len(cert.translates), "certificate": cert.to_json()})
    ok = all(e["certificate"]["verdict"] == GENERIC for e in entries)
    return SGReport(entries, ok)


def bucket_battery(size: int, radius: int, samples: int, seed: int) -> list[tuple[int, ...]]:
    """Deterministic seeded battery of U with |U| = size inside [-radius, radius]."""
    rng = Random(f"{seed}:{size}:{radius}")
    pool = range(-radius, radius + 1)
    out: set[tuple[int, ...]] = set()
    target = min(samples, math.comb(len(pool), size))
    while len(out) < target:
        out.add(tuple(sorted(rng.sample(pool, size))))
    return sorted(out)


def dyadic_family(size: int) -> tuple[int, ...]:
    """``{0, 2, 8, ..., 2**(2*size - 3)}``: each new point forces a deeper witness."""
    return tuple(sorted({0} | {2 ** (2 * j + 1) for j in range(size - 1)}))


def usg_probe(
    s: PfSet, size_buckets: Sequence[int], radius: int = 64, samples: int = 40, seed: int = 0
) -> dict:
    """Largest minimised witness count per |U| bucket.

    ``table`` maximises over a seeded battery; ``witness_family`` records the
    counts along :func:`dyadic_family`, which is where growth shows for the
    valuation sets.  Growth is evidence against uniform genericity, never proof.
    """

    def count(u):
        cert = genericity_certificate(per_set(s, u))
        return len(cert.translates) if cert.verdict == GENERIC else None

    table: dict[int, int | None] = {}
    for size in size_buckets:
        counts = [count(u) for u in bucket_battery(size, radius, samples, seed)]
        table[size] = None if None in counts else max(counts, default=0)
    family = {size: count(dyadic_family(size)) for size in size_buckets}

    def growing(vals):
        return all(a is not None and b is not None and a < b for a, b in zip(vals, vals[1:]))

    return {
        "table": table,
        "strictly_growing": growing([table[b] for b in size_buckets]),
        "witness_family": family,
        "witness_family_growing": growing([family[b] for b in size_buckets]),
        "radius": radius,
        "samples": samples,
        "seed": seed,
    }


def all_small_subsets(lo: int, hi: int, max_size: int) -> Iterator[tuple[int, ...]]:
    pts = range(lo, hi + 1)
    for k in range(1, max_size + 1):
        yield from combinations(pts, k)


def window_per(bits: dict[int, int], u_set: Iterable[int], ts: Iterable[int]) -> set[int]:
    """Brute force: shifts t with chi(u + t) = chi(u) for all u (values from ``bits``)."""
    u_set = list(u_set)
    return {t for t in ts if all(bits[u + t] == bits[u] for u in u_set)}


__all__ = [name for name in dir() if not name.startswith("_") and name not in {"annotations", "product"}]
