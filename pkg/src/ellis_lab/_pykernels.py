"""Pure-Python reference versions of the hot loops (see ``_kernels.pyx``).

Both modules expose the same functions with the same semantics; the compiled
one is preferred at import time by :mod:`ellis_lab.kernels`.

Regular open arc sets on a grid ``Z/L`` are passed around as tuples
``(whole, breaks)`` where ``breaks`` is a sorted tuple of
``(position, point_in, gap_after_in)`` triples and ``whole`` is the value of
the set when there are no breakpoints.
"""
from __future__ import annotations

from collections import deque

# -- transformation monoids -------------------------------------------------


def transformation_closure(gens, limit=1 << 16):
    """All compositions of ``gens`` (maps given as tuples), identity first."""
    gens = [tuple(g) for g in gens]
    k = len(gens[0]) if gens else 0
    ident = tuple(range(k))
    seen = {ident: 0}
    out = [ident]
    queue = deque([ident])
    while queue:
        f = queue.popleft()
        for g in gens:
            h = tuple(g[x] for x in f)  # g after f
            if h not in seen:
                if len(out) >= limit:
                    raise OverflowError("monoid exceeds limit")
                seen[h] = len(out)
                out.append(h)
                queue.append(h)
    return out


def compose_table(maps):
    """``table[i][j]`` = index of ``maps[i] o maps[j]`` (apply j first)."""
    maps = [tuple(m) for m in maps]
    index = {m: i for i, m in enumerate(maps)}
    table = []
    for f in maps:
        row = []
        for g in maps:
            h = tuple(f[x] for x in g)
            try:
                row.append(index[h])
            except KeyError:
                raise ValueError("maps are not closed under composition") from None
        table.append(row)
    return table


# -- window scans ------------------------------------------------------------


def first_occurrence(bits, dom, vals, lo=0, hi=None):
    """Least shift g in [lo, hi] with bits[g + d] == v for all (d, v)."""
    n = len(bits)
    span = dom[-1] if dom else 0
    hi = n - 1 - span if hi is None else min(hi, n - 1 - span)
    for g in range(lo, hi + 1):
        if all(bits[g + d] == v for d, v in zip(dom, vals)):
            return g
    return -1


def min_translates(bits, dom, vals, kmax):
    """Least k such that every placement of ``dom + [0, k)`` in the window holds ``eta``.

    ``eta`` is the pattern ``dom -> vals`` (``dom`` sorted, starting at 0); an
    occurrence may sit anywhere inside the placed set.  Returns ``(k, -1)`` on
    success or ``(-1, g)`` with a falsifying placement for the largest k that
    still fits in the window.
    """
    n = len(bits)
    span = dom[-1]
    last_bad = -1
    for k in range(1, kmax + 1):
        width = span + k
        if width > n:
            break
        rel = {d + w for d in dom for w in range(k)}
        offsets = [h for h in range(-span, width) if all(h + d in rel for d in dom)]
        bad = -1
        for g in range(0, n - width + 1):
            if not any(all(bits[g + h + d] == v for d, v in zip(dom, vals)) for h in offsets):
                bad = g
                break
        if bad < 0:
            return k, -1
        last_bad = bad
    return -1, last_bad


# -- regular open arc sets on Z/L --------------------------------------------


def _values_at(s, x):
    """(point value, value of the gap right after x) of canonical set s at x."""
    whole, br = s
    if not br:
        return whole, whole
    idx = -1
    for i, (b, p, g) in enumerate(br):
        if b == x:
            return p, g
        if b < x:
            idx = i
    return br[idx][2], br[idx][2]


def canon(whole, br):
    """Drop breakpoints that separate nothing."""
    n = len(br)
    if n == 0:
        return (whole, ())
    keep = []
    for i, (b, p, g) in enumerate(br):
        before = br[i - 1][2]
        if not (p == g == before):
            keep.append((b, p, g))
    if not keep:
        return (br[0][2], ())
    return (0, tuple(keep))


def combine(a, b, op):
    """Pointwise Boolean op ('or', 'and') on two canonical sets."""
    xs = sorted({x for x, _, _ in a[1]} | {x for x, _, _ in b[1]})
    f = (lambda u, v: u | v) if op == "or" else (lambda u, v: u & v)
    if not xs:
        w = f(a[0], b[0])
        return (w, ())
    br = []
    for x in xs:
        pa, ga = _values_at(a, x)
        pb, gb = _values_at(b, x)
        br.append((x, f(pa, pb), f(ga, gb)))
    return canon(0, tuple(br))


def invert(a):
    whole, br = a
    return (1 - whole, tuple((x, 1 - p, 1 - g) for x, p, g in br))


def regularize(a):
    """Interior of the closure: a point survives iff both adjacent gaps are in."""
    whole, br = a
    if not br:
        return a
    out = tuple((x, br[i - 1][2] & g, g) for i, (x, p, g) in enumerate(br))
    return canon(0, out)


def ro_join(a, b):
    return regularize(combine(a, b, "or"))


def ro_meet(a, b):
    return regularize(combine(a, b, "and"))


def ro_complement(a):
    return regularize(invert(a))


def open_arc(a, b):
    """The open arc from a to b (counterclockwise) on the grid, a != b."""
    if a < b:
        return (0, ((a, 0, 1), (b, 0, 0)))
    return (0, ((b, 0, 0), (a, 0, 1)))


LAWS = (
    "join_commutative",
    "meet_commutative",
    "join_absorbs",
    "meet_absorbs",
    "de_morgan",
    "complement_join",
    "complement_meet",
    "double_complement",
    "join_idempotent",
    "join_associative",
    "meet_associative",
    "meet_distributes",
    "join_distributes",
)


def ro_law_sweep(arcs, grid):
    """Check Boolean-algebra laws for (join, meet, complement) on all triples.

    ``arcs`` is a list of (a, b) grid endpoints of open arcs.  Returns
    ``(failures per law, number of triples)``.
    """
    xs = [open_arc(a, b) for a, b in arcs]
    n = len(xs)
    full, empty = (1, ()), (0, ())
    fails = dict.fromkeys(LAWS, 0)
    comp = [ro_complement(x) for x in xs]
    join = [[ro_join(x, y) for y in xs] for x in xs]
    meet = [[ro_meet(x, y) for y in xs] for x in xs]
    for i in range(n):
        x = xs[i]
        fails["complement_join"] += ro_join(x, comp[i]) != full
        fails["complement_meet"] += ro_meet(x, comp[i]) != empty
        fails["double_complement"] += ro_complement(comp[i]) != x
        fails["join_idempotent"] += join[i][i] != x
        for j in range(n):
            y = xs[j]
            fails["join_commutative"] += join[i][j] != join[j][i]
            fails["meet_commutative"] += meet[i][j] != meet[j][i]
            fails["join_absorbs"] += ro_join(x, meet[i][j]) != x
            fails["meet_absorbs"] += ro_meet(x, join[i][j]) != x
            fails["de_morgan"] += ro_complement(join[i][j]) != ro_meet(comp[i], comp[j])
            for k in range(n):
                z = xs[k]
                fails["join_associative"] += ro_join(join[i][j], z) != ro_join(x, join[j][k])
                fails["meet_associative"] += ro_meet(meet[i][j], z) != ro_meet(x, meet[j][k])
                fails["meet_distributes"] += ro_meet(x, join[j][k]) != ro_join(meet[i][j], meet[i][k])
                fails["join_distributes"] += ro_join(x, meet[j][k]) != ro_meet(join[i][j], join[i][k])
    return fails, n**3
