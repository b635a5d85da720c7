# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the hot loops; semantics match ``_pykernels``."""

from libc.stdlib cimport malloc, free
from libc.string cimport memcmp, memset

from ellis_lab._pykernels import LAWS, open_arc  # shared constants and helpers

# -- transformation monoids -------------------------------------------------


def transformation_closure(gens, limit=1 << 16):
    gens = [tuple(item) for item in gens]
    cdef Py_ssize_t k = len(gens[0]) if gens else 0
    cdef Py_ssize_t ng = len(gens), gi, x, head = 0
    cdef int *gt = <int *> malloc(sizeof(int) * (ng * k + 1))
    cdef int *cur = <int *> malloc(sizeof(int) * (k + 1))
    try:
        for gi in range(ng):
            for x in range(k):
                gt[gi * k + x] = gens[gi][x]
        ident = tuple(range(k))
        seen = {ident: 0}
        out = [ident]
        while head < len(out):
            f = out[head]
            head += 1
            for gi in range(ng):
                for x in range(k):
                    cur[x] = gt[gi * k + <int> f[x]]
                h = tuple([cur[x] for x in range(k)])
                if h not in seen:
                    if len(out) >= limit:
                        raise OverflowError("monoid exceeds limit")
                    seen[h] = len(out)
                    out.append(h)
        return out
    finally:
        free(gt)
        free(cur)


def compose_table(maps):
    maps = [tuple(m) for m in maps]
    index = {m: i for i, m in enumerate(maps)}
    cdef Py_ssize_t n = len(maps), k = len(maps[0]) if maps else 0, i, j, x
    cdef int *flat = <int *> malloc(sizeof(int) * (n * k + 1))
    cdef int *cur = <int *> malloc(sizeof(int) * (k + 1))
    try:
        for i in range(n):
            for x in range(k):
                flat[i * k + x] = maps[i][x]
        table = []
        for i in range(n):
            row = []
            for j in range(n):
                for x in range(k):
                    cur[x] = flat[i * k + flat[j * k + x]]
                h = tuple([cur[x] for x in range(k)])
                try:
                    row.append(index[h])
                except KeyError:
                    raise ValueError("maps are not closed under composition") from None
            table.append(row)
        return table
    finally:
        free(flat)
        free(cur)


# -- window scans ------------------------------------------------------------


def first_occurrence(bits, dom, vals, lo=0, hi=None):
    cdef const unsigned char[:] b = bytes(bits)
    cdef Py_ssize_t n = len(b), m = len(dom), i, g, span = dom[len(dom) - 1] if dom else 0
    cdef Py_ssize_t top = n - 1 - span if hi is None else min(hi, n - 1 - span)
    cdef int *d = <int *> malloc(sizeof(int) * (m + 1))
    cdef unsigned char *v = <unsigned char *> malloc(m + 1)
    cdef bint ok
    try:
        for i in range(m):
            d[i] = dom[i]
            v[i] = vals[i]
        for g in range(lo, top + 1):
            ok = True
            for i in range(m):
                if b[g + d[i]] != v[i]:
                    ok = False
                    break
            if ok:
                return g
        return -1
    finally:
        free(d)
        free(v)


def min_translates(bits, dom, vals, int kmax):
    cdef const unsigned char[:] b = bytes(bits)
    cdef Py_ssize_t n = len(b), m = len(dom), i, g, h, w, width, noff, oi
    cdef int span = dom[len(dom) - 1], k, last_bad = -1
    cdef int *d = <int *> malloc(sizeof(int) * (m + 1))
    cdef unsigned char *v = <unsigned char *> malloc(m + 1)
    cdef int *offs = <int *> malloc(sizeof(int) * (2 * span + kmax + 2))
    cdef unsigned char *rel = <unsigned char *> malloc(2 * span + kmax + 2)
    cdef bint found, ok, fits
    try:
        for i in range(m):
            d[i] = dom[i]
            v[i] = vals[i]
        for k in range(1, kmax + 1):
            width = span + k
            if width > n:
                break
            memset(rel, 0, width)
            for i in range(m):
                for w in range(k):
                    rel[d[i] + w] = 1
            noff = 0
            for h in range(-span, width):
                fits = True
                for i in range(m):
                    if h + d[i] < 0 or h + d[i] >= width or not rel[h + d[i]]:
                        fits = False
                        break
                if fits:
                    offs[noff] = h
                    noff += 1
            found = True
            for g in range(0, n - width + 1):
                ok = False
                for oi in range(noff):
                    h = offs[oi]
                    ok = True
                    for i in range(m):
                        if b[g + h + d[i]] != v[i]:
                            ok = False
                            break
                    if ok:
                        break
                if not ok:
                    last_bad = g
                    found = False
                    break
            if found:
                return k, -1
        return -1, last_bad
    finally:
        free(d)
        free(v)
        free(offs)
        free(rel)


# -- regular open arc sets on Z/L --------------------------------------------

cdef enum:
    MAXB = 24

cdef struct RO:
    int n
    int whole
    int b[MAXB]
    char pt[MAXB]
    char gap[MAXB]


cdef inline void _canon(RO *s) noexcept nogil:
    cdef int i, j = 0, n = s.n
    cdef char before, last_gap
    cdef int keep_b[MAXB]
    cdef char keep_p[MAXB]
    cdef char keep_g[MAXB]
    if n == 0:
        return
    last_gap = s.gap[n - 1]
    for i in range(n):
        before = s.gap[i - 1] if i > 0 else last_gap
        if not (s.pt[i] == s.gap[i] and s.gap[i] == before):
            keep_b[j] = s.b[i]
            keep_p[j] = s.pt[i]
            keep_g[j] = s.gap[i]
            j += 1
    if j == 0:
        s.whole = s.gap[0]
        s.n = 0
        return
    for i in range(j):
        s.b[i] = keep_b[i]
        s.pt[i] = keep_p[i]
        s.gap[i] = keep_g[i]
    s.n = j
    s.whole = 0


cdef inline void _regularize(RO *s) noexcept nogil:
    cdef int i, n = s.n
    cdef char prev
    if n == 0:
        return
    prev = s.gap[n - 1]
    for i in range(n):
        s.pt[i] = prev & s.gap[i]
        prev = s.gap[i]
    _canon(s)


cdef inline void _combine(const RO *a, const RO *b, RO *out, int is_or) noexcept nogil:
    # two-pointer merge of breakpoints; ia/ib track the last breakpoint <= x
    cdef int i = 0, j = 0, n = 0, x
    cdef int ia = a.n - 1, ib = b.n - 1
    cdef char pa, ga, pb, gb
    if a.n == 0 and b.n == 0:
        out.n = 0
        out.whole = (a.whole | b.whole) if is_or else (a.whole & b.whole)
        return
    while i < a.n or j < b.n:
        if j >= b.n or (i < a.n and a.b[i] < b.b[j]):
            x = a.b[i]
        else:
            x = b.b[j]
        if a.n == 0:
            pa = a.whole
            ga = a.whole
        elif i < a.n and a.b[i] == x:
            pa = a.pt[i]
            ga = a.gap[i]
            ia = i
            i += 1
        else:
            pa = a.gap[ia]
            ga = a.gap[ia]
        if b.n == 0:
            pb = b.whole
            gb = b.whole
        elif j < b.n and b.b[j] == x:
            pb = b.pt[j]
            gb = b.gap[j]
            ib = j
            j += 1
        else:
            pb = b.gap[ib]
            gb = b.gap[ib]
        out.b[n] = x
        if is_or:
            out.pt[n] = pa | pb
            out.gap[n] = ga | gb
        else:
            out.pt[n] = pa & pb
            out.gap[n] = ga & gb
        n += 1
    out.n = n
    out.whole = 0
    _canon(out)


cdef inline void _join(const RO *a, const RO *b, RO *out) noexcept nogil:
    _combine(a, b, out, 1)
    _regularize(out)


cdef inline void _meet(const RO *a, const RO *b, RO *out) noexcept nogil:
    _combine(a, b, out, 0)
    _regularize(out)


cdef inline void _complement(const RO *a, RO *out) noexcept nogil:
    cdef int i
    out.n = a.n
    out.whole = 1 - a.whole
    for i in range(a.n):
        out.b[i] = a.b[i]
        out.pt[i] = 1 - a.pt[i]
        out.gap[i] = 1 - a.gap[i]
    _regularize(out)


cdef inline bint _eq(const RO *a, const RO *b) noexcept nogil:
    cdef int i
    if a.n != b.n:
        return False
    if a.n == 0:
        return a.whole == b.whole
    for i in range(a.n):
        if a.b[i] != b.b[i] or a.pt[i] != b.pt[i] or a.gap[i] != b.gap[i]:
            return False
    return True


cdef void _load(RO *s, obj):
    whole, br = obj
    s.n = len(br)
    s.whole = whole
    for i, (x, p, g) in enumerate(br):
        s.b[i] = x
        s.pt[i] = p
        s.gap[i] = g


cdef object _dump(const RO *s):
    return (s.whole, tuple((s.b[i], s.pt[i], s.gap[i]) for i in range(s.n)))


def ro_join(a, b):
    cdef RO x, y, z
    _load(&x, a)
    _load(&y, b)
    _join(&x, &y, &z)
    return _dump(&z)


def ro_meet(a, b):
    cdef RO x, y, z
    _load(&x, a)
    _load(&y, b)
    _meet(&x, &y, &z)
    return _dump(&z)


def ro_complement(a):
    cdef RO x, z
    _load(&x, a)
    _complement(&x, &z)
    return _dump(&z)


def ro_law_sweep(arcs, grid):
    cdef Py_ssize_t n = len(arcs), i, j, k
    cdef RO *xs = <RO *> malloc(sizeof(RO) * n)
    cdef RO *comp = <RO *> malloc(sizeof(RO) * n)
    cdef RO *jn = <RO *> malloc(sizeof(RO) * n * n)
    cdef RO *mt = <RO *> malloc(sizeof(RO) * n * n)
    cdef RO t1, t2, t3, full, empty
    cdef long long f[13]
    if xs == NULL or comp == NULL or jn == NULL or mt == NULL:
        raise MemoryError()
    try:
        memset(f, 0, sizeof(f))
        full.n = 0
        full.whole = 1
        empty.n = 0
        empty.whole = 0
        for i in range(n):
            _load(&xs[i], open_arc(*arcs[i]))
        with nogil:
            for i in range(n):
                _complement(&xs[i], &comp[i])
                for j in range(n):
                    _join(&xs[i], &xs[j], &jn[i * n + j])
                    _meet(&xs[i], &xs[j], &mt[i * n + j])
            for i in range(n):
                _join(&xs[i], &comp[i], &t1)
                f[5] += not _eq(&t1, &full)
                _meet(&xs[i], &comp[i], &t1)
                f[6] += not _eq(&t1, &empty)
                _complement(&comp[i], &t1)
                f[7] += not _eq(&t1, &xs[i])
                f[8] += not _eq(&jn[i * n + i], &xs[i])
                for j in range(n):
                    f[0] += not _eq(&jn[i * n + j], &jn[j * n + i])
                    f[1] += not _eq(&mt[i * n + j], &mt[j * n + i])
                    _join(&xs[i], &mt[i * n + j], &t1)
                    f[2] += not _eq(&t1, &xs[i])
                    _meet(&xs[i], &jn[i * n + j], &t1)
                    f[3] += not _eq(&t1, &xs[i])
                    _complement(&jn[i * n + j], &t1)
                    _meet(&comp[i], &comp[j], &t2)
                    f[4] += not _eq(&t1, &t2)
                    for k in range(n):
                        _join(&jn[i * n + j], &xs[k], &t1)
                        _join(&xs[i], &jn[j * n + k], &t2)
                        f[9] += not _eq(&t1, &t2)
                        _meet(&mt[i * n + j], &xs[k], &t1)
                        _meet(&xs[i], &mt[j * n + k], &t2)
                        f[10] += not _eq(&t1, &t2)
                        _meet(&xs[i], &jn[j * n + k], &t1)
                        _join(&mt[i * n + j], &mt[i * n + k], &t2)
                        f[11] += not _eq(&t1, &t2)
                        _join(&xs[i], &mt[j * n + k], &t1)
                        _meet(&jn[i * n + j], &jn[i * n + k], &t2)
                        f[12] += not _eq(&t1, &t2)
        return {name: int(f[idx]) for idx, name in enumerate(LAWS)}, n ** 3
    finally:
        free(xs)
        free(comp)
        free(jn)
        free(mt)
