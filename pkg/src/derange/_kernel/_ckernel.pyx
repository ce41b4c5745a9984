# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled closure/scan kernel.

Same semantics as derange._kernel.pure: permutations are image rows, the
product "a then b" is b[a], closures are BFS in discovery order. The hash
tables here are open-addressing FNV-1a over the raw row bytes.
"""

import numpy as np

from libc.string cimport memcmp

BACKEND = "compiled"

ctypedef fused point_t:
    unsigned char
    unsigned short
    unsigned int


def point_dtype(n):
    """Smallest unsigned dtype able to hold points 0..n-1."""
    if n <= 1 << 8:
        return np.uint8
    if n <= 1 << 16:
        return np.uint16
    return np.uint32


cdef inline unsigned long long _fnv1a(const unsigned char *data, Py_ssize_t nbytes) noexcept nogil:
    cdef unsigned long long h = 14695981039346656037ULL
    cdef Py_ssize_t i
    for i in range(nbytes):
        h ^= data[i]
        h *= 1099511628211ULL
    return h


cdef inline Py_ssize_t _slot_for(long long *tab, Py_ssize_t mask, point_t *rows,
                                 Py_ssize_t n, point_t *key) noexcept nogil:
    """Slot holding `key`, or the empty slot where it belongs."""
    cdef unsigned long long h = _fnv1a(<const unsigned char *> key, n * sizeof(point_t))
    cdef Py_ssize_t slot = <Py_ssize_t> (h & <unsigned long long> mask)
    cdef long long idx
    while True:
        idx = tab[slot]
        if idx < 0:
            return slot
        if memcmp(rows + idx * n, key, n * sizeof(point_t)) == 0:
            return slot
        slot = (slot + 1) & mask


def perm_closure(point_t[:, ::1] gens, long cap):
    """BFS closure of the generator rows; see the pure twin for the contract."""
    cdef Py_ssize_t m = gens.shape[0]
    cdef Py_ssize_t n = gens.shape[1]
    dtype = np.asarray(gens).dtype

    cdef Py_ssize_t capacity = 1024
    if capacity > cap:
        capacity = cap
    if capacity < 1:
        capacity = 1
    buf = np.empty((capacity, n), dtype=dtype)
    cdef point_t[:, ::1] bv = buf

    cdef Py_ssize_t tsize = 4096
    while tsize < 4 * capacity:
        tsize <<= 1
    tab = np.full(tsize, -1, dtype=np.int64)
    cdef long long[::1] tv = tab
    cdef Py_ssize_t mask = tsize - 1

    cdef point_t *rows = &bv[0, 0]
    cdef long long *tp = &tv[0]
    cdef Py_ssize_t count = 0, pos = 0, slot, i, g
    cdef point_t *cur
    cdef point_t *dst
    cdef bint complete = True

    # identity
    for i in range(n):
        rows[i] = <point_t> i
    slot = _slot_for(tp, mask, rows, n, rows)
    tp[slot] = 0
    count = 1

    while pos < count:
        cur = rows + pos * n
        for g in range(m):
            if count == capacity:
                # grow element buffer (and rehash into a larger table)
                capacity = capacity * 2
                newbuf = np.empty((capacity, n), dtype=dtype)
                newbuf[:count] = buf[:count]
                buf = newbuf
                bv = buf
                rows = &bv[0, 0]
                cur = rows + pos * n
                tsize = 4096
                while tsize < 4 * capacity:
                    tsize <<= 1
                tab = np.full(tsize, -1, dtype=np.int64)
                tv = tab
                tp = &tv[0]
                mask = tsize - 1
                for i in range(count):
                    slot = _slot_for(tp, mask, rows, n, rows + i * n)
                    tp[slot] = i
            dst = rows + count * n
            for i in range(n):
                dst[i] = gens[g, cur[i]]
            slot = _slot_for(tp, mask, rows, n, dst)
            if tp[slot] < 0:
                if count >= cap:
                    complete = False
                    return np.asarray(buf[:count]), complete
                tp[slot] = count
                count += 1
        pos += 1
    return np.asarray(buf[:count]), complete


def subgroup_closure(point_t[:, ::1] elems, unsigned char[::1] special, long cap):
    """Closure of the marked elements inside an enumerated group.

    Mirrors the pure twin: scan `special` in ambient order, add each element
    not yet generated as a new generator and re-close, stop early once the
    closure passes half the ambient order (it is then the whole group).
    Returns (member_mask, generator_indices).
    """
    cdef Py_ssize_t k = elems.shape[0]
    cdef Py_ssize_t n = elems.shape[1]
    cdef point_t *rows = &elems[0, 0]

    cdef Py_ssize_t tsize = 4096
    while tsize < 4 * k:
        tsize <<= 1
    tab = np.full(tsize, -1, dtype=np.int64)
    cdef long long[::1] tv = tab
    cdef long long *tp = &tv[0]
    cdef Py_ssize_t mask = tsize - 1
    cdef Py_ssize_t i, slot
    for i in range(k):
        slot = _slot_for(tp, mask, rows, n, rows + i * n)
        if tp[slot] < 0:
            tp[slot] = i

    mask_arr = np.zeros(k, dtype=np.uint8)
    cdef unsigned char[::1] in_sub = mask_arr
    members_arr = np.empty(k, dtype=np.int64)
    cdef long long[::1] members = members_arr
    tmp = np.empty(n, dtype=np.asarray(elems).dtype)
    cdef point_t[::1] tmpv = tmp
    cdef point_t *tmpp = &tmpv[0]

    gens = []
    cdef Py_ssize_t nmem, pos, s, x, y, g, j
    cdef point_t *xrow
    cdef point_t *grow_

    in_sub[0] = 1
    for s in range(k):
        if special[s] and not in_sub[s]:
            gens.append(s)
            for i in range(k):
                in_sub[i] = 0
            in_sub[0] = 1
            members[0] = 0
            nmem = 1
            pos = 0
            while pos < nmem:
                x = <Py_ssize_t> members[pos]
                pos += 1
                xrow = rows + x * n
                for g in gens:
                    grow_ = rows + (<Py_ssize_t> g) * n
                    for j in range(n):
                        tmpp[j] = grow_[xrow[j]]
                    slot = _slot_for(tp, mask, rows, n, tmpp)
                    y = <Py_ssize_t> tp[slot]
                    if not in_sub[y]:
                        in_sub[y] = 1
                        members[nmem] = y
                        nmem += 1
            if 2 * nmem > k:
                for i in range(k):
                    in_sub[i] = 1
                return mask_arr, gens
    return mask_arr, gens


def fixed_counts(point_t[:, ::1] elems):
    """Number of fixed points of each element row."""
    cdef Py_ssize_t k = elems.shape[0]
    cdef Py_ssize_t n = elems.shape[1]
    out = np.empty(k, dtype=np.int64)
    cdef long long[::1] ov = out
    cdef Py_ssize_t i, j
    cdef long long c
    for i in range(k):
        c = 0
        for j in range(n):
            if elems[i, j] == <point_t> j:
                c += 1
        ov[i] = c
    return out


def cycle_info(point_t[:, ::1] elems):
    """Cycle types per element; see the pure twin for the contract."""
    cdef Py_ssize_t k = elems.shape[0]
    cdef Py_ssize_t n = elems.shape[1]
    ids = np.empty(k, dtype=np.int64)
    cdef long long[::1] iv = ids
    seen_arr = np.zeros(n, dtype=np.uint8)
    cdef unsigned char[::1] seen = seen_arr
    lens_arr = np.empty(n, dtype=np.int64)
    cdef long long[::1] lens = lens_arr
    table = {}
    types = []
    cdef Py_ssize_t i, a, b, ln, nlens, j
    for i in range(k):
        for j in range(n):
            seen[j] = 0
        nlens = 0
        for a in range(n):
            if not seen[a]:
                ln = 0
                b = a
                while not seen[b]:
                    seen[b] = 1
                    b = <Py_ssize_t> elems[i, b]
                    ln += 1
                lens[nlens] = ln
                nlens += 1
        key = tuple(sorted([lens[j] for j in range(nlens)]))
        t = table.get(key)
        if t is None:
            t = len(types)
            table[key] = t
            types.append(key)
        iv[i] = t
    return ids, types


def table_closure(unsigned int[:, ::1] table, gens, start):
    """BFS closure inside a finite magma given by its multiplication table."""
    cdef Py_ssize_t n = table.shape[0]
    seen_arr = np.zeros(n, dtype=np.uint8)
    cdef unsigned char[::1] seen = seen_arr
    out = np.empty(n, dtype=np.int64)
    cdef long long[::1] ov = out
    glist = np.asarray(gens, dtype=np.int64)
    cdef long long[::1] gv = glist
    cdef Py_ssize_t m = gv.shape[0]
    cdef Py_ssize_t pos = 0, count = 0, x, j, y
    seen[<Py_ssize_t> start] = 1
    ov[0] = start
    count = 1
    while pos < count:
        x = <Py_ssize_t> ov[pos]
        pos += 1
        for j in range(m):
            y = <Py_ssize_t> table[x, gv[j]]
            if not seen[y]:
                seen[y] = 1
                ov[count] = y
                count += 1
    return np.asarray(out[:count]).copy()
