"""Pure-numpy fallback for the closure/scan kernel.

Semantics are identical to the compiled extension (derange._kernel._ckernel);
tests assert bit-for-bit agreement. Everything here works on permutations
stored as image rows: row[i] is the image of point i, and the product
"a then b" has row b[a].
"""

import numpy as np

BACKEND = "pure"


def point_dtype(n):
    """Smallest unsigned dtype able to hold points 0..n-1."""
    if n <= 1 << 8:
        return np.uint8
    if n <= 1 << 16:
        return np.uint16
    return np.uint32


def perm_closure(gens, cap):
    """BFS closure of the generator rows under right multiplication.

    Returns (elements, complete). Elements start with the identity and are
    listed in discovery order, which is deterministic given the generator
    order. If the closure would exceed `cap` elements, returns the partial
    array with complete=False.
    """
    gens = np.ascontiguousarray(gens)
    m, n = gens.shape
    ident = np.arange(n, dtype=gens.dtype)
    rows = [ident]
    index = {ident.tobytes(): 0}
    pos = 0
    while pos < len(rows):
        cur = rows[pos]
        pos += 1
        for k in range(m):
            new = np.ascontiguousarray(gens[k][cur])
            key = new.tobytes()
            if key not in index:
                if len(rows) >= cap:
                    return np.stack(rows), False
                index[key] = len(rows)
                rows.append(new)
    return np.stack(rows), True


def subgroup_closure(elems, special, cap):
    """Close the marked elements of an enumerated group into a subgroup.

    elems is the full (k, n) element array of the ambient group with the
    identity at index 0; special is a uint8 mask of the generating subset.
    Returns (member_mask, generator_indices): member_mask marks the elements
    of <special>, generator_indices are the ambient indices actually used as
    generators (scanning `special` in ambient order and skipping elements
    already generated). Once the closure passes half the ambient order it is
    the whole group and the scan stops early.
    """
    elems = np.ascontiguousarray(elems)
    k, n = elems.shape
    index = {elems[i].tobytes(): i for i in range(k)}
    in_sub = np.zeros(k, dtype=np.uint8)
    in_sub[0] = 1
    gens = []
    for s in range(k):
        if special[s] and not in_sub[s]:
            gens.append(s)
            in_sub[:] = 0
            in_sub[0] = 1
            members = [0]
            pos = 0
            while pos < len(members):
                x = members[pos]
                pos += 1
                xrow = elems[x]
                for g in gens:
                    yrow = np.ascontiguousarray(elems[g][xrow])
                    y = index[yrow.tobytes()]
                    if not in_sub[y]:
                        in_sub[y] = 1
                        members.append(y)
            if 2 * len(members) > k:
                in_sub[:] = 1
                return in_sub, gens
    return in_sub, gens


def fixed_counts(elems):
    """Number of fixed points of each element row."""
    elems = np.asarray(elems)
    k, n = elems.shape
    out = np.empty(k, dtype=np.int64)
    pts = np.arange(n, dtype=elems.dtype)
    step = max(1, (1 << 22) // max(n, 1))
    for lo in range(0, k, step):
        hi = min(k, lo + step)
        out[lo:hi] = (elems[lo:hi] == pts).sum(axis=1)
    return out


def cycle_info(elems):
    """Cycle types of each element row.

    Returns (type_ids, types): types is the list of distinct cycle types in
    first-seen order, each a sorted tuple of cycle lengths (fixed points
    count as 1-cycles); type_ids maps each element to its position in types.
    """
    elems = np.asarray(elems)
    k, n = elems.shape
    ids = np.empty(k, dtype=np.int64)
    table = {}
    types = []
    for i in range(k):
        row = elems[i]
        seen = bytearray(n)
        lens = []
        for a in range(n):
            if not seen[a]:
                ln = 0
                b = a
                while not seen[b]:
                    seen[b] = 1
                    b = int(row[b])
                    ln += 1
                lens.append(ln)
        key = tuple(sorted(lens))
        t = table.get(key)
        if t is None:
            t = len(types)
            table[key] = t
            types.append(key)
        ids[i] = t
    return ids, types


def table_closure(table, gens, start):
    """BFS closure inside a finite magma given by its multiplication table.

    table[x, g] is the product "x then g"; gens are element ids; start is the
    identity id. Returns the closure ids in discovery order.
    """
    table = np.asarray(table)
    n = table.shape[0]
    seen = bytearray(n)
    seen[start] = 1
    out = [start]
    pos = 0
    while pos < len(out):
        row = table[out[pos]]
        pos += 1
        for g in gens:
            y = int(row[g])
            if not seen[y]:
                seen[y] = 1
                out.append(y)
    return np.array(out, dtype=np.int64)
