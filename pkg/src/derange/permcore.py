"""Permutation-group engine.

Groups are generator lists plus, after enumeration, the full element table as
a numpy array of image rows (one row per element, identity first, BFS order).
The product "a then b" is b[a]. Everything downstream (derangement counts,
Frobenius tests, block quotients) scans that table; nothing uses stabilizer
chains.
"""

import re
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import _kernel
from .errors import CapExceeded, NotTransitive, SpecFileError

DEGREE_CEILING = 10**5
ORDER_CAP = 2 * 10**7


def as_perm(images, n=None):
    """Validate and normalize a permutation given as an image sequence."""
    arr = np.asarray(images, dtype=np.int64)
    if n is None:
        n = len(arr)
    if len(arr) != n:
        raise ValueError(f"permutation of length {len(arr)}, expected {n}")
    if n and (arr.min() < 0 or arr.max() >= n or len(np.unique(arr)) != n):
        raise ValueError("image sequence is not a permutation")
    return arr.astype(_kernel.point_dtype(n))


def identity_perm(n):
    return np.arange(n, dtype=_kernel.point_dtype(n))


def compose(a, b):
    """Apply a, then b."""
    return b[a]


def inverse(a):
    inv = np.empty_like(a)
    inv[a] = np.arange(len(a), dtype=a.dtype)
    return inv


def fixed_point_count(g):
    g = np.asarray(g)
    return int((g == np.arange(len(g), dtype=g.dtype)).sum())


def is_derangement(g):
    return fixed_point_count(g) == 0


def perm_from_cycles(cycles, n):
    img = list(range(n))
    for cyc in cycles:
        for i, a in enumerate(cyc):
            img[a] = cyc[(i + 1) % len(cyc)]
    return as_perm(img, n)


def cycles_str(perm):
    """Cycle-notation rendering, fixed points omitted; '()' for the identity."""
    perm = np.asarray(perm)
    seen = set()
    parts = []
    for i in range(len(perm)):
        if i in seen or perm[i] == i:
            continue
        cyc = [i]
        j = int(perm[i])
        while j != i:
            seen.add(j)
            cyc.append(j)
            j = int(perm[j])
        parts.append("(" + " ".join(map(str, cyc)) + ")")
    return "".join(parts) if parts else "()"


@dataclass
class PermGroup:
    degree: int
    generators: list
    elements: np.ndarray | None = field(default=None, repr=False)
    order: int | None = None

    @classmethod
    def from_gens(cls, gens, degree=None):
        gens = [np.asarray(g) for g in gens]
        if not gens:
            raise ValueError("generator list must be nonempty")
        if degree is None:
            degree = len(gens[0])
        if degree > DEGREE_CEILING:
            raise ValueError(f"degree {degree} exceeds ceiling {DEGREE_CEILING}")
        return cls(degree=degree, generators=[as_perm(g, degree) for g in gens])

    @property
    def populated(self):
        return self.elements is not None

    def fixed_counts(self):
        self._need_elements()
        return _kernel.fixed_counts(self.elements)

    def _need_elements(self):
        if self.elements is None:
            raise ValueError("group not enumerated; call enumerate_group first")


def enumerate_group(group, cap=ORDER_CAP):
    """Populate the element table by BFS closure over the sorted generators."""
    if group.elements is not None:
        return group
    gens = sorted(group.generators, key=lambda g: tuple(int(x) for x in g))
    stack = np.stack(gens) if gens else np.zeros((0, group.degree), dtype=_kernel.point_dtype(group.degree))
    elems, complete = _kernel.perm_closure(stack, cap)
    if not complete:
        raise CapExceeded(len(elems), cap)
    group.elements = elems
    group.order = len(elems)
    return group


def orbits(group):
    """Orbit partition on points, blocks sorted, listed by smallest point."""
    n = group.degree
    seen = bytearray(n)
    out = []
    for start in range(n):
        if seen[start]:
            continue
        orbit = [start]
        seen[start] = 1
        pos = 0
        while pos < len(orbit):
            x = orbit[pos]
            pos += 1
            for g in group.generators:
                y = int(g[x])
                if not seen[y]:
                    seen[y] = 1
                    orbit.append(y)
        out.append(sorted(orbit))
    return out


def is_transitive(group):
    return len(orbits(group)) == 1


def delta(group):
    """Exact derangement proportion; defined for transitive actions only."""
    if not is_transitive(group):
        raise NotTransitive("delta is defined here only for transitive actions")
    group._need_elements()
    fc = group.fixed_counts()
    return Fraction(int((fc == 0).sum()), group.order)


@dataclass(frozen=True)
class BlockSystem:
    block_of: tuple
    block_count: int
    block_size: int


def minimal_blocks(group, seed_pair):
    """Finest invariant block system with the seed pair inside one block.

    Union-find refinement: joining two points forces their generator images
    to join, until the partition is invariant.
    """
    if not is_transitive(group):
        raise NotTransitive("block systems are computed for transitive groups")
    n = group.degree
    parent = list(range(n))

    def find(x):
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return root

    a, b = seed_pair
    queue = [(a, b)]
    ra, rb = find(a), find(b)
    if ra != rb:
        parent[rb] = ra
    while queue:
        x, y = queue.pop()
        for g in group.generators:
            u, v = int(g[x]), int(g[y])
            ru, rv = find(u), find(v)
            if ru != rv:
                parent[rv] = ru
                queue.append((u, v))
    rep_id = {}
    block_of = []
    for x in range(n):
        r = find(x)
        if r not in rep_id:
            rep_id[r] = len(rep_id)
        block_of.append(rep_id[r])
    t = len(rep_id)
    assert n % t == 0, "invariant partition of a transitive group must have equal blocks"
    return BlockSystem(tuple(block_of), t, n // t)


def is_primitive(group):
    """No proper invariant block system for any seed pair (0, b)."""
    if not is_transitive(group):
        raise NotTransitive("primitivity is defined for transitive groups")
    for b in range(1, group.degree):
        if minimal_blocks(group, (0, b)).block_count != 1:
            return False
    return True


def validate_blocks(group, blocks):
    n = group.degree
    if len(blocks.block_of) != n or blocks.block_count * blocks.block_size != n:
        raise ValueError("block system does not partition the points evenly")
    for g in group.generators:
        img = {}
        for x in range(n):
            bx, bimg = blocks.block_of[x], blocks.block_of[int(g[x])]
            if img.setdefault(bx, bimg) != bimg:
                raise ValueError("partition is not generator-invariant")


def block_quotient(group, blocks):
    """Induced action on the blocks (validated), as a new group."""
    validate_blocks(group, blocks)
    t = blocks.block_count
    rep = [None] * t
    for x in range(group.degree):
        bx = blocks.block_of[x]
        if rep[bx] is None:
            rep[bx] = x
    qgens = []
    for g in group.generators:
        qgens.append([blocks.block_of[int(g[rep[i]])] for i in range(t)])
    return PermGroup.from_gens(qgens, t)


def is_frobenius(group):
    """Some nontrivial element fixes a point; none fixes two."""
    if not is_transitive(group):
        raise NotTransitive("the Frobenius property is defined for transitive groups")
    group._need_elements()
    fc = group.fixed_counts()
    nontrivial = fc[1:] if group.order > 1 else fc[:0]
    return bool((nontrivial >= 1).any()) and bool((nontrivial <= 1).all())


def is_semiregular(group, domain=None):
    """Only the identity fixes a point of the domain (default: all points)."""
    group._need_elements()
    elems = group.elements
    if domain is None:
        fc = group.fixed_counts()
        return bool((fc[1:] == 0).all())
    dom = np.asarray(sorted(domain), dtype=np.int64)
    sub = elems[:, dom]
    hits = (sub == dom.astype(sub.dtype)).any(axis=1)
    return not bool(hits[1:].any())


def derangement_subgroup(group, cap=None):
    """Subgroup generated by all derangements, and its index.

    The closure is taken inside the enumerated element table, so the cap can
    never bind; the argument is accepted for interface uniformity.
    """
    group._need_elements()
    fc = group.fixed_counts()
    special = (fc == 0).astype(np.uint8)
    mask, gen_idx = _kernel.subgroup_closure(group.elements, special, cap or group.order)
    d_order = int(mask.sum())
    d_elems = group.elements[mask.astype(bool)]
    gens = [group.elements[i] for i in gen_idx] or [identity_perm(group.degree)]
    sub = PermGroup(degree=group.degree, generators=gens, elements=d_elems, order=d_order)
    return sub, group.order // d_order


def eigenlike_subgroup(group, special_mask):
    """Subgroup generated by the marked elements, and its index (same engine)."""
    group._need_elements()
    mask, gen_idx = _kernel.subgroup_closure(
        group.elements, np.asarray(special_mask, dtype=np.uint8), group.order
    )
    return int(mask.sum()), [int(i) for i in gen_idx]


# -- group-spec files --

_CYCLE_TOKEN = re.compile(r"\(\s*(\d+(?:[\s,]+\d+)*)?\s*\)")


def parse_group_file(text):
    """Parse the structured text format: a degree line, then cycle rows."""
    degree = None
    gens = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if degree is None:
            m = re.fullmatch(r"degree\s+(\d+)", line)
            if not m:
                raise SpecFileError("expected 'degree <n>' before generators", line=lineno, column=1)
            degree = int(m.group(1))
            if degree < 1 or degree > DEGREE_CEILING:
                raise SpecFileError(f"degree {degree} out of range", line=lineno, column=1)
            continue
        pos = 0
        cycles = []
        while pos < len(line):
            if line[pos].isspace():
                pos += 1
                continue
            m = _CYCLE_TOKEN.match(line, pos)
            if not m:
                raise SpecFileError("malformed cycle", line=lineno, column=pos + 1)
            body = m.group(1)
            if body:
                pts = [int(t) for t in re.split(r"[\s,]+", body.strip())]
                for p in pts:
                    if p >= degree:
                        raise SpecFileError(
                            f"point {p} out of range for degree {degree}",
                            line=lineno,
                            column=pos + 1,
                        )
                if len(set(pts)) != len(pts):
                    raise SpecFileError("repeated point inside a cycle", line=lineno, column=pos + 1)
                cycles.append(pts)
            pos = m.end()
        flat = [p for c in cycles for p in c]
        if len(set(flat)) != len(flat):
            raise SpecFileError("cycles of one generator must be disjoint", line=lineno, column=1)
        gens.append(perm_from_cycles(cycles, degree))
    if degree is None:
        raise SpecFileError("empty group-spec file", line=1, column=1)
    if not gens:
        gens = [identity_perm(degree)]
    return PermGroup.from_gens(gens, degree)


def format_group_file(group, header=None):
    lines = []
    if header:
        lines.append(f"# {header}")
    lines.append(f"degree {group.degree}")
    for g in group.generators:
        lines.append(cycles_str(g))
    return "\n".join(lines) + "\n"


def alternating_gens(m):
    """Standard generators of the even permutations of m >= 3 points."""
    if m < 3:
        raise ValueError("need m >= 3")
    three = perm_from_cycles([[0, 1, 2]], m)
    if m % 2 == 1:
        big = perm_from_cycles([list(range(m))], m)
    else:
        big = perm_from_cycles([list(range(1, m))], m)
    return [three, big]
