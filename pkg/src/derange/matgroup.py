"""Semilinear groups acting on V = F_q^d.

A group element is a pair (matrix, frob): the map v -> phi^frob(v) * A on row
vectors, phi the p-power automorphism applied entrywise. Applying a then b
gives frob e_a + e_b and matrix phi^(e_b)(A) * B; this composition law matches
permutation composition of the induced action on the q^d packed vectors, so
group enumeration runs through the same closure kernel as permutation groups
and stores elements as action rows. Matrices are reconstructed from rows on
demand (basis images give the matrix; the image of omega*e_0 pins the
Frobenius exponent).
"""

import itertools
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import _kernel, permcore
from .errors import CapExceeded, SpecFileError
from .ffield import (
    FieldCtx,
    coeffs,
    dlog,
    fe_add,
    fe_inv,
    fe_mul,
    fe_neg,
    frobenius,
    from_coeffs,
    make_field,
)
from .results import FAIL, PASS, CheckResult

ORDER_CAP = 2 * 10**7
POINTS_CEILING = 1 << 16
AFFINE_CAP = 10**6


# -- matrices over a FieldCtx (tuples of row tuples) --


def mat_identity(ctx, d):
    return tuple(tuple(1 if i == j else 0 for j in range(d)) for i in range(d))


def mat_mul(ctx, a, b):
    d = len(a)
    out = []
    for i in range(d):
        row = []
        for j in range(d):
            acc = 0
            for k in range(d):
                acc = fe_add(ctx, acc, fe_mul(ctx, a[i][k], b[k][j]))
            row.append(acc)
        out.append(tuple(row))
    return tuple(out)


def mat_frob(ctx, a, e):
    if e == 0:
        return a
    return tuple(tuple(frobenius(ctx, x, e) for x in row) for row in a)


def mat_det(ctx, a):
    d = len(a)
    m = [list(row) for row in a]
    det = 1
    for col in range(d):
        piv = next((r for r in range(col, d) if m[r][col] != 0), None)
        if piv is None:
            return 0
        if piv != col:
            m[col], m[piv] = m[piv], m[col]
            det = fe_neg(ctx, det)
        det = fe_mul(ctx, det, m[col][col])
        inv = fe_inv(ctx, m[col][col])
        for r in range(col + 1, d):
            if m[r][col]:
                c = fe_mul(ctx, m[r][col], inv)
                for j in range(col, d):
                    m[r][j] = fe_add(ctx, m[r][j], fe_neg(ctx, fe_mul(ctx, c, m[col][j])))
    return det


def mat_inv(ctx, a):
    d = len(a)
    m = [list(row) + [1 if i == j else 0 for j in range(d)] for i, row in enumerate(a)]
    for col in range(d):
        piv = next((r for r in range(col, d) if m[r][col] != 0), None)
        if piv is None:
            raise ZeroDivisionError("singular matrix")
        m[col], m[piv] = m[piv], m[col]
        inv = fe_inv(ctx, m[col][col])
        m[col] = [fe_mul(ctx, x, inv) for x in m[col]]
        for r in range(d):
            if r != col and m[r][col]:
                c = m[r][col]
                m[r] = [fe_add(ctx, x, fe_neg(ctx, fe_mul(ctx, c, y))) for x, y in zip(m[r], m[col])]
    return tuple(tuple(row[d:]) for row in m)


# -- vectors packed as ints in [0, q^d), radix q --


def pack_vec(ctx, vec):
    x = 0
    for v in reversed(vec):
        x = x * ctx.q + v
    return x


def unpack_vec(ctx, d, point):
    out = []
    for _ in range(d):
        point, r = divmod(point, ctx.q)
        out.append(r)
    return tuple(out)


@dataclass(frozen=True)
class SemilinearMap:
    ctx: FieldCtx
    matrix: tuple
    frob: int = 0

    def __post_init__(self):
        d = len(self.matrix)
        if any(len(row) != d for row in self.matrix):
            raise ValueError("matrix must be square")
        if not 0 <= self.frob < self.ctx.f:
            raise ValueError(f"frob exponent {self.frob} out of [0, {self.ctx.f})")
        if mat_det(self.ctx, self.matrix) == 0:
            raise ValueError("matrix is singular")

    @property
    def dim(self):
        return len(self.matrix)


def identity_map(ctx, d):
    return SemilinearMap(ctx, mat_identity(ctx, d), 0)


def compose(a, b):
    """Apply a, then b."""
    if a.ctx is not b.ctx or a.dim != b.dim:
        raise ValueError("composition needs matching field and dimension")
    ctx = a.ctx
    return SemilinearMap(
        ctx, mat_mul(ctx, mat_frob(ctx, a.matrix, b.frob), b.matrix), (a.frob + b.frob) % ctx.f
    )


def invert(g):
    ctx = g.ctx
    e = (-g.frob) % ctx.f
    return SemilinearMap(ctx, mat_frob(ctx, mat_inv(ctx, g.matrix), e), e)


def apply_map(g, vec):
    ctx = g.ctx
    d = g.dim
    tv = tuple(frobenius(ctx, v, g.frob) for v in vec)
    return tuple(
        _dotcol(ctx, tv, g.matrix, j, d)
        for j in range(d)
    )


def _dotcol(ctx, tv, mat, j, d):
    acc = 0
    for i in range(d):
        acc = fe_add(ctx, acc, fe_mul(ctx, tv[i], mat[i][j]))
    return acc


def action_row(g):
    """The permutation of the q^d packed vectors induced by g."""
    ctx = g.ctx
    d = g.dim
    n = ctx.q**d
    dtype = _kernel.point_dtype(n)
    if d == 1 and ctx.exp is not None:
        row = np.zeros(n, dtype=dtype)
        a = g.matrix[0][0]
        exp_arr = np.asarray(ctx.exp, dtype=np.int64)
        ks = (np.arange(ctx.q - 1, dtype=np.int64) * ctx.frob_pow[g.frob] + dlog(ctx, a)) % (
            ctx.q - 1
        )
        row[exp_arr] = exp_arr[ks].astype(dtype)
        return row
    row = np.empty(n, dtype=dtype)
    for pt in range(n):
        row[pt] = pack_vec(ctx, apply_map(g, unpack_vec(ctx, d, pt)))
    return row


@dataclass
class MatGroup:
    ctx: FieldCtx
    d: int
    generators: list
    elements: np.ndarray | None = field(default=None, repr=False)
    order: int | None = None

    @classmethod
    def from_gens(cls, ctx, d, gens):
        if not gens:
            raise ValueError("generator list must be nonempty")
        for g in gens:
            if g.ctx is not ctx and g.ctx != ctx:
                raise ValueError("generator field mismatch")
            if g.dim != d:
                raise ValueError("generator dimension mismatch")
        return cls(ctx=ctx, d=d, generators=list(gens))

    @property
    def n_points(self):
        return self.ctx.q**self.d

    @property
    def populated(self):
        return self.elements is not None

    def _need_elements(self):
        if self.elements is None:
            raise ValueError("group not enumerated; call enumerate_mat first")

    def fixed_counts(self):
        """pi(g) for each element: the number of vectors it fixes."""
        self._need_elements()
        return _kernel.fixed_counts(self.elements)

    def element(self, i):
        """Reconstruct (matrix, frob) from the stored action row."""
        self._need_elements()
        row = self.elements[i]
        ctx, d = self.ctx, self.d
        mat = tuple(
            unpack_vec(ctx, d, int(row[pack_vec(ctx, tuple(1 if k == j else 0 for k in range(d)))]))
            for j in range(d)
        )
        if ctx.f == 1:
            return SemilinearMap(ctx, mat, 0)
        e0 = tuple(ctx.omega if k == 0 else 0 for k in range(d))
        w = unpack_vec(ctx, d, int(row[pack_vec(ctx, e0)]))
        c = next(j for j in range(d) if mat[0][j] != 0)
        val = fe_mul(ctx, w[c], fe_inv(ctx, mat[0][c]))
        e = ctx.frob_pow.index(dlog(ctx, val))
        return SemilinearMap(ctx, mat, e)

    def semilinear_elements(self):
        self._need_elements()
        return [self.element(i) for i in range(self.order)]


def enumerate_mat(group, cap=ORDER_CAP):
    """Populate the element table (action rows, BFS order, identity first)."""
    if group.elements is not None:
        return group
    if group.n_points > POINTS_CEILING:
        raise ValueError(f"action on {group.n_points} vectors exceeds ceiling {POINTS_CEILING}")
    rows = sorted(
        (action_row(g) for g in group.generators), key=lambda r: r.tobytes()
    )
    elems, complete = _kernel.perm_closure(np.stack(rows), cap)
    if not complete:
        raise CapExceeded(len(elems), cap)
    group.elements = elems
    group.order = len(elems)
    return group


def fixed_vector_count(g):
    """Number of v with phi^e(v) A = v, via the induced prime-field system.

    The fixed set is a subspace over Z_p of the df-dimensional prime-field
    model, so the count is always a power of p.
    """
    ctx = g.ctx
    d = g.dim
    p, f = ctx.p, ctx.f
    dim = d * f
    cols = []
    for i in range(d):
        for j in range(f):
            vec = tuple(p**j if k == i else 0 for k in range(d))
            img = apply_map(g, vec)
            digits = []
            for comp in img:
                digits.extend(coeffs(ctx, comp))
            cols.append(digits)
    # rank of (M - I) over Z_p; columns indexed by source basis vectors
    m = [[(cols[c][r] - (1 if c == r else 0)) % p for c in range(dim)] for r in range(dim)]
    rank = 0
    for col in range(dim):
        piv = next((r for r in range(rank, dim) if m[r][col]), None)
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        inv = pow(m[rank][col], -1, p)
        m[rank] = [(x * inv) % p for x in m[rank]]
        for r in range(dim):
            if r != rank and m[r][col]:
                c2 = m[r][col]
                m[r] = [(x - c2 * y) % p for x, y in zip(m[r], m[rank])]
        rank += 1
    return p ** (dim - rank)


@dataclass(frozen=True)
class AffineStats:
    """Exact statistics of G acting on V and of the affine group V x| G."""

    alpha: Fraction
    eta: Fraction
    delta_affine: Fraction
    a_index: int
    semiregular_nonzero: bool


def affine_stats(group):
    group._need_elements()
    pi = group.fixed_counts()
    order = group.order
    alpha = Fraction(int((pi > 1).sum()), order)
    eta = Fraction(0)
    vals, mult = np.unique(pi, return_counts=True)
    for v, m in zip(vals, mult):
        eta += Fraction(int(m), int(v))
    eta /= order
    special = (pi > 1).astype(np.uint8)
    mask, _gens = _kernel.subgroup_closure(group.elements, special, order)
    a_order = int(mask.sum())
    return AffineStats(
        alpha=alpha,
        eta=eta,
        delta_affine=1 - eta,
        a_index=order // a_order,
        semiregular_nonzero=int((pi > 1).sum()) == 1,
    )


def is_linear(group):
    return all(g.frob == 0 for g in group.generators)


def sandwich_check(stats, q_effective, check_id="sandwich", witness=None):
    """(1 - 1/q_eff) * alpha <= delta <= alpha, the harmonic-mean squeeze."""
    lo = (1 - Fraction(1, q_effective)) * stats.alpha
    ok = lo <= stats.delta_affine <= stats.alpha
    w = dict(witness or {})
    w.update(q_effective=q_effective, alpha=str(stats.alpha), delta=str(stats.delta_affine))
    return CheckResult(
        check_id=check_id,
        anchor="(1 - 1/q) * alpha(G) <= delta(V x| G) <= alpha(G)",
        status=PASS if ok else FAIL,
        lhs=lo,
        rhs=stats.delta_affine,
        witness=w,
    )


def translation_rows(ctx, d):
    """Action rows of translation by each prime-field basis vector of V."""
    q, p, f = ctx.q, ctx.p, ctx.f
    n = q**d
    dtype = _kernel.point_dtype(n)
    pts = np.arange(n, dtype=np.int64)
    rows = []
    for i in range(d):
        for j in range(f):
            k = i * f + j  # radix-p digit position inside the packed point
            if p == 2:
                row = pts ^ (1 << k)
            else:
                dig = (pts // p**k) % p
                row = pts + (((dig + 1) % p) - dig) * p**k
            rows.append(row.astype(dtype))
    return rows


def affine_to_perm(group, cap=AFFINE_CAP):
    """The affine permutation group V x| G on the q^d packed vectors.

    Built from scratch (translations plus the G generators) and enumerated by
    plain closure; this is the independent brute-force side of every identity
    the harness checks against affine_stats.
    """
    group._need_elements()
    n = group.n_points
    if n > POINTS_CEILING:
        raise ValueError(f"{n} points exceeds ceiling {POINTS_CEILING}")
    if n * group.order > cap:
        raise CapExceeded(n * group.order, cap)
    gens = translation_rows(group.ctx, group.d) + [action_row(g) for g in group.generators]
    perm = permcore.PermGroup.from_gens(gens, n)
    permcore.enumerate_group(perm, cap=cap)
    assert perm.order == n * group.order, "affine closure must have order |V| * |G|"
    return perm


def a_subgroup_index_identity(group, cap=AFFINE_CAP):
    """Check |V x| G : D| = |G : A(G)| with both sides computed independently."""
    stats = affine_stats(group)
    perm = affine_to_perm(group, cap)
    _dsub, d_index = permcore.derangement_subgroup(perm)
    ok = d_index == stats.a_index
    return CheckResult(
        check_id="subgroup-index-identity",
        anchor="|V x| G : <derangements>| = |G : <eigenvalue-1 elements>|",
        status=PASS if ok else FAIL,
        lhs=d_index,
        rhs=stats.a_index,
        witness={"order": group.order, "points": group.n_points},
    )


def _rref_subspaces(ctx, d, k):
    """All k-dimensional subspaces of F_q^d as reduced row-echelon bases."""
    q = ctx.q
    for pivots in itertools.combinations(range(d), k):
        free_pos = [
            (i, j)
            for i in range(k)
            for j in range(d)
            if j > pivots[i] and j not in pivots
        ]
        for assignment in itertools.product(range(q), repeat=len(free_pos)):
            basis = [[0] * d for _ in range(k)]
            for i, pj in enumerate(pivots):
                basis[i][pj] = 1
            for (i, j), v in zip(free_pos, assignment):
                basis[i][j] = v
            yield pivots, [tuple(row) for row in basis]


def _in_rowspace(ctx, pivots, basis, vec):
    v = list(vec)
    for i, pj in enumerate(pivots):
        if v[pj]:
            c = v[pj]
            v = [fe_add(ctx, x, fe_neg(ctx, fe_mul(ctx, c, y))) for x, y in zip(v, basis[i])]
    return all(x == 0 for x in v)


def subspace_count(ctx, d):
    q = ctx.q
    total = 0
    for k in range(1, d):
        num = 1
        for i in range(k):
            num = num * (q ** (d - i) - 1) // (q ** (i + 1) - 1)
        total += num
    return total


def is_irreducible(group):
    """No proper nonzero invariant F_q-subspace, by exhaustive echelon scan."""
    if not is_linear(group):
        raise ValueError("irreducibility test expects a linear group (frob = 0)")
    ctx, d = group.ctx, group.d
    if subspace_count(ctx, d) > 10**6:
        raise ValueError("too many subspaces to scan")
    for k in range(1, d):
        for pivots, basis in _rref_subspaces(ctx, d, k):
            if all(
                _in_rowspace(ctx, pivots, basis, apply_map(g, b))
                for g in group.generators
                for b in basis
            ):
                return False
    return True


def coset_eigenvalue_proportion(base, coset_rep, lam):
    """Proportion of the coset base * rep with eigenvalue lam (d = 2, linear)."""
    if base.d != 2 or not is_linear(base):
        raise ValueError("coset eigenvalue scan is for linear groups in dimension 2")
    base._need_elements()
    ctx = base.ctx
    r = coset_rep.matrix
    count = 0
    for i in range(base.order):
        m = mat_mul(ctx, base.element(i).matrix, r)
        tr = fe_add(ctx, m[0][0], m[1][1])
        det = fe_add(
            ctx, fe_mul(ctx, m[0][0], m[1][1]), fe_neg(ctx, fe_mul(ctx, m[0][1], m[1][0]))
        )
        # lam^2 - tr*lam + det = 0 <=> lam is an eigenvalue
        val = fe_add(
            ctx,
            fe_add(ctx, fe_mul(ctx, lam, lam), fe_neg(ctx, fe_mul(ctx, tr, lam))),
            det,
        )
        if val == 0:
            count += 1
    return Fraction(count, base.order)


# -- group-spec files --


def format_matgroup_file(group, header=None):
    lines = []
    if header:
        lines.append(f"# {header}")
    lines.append(f"field {group.ctx.p} {group.ctx.f}")
    lines.append(f"dim {group.d}")
    for g in group.generators:
        flat = " ".join(str(x) for row in g.matrix for x in row)
        lines.append(f"gen {flat} frob {g.frob}")
    return "\n".join(lines) + "\n"


def parse_matgroup_file(text):
    ctx = None
    d = None
    gens = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if ctx is None:
            if parts[0] != "field" or len(parts) != 3:
                raise SpecFileError("expected 'field <p> <f>' first", line=lineno, column=1)
            try:
                ctx = make_field(int(parts[1]), int(parts[2]))
            except ValueError as exc:
                raise SpecFileError(str(exc), line=lineno, column=1) from exc
            continue
        if d is None:
            if parts[0] != "dim" or len(parts) != 2 or not parts[1].isdigit():
                raise SpecFileError("expected 'dim <d>'", line=lineno, column=1)
            d = int(parts[1])
            continue
        if parts[0] != "gen" or len(parts) != d * d + 3 or parts[-2] != "frob":
            raise SpecFileError(
                f"expected 'gen <{d * d} entries> frob <e>'", line=lineno, column=1
            )
        try:
            entries = [int(x) for x in parts[1 : 1 + d * d]]
            frob = int(parts[-1])
        except ValueError as exc:
            raise SpecFileError("non-integer entry", line=lineno, column=1) from exc
        if any(not 0 <= x < ctx.q for x in entries):
            raise SpecFileError(f"entry out of range [0, {ctx.q})", line=lineno, column=1)
        mat = tuple(tuple(entries[i * d : (i + 1) * d]) for i in range(d))
        try:
            gens.append(SemilinearMap(ctx, mat, frob))
        except ValueError as exc:
            raise SpecFileError(str(exc), line=lineno, column=1) from exc
    if ctx is None or d is None:
        raise SpecFileError("missing field/dim header", line=1, column=1)
    if not gens:
        gens = [identity_map(ctx, d)]
    return MatGroup.from_gens(ctx, d, gens)
