"""Constructors for the named extremal families, with their predicted statistics.

Each constructor returns a group (matrix or one-dimensional semilinear form)
plus a FamilySpec carrying the exact predicted values the harness confirms.
Classical groups are built from standard generator sets and certified against
the classical order formulas; the 2.A5 subgroup of SL_2(q) is found by a
bounded search certified by order + perfectness (the unique perfect group of
order 120).
"""

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import _kernel, gammal1, matgroup, numtheory, permcore
from .errors import ConstructionError
from .ffield import fe_add, fe_inv, fe_mul, fe_neg, fe_pow, frobenius, make_field
from .matgroup import MatGroup, SemilinearMap, mat_identity, mat_mul
from .results import FAIL, PASS, CheckResult

FAMILY_IDS = (
    "frobenius_affine",
    "sharp_gammal1",
    "sl2_5_z",
    "q8_normalizer_member",
    "sl2q",
    "extraspecial2",
    "alt_deleted",
    "classical_natural",
)


@dataclass(frozen=True)
class FamilySpec:
    family: str
    params: tuple
    prediction: dict | None = None

    def __post_init__(self):
        if self.family not in FAMILY_IDS:
            raise ValueError(f"unknown family {self.family}")


def _field_of(n):
    fac = numtheory.factorize(n)
    if len(fac) != 1:
        raise ValueError(f"{n} is not a prime power")
    (p, f), = fac.items()
    return make_field(p, f)


# -- affine Frobenius family: F_n x| <omega^a> --


def frobenius_affine(n, a):
    """Scalar subgroup of index a in GL_1(n); the affine image has delta = a/n."""
    ctx = _field_of(n)
    if (n - 1) % a != 0:
        raise ValueError(f"a = {a} must divide n - 1 = {n - 1}")
    gen = SemilinearMap(ctx, ((ctx.exp[a % (n - 1)] if n > 2 else 1,),), 0)
    group = MatGroup.from_gens(ctx, 1, [gen])
    spec = FamilySpec(
        family="frobenius_affine",
        params=(n, a),
        prediction={
            "delta": Fraction(a, n),
            "alpha": Fraction(a, n - 1) if a < n - 1 else Fraction(1),
            "order": (n - 1) // a,
            "affine_frobenius": a < n - 1 and (n - 1) // a > 1,
            "semiregular_nonzero": True,
        },
    )
    return group, spec


# -- sharp semilinear family: GL_1(q) x| <square-root power map> --


def sharp_gammal1(q):
    ctx = _field_of(q)
    if ctx.f % 2:
        raise ValueError("needs q a square (f even)")
    group = gammal1.sharp_group(ctx)
    spec = FamilySpec(
        family="sharp_gammal1",
        params=(q,),
        prediction={"alpha": numtheory.bound_h(q), "delta": numtheory.bound_g(q)},
    )
    return group, spec


# -- 2.A5 with scalars inside GL_2(q) --

_SL25_ORDERS = 120


def _mat2(ctx, rows):
    return tuple(tuple(x % ctx.q for x in r) for r in rows)


def _mat2_mul(ctx, a, b):
    return (
        (
            fe_add(ctx, fe_mul(ctx, a[0][0], b[0][0]), fe_mul(ctx, a[0][1], b[1][0])),
            fe_add(ctx, fe_mul(ctx, a[0][0], b[0][1]), fe_mul(ctx, a[0][1], b[1][1])),
        ),
        (
            fe_add(ctx, fe_mul(ctx, a[1][0], b[0][0]), fe_mul(ctx, a[1][1], b[1][0])),
            fe_add(ctx, fe_mul(ctx, a[1][0], b[0][1]), fe_mul(ctx, a[1][1], b[1][1])),
        ),
    )


def _closure_cap(ctx, gens, cap):
    ident = mat_identity(ctx, 2)
    seen = {ident}
    queue = [ident]
    pos = 0
    while pos < len(queue):
        cur = queue[pos]
        pos += 1
        for g in gens:
            new = _mat2_mul(ctx, cur, g)
            if new not in seen:
                if len(seen) >= cap:
                    return None
                seen.add(new)
                queue.append(new)
    return queue


def _is_perfect_set(ctx, elems):
    """Commutator certificate: <[g, h]> is everything iff the group is perfect."""
    index = {m: i for i, m in enumerate(elems)}
    inv = {}
    for m in elems:
        # order-based inverse: m^(k-1) where m^k = 1
        acc = m
        prev = mat_identity(ctx, 2)
        while acc != mat_identity(ctx, 2):
            prev = acc
            acc = _mat2_mul(ctx, acc, m)
        inv[m] = prev if m != mat_identity(ctx, 2) else m
    comms = set()
    for g in elems:
        for h in elems:
            c = _mat2_mul(ctx, _mat2_mul(ctx, g, h), _mat2_mul(ctx, inv[g], inv[h]))
            comms.add(c)
    if 2 * len(comms) > len(elems):
        return True
    # close the commutator set
    members = {mat_identity(ctx, 2)}
    queue = [mat_identity(ctx, 2)]
    pos = 0
    comms = sorted(comms, key=lambda m: tuple(itertools.chain(*m)))
    while pos < len(queue):
        cur = queue[pos]
        pos += 1
        for g in comms:
            new = _mat2_mul(ctx, cur, g)
            if new not in members:
                members.add(new)
                queue.append(new)
    return len(members) == len(elems)


def _find_sl25(ctx):
    """Deterministic bounded search for a 2.A5 subgroup of SL_2(q).

    One generator is the companion matrix of x^2 - phi*x + 1 (order 10, phi
    the golden ratio in F_q); the partner of order 4 (trace 0, det 1) is
    scanned in lex order. Certificate: closure of order 120 that is perfect.
    """
    q = ctx.q
    five = 5 % ctx.p
    sqrt5 = next((x for x in range(q) if fe_mul(ctx, x, x) == five), None)
    if sqrt5 is None:
        raise ConstructionError(f"5 has no square root in F_{q}")
    phi = fe_mul(ctx, fe_add(ctx, 1, sqrt5), fe_inv(ctx, 2 % ctx.p))
    a_mat = _mat2(ctx, ((0, 1), (fe_neg(ctx, 1), phi)))
    good_traces = {
        0,
        1,
        2 % ctx.p,
        fe_neg(ctx, 1),
        fe_neg(ctx, 2 % ctx.p),
        phi,
        fe_neg(ctx, phi),
        fe_add(ctx, phi, fe_neg(ctx, 1)),
        fe_add(ctx, 1, fe_neg(ctx, phi)),
    }
    neg1 = fe_neg(ctx, 1)
    for a in range(q):
        aa = fe_mul(ctx, a, a)
        bc = fe_add(ctx, neg1, fe_neg(ctx, aa))  # need b*c = -1 - a^2
        for b in range(q):
            if b == 0:
                if bc != 0:
                    continue
                c_candidates = range(q)
            else:
                c_candidates = (fe_mul(ctx, bc, fe_inv(ctx, b)),)
            for c in c_candidates:
                b_mat = ((a, b), (c, fe_neg(ctx, a)))
                prod = _mat2_mul(ctx, a_mat, b_mat)
                if fe_add(ctx, prod[0][0], prod[1][1]) not in good_traces:
                    continue
                elems = _closure_cap(ctx, [a_mat, b_mat], _SL25_ORDERS + 1)
                if elems is not None and len(elems) == _SL25_ORDERS and _is_perfect_set(ctx, elems):
                    return a_mat, b_mat
    raise ConstructionError(f"no 2.A5 partner found in SL_2({q})")


def sl2_5_z(q, with_full_scalars=True):
    """Z * 2.A5 inside GL_2(q), for q = +-1 mod 10."""
    if q % 10 not in (1, 9):
        raise ValueError(f"q = {q} must be +-1 mod 10")
    ctx = _field_of(q)
    a_mat, b_mat = _find_sl25(ctx)
    gens = [SemilinearMap(ctx, a_mat, 0), SemilinearMap(ctx, b_mat, 0)]
    if with_full_scalars:
        w = ctx.omega
        gens.append(SemilinearMap(ctx, ((w, 0), (0, w)), 0))
    group = MatGroup.from_gens(ctx, 2, gens)
    prediction = None
    if with_full_scalars:
        prediction = {"order": 60 * (q - 1)}
        if q % 60 == 59:
            prediction.update(
                semiregular_nonzero=True,
                alpha=Fraction(1, 60 * (q - 1)),
                delta=Fraction(q + 1, 60 * q * q),
            )
    else:
        prediction = {"order": 120}
    return group, FamilySpec(family="sl2_5_z", params=(q, with_full_scalars), prediction=prediction)


# -- quaternion group and its scalar extensions in GL_2(q) --


def q8_in_gl2(q):
    ctx = _field_of(q)
    if ctx.p == 2:
        raise ValueError("needs odd q")
    neg1 = fe_neg(ctx, 1)
    i_mat = ((0, 1), (neg1, 0))
    pair = next(
        (a, b)
        for a in range(q)
        for b in range(q)
        if fe_add(ctx, fe_mul(ctx, a, a), fe_mul(ctx, b, b)) == neg1
    )
    a, b = pair
    j_mat = ((a, b), (b, fe_neg(ctx, a)))
    return MatGroup.from_gens(ctx, 2, [SemilinearMap(ctx, i_mat, 0), SemilinearMap(ctx, j_mat, 0)])


def q8_normalizer_member(q, with_scalars=True):
    group = q8_in_gl2(q)
    if with_scalars:
        ctx = group.ctx
        w = ctx.omega
        group = MatGroup.from_gens(
            ctx, 2, group.generators + [SemilinearMap(ctx, ((w, 0), (0, w)), 0)]
        )
    return group, FamilySpec(family="q8_normalizer_member", params=(q, with_scalars))


# -- classical groups on their natural modules --


def order_sl(n, s):
    out = s ** (n * (n - 1) // 2)
    for k in range(2, n + 1):
        out *= s**k - 1
    return out


def order_sp(n, s):
    if n % 2:
        raise ValueError("symplectic dimension must be even")
    m = n // 2
    out = s ** (m * m)
    for i in range(1, m + 1):
        out *= s ** (2 * i) - 1
    return out


def order_su(n, s):
    out = s ** (n * (n - 1) // 2)
    for k in range(2, n + 1):
        out *= s**k - (-1) ** k
    return out


def _elem_mat(ctx, d, i, j, lam):
    m = [[1 if r == c else 0 for c in range(d)] for r in range(d)]
    m[i][j] = lam
    return tuple(tuple(r) for r in m)


def _sl_gens(ctx, n):
    lams = [1] if ctx.q == 2 else [1, ctx.omega]
    gens = []
    for i in range(n - 1):
        for lam in lams:
            gens.append(SemilinearMap(ctx, _elem_mat(ctx, n, i, i + 1, lam), 0))
            gens.append(SemilinearMap(ctx, _elem_mat(ctx, n, i + 1, i, lam), 0))
    return gens


def _symp_form(ctx, n):
    m = n // 2
    j = [[0] * n for _ in range(n)]
    for i in range(m):
        j[i][n - 1 - i] = 1
    for i in range(m, n):
        j[i][n - 1 - i] = fe_neg(ctx, 1)
    return j


def _symp_b(ctx, jmat, x, y):
    acc = 0
    n = len(x)
    for i in range(n):
        if x[i]:
            for k in range(n):
                if jmat[i][k]:
                    acc = fe_add(ctx, acc, fe_mul(ctx, fe_mul(ctx, x[i], jmat[i][k]), y[k]))
    return acc


def _sp_gens(ctx, n):
    jmat = _symp_form(ctx, n)
    vs = []
    for i in range(n):
        vs.append(tuple(1 if k == i else 0 for k in range(n)))
    for i in range(n):
        for j2 in range(i + 1, n):
            vs.append(tuple(1 if k in (i, j2) else 0 for k in range(n)))
    lams = [1] if ctx.q == 2 else [1, ctx.omega]
    gens = []
    for v in vs:
        for lam in lams:
            rows = []
            for i in range(n):
                e = tuple(1 if k == i else 0 for k in range(n))
                coef = fe_mul(ctx, lam, _symp_b(ctx, jmat, e, v))
                rows.append(tuple(fe_add(ctx, e[k], fe_mul(ctx, coef, v[k])) for k in range(n)))
            gens.append(SemilinearMap(ctx, tuple(rows), 0))
    return gens


def _su3_gens(s):
    fac = numtheory.factorize(s)
    (p, k), = fac.items()
    ctx = make_field(p, 2 * k)
    bar = lambda x: frobenius(ctx, x, k)
    gens = []
    for a in (1, ctx.omega):
        for b in range(ctx.q):
            # unitriangular u(a, b): needs b + bar(b) + a^(s+1) = 0
            if fe_add(ctx, fe_add(ctx, b, bar(b)), fe_mul(ctx, a, bar(a))) == 0:
                c = fe_neg(ctx, bar(a))
                gens.append(SemilinearMap(ctx, ((1, a, b), (0, 1, c), (0, 0, 1)), 0))
                break
    neg1 = fe_neg(ctx, 1)
    gens.append(SemilinearMap(ctx, ((0, 0, 1), (0, neg1, 0), (1, 0, 0)), 0))
    # torus element diag(w, w^(s-1), w^(-s)) is unitary with determinant 1
    w = ctx.omega
    mid = fe_pow(ctx, w, s - 1)
    last = fe_pow(ctx, w, -s)
    gens.append(SemilinearMap(ctx, ((w, 0, 0), (0, mid, 0), (0, 0, last)), 0))
    return ctx, gens


def classical_natural(kind, n, s, cap=matgroup.ORDER_CAP):
    """SL_n(s), Sp_n(s) or SU_n(s) on its natural module, order-certified."""
    if kind == "SL":
        ctx = _field_of(s)
        gens = _sl_gens(ctx, n)
        want = order_sl(n, s)
    elif kind == "Sp":
        ctx = _field_of(s)
        gens = _sp_gens(ctx, n)
        want = order_sp(n, s)
    elif kind == "SU":
        if n != 3:
            raise ValueError("unitary construction provided for n = 3")
        ctx, gens = _su3_gens(s)
        want = order_su(n, s)
    else:
        raise ValueError(f"unknown kind {kind!r}")
    if want > cap:
        raise ValueError(f"|{kind}_{n}({s})| = {want} exceeds cap {cap}")
    group = MatGroup.from_gens(ctx, n, gens)
    matgroup.enumerate_mat(group, cap)
    if group.order != want:
        raise ConstructionError(
            f"{kind}_{n}({s}): closure has order {group.order}, formula says {want}"
        )
    return group


def sl2(q):
    return classical_natural("SL", 2, q)


def natural_module_bounds(kind, n, s):
    """Exact alpha against the natural-module sandwich (or the F_2 floor)."""
    group = classical_natural(kind, n, s)
    fc = group.fixed_counts()
    alpha = Fraction(int((fc > 1).sum()), group.order)
    label = f"{kind}{n}({s})"
    if s == 2:
        ok = alpha > Fraction(1, 2)
        return CheckResult(
            check_id=f"natural:{label}",
            anchor="alpha(G, natural module) > 0.5 over F_2",
            status=PASS if ok else FAIL,
            lhs=alpha,
            rhs=Fraction(1, 2),
            witness={"kind": kind, "n": n, "s": s, "order": group.order},
        )
    if kind == "SL":
        lo = (1 - Fraction(1, s - 1)) / (s - 1)
        hi = Fraction(1, s - 1)
    elif kind == "Sp":
        lo = (1 - Fraction(1, s - 1)) / s
        hi = Fraction(1, s - 1)
    else:
        lo = (1 - Fraction(s, s * s - 1)) / (s + 1)
        hi = Fraction(s, s * s - 1)
    ok = lo <= alpha <= hi
    return CheckResult(
        check_id=f"natural:{label}",
        anchor="natural-module sandwich: lower/upper bounds on alpha(G, V)",
        status=PASS if ok else FAIL,
        lhs=alpha,
        rhs=f"[{lo.numerator}/{lo.denominator}, {hi.numerator}/{hi.denominator}]",
        witness={
            "kind": kind,
            "n": n,
            "s": s,
            "order": group.order,
            "lo": f"{lo.numerator}/{lo.denominator}",
            "hi": f"{hi.numerator}/{hi.denominator}",
        },
    )


# -- extraspecial 2-groups in GL_(2^s)(3) --


def _kron(ctx, a, b):
    da, db = len(a), len(b)
    out = []
    for i in range(da):
        for k in range(db):
            row = []
            for j in range(da):
                for l2 in range(db):
                    row.append(fe_mul(ctx, a[i][j], b[k][l2]))
            out.append(tuple(row))
    return tuple(out)


def extraspecial2(s, sign, q=3):
    """Central product of s dihedral/quaternion blocks acting on 2^s points.

    Plus type uses an even number of quaternion blocks (here zero), minus
    type an odd number (here one). The predicted count of nontrivial
    eigenvalue-1 elements is 4^s + 2^s - 2 (plus) or 4^s - 2^s - 2 (minus);
    those elements are exactly the noncentral involutions.
    """
    if sign not in ("+", "-"):
        raise ValueError("sign must be '+' or '-'")
    if 2**s > 16:
        raise ValueError("acting dimension capped at 16")
    ctx = _field_of(q)
    if ctx.p == 2:
        raise ValueError("needs odd q")
    neg1 = fe_neg(ctx, 1)
    rot = ((0, 1), (neg1, 0))
    dihedral = (rot, ((1, 0), (0, neg1)))
    a, b = next(
        (a, b)
        for a in range(q)
        for b in range(q)
        if fe_add(ctx, fe_mul(ctx, a, a), fe_mul(ctx, b, b)) == neg1
    )
    quaternion = (rot, ((a, b), (b, fe_neg(ctx, a))))
    blocks = [dihedral] * s
    if sign == "-":
        blocks[0] = quaternion
    gens = []
    for pos in range(s):
        for g in blocks[pos]:
            mat = None
            for k in range(s):
                factor = g if k == pos else mat_identity(ctx, 2)
                mat = factor if mat is None else _kron(ctx, mat, factor)
            gens.append(SemilinearMap(ctx, mat, 0))
    group = MatGroup.from_gens(ctx, 2**s, gens)
    matgroup.enumerate_mat(group)
    if group.order != 2 ** (2 * s + 1):
        raise ConstructionError(
            f"extraspecial closure has order {group.order}, expected {2 ** (2 * s + 1)}"
        )
    predicted = 4**s + (2**s if sign == "+" else -(2**s)) - 2
    spec = FamilySpec(
        family="extraspecial2",
        params=(s, sign, q),
        prediction={"eigen1_nontrivial": predicted},
    )
    return group, spec


def noncentral_involutions(group):
    """Count elements of order 2 outside the center (scans the element table)."""
    group._need_elements()
    elems = group.elements
    n = group.n_points
    ident = np.arange(n, dtype=elems.dtype)
    count = 0
    central = 0
    for i in range(group.order):
        row = elems[i]
        if np.array_equal(row[row], ident) and not np.array_equal(row, ident):
            # involution; central in an extraspecial 2-group iff it is -I,
            # i.e. fixes only the zero vector and is scalar
            g = group.element(i)
            scalar = all(
                g.matrix[r][c] == (g.matrix[0][0] if r == c else 0)
                for r in range(group.d)
                for c in range(group.d)
            ) and g.frob == 0
            if scalar:
                central += 1
            else:
                count += 1
    return count, central


# -- alternating groups on the fully deleted permutation module --


def two_cycle_proportion_formula(m):
    """Closed form for the proportion of even permutations with <= 2 cycles."""
    if m % 2:
        return Fraction(2, m)
    total = sum(Fraction(1, i * (m - i)) for i in range(1, m // 2))
    return 2 * (total + Fraction(2, m * m))


def _deleted_module_matrix(m, p, perm):
    """Matrix of the permutation on the fully deleted module over F_p.

    Basis b_i = e_i - e_(m-1), i < m-1; when p | m the all-ones vector equals
    b_0 + ... + b_(m-2) and is quotiented out by eliminating b_(m-2).
    """
    full = []
    gm = int(perm[m - 1])
    for i in range(m - 1):
        row = [0] * (m - 1)
        gi = int(perm[i])
        if gi < m - 1:
            row[gi] += 1
        if gm < m - 1:
            row[gm] -= 1
        full.append([x % p for x in row])
    if m % p:
        return tuple(tuple(r) for r in full)
    dim = m - 2
    out = []
    for i in range(dim):
        row = list(full[i])
        c = row[dim]
        red = [(row[j] - c) % p for j in range(dim)]
        out.append(tuple(red))
    return tuple(out)


def _nullity_mod_p(mat, p):
    dim = len(mat)
    m = [[(mat[r][c] - (1 if r == c else 0)) % p for c in range(dim)] for r in range(dim)]
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
    return dim - rank


def _perm_with_type(ctype, m):
    img = list(range(m))
    start = 0
    for ln in ctype:
        for k in range(ln):
            img[start + k] = start + (k + 1) % ln
        start += ln
    return img


@dataclass
class AltDeleted:
    m: int
    p: int
    dim: int
    perm_group: permcore.PermGroup
    matrix_group: MatGroup
    census: Fraction
    formula: Fraction
    alpha: Fraction
    type_data: list


def alt_deleted(m, p):
    """A_m on the fully deleted module: census, closed form, exact alpha.

    The census enumerates every even permutation; alpha sums per cycle type,
    with the fixed-space dimension computed from one representative matrix
    per type (conjugate elements have equal fixed-space dimension).
    """
    if m < 5 or m > 10:
        raise ValueError("m must be in 5..10")
    ctx = _field_of(p)
    perm_group = permcore.PermGroup.from_gens(permcore.alternating_gens(m))
    permcore.enumerate_group(perm_group)
    ids, types = _kernel.cycle_info(perm_group.elements)
    counts = np.bincount(ids, minlength=len(types))
    census_elems = sum(int(c) for t, c in zip(types, counts) if len(t) <= 2)
    census = Fraction(census_elems, perm_group.order)

    dim = m - 1 if m % p else m - 2
    type_data = []
    eigen = 0
    for t, c in zip(types, counts):
        rep = _perm_with_type(t, m)
        mat = _deleted_module_matrix(m, p, rep)
        nullity = _nullity_mod_p(mat, p)
        type_data.append((tuple(t), int(c), nullity))
        if nullity >= 1:
            eigen += int(c)
    alpha = Fraction(eigen, perm_group.order)

    gens = [
        SemilinearMap(ctx, _deleted_module_matrix(m, p, g), 0) for g in perm_group.generators
    ]
    matrix_group = MatGroup.from_gens(ctx, dim, gens)
    return AltDeleted(
        m=m,
        p=p,
        dim=dim,
        perm_group=perm_group,
        matrix_group=matrix_group,
        census=census,
        formula=two_cycle_proportion_formula(m),
        alpha=alpha,
        type_data=type_data,
    )
