"""Arithmetic in F_{p^f}.

Elements are stored as plain ints in [0, q): the coefficient vector of the
residue polynomial in the power basis, packed little-endian in radix p. That
packed int is also the on-disk encoding used by group-spec files.

The modulus is the monic irreducible of degree f whose packed non-leading
coefficient block is smallest, so construction is deterministic without any
polynomial database. The stored generator omega is the smallest packed
element of full multiplicative order. Fields with q <= 2**20 carry exp/log
tables; everything else falls back to polynomial arithmetic.
"""

import functools
import math
from dataclasses import dataclass, field

from . import numtheory

ENUM_CEILING = 1 << 32
LOG_TABLE_CEILING = 1 << 20


# -- dense little-endian polynomials over Z_p (internal) --


def _ptrim(a):
    while a and a[-1] == 0:
        a.pop()
    return a


def _pmul(a, b, p):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] = (out[i + j] + ai * bj) % p
    return _ptrim(out)


def _pmod(a, m, p):
    a = list(a)
    dm = len(m) - 1
    inv_lead = pow(m[-1], -1, p)
    while len(a) - 1 >= dm and a:
        shift = len(a) - 1 - dm
        c = (a[-1] * inv_lead) % p
        if c:
            for i in range(dm + 1):
                a[shift + i] = (a[shift + i] - c * m[i]) % p
        a.pop()
        _ptrim(a)
    return a


def _ppowmod(base, e, m, p):
    result = [1]
    base = _pmod(base, m, p)
    while e:
        if e & 1:
            result = _pmod(_pmul(result, base, p), m, p)
        base = _pmod(_pmul(base, base, p), m, p)
        e >>= 1
    return result


def _pgcd(a, b, p):
    a, b = list(a), list(b)
    while b:
        a, b = b, _pmod(a, b, p)
    return a


def _is_irreducible(m, p, f):
    """No irreducible factor of degree <= f/2 (hence irreducible for monic degree f)."""
    if f == 1:
        return True
    for k in range(1, f // 2 + 1):
        # x^(p^k) - x mod m
        xp = _ppowmod([0, 1], p**k, m, p)
        diff = list(xp) + [0] * max(0, 2 - len(xp))
        diff[1] = (diff[1] - 1) % p
        g = _pgcd(m, _ptrim(diff), p)
        if len(g) != 1:
            return False
    return True


@dataclass
class FieldCtx:
    """The field F_{p^f} with a fixed modulus and generator."""

    p: int
    f: int
    q: int
    modulus: tuple
    omega: int = 0
    exp: list | None = field(default=None, repr=False)
    log: list | None = field(default=None, repr=False)
    frob_pow: tuple = ()

    def __hash__(self):
        return hash((self.p, self.f))

    def __eq__(self, other):
        return isinstance(other, FieldCtx) and (self.p, self.f) == (other.p, other.f)


def coeffs(ctx, x):
    """Little-endian coefficient tuple of the packed element."""
    out = []
    for _ in range(ctx.f):
        x, r = divmod(x, ctx.p)
        out.append(r)
    return tuple(out)


def from_coeffs(ctx, cs):
    x = 0
    for c in reversed(list(cs)):
        x = x * ctx.p + c % ctx.p
    return x


def _raw_mul(ctx, a, b):
    if ctx.f == 1:
        return (a * b) % ctx.p
    prod = _pmod(_pmul(list(coeffs(ctx, a)), list(coeffs(ctx, b)), ctx.p), list(ctx.modulus), ctx.p)
    return from_coeffs(ctx, prod + [0] * (ctx.f - len(prod)))


def _raw_pow(ctx, a, e):
    result = 1
    while e:
        if e & 1:
            result = _raw_mul(ctx, result, a)
        a = _raw_mul(ctx, a, a)
        e >>= 1
    return result


@functools.lru_cache(maxsize=None)
def make_field(p, f):
    """Construct F_{p^f}; deterministic modulus and generator choice."""
    if not numtheory.is_prime(p):
        raise ValueError(f"p must be prime, got {p}")
    if f < 1:
        raise ValueError(f"f must be positive, got {f}")
    q = p**f
    if q > ENUM_CEILING:
        raise ValueError(f"q = {q} exceeds the arithmetic ceiling 2**32")

    modulus = None
    for tail in range(q):
        cand = [0] * f + [1]
        t = tail
        for i in range(f):
            t, cand[i] = divmod(t, p)
        if _is_irreducible(cand, p, f):
            modulus = tuple(cand)
            break
    ctx = FieldCtx(p=p, f=f, q=q, modulus=modulus)
    ctx.frob_pow = tuple(pow(p, e, q - 1) if q > 2 else 0 for e in range(f))

    if q == 2:
        ctx.omega = 1
    else:
        fac = numtheory.factorize(q - 1)
        for a in range(2, q):
            if all(_raw_pow(ctx, a, (q - 1) // r) != 1 for r in fac):
                ctx.omega = a
                break

    if q <= LOG_TABLE_CEILING:
        exp = [0] * (q - 1)
        log = [-1] * q
        x = 1
        for k in range(q - 1):
            exp[k] = x
            log[x] = k
            x = _raw_mul(ctx, x, ctx.omega)
        ctx.exp = exp
        ctx.log = log
    return ctx


def fe_add(ctx, a, b):
    if ctx.p == 2:
        return a ^ b
    if ctx.f == 1:
        return (a + b) % ctx.p
    out = 0
    mul = 1
    for _ in range(ctx.f):
        out += ((a % ctx.p + b % ctx.p) % ctx.p) * mul
        a //= ctx.p
        b //= ctx.p
        mul *= ctx.p
    return out


def fe_neg(ctx, a):
    if ctx.p == 2:
        return a
    if ctx.f == 1:
        return (-a) % ctx.p
    out = 0
    mul = 1
    for _ in range(ctx.f):
        out += ((-(a % ctx.p)) % ctx.p) * mul
        a //= ctx.p
        mul *= ctx.p
    return out


def fe_sub(ctx, a, b):
    return fe_add(ctx, a, fe_neg(ctx, b))


def fe_mul(ctx, a, b):
    if a == 0 or b == 0:
        return 0
    if ctx.exp is not None:
        return ctx.exp[(ctx.log[a] + ctx.log[b]) % (ctx.q - 1)]
    return _raw_mul(ctx, a, b)


def fe_inv(ctx, a):
    if a == 0:
        raise ZeroDivisionError("inverse of 0 in a finite field")
    if ctx.exp is not None:
        return ctx.exp[(-ctx.log[a]) % (ctx.q - 1)]
    return _raw_pow(ctx, a, ctx.q - 2)


def fe_pow(ctx, a, e):
    if e < 0:
        return fe_pow(ctx, fe_inv(ctx, a), -e)
    if a == 0:
        return 0 if e else 1
    if ctx.exp is not None:
        return ctx.exp[(ctx.log[a] * e) % (ctx.q - 1)]
    return _raw_pow(ctx, a, e)


def frobenius(ctx, x, e):
    """x^(p^e), the e-th power of the base field automorphism. 0 <= e < f."""
    if not 0 <= e < ctx.f:
        raise ValueError(f"frobenius exponent must be in [0, {ctx.f}), got {e}")
    if x == 0 or e == 0:
        return x
    if ctx.exp is not None:
        return ctx.exp[(ctx.log[x] * ctx.frob_pow[e]) % (ctx.q - 1)]
    return _raw_pow(ctx, x, ctx.p**e)


def dlog(ctx, x):
    """Discrete log base omega; needs the log table (q <= 2**20)."""
    if x == 0:
        raise ZeroDivisionError("discrete log of 0")
    if ctx.log is None:
        raise ValueError(f"no log table for q = {ctx.q} (> 2**20)")
    return ctx.log[x]


def elements(ctx):
    return range(ctx.q)
