"""Exact integer and rational utilities.

p-adic valuations, the derived valuation gamma_bar, the three threshold
ratios used by the harness, certified rational enclosures for irrational
values (square roots, natural log), and the property-test driver for the
four valuation growth laws.

All proportions everywhere in this package are fractions.Fraction values;
nothing here ever rounds.
"""

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

from .results import PASS, SKIPPED, CheckResult

ExactRatio = Fraction

_PRIME_LIMIT = 10**6
_primes = None


def primes():
    """Primes up to 10**6 (sieved once, cached)."""
    global _primes
    if _primes is None:
        limit = _PRIME_LIMIT
        sieve = bytearray(b"\x01") * (limit + 1)
        sieve[0:2] = b"\x00\x00"
        for p in range(2, math.isqrt(limit) + 1):
            if sieve[p]:
                start = p * p
                sieve[start :: p] = b"\x00" * ((limit - start) // p + 1)
        _primes = [i for i, flag in enumerate(sieve) if flag]
    return _primes


def is_prime(n):
    """Trial division over the precomputed table; valid for n < 10**12."""
    if n < 2:
        return False
    if n >= _PRIME_LIMIT**2:
        raise ValueError(f"is_prime supports n < 10**12, got {n}")
    for p in primes():
        if p * p > n:
            return True
        if n % p == 0:
            return n == p
    return True


def factorize(n):
    """Prime factorization {p: exponent} by table trial division (n < 10**12)."""
    if n < 1:
        raise ValueError("factorize needs n >= 1")
    if n >= _PRIME_LIMIT**2:
        raise ValueError(f"factorize supports n < 10**12, got {n}")
    out = {}
    for p in primes():
        if p * p > n:
            break
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def divisors(n):
    """Sorted list of positive divisors."""
    divs = [1]
    for p, e in factorize(n).items():
        divs = [d * p**k for d in divs for k in range(e + 1)]
    return sorted(divs)


def padic_val(r, a):
    """Largest i with r**i dividing a. Requires r prime and a >= 1."""
    if not is_prime(r):
        raise ValueError(f"r must be prime, got {r}")
    if a < 1:
        raise ValueError(f"a must be positive, got {a}")
    i = 0
    while a % r == 0:
        a //= r
        i += 1
    return i


class ValuationProfile(NamedTuple):
    """An r-part exponent: r**i is the full power of r in the profiled value."""

    r: int
    i: int


def val_profile(r, a):
    return ValuationProfile(r, padic_val(r, a))


def gamma_bar(r, p, a):
    """padic_val(r, (p**a - 1) / (p - 1)). p >= 2 need not be prime."""
    if p < 2:
        raise ValueError(f"p must be >= 2, got {p}")
    if a < 1:
        raise ValueError(f"a must be positive, got {a}")
    return padic_val(r, (p**a - 1) // (p - 1))


@dataclass(frozen=True)
class RatioInterval:
    """Certified rational enclosure lo <= value <= hi of an irrational value."""

    lo: Fraction
    hi: Fraction

    @property
    def width(self):
        return self.hi - self.lo

    def __contains__(self, x):
        return self.lo <= x <= self.hi


_SQRT_SCALE = 10**13


def sqrt_interval(n):
    """Exact Fraction for square n, else an enclosure of width 10**-13."""
    s = math.isqrt(n)
    if s * s == n:
        return Fraction(s)
    t = math.isqrt(n * _SQRT_SCALE**2)
    return RatioInterval(Fraction(t, _SQRT_SCALE), Fraction(t + 1, _SQRT_SCALE))


def _bound(n, make):
    if n < 2:
        raise ValueError(f"bounds are defined for n >= 2, got {n}")
    root = sqrt_interval(n)
    if isinstance(root, Fraction):
        return make(root, n)
    return RatioInterval(make(root.lo, n), make(root.hi, n))


def bound_g(n):
    """(sqrt(n) + 1) / (2n): the derangement threshold outside Frobenius groups."""
    return _bound(n, lambda r, n: (r + 1) / (2 * n))


def bound_f(n):
    """(sqrt(n) + 1) / (60n): the threshold outside one-dimensional semilinear Frobenius groups."""
    return _bound(n, lambda r, n: (r + 1) / (60 * n))


def bound_h(n):
    """(sqrt(n) + 2) / (2(n - 1)): the eigenvalue-1 proportion threshold."""
    return _bound(n, lambda r, n: (r + 2) / (2 * (n - 1)))


def ln_interval(m, eps=Fraction(1, 10**13)):
    """Certified rational enclosure of ln(m) via the atanh series.

    ln m = 2*atanh(x) with x = (m-1)/(m+1); the tail after K terms is below
    2*x^(2K+3) / ((2K+3)(1-x^2)), which certifies the upper end.
    """
    if m < 1:
        raise ValueError("ln_interval needs m >= 1")
    if m == 1:
        return RatioInterval(Fraction(0), Fraction(0))
    x = Fraction(m - 1, m + 1)
    x2 = x * x
    term = x
    total = Fraction(0)
    k = 0
    while True:
        total += term / (2 * k + 1)
        term *= x2
        k += 1
        tail = 2 * term / ((2 * k + 1) * (1 - x2))
        if tail < eps:
            return RatioInterval(2 * total, 2 * total + tail)


def _res(check_id, anchor, ok, lhs, rhs, **witness):
    return CheckResult(
        check_id=check_id,
        anchor=anchor,
        status=PASS if ok else "fail",
        lhs=lhs,
        rhs=rhs,
        witness=witness,
    )


def check_valuation_lemmas(p_max=50, r_max=13, i_max=4):
    """Exhaustively test the four valuation growth laws on small parameters.

    Bases p run over all integers 2..p_max (primality of p is never used by
    the laws), prime moduli r up to r_max, tower heights up to i_max. The
    excluded case (r, i) = (2, 1) of the prime-step law is skipped and its
    replacement estimate gamma_2(p^2 - 1) >= 3 recorded instead.
    """
    out = []
    rs = [r for r in primes() if r <= r_max]
    for r in rs:
        for p in range(2, p_max + 1):
            i = padic_val(r, p - 1)
            if i < 1:
                continue

            # coprime exponents leave the r-part untouched
            for j in range(1, 11):
                if j % r == 0:
                    continue
                got = padic_val(r, p**j - 1)
                out.append(
                    _res(
                        f"valuation:coprime-no-growth:r={r}:p={p}:j={j}",
                        "gamma_r(p^j - 1) = gamma_r(p - 1) when r | p - 1 and r does not divide j",
                        got == i,
                        got,
                        i,
                        r=r,
                        p=p,
                        j=j,
                    )
                )

            # one prime step adds exactly one to the r-part, except (r, i) = (2, 1)
            if (r, i) == (2, 1):
                remark = padic_val(2, p**2 - 1)
                out.append(
                    CheckResult(
                        check_id=f"valuation:prime-step:r=2:p={p}:excluded",
                        anchor="excluded case: gamma_2(p - 1) = 1 forces gamma_2(p^2 - 1) >= 3",
                        status=SKIPPED if remark >= 3 else "fail",
                        lhs=remark,
                        rhs=3,
                        witness={"r": 2, "p": p, "note": "prime-step law excluded at (r, i) = (2, 1)"},
                    )
                )
            else:
                got = padic_val(r, p**r - 1)
                out.append(
                    _res(
                        f"valuation:prime-step:r={r}:p={p}",
                        "gamma_r(p - 1) = i >= 1 and (r, i) != (2, 1) imply gamma_r(p^r - 1) = i + 1",
                        got == i + 1,
                        got,
                        i + 1,
                        r=r,
                        p=p,
                        i=i,
                    )
                )

            if r != 2:
                # odd towers grow by exactly one per level
                for k in range(1, i_max + 1):
                    got = gamma_bar(r, p, r**k)
                    out.append(
                        _res(
                            f"valuation:odd-tower:r={r}:p={p}:i={k}",
                            "gamma_r((p^(r^i) - 1)/(p - 1)) = i for odd r | p - 1",
                            got == k,
                            got,
                            k,
                            r=r,
                            p=p,
                            i=k,
                        )
                    )
                # and for a general exponent the r-part of the quotient is that of the exponent
                for fexp in range(1, 13):
                    got = gamma_bar(r, p, fexp)
                    want = padic_val(r, fexp)
                    out.append(
                        _res(
                            f"valuation:odd-tower-general:r={r}:p={p}:f={fexp}",
                            "gamma_r((p^f - 1)/(p - 1)) = gamma_r(f) for odd r | p - 1",
                            got == want,
                            got,
                            want,
                            r=r,
                            p=p,
                            f=fexp,
                        )
                    )

    # the even tower: gamma_2((p^(2^i) - 1)/(p - 1)) = i + j - 1 with j = gamma_2(p + 1)
    for p in range(3, p_max + 1, 2):
        j = padic_val(2, p + 1)
        for k in range(1, i_max + 1):
            got = gamma_bar(2, p, 2**k)
            out.append(
                _res(
                    f"valuation:even-tower:p={p}:i={k}",
                    "gamma_2((p^(2^i) - 1)/(p - 1)) = i + gamma_2(p + 1) - 1 for odd p",
                    got == k + j - 1,
                    got,
                    k + j - 1,
                    p=p,
                    i=k,
                    j=j,
                )
            )
    return out
