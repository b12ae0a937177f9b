"""Dense univariate polynomials over Z and Q.

A polynomial is a tuple of coefficients, lowest degree first; the zero
polynomial is the empty tuple.  Integer polynomials hold ``int`` entries,
rational ones hold ``fractions.Fraction``.  Nothing here ever rounds.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import isqrt
from typing import Sequence

from ..errors import InvalidInputError

Poly = tuple


def trim(p: Sequence) -> Poly:
    p = list(p)
    while p and p[-1] == 0:
        p.pop()
    return tuple(p)


def degree(p: Sequence) -> int:
    """Degree of ``p``; -1 for the zero polynomial."""
    return len(trim(p)) - 1


def evaluate(p: Sequence, x):
    acc = 0
    for c in reversed(p):
        acc = acc * x + c
    return acc


def add(p: Sequence, q: Sequence) -> Poly:
    n = max(len(p), len(q))
    return trim([(p[i] if i < len(p) else 0) + (q[i] if i < len(q) else 0)
                 for i in range(n)])


def sub(p: Sequence, q: Sequence) -> Poly:
    return add(p, [-c for c in q])


def mul(p: Sequence, q: Sequence) -> Poly:
    if not p or not q:
        return ()
    out = [0] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a == 0:
            continue
        for j, b in enumerate(q):
            out[i + j] += a * b
    return trim(out)


def derivative(p: Sequence) -> Poly:
    return trim([i * c for i, c in enumerate(p)][1:])


def divmod_poly(p: Sequence, q: Sequence) -> tuple[Poly, Poly]:
    """Quotient and remainder of ``p / q`` over Q.

    Coefficients stay integers whenever ``q`` is monic and ``p`` is integral.
    """
    q = trim(q)
    if not q:
        raise ZeroDivisionError("polynomial division by zero")
    r = list(trim(p))
    lead = q[-1]
    monic = lead in (1, -1)
    quot = [0] * max(len(r) - len(q) + 1, 0)
    while len(r) >= len(q) and r:
        shift = len(r) - len(q)
        c = r[-1] * lead if monic else Fraction(r[-1]) / lead
        quot[shift] = c
        for i, b in enumerate(q):
            r[shift + i] -= c * b
        r = list(trim(r))
    return trim(quot), trim(r)


def monic(p: Sequence) -> Poly:
    p = trim(p)
    if not p:
        return ()
    lead = Fraction(p[-1])
    return tuple(Fraction(c) / lead for c in p)


def gcd(p: Sequence, q: Sequence) -> Poly:
    """Monic greatest common divisor over Q (empty tuple if both vanish)."""
    a, b = trim(p), trim(q)
    while b:
        _, r = divmod_poly(a, b)
        a, b = b, r
    return monic(a)


def lcm(p: Sequence, q: Sequence) -> Poly:
    if not trim(p) or not trim(q):
        return ()
    quot, rem = divmod_poly(mul(p, q), gcd(p, q))
    assert not rem
    return monic(quot)


def is_squarefree(p: Sequence) -> bool:
    """True iff ``p`` has no repeated factor over Q."""
    return degree(gcd(p, derivative(p))) == 0


def to_integer(p: Sequence) -> Poly:
    """Convert a rational polynomial with integral coefficients to ints."""
    out = []
    for c in trim(p):
        c = Fraction(c)
        if c.denominator != 1:
            raise InvalidInputError(f"coefficient {c} is not an integer")
        out.append(c.numerator)
    return tuple(out)


def format_poly(p: Sequence) -> str:
    """Space separated coefficients, lowest degree first ("0" for zero)."""
    p = trim(p)
    return " ".join(str(c) for c in p) if p else "0"


# -- integer roots -----------------------------------------------------------

def _ceil_root(x: int, k: int) -> int:
    """Smallest r >= 0 with r**k >= x."""
    lo, hi = 0, 1 << (-(-x.bit_length() // k))
    while lo < hi:
        mid = (lo + hi) // 2
        if mid ** k >= x:
            hi = mid
        else:
            lo = mid + 1
    return lo


def root_bound(p: Sequence) -> int:
    """Integer bound on the modulus of every complex root (Fujiwara)."""
    p = to_integer(p)
    n, lead = len(p) - 1, abs(p[-1])
    if n < 1:
        return 0
    terms = [_ceil_root(-(-abs(p[n - k]) // lead), k) for k in range(1, n + 1)]
    return 2 * max(terms)


def _positive_divisors(n: int, bound: int | None = None) -> list[int]:
    """Divisors of ``|n|``, only those ``<= bound`` when a bound is given."""
    n = abs(n)
    top = isqrt(n) if bound is None else min(isqrt(n), bound)
    small, large = [], []
    for d in range(1, top + 1):
        if n % d == 0:
            small.append(d)
            e = n // d
            if e != d and (bound is None or e <= bound):
                large.append(e)
    return small + large[::-1]


def integer_eigenvalues(p: Sequence) -> tuple[int, ...]:
    """All integer roots of an integer polynomial, repeated by multiplicity.

    Zero roots are split off first as a power of ``t``; the remaining
    candidates are the divisors of the (nonzero) constant term no larger
    than a bound on the root moduli.  For a
    monic polynomial every rational root is found this way.
    """
    p = to_integer(p)
    if not p:
        raise InvalidInputError("the zero polynomial has every number as a root")
    roots: list[int] = []
    while p[0] == 0:
        roots.append(0)
        p = p[1:]
    for d in _positive_divisors(p[0], root_bound(p)):
        for r in (d, -d):
            while len(p) > 1 and evaluate(p, r) == 0:
                p, rem = divmod_poly(p, (-r, 1))
                p = to_integer(p)
                assert not rem
                roots.append(r)
    return tuple(sorted(roots))


# -- cyclotomic polynomials --------------------------------------------------

def euler_phi(m: int) -> int:
    result, n, f = m, m, 2
    while f * f <= n:
        if n % f == 0:
            while n % f == 0:
                n //= f
            result -= result // f
        f += 1
    if n > 1:
        result -= result // n
    return result


@lru_cache(maxsize=None)
def cyclotomic(m: int) -> Poly:
    """The m-th cyclotomic polynomial with integer coefficients."""
    if m < 1:
        raise InvalidInputError("cyclotomic index must be positive")
    p: Poly = (-1,) + (0,) * (m - 1) + (1,)
    for d in range(1, m):
        if m % d == 0:
            p, rem = divmod_poly(p, cyclotomic(d))
            assert not rem
    return p


def no_root_of_unity_eigenvalue(p: Sequence) -> bool:
    """True iff no root of ``p`` is a root of unity.

    Only indices with ``phi(m) <= deg p`` can divide; ``phi(m) >= sqrt(m/2)``
    bounds the search by ``2 deg(p)**2``.  Cyclotomic polynomials are
    irreducible, so a nonconstant gcd is the same as divisibility.
    """
    p = trim(p)
    d = degree(p)
    if d < 1:
        return True
    for m in range(1, 2 * d * d + 1):
        if euler_phi(m) > d:
            continue
        if degree(gcd(p, cyclotomic(m))) > 0:
            return False
    return True
