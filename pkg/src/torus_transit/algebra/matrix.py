"""Exact integer and rational matrix algebra.

Matrices are tuples of row tuples holding ``int`` or ``Fraction`` entries;
vectors are plain tuples.  Every routine is fraction exact.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations
from math import gcd, lcm
from typing import Sequence

from ..errors import (DimensionError, InvalidInputError, InvarianceError,
                      RankError)
from . import poly

Matrix = tuple
Vector = tuple


def _exact(x):
    if isinstance(x, bool):
        raise InvalidInputError("booleans are not matrix entries")
    if isinstance(x, int):
        return x
    if isinstance(x, Fraction):
        return x.numerator if x.denominator == 1 else x
    if isinstance(x, str):
        return _exact(Fraction(x))
    raise InvalidInputError(f"entry {x!r} is not an exact integer or rational")


def as_matrix(rows: Sequence[Sequence]) -> Matrix:
    """Validate a rectangular nested sequence of exact numbers."""
    out = tuple(tuple(_exact(x) for x in row) for row in rows)
    if out and any(len(r) != len(out[0]) for r in out):
        raise DimensionError("ragged matrix rows")
    return out


def as_int_matrix(rows: Sequence[Sequence]) -> Matrix:
    m = as_matrix(rows)
    for row in m:
        for x in row:
            if not isinstance(x, int):
                raise InvalidInputError(f"entry {x} is not an integer")
    return m


def shape(a: Matrix) -> tuple[int, int]:
    return len(a), (len(a[0]) if a else 0)


def require_square(a: Matrix) -> int:
    r, c = shape(a)
    if r != c:
        raise DimensionError(f"square matrix required, got {r}x{c}")
    return r


def identity(n: int, scale=1) -> Matrix:
    return tuple(tuple(scale if i == j else 0 for j in range(n))
                 for i in range(n))


def transpose(a: Matrix) -> Matrix:
    return tuple(zip(*a))


def matmul(a: Matrix, b: Matrix) -> Matrix:
    if shape(a)[1] != len(b):
        raise DimensionError(f"cannot multiply {shape(a)} by {shape(b)}")
    bt = transpose(b)
    return tuple(tuple(sum(x * y for x, y in zip(row, col)) for col in bt)
                 for row in a)


def matvec(a: Matrix, v: Sequence) -> Vector:
    if shape(a)[1] != len(v):
        raise DimensionError(f"cannot apply {shape(a)} matrix to length {len(v)}")
    return tuple(sum(x * y for x, y in zip(row, v)) for row in a)


def vecmat(v: Sequence, a: Matrix) -> Vector:
    return matvec(transpose(a), v)


def sub(a: Matrix, b: Matrix) -> Matrix:
    if shape(a) != shape(b):
        raise DimensionError("shape mismatch")
    return tuple(tuple(x - y for x, y in zip(ra, rb)) for ra, rb in zip(a, b))


def scale(a: Matrix, s) -> Matrix:
    return tuple(tuple(s * x for x in row) for row in a)


def is_symmetric(a: Matrix) -> bool:
    return a == transpose(a)


def matpow(a: Matrix, k: int) -> Matrix:
    result = identity(require_square(a))
    base = a
    while k:
        if k & 1:
            result = matmul(result, base)
        base = matmul(base, base)
        k >>= 1
    return result


def determinant(a: Matrix):
    """Determinant by fraction-free Bareiss elimination."""
    n = require_square(a)
    if n == 0:
        return 1
    m = [list(row) for row in a]
    sign, prev = 1, 1
    for k in range(n - 1):
        if m[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if m[i][k] != 0), None)
            if swap is None:
                return 0
            m[k], m[swap] = m[swap], m[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = m[i][j] * m[k][k] - m[i][k] * m[k][j]
                # exact by Sylvester's identity
                m[i][j] = (num // prev if isinstance(num, int) and isinstance(prev, int)
                           else num / prev)
        prev = m[k][k]
    return _exact(sign * m[n - 1][n - 1])


def char_poly(a: Matrix) -> tuple[int, ...]:
    """Monic characteristic polynomial ``det(tI - A)`` (Faddeev-LeVerrier).

    Each step divides an integer trace by ``k``; the division is exact for
    integer input, so all intermediate values stay integral.
    """
    n = require_square(a)
    a = as_matrix(a)
    coeffs = [0] * (n + 1)
    coeffs[n] = 1
    m = tuple(tuple(0 for _ in range(n)) for _ in range(n))
    for k in range(1, n + 1):
        m = matmul(a, m)
        c = coeffs[n - k + 1]
        m = tuple(tuple(x + (c if i == j else 0) for j, x in enumerate(row))
                  for i, row in enumerate(m))
        am = matmul(a, m)
        trace = sum(am[i][i] for i in range(n))
        q = Fraction(-trace, k)
        coeffs[n - k] = q.numerator if q.denominator == 1 else q
    return tuple(coeffs)


def compound_matrix(a: Matrix, m: int) -> Matrix:
    """Matrix of all ``m x m`` minors of ``A``.

    Rows and columns are indexed by increasing index tuples in
    lexicographic order, i.e. the basis ``e_I`` of the m-th exterior power.
    """
    n = require_square(a)
    if not 1 <= m <= n:
        raise InvalidInputError(f"compound order m={m} outside 1..{n}")
    idx = list(combinations(range(n), m))
    return tuple(
        tuple(determinant(tuple(tuple(a[r][c] for c in cols) for r in rows))
              for cols in idx)
        for rows in idx)


# -- rational row reduction --------------------------------------------------

def rref(a: Matrix) -> tuple[Matrix, tuple[int, ...]]:
    """Reduced row echelon form over Q and the pivot columns."""
    rows, cols = shape(a)
    m = [[Fraction(x) for x in row] for row in a]
    pivots = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        p = next((i for i in range(r, rows) if m[i][c] != 0), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        inv = 1 / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(rows):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
    return as_matrix(m), tuple(pivots)


def rank(a: Matrix) -> int:
    return len(rref(a)[1]) if a else 0


def rational_kernel(a: Matrix) -> list[Vector]:
    """Basis of ``{v : A v = 0}``, one vector per free column of the RREF."""
    _, cols = shape(a)
    red, pivots = rref(a)
    basis = []
    for free in (c for c in range(cols) if c not in pivots):
        v = [Fraction(0)] * cols
        v[free] = Fraction(1)
        for row, pc in enumerate(pivots):
            v[pc] = -Fraction(red[row][free])
        basis.append(tuple(v))
    return basis


def solve(a: Matrix, b: Sequence) -> Vector | None:
    """One exact solution of ``A x = b`` or None if inconsistent."""
    rows, cols = shape(a)
    aug = tuple(tuple(row) + (b[i],) for i, row in enumerate(a))
    red, pivots = rref(aug)
    if cols in pivots:
        return None
    x = [Fraction(0)] * cols
    for row, pc in enumerate(pivots):
        x[pc] = red[row][cols]
    return tuple(x)


def primitive_integer_vector(v: Sequence) -> Vector:
    """Scale a rational vector to coprime ints (sign kept)."""
    v = [Fraction(x) for x in v]
    den = lcm(*(x.denominator for x in v)) if v else 1
    ints = [int(x * den) for x in v]
    g = gcd(*ints) or 1
    return tuple(x // g for x in ints)


def transverse_invariant_hyperplane(af: Matrix, eigenvalue: int) -> Vector | None:
    """Left ``eigenvalue``-eigenvector of ``A_f`` with nonzero last entry.

    ``w`` defines the invariant hyperplane ``ker w^T`` transverse to
    ``e_n``.  The first kernel basis vector with nonzero last coordinate is
    returned as coprime integers with positive last coordinate.
    """
    n = require_square(af)
    shifted = sub(transpose(af), identity(n, eigenvalue))
    for v in rational_kernel(shifted):
        if v[-1] != 0:
            w = primitive_integer_vector(v)
            return w if w[-1] > 0 else tuple(-x for x in w)
    return None


def is_left_eigenvector(af: Matrix, w: Sequence, eigenvalue) -> bool:
    return (any(x != 0 for x in w)
            and vecmat(w, af) == tuple(eigenvalue * x for x in w))


# -- minimal polynomial and diagonalizability --------------------------------

def _local_annihilator(a: Matrix, v: Vector) -> tuple:
    """Monic polynomial of least degree with ``p(A) v = 0`` (Krylov)."""
    krylov = [v]
    while True:
        nxt = matvec(a, krylov[-1])
        cols = transpose(krylov)
        coeffs = solve(cols, nxt)
        if coeffs is not None:
            return tuple(-c for c in coeffs) + (Fraction(1),)
        krylov.append(nxt)


def minimal_polynomial(a: Matrix) -> tuple:
    """Monic minimal polynomial over Q as the lcm of per-basis-vector annihilators."""
    n = require_square(a)
    a = tuple(tuple(Fraction(x) for x in row) for row in a)
    result: tuple = (Fraction(1),)
    for i in range(n):
        e = tuple(Fraction(int(i == j)) for j in range(n))
        result = poly.lcm(result, _local_annihilator(a, e))
    return result


def is_diagonalizable(a: Matrix) -> bool:
    """Diagonalizable over C iff the minimal polynomial is squarefree."""
    if require_square(a) == 0:
        return True
    return poly.is_squarefree(minimal_polynomial(a))


# -- definiteness ------------------------------------------------------------

def leading_principal_minors(a: Matrix) -> tuple:
    n = require_square(a)
    return tuple(determinant(tuple(row[:k] for row in a[:k]))
                 for k in range(1, n + 1))


def positive_definite(a: Matrix) -> bool:
    """Sylvester's criterion on a symmetric matrix."""
    require_square(a)
    if not is_symmetric(a):
        raise InvalidInputError("positive_definite needs a symmetric matrix")
    return all(m > 0 for m in leading_principal_minors(a))


# -- invariant subspaces -----------------------------------------------------

def restriction_matrix(a: Matrix, basis: Sequence[Sequence]) -> Matrix:
    """Matrix of ``A`` restricted to ``span(basis)``, in that basis.

    Raises RankError for a dependent basis and InvarianceError when some
    ``A s_i`` leaves the span.
    """
    n = require_square(a)
    basis = [tuple(Fraction(x) for x in s) for s in basis]
    if not basis:
        raise RankError("empty basis")
    if any(len(s) != n for s in basis):
        raise DimensionError("basis vectors must have length n")
    cols = transpose(basis)
    if rank(cols) != len(basis):
        raise RankError("basis vectors are linearly dependent")
    columns = []
    for s in basis:
        c = solve(cols, matvec(a, s))
        if c is None:
            shown = "(" + ", ".join(str(x) for x in s) + ")"
            raise InvarianceError(f"the subspace is not invariant: A maps {shown} outside its span")
        columns.append(c)
    return transpose(columns)


def restriction_determinant_divides(a: Matrix, basis: Sequence[Sequence]):
    """``(det(A|S), divides)`` where divides means a nonzero integer dividing det(A)."""
    det_s = Fraction(determinant(restriction_matrix(a, basis)))
    det_a = determinant(as_matrix(a))
    divides = (det_s.denominator == 1 and det_s != 0
               and det_a % det_s.numerator == 0)
    return det_s, divides


def format_matrix(a: Matrix) -> str:
    return "\n".join(" ".join(str(x) for x in row) for row in a)
