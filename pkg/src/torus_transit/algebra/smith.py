"""Smith normal form of nonsingular integer matrices."""

from __future__ import annotations

from dataclasses import dataclass

from ..errors import SingularMatrixError
from .matrix import Matrix, as_int_matrix, determinant, require_square


@dataclass(frozen=True)
class SmithDecomposition:
    """``U @ A @ V == D`` with unimodular ``U``, ``V`` and ``d_1 | d_2 | ...``."""

    U: Matrix
    D: Matrix
    V: Matrix

    @property
    def diagonal(self) -> tuple[int, ...]:
        return tuple(self.D[i][i] for i in range(len(self.D)))


def smith_normal_form(a) -> SmithDecomposition:
    a = as_int_matrix(a)
    n = require_square(a)
    if determinant(a) == 0:
        raise SingularMatrixError("Smith form requested for a singular matrix")
    m = [list(r) for r in a]
    u = [[int(i == j) for j in range(n)] for i in range(n)]
    v = [[int(i == j) for j in range(n)] for i in range(n)]

    def swap_rows(i, j):
        m[i], m[j] = m[j], m[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for mat in (m, v):
            for row in mat:
                row[i], row[j] = row[j], row[i]

    def add_row(dst, src, f):  # row_dst += f * row_src
        for mat in (m, u):
            mat[dst] = [x + f * y for x, y in zip(mat[dst], mat[src])]

    def add_col(dst, src, f):  # col_dst += f * col_src
        for mat in (m, v):
            for row in mat:
                row[dst] += f * row[src]

    for t in range(n):
        while True:
            # smallest nonzero entry of the trailing block becomes the pivot
            _, pi, pj = min((abs(m[i][j]), i, j)
                            for i in range(t, n) for j in range(t, n)
                            if m[i][j] != 0)
            swap_rows(t, pi)
            swap_cols(t, pj)
            p = m[t][t]
            dirty = False
            for i in range(t + 1, n):
                if m[i][t]:
                    add_row(i, t, -(m[i][t] // p))
                    dirty |= m[i][t] != 0
            for j in range(t + 1, n):
                if m[t][j]:
                    add_col(j, t, -(m[t][j] // p))
                    dirty |= m[t][j] != 0
            if dirty:
                continue
            bad = next(((i, j) for i in range(t + 1, n) for j in range(t + 1, n)
                        if m[i][j] % p), None)
            if bad is None:
                break
            add_row(t, bad[0], 1)
        if m[t][t] < 0:
            u[t] = [-x for x in u[t]]
            m[t] = [-x for x in m[t]]
    return SmithDecomposition(as_int_matrix(u), as_int_matrix(m), as_int_matrix(v))
