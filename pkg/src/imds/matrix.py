"""Dense 2x2 / 4x4 matrices over GF(2^m) and the MDS, involutory and rank tests.

A matrix is a tuple of row tuples of field elements, so matrices are
hashable and can be collected into sets. Every function takes the field as
its first argument; mixing matrices from different fields is a caller bug
and is not detected.
"""
from __future__ import annotations

from itertools import combinations
from typing import Iterable, Iterator, Sequence

from .errors import NotInvolutoryError, SingularMatrixError
from .field import GF

Matrix = tuple[tuple[int, ...], ...]


def identity(n: int) -> Matrix:
    return tuple(tuple(int(i == j) for j in range(n)) for i in range(n))


def zeros(n: int) -> Matrix:
    return tuple((0,) * n for _ in range(n))


def as_matrix(rows: Iterable[Iterable[int]]) -> Matrix:
    return tuple(tuple(int(x) for x in r) for r in rows)


def from_flat(values: Sequence[int], n: int = 4) -> Matrix:
    if len(values) != n * n:
        raise ValueError(f"expected {n * n} entries, got {len(values)}")
    return tuple(tuple(values[i * n:(i + 1) * n]) for i in range(n))


def flatten(a: Matrix) -> tuple[int, ...]:
    return tuple(x for row in a for x in row)


def mat_add(F: GF, a: Matrix, b: Matrix) -> Matrix:
    # characteristic 2: subtraction is the same operation
    return tuple(tuple(x ^ y for x, y in zip(ra, rb)) for ra, rb in zip(a, b))


mat_sub = mat_add


def mat_mul(F: GF, a: Matrix, b: Matrix) -> Matrix:
    mul = F.mul
    cols = list(zip(*b))
    out = []
    for row in a:
        out_row = []
        for col in cols:
            acc = 0
            for x, y in zip(row, col):
                acc ^= mul(x, y)
            out_row.append(acc)
        out.append(tuple(out_row))
    return tuple(out)


def scalar_mul(F: GF, s: int, a: Matrix) -> Matrix:
    return tuple(tuple(F.mul(s, x) for x in row) for row in a)


def transpose(a: Matrix) -> Matrix:
    return tuple(zip(*a))


def det2(F: GF, a: Matrix) -> int:
    return F.mul(a[0][0], a[1][1]) ^ F.mul(a[0][1], a[1][0])


def _det3(F: GF, a: Matrix) -> int:
    mul = F.mul
    (a00, a01, a02), (a10, a11, a12), (a20, a21, a22) = a
    return (mul(a00, mul(a11, a22) ^ mul(a12, a21))
            ^ mul(a01, mul(a10, a22) ^ mul(a12, a20))
            ^ mul(a02, mul(a10, a21) ^ mul(a11, a20)))


def det(F: GF, a: Matrix) -> int:
    """Determinant by cofactor expansion along the first row."""
    n = len(a)
    if n == 1:
        return a[0][0]
    if n == 2:
        return det2(F, a)
    if n == 3:
        return _det3(F, a)
    acc = 0
    for j in range(n):
        if a[0][j]:
            sub = tuple(row[:j] + row[j + 1:] for row in a[1:])
            acc ^= F.mul(a[0][j], det(F, sub))
    return acc


def submatrix(a: Matrix, rows: Sequence[int], cols: Sequence[int]) -> Matrix:
    return tuple(tuple(a[i][j] for j in cols) for i in rows)


def _subsets_by_mask(n: int, k: int) -> list[tuple[int, ...]]:
    return sorted(combinations(range(n), k), key=lambda s: sum(1 << i for i in s))


def minor_index(n: int, k: int) -> list[tuple[tuple[int, ...], tuple[int, ...]]]:
    """(rows, cols) pairs in the order :func:`minors` reports them.

    Subsets are ranked by bitmask value and pairs are ordered
    lexicographically (row subset first).
    """
    subsets = _subsets_by_mask(n, k)
    return [(r, c) for r in subsets for c in subsets]


def iter_minors(F: GF, a: Matrix, k: int) -> Iterator[int]:
    for rows, cols in minor_index(len(a), k):
        yield det(F, submatrix(a, rows, cols))


def minors(F: GF, a: Matrix, k: int) -> list[int]:
    """All k x k sub-determinants; 16, 36, 16 values for k = 1, 2, 3 on a 4x4."""
    return list(iter_minors(F, a, k))


def mat_inv(F: GF, a: Matrix) -> Matrix:
    n = len(a)
    if n == 2:
        d = det2(F, a)
        if d == 0:
            raise SingularMatrixError("singular 2x2 matrix")
        di = F.inv(d)
        return ((F.mul(di, a[1][1]), F.mul(di, a[0][1])),
                (F.mul(di, a[1][0]), F.mul(di, a[0][0])))
    # Gauss-Jordan on [a | I]
    rows = [list(r) + [int(i == j) for j in range(n)] for i, r in enumerate(a)]
    for col in range(n):
        piv = next((i for i in range(col, n) if rows[i][col]), None)
        if piv is None:
            raise SingularMatrixError("singular matrix")
        rows[col], rows[piv] = rows[piv], rows[col]
        pinv = F.inv(rows[col][col])
        rows[col] = [F.mul(pinv, x) for x in rows[col]]
        for i in range(n):
            f = rows[i][col]
            if i != col and f:
                rows[i] = [x ^ F.mul(f, y) for x, y in zip(rows[i], rows[col])]
    return tuple(tuple(r[n:]) for r in rows)


def rank(F: GF, a: Matrix) -> int:
    """Row rank via fraction-free elimination (no inverses needed)."""
    rows = [list(r) for r in a]
    ncols = len(rows[0]) if rows else 0
    r = 0
    for col in range(ncols):
        piv = next((i for i in range(r, len(rows)) if rows[i][col]), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        p = rows[r][col]
        for i in range(r + 1, len(rows)):
            f = rows[i][col]
            if f:
                rows[i] = [F.mul(p, x) ^ F.mul(f, y) for x, y in zip(rows[i], rows[r])]
        r += 1
    return r


def is_involutory(F: GF, a: Matrix) -> bool:
    return mat_mul(F, a, a) == identity(len(a))


def is_mds_full(F: GF, a: Matrix) -> bool:
    """Every square sub-matrix nonsingular: entries, 2x2, 3x3, then det."""
    if any(x == 0 for row in a for x in row):
        return False
    for k in range(2, len(a)):
        if any(m == 0 for m in iter_minors(F, a, k)):
            return False
    return det(F, a) != 0


def is_mds_fast_involutory(F: GF, a: Matrix, verify: bool = False) -> bool:
    """MDS test for an involutory 4x4: only entries and 2x2 minors.

    For M with M^2 = I the determinant is 1 and the entries of M^-1 = M are
    the 3x3 cofactors, so nonzero entries already cover the 3x3 minors.
    """
    if verify and not is_involutory(F, a):
        raise NotInvolutoryError("fast MDS check requires an involutory matrix")
    if any(x == 0 for row in a for x in row):
        return False
    return all(m != 0 for m in iter_minors(F, a, 2))


def row_col_sums_one(F: GF, a: Matrix) -> bool:
    def xor_all(vals):
        acc = 0
        for v in vals:
            acc ^= v
        return acc

    return (all(xor_all(row) == 1 for row in a)
            and all(xor_all(col) == 1 for col in zip(*a)))


def blocks(a: Matrix) -> tuple[Matrix, Matrix, Matrix, Matrix]:
    """Split a 4x4 into its 2x2 blocks (top-left, top-right, bottom-left, bottom-right)."""
    return (submatrix(a, (0, 1), (0, 1)), submatrix(a, (0, 1), (2, 3)),
            submatrix(a, (2, 3), (0, 1)), submatrix(a, (2, 3), (2, 3)))


def from_blocks(a: Matrix, b: Matrix, c: Matrix, d: Matrix) -> Matrix:
    return (a[0] + b[0], a[1] + b[1], c[0] + d[0], c[1] + d[1])


def in_L4(F: GF, a: Matrix) -> bool:
    """All four 2x2 corner blocks nonsingular."""
    return all(det2(F, blk) != 0 for blk in blocks(a))


# text format -------------------------------------------------------------

def format_matrix(F: GF, a: Matrix, alpha: bool = False) -> str:
    return "\n".join(" ".join(F.format(x, alpha) for x in row) for row in a)


def parse_matrix(F: GF, text: str, n: int = 4) -> Matrix:
    """Read n*n whitespace-separated elements (hex or a^k), row-major."""
    tokens = text.split()
    return from_flat(F.parse_many(tokens), n)
