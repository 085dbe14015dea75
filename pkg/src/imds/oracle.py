"""Brute-force cross-checks for small fields.

Nothing here uses the matrix, forms or enumerator modules: products,
determinants (Leibniz expansion), ranks (largest nonzero minor) and
conjugation are written again from scratch on numpy batches, so a bug in
the main pipeline cannot confirm itself. Only the field's product table is
shared.
"""
from __future__ import annotations

from itertools import combinations, permutations, product
from typing import Iterable, Iterator

import numpy as np

from .errors import BudgetExceededError
from .field import GF

Flat = tuple[int, ...]  # 16 entries, row-major


def _check_budget(F: GF, allow_large: bool) -> None:
    if F.m == 3:
        return
    if F.m == 4 and allow_large:
        return
    raise BudgetExceededError(
        f"brute force over GF(2^{F.m}) is out of budget"
        + ("" if F.m == 4 else " (only m=3, or m=4 with allow_large)"))


def _table(F: GF) -> np.ndarray:
    return np.asarray(F.mul_table)


def nonsingular_2x2(F: GF) -> np.ndarray:
    """Every nonsingular 2x2 matrix as rows (a, b, c, d) of [[a, b], [c, d]]."""
    T = _table(F)
    q = F.order
    allm = np.array(list(product(range(q), repeat=4)), dtype=np.uint8)
    a, b, c, d = allm.T
    return allm[(T[a, d] ^ T[b, c]) != 0]


def _leibniz(T: np.ndarray, M: np.ndarray, rows, cols) -> np.ndarray:
    """Determinant of M[:, rows][:, :, cols] for a batch of flat 4x4 matrices."""
    k = len(rows)
    acc = np.zeros(len(M), dtype=np.uint8)
    for perm in permutations(range(k)):
        term = M[:, 4 * rows[0] + cols[perm[0]]]
        for i in range(1, k):
            term = T[term, M[:, 4 * rows[i] + cols[perm[i]]]]
        acc ^= term
    return acc


def mds_mask(F: GF, M: np.ndarray) -> np.ndarray:
    """Boolean mask of rows of M (shape (K, 16)) whose every minor is nonzero."""
    T = _table(F)
    keep = np.nonzero(np.all(M != 0, axis=1))[0]
    for k in (2, 3, 4):
        for rows in combinations(range(4), k):
            for cols in combinations(range(4), k):
                if len(keep) == 0:
                    break
                keep = keep[_leibniz(T, M[keep], rows, cols) != 0]
    mask = np.zeros(len(M), dtype=bool)
    mask[keep] = True
    return mask


def batch_matmul4(F: GF, A: np.ndarray, B: np.ndarray) -> np.ndarray:
    T = _table(F)
    out = np.zeros_like(A)
    for i in range(4):
        for j in range(4):
            acc = np.zeros(len(A), dtype=np.uint8)
            for k in range(4):
                acc ^= T[A[:, 4 * i + k], B[:, 4 * k + j]]
            out[:, 4 * i + j] = acc
    return out


def involutory_batches(F: GF, allow_large: bool = False) -> Iterator[tuple[np.ndarray, np.ndarray]]:
    """For each nonsingular P, the batch of [[PC, PCP], [C, CP]] + I over all nonsingular C."""
    _check_budget(F, allow_large)
    T = _table(F)
    NS = nonsingular_2x2(F)
    c11, c12, c21, c22 = NS.T
    for P in NS:
        p11, p12, p21, p22 = (int(x) for x in P)
        pc11 = T[p11, c11] ^ T[p12, c21]
        pc12 = T[p11, c12] ^ T[p12, c22]
        pc21 = T[p21, c11] ^ T[p22, c21]
        pc22 = T[p21, c12] ^ T[p22, c22]
        M = np.empty((len(NS), 16), dtype=np.uint8)
        M[:, 0] = pc11 ^ 1
        M[:, 1] = pc12
        M[:, 2] = T[pc11, p11] ^ T[pc12, p21]
        M[:, 3] = T[pc11, p12] ^ T[pc12, p22]
        M[:, 4] = pc21
        M[:, 5] = pc22 ^ 1
        M[:, 6] = T[pc21, p11] ^ T[pc22, p21]
        M[:, 7] = T[pc21, p12] ^ T[pc22, p22]
        M[:, 8] = c11
        M[:, 9] = c12
        M[:, 10] = T[c11, p11] ^ T[c12, p21] ^ 1
        M[:, 11] = T[c11, p12] ^ T[c12, p22]
        M[:, 12] = c21
        M[:, 13] = c22
        M[:, 14] = T[c21, p11] ^ T[c22, p21]
        M[:, 15] = T[c21, p12] ^ T[c22, p22] ^ 1
        yield P, M


def l4_mask(F: GF, M: np.ndarray) -> np.ndarray:
    """Rows whose four 2x2 corner blocks are all nonsingular."""
    T = _table(F)
    mask = np.ones(len(M), dtype=bool)
    for i, j, k, l in ((0, 1, 4, 5), (2, 3, 6, 7), (8, 9, 12, 13), (10, 11, 14, 15)):
        mask &= (T[M[:, i], M[:, l]] ^ T[M[:, j], M[:, k]]) != 0
    return mask


def all_involutory_L4(F: GF, allow_large: bool = False) -> Iterator[Flat]:
    """Every involutory 4x4 with all four 2x2 corner blocks nonsingular, one at a time.

    The raw (P, C) batches also contain matrices whose diagonal blocks PC + I
    or CP + I are singular; those are dropped here.
    """
    for _, M in involutory_batches(F, allow_large):
        for row in M[l4_mask(F, M)].tolist():
            yield tuple(row)


def pack(M: np.ndarray) -> np.ndarray:
    """Pack rows of 16 byte-sized entries into two uint64 words (for set ops)."""
    w = M.astype(np.uint64)
    shifts = (8 * np.arange(8)).astype(np.uint64)
    lo = np.bitwise_or.reduce(w[:, :8] << shifts, axis=1)
    hi = np.bitwise_or.reduce(w[:, 8:] << shifts, axis=1)
    return np.stack([hi, lo], axis=1)


def involutory_mds_set(F: GF, allow_large: bool = False) -> set[Flat]:
    """All involutory MDS matrices, by filtering every (P, C) pair."""
    out: set[Flat] = set()
    for _, M in involutory_batches(F, allow_large):
        for row in M[mds_mask(F, M)].tolist():
            out.add(tuple(row))
    return out


def conjugate(F: GF, M: Flat, diag: tuple[int, int, int, int]) -> Flat:
    """D^-1 M D with D = Diag(*diag)."""
    out = []
    for i in range(4):
        di = F.inv(diag[i])
        for j in range(4):
            out.append(F.mul(F.mul(di, M[4 * i + j]), diag[j]))
    return tuple(out)


def orbit(F: GF, M: Flat) -> set[Flat]:
    units = list(F.units())
    return {conjugate(F, M, (1, b1, b2, b3)) for b1, b2, b3 in product(units, repeat=3)}


def classify_by_conjugation(matrices: Iterable[Flat], F: GF) -> list[frozenset[Flat]]:
    """Partition a conjugation-closed set into diagonal-conjugation classes."""
    _check_budget(F, allow_large=False)
    remaining = set(matrices)
    classes = []
    while remaining:
        M = min(remaining)
        cls = orbit(F, M)
        if not cls <= remaining:
            raise ValueError("input set is not closed under diagonal conjugation")
        remaining -= cls
        classes.append(frozenset(cls))
    return classes


def fast_mds_mask(F: GF, M: np.ndarray) -> np.ndarray:
    """Entries and 2x2 minors only (the shortcut valid for involutory inputs)."""
    T = _table(F)
    keep = np.nonzero(np.all(M != 0, axis=1))[0]
    for rows in combinations(range(4), 2):
        for cols in combinations(range(4), 2):
            keep = keep[_leibniz(T, M[keep], rows, cols) != 0]
    mask = np.zeros(len(M), dtype=bool)
    mask[keep] = True
    return mask


def minor_rank(F: GF, M: np.ndarray) -> np.ndarray:
    """Per row of M, the largest k with a nonzero k x k minor."""
    T = _table(F)
    ranks = np.zeros(len(M), dtype=np.int64)
    for k in (1, 2, 3, 4):
        hit = np.zeros(len(M), dtype=bool)
        for rows in combinations(range(4), k):
            for cols in combinations(range(4), k):
                hit |= _leibniz(T, M, rows, cols) != 0
        ranks[hit] = k
    return ranks


def naive_rank(F: GF, M: Flat) -> int:
    return int(minor_rank(F, np.array([M], dtype=np.uint8))[0])


def row_sums_one(F: GF, M: Flat) -> bool:
    rows = all((M[4 * i] ^ M[4 * i + 1] ^ M[4 * i + 2] ^ M[4 * i + 3]) == 1 for i in range(4))
    cols = all((M[j] ^ M[4 + j] ^ M[8 + j] ^ M[12 + j]) == 1 for j in range(4))
    return rows and cols


def involution_nilpotent_2x2(F: GF) -> tuple[set, set]:
    """All 2x2 involutions and all 2x2 square-zero matrices, by exhaustion."""
    T = _table(F)
    allm = np.array(list(product(range(F.order), repeat=4)), dtype=np.uint8)
    a, b, c, d = allm.T
    s11 = T[a, a] ^ T[b, c]
    s12 = T[a, b] ^ T[b, d]
    s21 = T[c, a] ^ T[d, c]
    s22 = T[c, b] ^ T[d, d]
    invol = allm[(s11 == 1) & (s12 == 0) & (s21 == 0) & (s22 == 1)]
    nil = allm[(s11 == 0) & (s12 == 0) & (s21 == 0) & (s22 == 0)]
    return {tuple(r) for r in invol.tolist()}, {tuple(r) for r in nil.tolist()}
