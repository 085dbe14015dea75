"""Involutory matrices from (P, C) blocks and their class representatives.

Every involutory M whose four 2x2 corner blocks are nonsingular has the form

    M = [[P C, P C P], [C, C P]] + I

for nonsingular 2x2 P and C. Representatives take
C = c [[pq + r, p], [q, 1]] and P = [[d + 1, d], [d, d + 1]], and every
involutory MDS matrix is D^-1 R D for exactly one representative R and one
D = Diag(1, b1, b2, b3).
"""
from __future__ import annotations

from typing import NamedTuple

from .errors import NotInvolutoryError, NotMDSError, SingularBlockError
from .field import GF
from .matrix import (Matrix, blocks, det2, from_blocks, identity, in_L4, is_involutory,
                     is_mds_fast_involutory, is_mds_full, mat_add, mat_inv, mat_mul,
                     rank, row_col_sums_one, scalar_mul)

I2 = identity(2)
I4 = identity(4)


class RepTuple(NamedTuple):
    p: int
    q: int
    r: int
    c: int
    d: int

    def mds_viable(self, F: GF) -> bool:
        """Necessary conditions for an MDS representative: r != pq and d != 1."""
        return self.r != F.mul(self.p, self.q) and self.d != 1


class DiagTriple(NamedTuple):
    b1: int
    b2: int
    b3: int

    @property
    def diagonal(self) -> tuple[int, int, int, int]:
        return (1, self.b1, self.b2, self.b3)


IDENTITY_DIAG = DiagTriple(1, 1, 1)


def _require_nonsingular(F: GF, a: Matrix, name: str) -> None:
    if det2(F, a) == 0:
        raise SingularBlockError(f"{name} is singular")


def build_involutory(F: GF, P: Matrix, C: Matrix) -> Matrix:
    """[[PC, PCP], [C, CP]] + I, involutory for any nonsingular P and C."""
    _require_nonsingular(F, P, "P")
    _require_nonsingular(F, C, "C")
    PC = mat_mul(F, P, C)
    CP = mat_mul(F, C, P)
    PCP = mat_mul(F, PC, P)
    return from_blocks(mat_add(F, PC, I2), PCP, C, mat_add(F, CP, I2))


def representative_blocks(F: GF, t: RepTuple) -> tuple[Matrix, Matrix]:
    p, q, r, c, d = t
    C = scalar_mul(F, c, ((F.mul(p, q) ^ r, p), (q, 1)))
    P = ((d ^ 1, d), (d, d ^ 1))
    return P, C


def build_representative(F: GF, t: RepTuple) -> Matrix:
    if any(x == 0 for x in t):
        raise SingularBlockError(f"tuple entries must be units: {t}")
    return build_involutory(F, *representative_blocks(F, t))


def expand(F: GF, R: Matrix, D: DiagTriple) -> Matrix:
    """D^-1 R D with D = Diag(1, b1, b2, b3); D may be any (b1, b2, b3) sequence."""
    diag = DiagTriple(*D).diagonal
    dinv = [F.inv(b) for b in diag]
    return tuple(tuple(F.mul(F.mul(dinv[i], R[i][j]), diag[j]) for j in range(4))
                 for i in range(4))


def split_involutory(F: GF, M: Matrix) -> tuple[Matrix, Matrix]:
    """Recover (P, C) with M = build_involutory(P, C).

    C is the bottom-left block and P = C^-1 (bottom-right block + I).
    """
    _, _, C, BR = blocks(M)
    _require_nonsingular(F, C, "bottom-left block")
    P = mat_mul(F, mat_inv(F, C), mat_add(F, BR, I2))
    return P, C


class Canonical(NamedTuple):
    R: Matrix
    D: DiagTriple
    tuple: RepTuple


def canonicalize(F: GF, M: Matrix, verify: bool = False) -> Canonical:
    """Find the representative R and conjugator D with D^-1 R D = M."""
    if not is_involutory(F, M):
        raise NotInvolutoryError("input is not involutory")
    if not is_mds_fast_involutory(F, M):
        raise NotMDSError("input is not MDS")
    P, C = split_involutory(F, M)
    (p11, p12), (p21, p22) = P
    (c11, c12), (c21, c22) = C
    mul, inv = F.mul, F.inv

    b1 = F.sqrt(mul(mul(p11, p12), inv(mul(p21, p22))))
    b2 = p11 ^ mul(b1, p21)
    b3 = p12 ^ mul(b1, p22)
    b1i, b2i, b3i = inv(b1), inv(b2), inv(b3)

    C1 = ((mul(b2, c11), mul(mul(b2, b1i), c12)),
          (mul(b3, c21), mul(mul(b3, b1i), c22)))
    P1 = ((mul(p11, b2i), mul(p12, b3i)),
          (mul(mul(b1, p21), b2i), mul(mul(b1, p22), b3i)))
    R = build_involutory(F, P1, C1)

    c = C1[1][1]
    ci = inv(c)
    t = RepTuple(p=mul(C1[0][1], ci), q=mul(C1[1][0], ci),
                 r=mul(det2(F, C1), mul(ci, ci)), c=c, d=P1[0][1])
    D = DiagTriple(b1, b2, b3)

    if verify:
        check_representative(F, R)
        if build_representative(F, t) != R or expand(F, R, D) != M:
            raise AssertionError("canonical form does not round-trip")
    return Canonical(R, D, t)


def check_representative(F: GF, R: Matrix) -> None:
    """Assert the structural properties every MDS representative has."""
    assert is_involutory(F, R), "representative is not involutory"
    assert is_mds_full(F, R), "representative is not MDS"
    assert row_col_sums_one(F, R), "representative rows/columns do not sum to 1"
    assert rank(F, mat_add(F, R, I4)) == 2, "rank(R + I) != 2"
    P, C = split_involutory(F, R)
    assert all(x for row in P + C for x in row), "P or C has a zero entry"


def from_yang_form(F: GF, A1: Matrix, A2: Matrix) -> tuple[Matrix, Matrix]:
    """(P, C) for the matrix [[A1, A2], [A2^-1 (I + A1^2), A2^-1 A1 A2]]."""
    _require_nonsingular(F, A1, "A1")
    _require_nonsingular(F, A2, "A2")
    I_A1 = mat_add(F, I2, A1)
    _require_nonsingular(F, I_A1, "I + A1")
    A2i = mat_inv(F, A2)
    P = mat_mul(F, mat_inv(F, I_A1), A2)
    C = mat_mul(F, A2i, mat_add(F, I2, mat_mul(F, A1, A1)))
    return P, C


def yang_matrix(F: GF, A1: Matrix, A2: Matrix) -> Matrix:
    A2i = mat_inv(F, A2)
    return from_blocks(A1, A2,
                       mat_mul(F, A2i, mat_add(F, I2, mat_mul(F, A1, A1))),
                       mat_mul(F, mat_mul(F, A2i, A1), A2))


def from_samanta_form(F: GF, A1: Matrix, A3: Matrix) -> tuple[Matrix, Matrix]:
    """(P, C) for the matrix [[A1, (I + A1^2) A3^-1], [A3, A3 A1 A3^-1]]."""
    _require_nonsingular(F, A1, "A1")
    _require_nonsingular(F, A3, "A3")
    I_A1 = mat_add(F, I2, A1)
    _require_nonsingular(F, I_A1, "I + A1")
    P = mat_mul(F, I_A1, mat_inv(F, A3))
    return P, A3


def samanta_matrix(F: GF, A1: Matrix, A3: Matrix) -> Matrix:
    A3i = mat_inv(F, A3)
    return from_blocks(A1, mat_mul(F, mat_add(F, I2, mat_mul(F, A1, A1)), A3i),
                       A3, mat_mul(F, mat_mul(F, A3, A1), A3i))


def nilpotent_part(F: GF, M: Matrix) -> Matrix:
    """N = M + I, which squares to zero when M is involutory."""
    if not is_involutory(F, M):
        raise NotInvolutoryError("input is not involutory")
    return mat_add(F, M, identity(len(M)))


__all__ = [
    "RepTuple", "DiagTriple", "IDENTITY_DIAG", "Canonical", "build_involutory",
    "build_representative", "representative_blocks", "expand", "split_involutory",
    "canonicalize", "check_representative", "from_yang_form", "yang_matrix",
    "from_samanta_form", "samanta_matrix", "nilpotent_part", "in_L4",
]
