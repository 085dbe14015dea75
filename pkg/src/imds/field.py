"""Arithmetic in GF(2^m) for 3 <= m <= 8.

Elements are plain ints holding the polynomial-basis bit pattern (bit i is
the coefficient of x^i). A :class:`GF` instance owns the log/antilog tables
for one modulus and is immutable once built, so it can be shared freely
between threads.
"""
from __future__ import annotations

import re
from functools import cached_property
from typing import Iterator, Sequence

from .errors import DegreeError, ReduciblePolynomialError

MIN_DEGREE = 3
MAX_DEGREE = 8

DEFAULT_POLYS = {
    3: 0b1011,       # x^3 + x + 1
    4: 0b10011,      # x^4 + x + 1
    5: 0b100101,     # x^5 + x^2 + 1
    6: 0b1000011,    # x^6 + x + 1
    7: 0b10000011,   # x^7 + x + 1
    8: 0b100011011,  # x^8 + x^4 + x^3 + x + 1
}


def clmul(a: int, b: int) -> int:
    """Carry-less product of two bit patterns (no reduction)."""
    result = 0
    while b:
        if b & 1:
            result ^= a
        a <<= 1
        b >>= 1
    return result


def poly_mod(a: int, mod: int) -> int:
    """Remainder of ``a`` divided by ``mod`` over GF(2)."""
    dm = mod.bit_length()
    while a.bit_length() >= dm:
        a ^= mod << (a.bit_length() - dm)
    return a


def polymul_mod(a: int, b: int, mod: int) -> int:
    """Schoolbook product of ``a`` and ``b`` reduced modulo ``mod``."""
    return poly_mod(clmul(a, b), mod)


def is_irreducible(poly: int) -> bool:
    """Trial division by every polynomial of degree 1..deg/2."""
    deg = poly.bit_length() - 1
    if deg < 1:
        return False
    for d in range(2, 1 << (deg // 2 + 1)):
        if poly_mod(poly, d) == 0:
            return False
    return True


def parse_poly(text: str | int) -> int:
    """Accept ``0x13``, ``19`` or an int."""
    if isinstance(text, int):
        return text
    return int(text.strip(), 0)


class GF:
    """The field GF(2^m) defined by an irreducible polynomial.

    >>> F = GF(4)
    >>> F.mul(F.alpha(10), F.alpha(8)) == F.alpha(3)
    True
    """

    def __init__(self, m: int, poly: int | str | None = None):
        if not MIN_DEGREE <= m <= MAX_DEGREE:
            raise DegreeError(f"degree m={m} outside {MIN_DEGREE}..{MAX_DEGREE}")
        poly = DEFAULT_POLYS[m] if poly is None else parse_poly(poly)
        if poly.bit_length() - 1 != m:
            raise DegreeError(f"polynomial {poly:#x} does not have degree {m}")
        if not is_irreducible(poly):
            raise ReduciblePolynomialError(f"polynomial {poly:#x} is reducible over GF(2)")

        self.m = m
        self.poly = poly
        self.order = 1 << m
        self.n_units = self.order - 1
        self.generator = self._find_generator()

        n = self.n_units
        exp = [0] * (2 * n)
        log = [0] * self.order
        x = 1
        for k in range(n):
            exp[k] = x
            log[x] = k
            x = polymul_mod(x, self.generator, poly)
        exp[n:] = exp[:n]
        # exp is doubled so log[a] + log[b] never needs a modulo
        self._exp = tuple(exp)
        self._log = tuple(log)

    def _find_generator(self) -> int:
        n = self.n_units
        for g in range(2, self.order):
            x, k = g, 1
            while x != 1:
                x = polymul_mod(x, g, self.poly)
                k += 1
            if k == n:
                return g
        raise AssertionError("a finite field always has a primitive element")

    def __repr__(self) -> str:
        return f"GF(2^{self.m}, poly={self.poly:#x})"

    def __eq__(self, other) -> bool:
        return isinstance(other, GF) and (self.m, self.poly) == (other.m, other.poly)

    def __hash__(self) -> int:
        return hash((self.m, self.poly))

    def __reduce__(self):
        return (GF, (self.m, self.poly))

    # tables -------------------------------------------------------------

    def log(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("log of zero")
        return self._log[a]

    def antilog(self, k: int) -> int:
        return self._exp[k % self.n_units]

    alpha = antilog

    @cached_property
    def mul_table(self):
        """Full product table as a uint8 numpy array of shape (order, order)."""
        import numpy as np

        t = np.zeros((self.order, self.order), dtype=np.uint8)
        for a in range(1, self.order):
            for b in range(1, self.order):
                t[a, b] = self._exp[self._log[a] + self._log[b]]
        t.setflags(write=False)
        return t

    # arithmetic ---------------------------------------------------------

    @staticmethod
    def add(a: int, b: int) -> int:
        return a ^ b

    sub = add

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        return self._exp[self._log[a] + self._log[b]]

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of zero in GF(2^m)")
        return self._exp[self.n_units - self._log[a]]

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def pow(self, a: int, k: int) -> int:
        if a == 0:
            if k < 0:
                raise ZeroDivisionError("negative power of zero")
            return 1 if k == 0 else 0
        return self._exp[(self._log[a] * k) % self.n_units]

    def sqrt(self, a: int) -> int:
        # squaring is the Frobenius automorphism; its inverse is a -> a^(2^(m-1))
        return self.pow(a, 1 << (self.m - 1))

    def units(self) -> Iterator[int]:
        """All nonzero elements in the order g^0, g^1, ..., g^(2^m-2)."""
        return iter(self._exp[: self.n_units])

    def elements(self) -> range:
        return range(self.order)

    # text -------------------------------------------------------------

    def format(self, a: int, alpha: bool = False) -> str:
        if not alpha:
            return f"0x{a:02x}"
        return "0" if a == 0 else f"a^{self._log[a]}"

    _ALPHA_RE = re.compile(r"^(?:a|α)(?:\^(-?\d+))?$")

    def parse(self, text: str) -> int:
        """Parse ``0x0b``, ``11``, ``a^9``, ``α^9`` or ``a``."""
        t = text.strip()
        mt = self._ALPHA_RE.match(t)
        if mt:
            return self.antilog(int(mt.group(1) or 1))
        v = int(t, 0)
        if not 0 <= v < self.order:
            raise ValueError(f"{text!r} is not an element of GF(2^{self.m})")
        return v

    def parse_many(self, texts: Sequence[str]) -> list[int]:
        return [self.parse(t) for t in texts]
