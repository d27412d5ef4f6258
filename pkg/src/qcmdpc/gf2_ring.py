"""Arithmetic in the quotient ring F2[x]/(x^r - 1).

A circulant r x r binary block is identified with its first row, which is
stored as a polynomial. Coefficients are packed into a Python int with
coefficient ``i`` at bit ``i`` (little-endian), so XOR, shifts and
rotations are single big-integer operations.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np


class DimensionError(ValueError):
    """Operands live in rings (or vector spaces) of different size."""


class NotInvertible(ArithmeticError):
    """The element shares a nontrivial factor with x^r - 1."""


def _mask(r: int) -> int:
    return (1 << r) - 1


def _rotl(bits: int, k: int, r: int) -> int:
    k %= r
    if k == 0:
        return bits
    return ((bits << k) | (bits >> (r - k))) & _mask(r)


@dataclass(frozen=True)
class RingElement:
    """Dense element of F2[x]/(x^r - 1)."""

    r: int
    bits: int = 0

    def __post_init__(self):
        if self.r <= 0:
            raise ValueError(f"r must be positive, got {self.r}")
        if self.bits < 0 or self.bits >> self.r:
            raise ValueError("coefficients exceed ring degree")

    # construction -----------------------------------------------------

    @classmethod
    def zero(cls, r: int) -> "RingElement":
        return cls(r, 0)

    @classmethod
    def one(cls, r: int) -> "RingElement":
        return cls(r, 1)

    @classmethod
    def monomial(cls, k: int, r: int) -> "RingElement":
        return cls(r, 1 << (k % r))

    @classmethod
    def from_support(cls, positions: Iterable[int], r: int) -> "RingElement":
        bits = 0
        for p in positions:
            if not 0 <= p < r:
                raise ValueError(f"position {p} outside [0, {r})")
            bits ^= 1 << p
        return cls(r, bits)

    @classmethod
    def from_array(cls, arr: Sequence[int] | np.ndarray) -> "RingElement":
        a = np.asarray(arr, dtype=np.uint8) & 1
        r = a.size
        packed = np.packbits(a, bitorder="little").tobytes()
        return cls(r, int.from_bytes(packed, "little"))

    @classmethod
    def random(cls, r: int, rng: np.random.Generator) -> "RingElement":
        return cls.from_array(rng.integers(0, 2, size=r, dtype=np.uint8))

    # views --------------------------------------------------------------

    def to_array(self) -> np.ndarray:
        """Coefficients as a length-r uint8 array."""
        raw = np.frombuffer(self.to_bytes(), dtype=np.uint8)
        return np.unpackbits(raw, bitorder="little")[: self.r].copy()

    def to_bytes(self) -> bytes:
        return self.bits.to_bytes((self.r + 7) // 8, "little")

    def hex(self) -> str:
        return self.to_bytes().hex()

    @classmethod
    def from_hex(cls, text: str, r: int) -> "RingElement":
        raw = bytes.fromhex(text.strip())
        if len(raw) != (r + 7) // 8:
            raise DimensionError(f"expected {(r + 7) // 8} bytes for r={r}, got {len(raw)}")
        return cls(r, int.from_bytes(raw, "little"))

    def support(self) -> list[int]:
        out = []
        b = self.bits
        while b:
            low = b & -b
            out.append(low.bit_length() - 1)
            b ^= low
        return out

    def __getitem__(self, i: int) -> int:
        if not 0 <= i < self.r:
            raise IndexError(i)
        return (self.bits >> i) & 1

    def __len__(self) -> int:
        return self.r

    def __bool__(self) -> bool:
        return self.bits != 0

    def __add__(self, other: "RingElement") -> "RingElement":
        return add(self, other)

    def __mul__(self, other: "RingElement") -> "RingElement":
        return mul(self, other)

    def __repr__(self) -> str:
        terms = [("1" if i == 0 else f"x^{i}") for i in self.support()[:8]]
        more = " + ..." if self.weight > 8 else ""
        return f"RingElement(r={self.r}, {' + '.join(terms) or '0'}{more})"

    @property
    def weight(self) -> int:
        return self.bits.bit_count()


@dataclass(frozen=True)
class SparseIndices:
    """Support of a sparse ring element, kept as sorted positions."""

    positions: tuple[int, ...]
    r: int

    def __post_init__(self):
        pos = tuple(int(p) for p in self.positions)
        object.__setattr__(self, "positions", pos)
        if any(b <= a for a, b in zip(pos, pos[1:])):
            raise ValueError("positions must be strictly increasing")
        if pos and (pos[0] < 0 or pos[-1] >= self.r):
            raise ValueError(f"positions must lie in [0, {self.r})")

    def __len__(self) -> int:
        return len(self.positions)

    def __iter__(self):
        return iter(self.positions)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.positions, dtype=np.int64)


def sparsify(a: RingElement) -> SparseIndices:
    return SparseIndices(tuple(a.support()), a.r)


def densify(a: SparseIndices) -> RingElement:
    return RingElement.from_support(a.positions, a.r)


def _check(a, b) -> None:
    if a.r != b.r:
        raise DimensionError(f"ring size mismatch: {a.r} != {b.r}")


def add(a: RingElement, b: RingElement) -> RingElement:
    _check(a, b)
    return RingElement(a.r, a.bits ^ b.bits)


def _clmul(a: int, b: int) -> int:
    # carry-less product, iterating over the sparser operand
    if a.bit_count() > b.bit_count():
        a, b = b, a
    acc = 0
    while a:
        low = a & -a
        acc ^= b << (low.bit_length() - 1)
        a ^= low
    return acc


def _reduce(p: int, r: int) -> int:
    # x^r == 1, so fold the high part down until it fits
    m = _mask(r)
    while p >> r:
        p = (p & m) ^ (p >> r)
    return p


def mul(a: RingElement, b: RingElement) -> RingElement:
    """Product modulo x^r - 1 (shift-and-add carry-less multiply, then fold)."""
    _check(a, b)
    return RingElement(a.r, _reduce(_clmul(a.bits, b.bits), a.r))


def mul_schoolbook(a: RingElement, b: RingElement) -> RingElement:
    """Coefficient-by-coefficient cyclic convolution. Slow reference path."""
    _check(a, b)
    r = a.r
    out = [0] * r
    for i in range(r):
        if a[i]:
            for j in range(r):
                if b[j]:
                    out[(i + j) % r] ^= 1
    return RingElement.from_array(out)


def mul_sparse(a: SparseIndices, b: RingElement) -> RingElement:
    """XOR of the rotations of ``b`` selected by the support of ``a``."""
    _check(a, b)
    acc = 0
    for k in a.positions:
        acc ^= _rotl(b.bits, k, b.r)
    return RingElement(b.r, acc)


def rotate(a: RingElement, k: int) -> RingElement:
    """Multiply by x^k."""
    return RingElement(a.r, _rotl(a.bits, k, a.r))


def _poly_inverse_mod(a: int, f: int) -> int:
    """Inverse of ``a`` modulo ``f`` over F2[x] by the extended Euclidean algorithm.

    Loop invariant: ``g1 * a == u`` and ``g2 * a == v`` (mod f).
    """
    u, v = a, f
    g1, g2 = 1, 0
    while u != 1:
        if u == 0:
            raise NotInvertible("gcd with modulus is not 1")
        j = u.bit_length() - v.bit_length()
        if j < 0:
            u, v = v, u
            g1, g2 = g2, g1
            j = -j
        u ^= v << j
        g1 ^= g2 << j
    return g1


def invert(a: RingElement) -> RingElement:
    """Multiplicative inverse; raises NotInvertible when gcd(a, x^r - 1) != 1."""
    if a.bits == 0:
        raise NotInvertible("zero has no inverse")
    if a.weight % 2 == 0:
        # a(1) = 0, so (x + 1) divides both a and x^r - 1
        raise NotInvertible("even-weight element is divisible by x + 1")
    f = (1 << a.r) | 1
    g = _poly_inverse_mod(a.bits, f)
    g = _reduce(g, a.r)
    if a.r == 1:
        g &= 1
    return RingElement(a.r, g)


def transpose_conjugate(a: RingElement) -> RingElement:
    """Map a(x) to a(x^{-1}): the first row of the transposed circulant block."""
    r = a.r
    bits = a.bits
    # coefficient 0 stays put, coefficients 1..r-1 are reversed
    low = bits & 1
    rest = bits >> 1
    rev = int(format(rest, f"0{r - 1}b")[::-1], 2) if r > 1 else 0
    return RingElement(r, low | (rev << 1))


def weight(a: RingElement) -> int:
    return a.weight
