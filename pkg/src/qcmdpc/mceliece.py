"""Textbook McEliece encryption over a QC-MDPC code.

``c = m G + e`` with ``G = [I | Q]``; the public block ``q`` gives
``m G = (m | m * q)``. Decryption decodes ``c`` and keeps the first ``r`` bits.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .decoder import DecoderConfig, IterationTrace, bit_flip_decode
from .gf2_ring import DimensionError, RingElement, mul
from .qc_mdpc import Params, PrivateKey, PublicKey, as_rng, sample_support

Plaintext = RingElement  # r = n - r message bits


@dataclass(frozen=True)
class ErrorVector:
    support: tuple[int, ...]
    n: int

    def __post_init__(self):
        sup = tuple(int(p) for p in self.support)
        object.__setattr__(self, "support", sup)
        if any(b <= a for a, b in zip(sup, sup[1:])):
            raise ValueError("error support must be strictly increasing")
        if sup and (sup[0] < 0 or sup[-1] >= self.n):
            raise ValueError(f"error positions must lie in [0, {self.n})")

    @property
    def weight(self) -> int:
        return len(self.support)

    def to_array(self) -> np.ndarray:
        out = np.zeros(self.n, dtype=np.uint8)
        out[list(self.support)] = 1
        return out

    @classmethod
    def empty(cls, n: int) -> "ErrorVector":
        return cls((), n)


@dataclass(frozen=True, eq=False)
class Ciphertext:
    bits: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "bits", np.asarray(self.bits, dtype=np.uint8))

    @property
    def n(self) -> int:
        return self.bits.size

    def __eq__(self, other):
        return isinstance(other, Ciphertext) and np.array_equal(self.bits, other.bits)

    def hex(self) -> str:
        return np.packbits(self.bits, bitorder="little").tobytes().hex()

    @classmethod
    def from_hex(cls, text: str, n: int) -> "Ciphertext":
        raw = np.frombuffer(bytes.fromhex(text.strip()), dtype=np.uint8)
        if raw.size != (n + 7) // 8:
            raise DimensionError(f"expected {(n + 7) // 8} bytes for n={n}, got {raw.size}")
        return cls(np.unpackbits(raw, bitorder="little")[:n])

    def dumps(self) -> str:
        return f"qcmdpc-ct {self.n}\nc: {self.hex()}\n"

    @classmethod
    def loads(cls, text: str) -> "Ciphertext":
        lines = text.strip().splitlines()
        head = lines[0].split()
        if len(head) != 2 or head[0] != "qcmdpc-ct":
            raise ValueError(f"not a ciphertext file (header {lines[0]!r})")
        key, _, value = lines[1].partition(":")
        if key.strip() != "c":
            raise ValueError("missing 'c:' line")
        return cls.from_hex(value, int(head[1]))


@dataclass
class DecryptFailure:
    """Decoding ran out of iterations with a nonzero syndrome."""

    trace: IterationTrace

    def __bool__(self) -> bool:
        return False


def sample_error(params: Params, rng=None, weight: int | None = None) -> ErrorVector:
    t = params.t if weight is None else weight
    rng = as_rng(rng)
    return ErrorVector(sample_support(params.n, t, rng).positions, params.n)


def encrypt(pub: PublicKey, m: Plaintext, e: ErrorVector) -> Ciphertext:
    p = pub.params
    if m.r != p.r or e.n != p.n:
        raise DimensionError("plaintext or error length does not match the key")
    codeword = np.concatenate([m.to_array(), mul(m, pub.q).to_array()])
    return Ciphertext(codeword ^ e.to_array())


def encrypt_random(pub: PublicKey, m: Plaintext, rng=None) -> tuple[Ciphertext, ErrorVector]:
    """Encrypt with a fresh weight-t error drawn from ``rng``."""
    e = sample_error(pub.params, rng)
    return encrypt(pub, m, e), e


def decrypt(priv: PrivateKey, c: Ciphertext, cfg: DecoderConfig) -> Plaintext | DecryptFailure:
    p = priv.params
    if c.n != p.n:
        raise DimensionError(f"ciphertext has {c.n} bits, key expects {p.n}")
    result = bit_flip_decode(priv, c.bits, cfg)
    if not result.decoded:
        return DecryptFailure(result.trace)
    return RingElement.from_array(result.word[: p.r])
