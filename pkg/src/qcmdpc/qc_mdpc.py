"""QC-MDPC code parameters, key generation and syndromes.

The parity-check matrix is ``H = [H0 | H1]`` where ``H0`` and ``H1`` are the
circulant blocks whose first rows are the sparse polynomials ``h0`` and
``h1``. Since ``H^T`` has blocks with first rows ``h0(1/x)`` and ``h1(1/x)``,
the syndrome of ``x = (x0 | x1)`` is ``x0 * h0~ + x1 * h1~`` and column ``i``
of ``H`` is ``x^i * h0~`` (or ``x^(i-r) * h1~`` in the second block).
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path

import numpy as np

from .gf2_ring import (
    DimensionError,
    NotInvertible,
    RingElement,
    SparseIndices,
    add,
    densify,
    invert,
    mul,
    mul_sparse,
    rotate,
    sparsify,
    transpose_conjugate,
)

log = logging.getLogger(__name__)

MAX_KEYGEN_ATTEMPTS = 100


class KeygenError(RuntimeError):
    pass


@dataclass(frozen=True)
class Params:
    n: int
    r: int
    w: int
    t: int

    def __post_init__(self):
        if self.n != 2 * self.r:
            raise ValueError(f"only rate 1/2 two-block codes are supported (n={self.n}, r={self.r})")
        if not 0 < self.w < self.r:
            raise ValueError(f"need 0 < w < r, got w={self.w}")
        if self.w % 2:
            raise ValueError(f"w must be even to split across two blocks, got {self.w}")
        if not 0 <= self.t <= self.n:
            raise ValueError(f"need 0 <= t <= n, got t={self.t}")
        if (self.w // 2) % 2 == 0:
            log.warning("w/2 = %d is even: every h1 has h1(1) = 0 and keygen cannot succeed", self.w // 2)

    @property
    def block_weight(self) -> int:
        return self.w // 2

    @classmethod
    def preset(cls, name: str | int) -> "Params":
        try:
            return PRESETS[str(name)]
        except KeyError:
            raise ValueError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}") from None

    @classmethod
    def parse(cls, text: str) -> "Params":
        """Parse ``n,r,w,t``."""
        n, r, w, t = (int(v) for v in text.split(","))
        return cls(n, r, w, t)

    def __str__(self) -> str:
        return f"({self.n},{self.r},{self.w},{self.t})"


PRESETS = {
    "80": Params(9602, 4801, 90, 84),
    "128": Params(19714, 9857, 142, 134),
    "toy": Params(1202, 601, 30, 11),
}


def as_rng(rng: np.random.Generator | int | None) -> np.random.Generator:
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)


def sample_support(r: int, weight: int, rng: np.random.Generator) -> SparseIndices:
    """Uniform ``weight``-subset of ``[0, r)`` (partial Fisher-Yates shuffle)."""
    positions = rng.choice(r, size=weight, replace=False, shuffle=False)
    return SparseIndices(tuple(sorted(int(p) for p in positions)), r)


@dataclass(frozen=True)
class PrivateKey:
    h0: SparseIndices
    h1: SparseIndices
    params: Params

    def __post_init__(self):
        for h in (self.h0, self.h1):
            if h.r != self.params.r:
                raise DimensionError("key block size does not match params")
        if len(self.h0) + len(self.h1) != self.params.w:
            raise ValueError("row weight of [H0 | H1] must equal w")

    # numpy views used by the decoder
    @cached_property
    def h0_arr(self) -> np.ndarray:
        return self.h0.as_array()

    @cached_property
    def h1_arr(self) -> np.ndarray:
        return self.h1.as_array()

    @cached_property
    def h0_conj(self) -> SparseIndices:
        return sparsify(transpose_conjugate(densify(self.h0)))

    @cached_property
    def h1_conj(self) -> SparseIndices:
        return sparsify(transpose_conjugate(densify(self.h1)))


@dataclass(frozen=True)
class PublicKey:
    q: RingElement
    params: Params

    def __post_init__(self):
        if self.q.r != self.params.r:
            raise DimensionError("public block size does not match params")


def derive_public(h0: SparseIndices, h1: SparseIndices) -> RingElement:
    """First row of (H1^-1 H0)^T."""
    return transpose_conjugate(mul_sparse(h0, invert(densify(h1))))


def keygen(params: Params, rng: np.random.Generator | int | None = None) -> tuple[PrivateKey, PublicKey]:
    rng = as_rng(rng)
    r, d = params.r, params.block_weight
    h0 = sample_support(r, d, rng)
    for _ in range(MAX_KEYGEN_ATTEMPTS):
        h1 = sample_support(r, d, rng)
        try:
            q = derive_public(h0, h1)
        except NotInvertible:
            continue
        return PrivateKey(h0, h1, params), PublicKey(q, params)
    raise KeygenError(f"no invertible h1 after {MAX_KEYGEN_ATTEMPTS} attempts for {params}")


def split(x, params: Params) -> tuple[RingElement, RingElement]:
    """Split a length-n word into its two ring halves."""
    a = np.asarray(x, dtype=np.uint8)
    if a.shape != (params.n,):
        raise DimensionError(f"expected a word of length {params.n}, got shape {a.shape}")
    return RingElement.from_array(a[: params.r]), RingElement.from_array(a[params.r :])


def syndrome(priv: PrivateKey, x) -> RingElement:
    x0, x1 = split(x, priv.params)
    return add(mul_sparse(priv.h0_conj, x0), mul_sparse(priv.h1_conj, x1))


def syndrome_array(priv: PrivateKey, support: np.ndarray) -> np.ndarray:
    """Syndrome of the word with the given support, as a uint8 array (XOR of columns)."""
    r = priv.params.r
    support = np.asarray(support, dtype=np.int64)
    idx = column_indices(priv, support)
    return (np.bincount(idx, minlength=r) & 1).astype(np.uint8)


def column_indices(priv: PrivateKey, positions: np.ndarray) -> np.ndarray:
    """Concatenated supports of the given columns of H (with repetition)."""
    r = priv.params.r
    positions = np.asarray(positions, dtype=np.int64)
    left = positions[positions < r]
    right = positions[positions >= r] - r
    i0 = (left[:, None] - priv.h0_arr[None, :]) % r
    i1 = (right[:, None] - priv.h1_arr[None, :]) % r
    return np.concatenate([i0.ravel(), i1.ravel()])


def column(priv: PrivateKey, i: int) -> RingElement:
    r = priv.params.r
    if not 0 <= i < priv.params.n:
        raise IndexError(f"column {i} outside [0, {priv.params.n})")
    if i < r:
        return rotate(densify(priv.h0_conj), i)
    return rotate(densify(priv.h1_conj), i - r)


def check_keypair(priv: PrivateKey, pub: PublicKey) -> bool:
    """True iff G H^T = 0, i.e. h0~ + q * h1~ = 0 in the ring."""
    if priv.params != pub.params:
        return False
    lhs = mul_sparse(priv.h1_conj, pub.q)
    return lhs == densify(priv.h0_conj)


def generator_row(pub: PublicKey, i: int) -> np.ndarray:
    """Row ``i`` of G = [I | Q] as a length-n array."""
    r = pub.params.r
    out = np.zeros(pub.params.n, dtype=np.uint8)
    out[i] = 1
    out[r:] = rotate(pub.q, i).to_array()
    return out


# key files --------------------------------------------------------------

def _header(kind: str, p: Params) -> str:
    return f"qcmdpc-{kind} {p.n} {p.r} {p.w} {p.t}"


def _parse_header(line: str, kind: str) -> Params:
    parts = line.split()
    if len(parts) != 5 or parts[0] != f"qcmdpc-{kind}":
        raise ValueError(f"not a {kind} key file (header {line!r})")
    return Params(*(int(v) for v in parts[1:]))


def _field(line: str, name: str) -> str:
    key, _, value = line.partition(":")
    if key.strip() != name:
        raise ValueError(f"expected field {name!r}, got {line!r}")
    return value.strip()


def dump_private(priv: PrivateKey) -> str:
    return "\n".join([
        _header("private", priv.params),
        "h0: " + ",".join(map(str, priv.h0)),
        "h1: " + ",".join(map(str, priv.h1)),
    ]) + "\n"


def load_private(text: str) -> PrivateKey:
    lines = text.strip().splitlines()
    params = _parse_header(lines[0], "private")
    blocks = []
    for line, name in zip(lines[1:3], ("h0", "h1")):
        value = _field(line, name)
        blocks.append(SparseIndices(tuple(int(v) for v in value.split(",") if v), params.r))
    return PrivateKey(blocks[0], blocks[1], params)


def dump_public(pub: PublicKey) -> str:
    return f"{_header('public', pub.params)}\nq: {pub.q.hex()}\n"


def load_public(text: str) -> PublicKey:
    lines = text.strip().splitlines()
    params = _parse_header(lines[0], "public")
    return PublicKey(RingElement.from_hex(_field(lines[1], "q"), params.r), params)


def write_keypair(priv: PrivateKey, pub: PublicKey, stem: str | Path) -> tuple[Path, Path]:
    stem = Path(stem)
    priv_path = stem.with_name(stem.name + ".priv")
    pub_path = stem.with_name(stem.name + ".pub")
    priv_path.write_text(dump_private(priv))
    pub_path.write_text(dump_public(pub))
    return priv_path, pub_path


def ceil_quarter(w: int) -> int:
    return math.ceil(w / 4)
