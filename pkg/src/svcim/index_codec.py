"""Bit mapping between information words and sparse activation patterns.

A word of ``m`` bits selects one of the K-of-M activation patterns in the
virtual digital domain. Patterns are ranked with the combinatorial number
system (colexicographic order), and the leftover words beyond C(M, K) - 1
are folded back onto the lowest-ranked patterns by switching to a second,
"extended" set of constant symbols. Every m-bit word therefore maps to a
legal pattern and one extra bit is carried compared to plain truncation.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import comb


def int_to_bits(value: int, width: int) -> tuple[int, ...]:
    """MSB-first binary expansion of ``value`` into exactly ``width`` bits."""
    if value < 0 or value >= (1 << width):
        raise ValueError(f"value {value} does not fit in {width} bits")
    return tuple((value >> (width - 1 - i)) & 1 for i in range(width))


def bits_to_int(bits) -> int:
    """Decimal value of an MSB-first bit word."""
    out = 0
    for b in bits:
        b = int(b)
        if b not in (0, 1):
            raise ValueError(f"bit word contains non-binary entry {b!r}")
        out = (out << 1) | b
    return out


@dataclass(frozen=True)
class ApSpace:
    """Dimensioning of the K-of-M activation-pattern space.

    M is the virtual-domain length, K the number of active indices. All
    derived sizes are exact integers (Python bignums), so no configuration
    can silently overflow.
    """

    M: int
    K: int

    def __post_init__(self) -> None:
        if self.K < 1:
            raise ValueError(f"K must be >= 1, got {self.K}")
        if self.K >= self.M:
            raise ValueError(f"K must be < M, got K={self.K}, M={self.M}")
        if self.n_combos < 2:
            raise ValueError("activation-pattern space must hold at least 2 patterns")

    @property
    def n_combos(self) -> int:
        """Total number of activation patterns, C(M, K)."""
        return comb(self.M, self.K)

    @property
    def a_floor(self) -> int:
        """floor(log2 C(M, K)): bits carried without pattern reuse."""
        return self.n_combos.bit_length() - 1

    @property
    def m_bits(self) -> int:
        """Word length with reuse: one bit more than the floor."""
        return self.a_floor + 1

    @property
    def n_reused(self) -> int:
        """How many low-ranked patterns also serve the extended symbol set."""
        return (1 << self.m_bits) - self.n_combos


@dataclass(frozen=True)
class SparseMessage:
    """One encoded virtual-domain word.

    ``indices`` are the active positions (1-based, strictly increasing),
    ``extended`` says which constant symbol set rides on them, ``d`` is the
    pattern's rank and ``g`` the spreading-codebook index (1 when a single
    codebook is in use).
    """

    indices: tuple[int, ...]
    extended: bool
    d: int
    g: int = 1


@dataclass(frozen=True)
class SymbolSets:
    """The two constant unit-magnitude symbol vectors placed on active indices."""

    original: tuple[complex, ...]
    extended_set: tuple[complex, ...]

    def __post_init__(self) -> None:
        if len(self.original) != len(self.extended_set):
            raise ValueError("symbol sets must have equal length")
        for a, b in zip(self.original, self.extended_set):
            if abs(abs(a) - 1.0) > 1e-12 or abs(abs(b) - 1.0) > 1e-12:
                raise ValueError("symbols must have unit magnitude")
            if a == b:
                raise ValueError("original and extended symbols must differ element-wise")

    @classmethod
    def default(cls, k: int) -> "SymbolSets":
        """Alternating (1, j, 1, j, ...) with the extended set as its negation."""
        original = tuple(1j ** (i % 2) for i in range(k))
        return cls(original=original, extended_set=tuple(-s for s in original))


def rank_to_combo(d: int, space: ApSpace) -> tuple[int, ...]:
    """Unrank ``d`` into the d-th K-combination of {1..M}.

    Uses the combinatorial number system: d = sum_k C(c_k, k) over the
    zero-based positions c_1 < ... < c_K, which orders combinations
    colexicographically. Returns 1-based, strictly increasing indices.
    """
    if not 0 <= d < space.n_combos:
        raise ValueError(f"rank {d} outside [0, {space.n_combos - 1}]")
    out = []
    x = d
    for k in range(space.K, 0, -1):
        c = k - 1
        while comb(c + 1, k) <= x:
            c += 1
        out.append(c + 1)
        x -= comb(c, k)
    out.reverse()
    return tuple(out)


def combo_to_rank(indices, space: ApSpace) -> int:
    """Rank of a K-combination; exact inverse of :func:`rank_to_combo`."""
    idx = tuple(int(i) for i in indices)
    if len(idx) != space.K:
        raise ValueError(f"expected {space.K} indices, got {len(idx)}")
    if any(i < 1 or i > space.M for i in idx):
        raise ValueError(f"indices {idx} outside [1, {space.M}]")
    if any(a >= b for a, b in zip(idx, idx[1:])):
        raise ValueError(f"indices {idx} must be strictly increasing")
    return sum(comb(i - 1, k) for k, i in enumerate(idx, start=1))


def encode_bits(bits, space: ApSpace) -> SparseMessage:
    """Map an m-bit word to its activation pattern and symbol-set flag.

    Words whose decimal value fits below C(M, K) use the original symbol
    set; the remainder reuse the lowest-ranked patterns with the extended
    set, so no word is ever wasted on an illegal pattern.
    """
    bits = tuple(int(b) for b in bits)
    if len(bits) != space.m_bits:
        raise ValueError(f"expected {space.m_bits}-bit word, got {len(bits)} bits")
    value = bits_to_int(bits)
    extended = value >= space.n_combos
    d = value - space.n_combos if extended else value
    return SparseMessage(indices=rank_to_combo(d, space), extended=extended, d=d)


def decode_to_bits(d_hat: int, extended: bool, space: ApSpace) -> tuple[int, ...]:
    """Invert :func:`encode_bits` from a detected rank and symbol-set flag.

    Ranks at or above ``n_reused`` are never reused, so the flag is ignored
    there and the rank converts to bits directly.
    """
    if not 0 <= d_hat < space.n_combos:
        raise ValueError(f"rank {d_hat} outside [0, {space.n_combos - 1}]")
    if d_hat >= space.n_reused or not extended:
        value = d_hat
    else:
        value = d_hat + space.n_combos
    return int_to_bits(value, space.m_bits)
