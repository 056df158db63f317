"""Sparse-vector construction, codebook spreading and OFDM (de)modulation.

Transforms are unitary (1/sqrt(N) both ways) so that a noise sample has the
same variance in the time and frequency domains, and the spread block is
scaled by 1/sqrt(K) so each subcarrier carries unit average energy under
random +-1 codebook entries.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .codebook import Codebook
from .index_codec import SparseMessage, SymbolSets


def _require_pow2(n: int, what: str = "N") -> None:
    if n < 1 or n & (n - 1):
        raise ValueError(f"{what} must be a power of two, got {n}")


@dataclass(eq=False)
class SparseVector:
    """Length-M virtual-domain vector with exactly K unit-magnitude entries."""

    values: np.ndarray
    support: tuple[int, ...]  # 1-based active indices, ascending


@dataclass(eq=False)
class OfdmBlock:
    """One OFDM symbol: frequency-domain block and its CP-prefixed time signal."""

    freq: np.ndarray
    time: np.ndarray


def build_sparse_vector(msg: SparseMessage, sets: SymbolSets, m: int) -> SparseVector:
    """Place the constant symbols on the message's active indices."""
    if len(sets.original) != len(msg.indices):
        raise ValueError(
            f"symbol set length {len(sets.original)} != sparsity {len(msg.indices)}"
        )
    if any(i < 1 or i > m for i in msg.indices):
        raise ValueError(f"indices {msg.indices} outside [1, {m}]")
    symbols = sets.extended_set if msg.extended else sets.original
    values = np.zeros(m, dtype=np.complex128)
    for k, idx in enumerate(msg.indices):
        values[idx - 1] = symbols[k]
    return SparseVector(values=values, support=msg.indices)


def spread(s: SparseVector, book: Codebook) -> np.ndarray:
    """Spread the sparse vector over all N subcarriers: (1/sqrt(K)) C s."""
    if book.m != len(s.values):
        raise ValueError(f"codebook width {book.m} != sparse vector length {len(s.values)}")
    k = len(s.support)
    if k < 1:
        raise ValueError("sparse vector has empty support")
    return (book.entries @ s.values) / math.sqrt(k)


def ofdm_modulate(x_freq: np.ndarray, cp_len: int) -> np.ndarray:
    """Unitary IFFT plus cyclic prefix: the last cp_len samples are prepended."""
    x_freq = np.asarray(x_freq)
    n = len(x_freq)
    _require_pow2(n)
    if not 0 <= cp_len < n:
        raise ValueError(f"CP length {cp_len} outside [0, {n})")
    body = np.fft.ifft(x_freq) * math.sqrt(n)
    return np.concatenate([body[n - cp_len:], body])


def ofdm_demodulate(y_time: np.ndarray, cp_len: int) -> np.ndarray:
    """Drop the cyclic prefix and apply the unitary FFT."""
    y_time = np.asarray(y_time)
    n = len(y_time) - cp_len
    _require_pow2(n)
    if cp_len < 0 or cp_len >= n:
        raise ValueError(f"CP length {cp_len} inconsistent with frame of {len(y_time)}")
    return np.fft.fft(y_time[cp_len:]) / math.sqrt(n)


def modulate_block(x_freq: np.ndarray, cp_len: int) -> OfdmBlock:
    return OfdmBlock(freq=np.asarray(x_freq), time=ofdm_modulate(x_freq, cp_len))
