"""Receive-side algorithms: greedy sparse recovery and ML references.

The decode pipeline co-phases the received block so the effective channel
gain is the real, nonnegative magnitude response, builds the matching
sensing matrix, and recovers the activation pattern with a depth-first
multipath matching pursuit (MMP-DF). Symbol-set and codebook decisions are
nearest-vector rules on the recovered amplitudes. Exhaustive ML detectors
over the candidate set serve as the optimality baseline; their candidate
blocks are precomputed once per configuration so timing comparisons
measure the decision metric itself.

Index convention: supports and sparse-estimate indices are 1-based, like
``SparseMessage.indices``; matrix columns are 0-based internally.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .codebook import Codebook, CodebookSet
from .index_codec import (
    ApSpace,
    SymbolSets,
    combo_to_rank,
    decode_to_bits,
    encode_bits,
    int_to_bits,
)
from .transceiver import build_sparse_vector

# Refuse ML enumeration beyond this many candidate blocks.
ML_CANDIDATE_CAP = 1 << 20


@dataclass(frozen=True)
class MmpDfParams:
    """Search controls for the depth-first multipath matching pursuit.

    ``omega`` children are expanded per node, ``lam`` is the stop threshold
    on the residual (relative to the input norm unless ``relative_stop`` is
    off), and ``upsilon`` caps how many full-depth candidates are examined
    before the best-so-far is returned.
    """

    k: int = 2
    omega: int = 2
    lam: float = 0.1
    upsilon: int = 2
    relative_stop: bool = True

    def __post_init__(self) -> None:
        if self.k < 1:
            raise ValueError(f"sparsity k must be >= 1, got {self.k}")
        if self.omega < 1:
            raise ValueError(f"omega must be >= 1, got {self.omega}")
        if self.lam <= 0:
            raise ValueError(f"stop threshold must be positive, got {self.lam}")
        if self.upsilon < 1:
            raise ValueError(f"upsilon must be >= 1, got {self.upsilon}")


@dataclass(eq=False)
class SparseEstimate:
    """Recovered support (1-based, ascending) with least-squares amplitudes."""

    support: tuple[int, ...]
    coeffs: np.ndarray
    residual_norm: float
    as_vector: np.ndarray
    ls_solves: int  # full-depth least-squares solves spent by the search


@dataclass(eq=False)
class DetectionResult:
    """Decoder output: pattern rank, symbol-set flag, codebook index, bits.

    ``l_hat`` is the flag actually used for bit recovery (forced to 1 when
    the rank is outside the reused range); ``metric`` is the winning
    decision-metric value for that flag.
    """

    d_hat: int
    l_hat: int  # 1 = original symbol set, 2 = extended
    g_hat: int
    bits: np.ndarray
    metric: float
    estimate: SparseEstimate | None = field(default=None, repr=False)


def cophase(y_freq: np.ndarray, h_freq: np.ndarray) -> np.ndarray:
    """Rotate each subcarrier by the conjugate channel phase.

    Leaves the effective gain |h(b)| real and nonnegative. A bin with an
    exactly zero channel gain (probability-zero draw) passes through
    unrotated.
    """
    y = np.asarray(y_freq)
    h = np.asarray(h_freq)
    if len(y) != len(h):
        raise ValueError(f"length mismatch: y {len(y)}, h {len(h)}")
    return np.exp(-1j * np.angle(h)) * y


def sensing_matrix(h_freq: np.ndarray, book: Codebook, k: int) -> np.ndarray:
    """diag(|h|) C / sqrt(k): the matrix the co-phased block is sparse in."""
    h = np.asarray(h_freq)
    if len(h) != book.n:
        raise ValueError(f"channel length {len(h)} != codebook rows {book.n}")
    if k < 1:
        raise ValueError(f"sparsity k must be >= 1, got {k}")
    return (np.abs(h) / math.sqrt(k))[:, None] * book.entries


def _ls_fit(psi: np.ndarray, cols: list[int], y: np.ndarray) -> np.ndarray | None:
    """Least squares on the chosen columns via normal equations.

    Returns None on a rank-deficient subproblem (degenerate channel or
    codebook draw); callers treat that candidate as having infinite
    residual.
    """
    a = psi[:, cols]
    gram = a.conj().T @ a
    try:
        coef = np.linalg.solve(gram, a.conj().T @ y)
    except np.linalg.LinAlgError:
        return None
    if not np.all(np.isfinite(coef)):
        return None
    return coef


def mmp_df(y_hat: np.ndarray, psi: np.ndarray, params: MmpDfParams) -> SparseEstimate:
    """Depth-first multipath matching pursuit.

    At each tree node the columns are ranked by correlation with the
    current path's least-squares residual and the ``omega`` best unused
    columns are expanded, best child first (so backtracking revisits the
    deepest layer first). Each depth-``k`` path is scored by its LS
    residual; the search returns immediately once a candidate beats the
    stop threshold, and otherwise returns the minimum-residual candidate
    after ``upsilon`` full-depth candidates (or tree exhaustion). With
    ``omega=1`` the search reduces to orthogonal matching pursuit.

    Parameters
    ----------
    y_hat : co-phased received vector, length N
    psi : sensing matrix, N x M with M >= params.k
    params : search controls

    Returns
    -------
    SparseEstimate with ascending 1-based support.
    """
    y = np.asarray(y_hat, dtype=np.complex128)
    psi = np.asarray(psi)
    n, m = psi.shape
    k = params.k
    if m < k:
        raise ValueError(f"sensing matrix has {m} columns, need >= {k}")
    if len(y) != n:
        raise ValueError(f"input length {len(y)} != sensing rows {n}")

    if np.isrealobj(psi):
        # real sensing matrix (the co-phased model): two real gemvs beat
        # numpy's promotion of the whole matrix to complex
        psi_t = psi.T

        def correlations(resid: np.ndarray) -> np.ndarray:
            return np.hypot(psi_t @ resid.real, psi_t @ resid.imag)

    else:
        psi_h = psi.conj().T

        def correlations(resid: np.ndarray) -> np.ndarray:
            return np.abs(psi_h @ resid)

    stop_level = params.lam * (np.linalg.norm(y) if params.relative_stop else 1.0)

    best_resid = math.inf
    best_support: tuple[int, ...] | None = None
    best_coeffs: np.ndarray | None = None
    full_solves = 0
    seen: set[tuple[int, ...]] = set()

    def dfs(path: tuple[int, ...], resid: np.ndarray) -> bool:
        nonlocal best_resid, best_support, best_coeffs, full_solves
        corr = correlations(resid)
        corr[list(path)] = -1.0
        # stable sort: correlation ties resolve to the lowest column index
        children = np.argsort(-corr, kind="stable")[: params.omega]
        for col in children:
            new_path = path + (int(col),)
            if len(new_path) == k:
                support = tuple(sorted(new_path))
                if support in seen:
                    continue
                seen.add(support)
                full_solves += 1
                coef = _ls_fit(psi, list(support), y)
                if coef is None:
                    r_norm = math.inf
                else:
                    r_norm = float(np.linalg.norm(y - psi[:, list(support)] @ coef))
                if r_norm < best_resid or best_support is None:
                    best_resid = r_norm
                    best_support = support
                    best_coeffs = coef
                if r_norm < stop_level:
                    return True
                if full_solves >= params.upsilon:
                    return True
            else:
                coef = _ls_fit(psi, list(new_path), y)
                if coef is None:
                    continue  # degenerate partial path: its completions are too
                if dfs(new_path, y - psi[:, list(new_path)] @ coef):
                    return True
        return False

    dfs((), y)

    assert best_support is not None  # k <= m guarantees at least one candidate
    coeffs = best_coeffs if best_coeffs is not None else np.zeros(k, dtype=np.complex128)
    vec = np.zeros(m, dtype=np.complex128)
    support_1b = tuple(c + 1 for c in best_support)
    vec[list(best_support)] = coeffs
    return SparseEstimate(
        support=support_1b,
        coeffs=np.asarray(coeffs, dtype=np.complex128),
        residual_norm=best_resid,
        as_vector=vec,
        ls_solves=full_solves,
    )


def _set_distances(coeffs: np.ndarray, sets: SymbolSets) -> tuple[float, float]:
    b = np.asarray(coeffs)
    d1 = float(np.sum(np.abs(b - np.asarray(sets.original)) ** 2))
    d2 = float(np.sum(np.abs(b - np.asarray(sets.extended_set)) ** 2))
    return d1, d2


def symbol_set_decision(est: SparseEstimate, sets: SymbolSets) -> int:
    """Nearest symbol set to the recovered amplitudes; ties go to the original."""
    d1, d2 = _set_distances(est.coeffs, sets)
    return 1 if d1 <= d2 else 2


def esvc_decode(
    y_freq: np.ndarray,
    h_freq: np.ndarray,
    book: Codebook,
    space: ApSpace,
    sets: SymbolSets,
    params: MmpDfParams,
) -> DetectionResult:
    """Full single-codebook decode: co-phase, sparse recovery, bit mapping."""
    y_hat = cophase(y_freq, h_freq)
    psi = sensing_matrix(h_freq, book, params.k)
    est = mmp_df(y_hat, psi, params)
    d_hat = combo_to_rank(est.support, space)
    d1, d2 = _set_distances(est.coeffs, sets)
    if d_hat < space.n_reused:
        l_hat = 1 if d1 <= d2 else 2
    else:
        l_hat = 1  # rank is never reused: the flag carries no information
    bits = decode_to_bits(d_hat, l_hat == 2, space)
    return DetectionResult(
        d_hat=d_hat,
        l_hat=l_hat,
        g_hat=1,
        bits=np.array(bits, dtype=np.uint8),
        metric=d1 if l_hat == 1 else d2,
        estimate=est,
    )


def secbim_joint_metrics(
    y_freq: np.ndarray,
    h_freq: np.ndarray,
    books: CodebookSet,
    space: ApSpace,
    sets: SymbolSets,
    params: MmpDfParams,
) -> tuple[np.ndarray, list[SparseEstimate]]:
    """The 2G decision metrics behind the joint decode, one row per book.

    Each book gets its own sparse recovery; both symbol sets are placed on
    that recovery's support and compared against the full length-M
    estimate.
    """
    y_hat = cophase(y_freq, h_freq)
    b_sets = (np.asarray(sets.original), np.asarray(sets.extended_set))
    estimates: list[SparseEstimate] = []
    metrics = np.empty((books.G, 2))
    for gi, book in enumerate(books.books):
        psi = sensing_matrix(h_freq, book, params.k)
        est = mmp_df(y_hat, psi, params)
        estimates.append(est)
        sup0 = [i - 1 for i in est.support]
        for li, symbols in enumerate(b_sets):
            ref = np.zeros(space.M, dtype=np.complex128)
            ref[sup0] = symbols
            metrics[gi, li] = np.sum(np.abs(est.as_vector - ref) ** 2)
    return metrics, estimates


def secbim_decode(
    y_freq: np.ndarray,
    h_freq: np.ndarray,
    books: CodebookSet,
    space: ApSpace,
    sets: SymbolSets,
    params: MmpDfParams,
) -> DetectionResult:
    """Joint codebook and symbol-set decode.

    Takes the minimum of the 2G joint metrics; ties resolve to the
    smallest (g, l). The first log2(G) output bits carry the codebook
    index, the rest the pattern.
    """
    metrics, estimates = secbim_joint_metrics(y_freq, h_freq, books, space, sets, params)
    flat = int(np.argmin(metrics))  # row-major first minimum = smallest (g, l)
    g_hat = flat // 2 + 1
    l_raw = flat % 2 + 1
    est = estimates[g_hat - 1]
    d_hat = combo_to_rank(est.support, space)
    l_hat = l_raw if d_hat < space.n_reused else 1
    m1 = books.G.bit_length() - 1
    bits = int_to_bits(g_hat - 1, m1) + decode_to_bits(d_hat, l_hat == 2, space)
    return DetectionResult(
        d_hat=d_hat,
        l_hat=l_hat,
        g_hat=g_hat,
        bits=np.array(bits, dtype=np.uint8),
        metric=float(metrics[g_hat - 1, l_hat - 1]),
        estimate=est,
    )


@dataclass(eq=False)
class MlCandidates:
    """Every legal transmit block, spread and cached for ML enumeration.

    Rows are ordered by (codebook, word value); ``spread_abs2`` caches the
    entrywise squared magnitudes so each decode reduces to two
    matrix-vector products.
    """

    spread: np.ndarray  # (rows, N) complex candidate blocks, 1/sqrt(K) applied
    spread_abs2: np.ndarray
    words: np.ndarray  # (rows,) word value behind each candidate
    g_ids: np.ndarray  # (rows,) codebook id behind each candidate
    m2_bits: int
    n_books: int


def build_ml_candidates(
    books: Sequence[Codebook],
    space: ApSpace,
    sets: SymbolSets,
    cap: int = ML_CANDIDATE_CAP,
) -> MlCandidates:
    """Enumerate and spread all candidate sparse vectors, once per config."""
    n_words = 1 << space.m_bits
    rows = len(books) * n_words
    if rows > cap:
        raise ValueError(
            f"ML candidate space of {rows} blocks exceeds the cap of {cap}; "
            "use the greedy detector for this configuration"
        )
    vdd = np.zeros((n_words, space.M), dtype=np.complex128)
    for word in range(n_words):
        msg = encode_bits(int_to_bits(word, space.m_bits), space)
        vdd[word] = build_sparse_vector(msg, sets, space.M).values
    inv_sqrt_k = 1.0 / math.sqrt(space.K)
    spread = np.vstack([(vdd @ b.entries.T) * inv_sqrt_k for b in books])
    return MlCandidates(
        spread=spread,
        spread_abs2=np.abs(spread) ** 2,
        words=np.tile(np.arange(n_words), len(books)),
        g_ids=np.repeat([b.id for b in books], n_words),
        m2_bits=space.m_bits,
        n_books=len(books),
    )


def _ml_metrics(y_freq: np.ndarray, h_freq: np.ndarray, cand: MlCandidates) -> np.ndarray:
    """||y - h .* v_i||^2 for every candidate row, expanded to two gemvs."""
    y = np.asarray(y_freq)
    h = np.asarray(h_freq)
    z_conj = np.conj(y) * h
    corr = cand.spread @ z_conj
    chan_energy = cand.spread_abs2 @ (np.abs(h) ** 2)
    return float(np.sum(np.abs(y) ** 2)) - 2.0 * np.real(corr) + chan_energy


def _word_to_result(word: int, g_hat: int, space: ApSpace, metric: float, m1: int) -> DetectionResult:
    extended = word >= space.n_combos
    d_hat = word - space.n_combos if extended else word
    bits = int_to_bits(g_hat - 1, m1) + int_to_bits(word, space.m_bits)
    return DetectionResult(
        d_hat=d_hat,
        l_hat=2 if extended else 1,
        g_hat=g_hat,
        bits=np.array(bits, dtype=np.uint8),
        metric=metric,
    )


def ml_esvc(
    y_freq: np.ndarray,
    h_freq: np.ndarray,
    book: Codebook,
    space: ApSpace,
    sets: SymbolSets,
    cand: MlCandidates | None = None,
    cap: int = ML_CANDIDATE_CAP,
) -> DetectionResult:
    """Exhaustive minimum-distance detection over all candidate words."""
    if cand is None:
        cand = build_ml_candidates([book], space, sets, cap)
    metrics = _ml_metrics(y_freq, h_freq, cand)
    i = int(np.argmin(metrics))  # first minimum = lowest word value
    return _word_to_result(int(cand.words[i]), 1, space, float(metrics[i]), m1=0)


def ml_secbim(
    y_freq: np.ndarray,
    h_freq: np.ndarray,
    books: CodebookSet,
    space: ApSpace,
    sets: SymbolSets,
    cand: MlCandidates | None = None,
    cap: int = ML_CANDIDATE_CAP,
) -> DetectionResult:
    """Exhaustive detection jointly over codebooks and candidate words."""
    if cand is None:
        cand = build_ml_candidates(books.books, space, sets, cap)
    if cand.n_books != books.G:
        raise ValueError(f"candidate table holds {cand.n_books} books, config has {books.G}")
    metrics = _ml_metrics(y_freq, h_freq, cand)
    i = int(np.argmin(metrics))  # rows are (g, word)-ordered: first min is smallest pair
    m1 = books.G.bit_length() - 1
    return _word_to_result(int(cand.words[i]), int(cand.g_ids[i]), space, float(metrics[i]), m1=m1)
