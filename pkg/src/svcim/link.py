"""End-to-end frame orchestration and the validated system configuration.

A frame draws ``m`` uniform bits, encodes them onto a sparse virtual-domain
vector (optionally split so the leading log2(G) bits pick the spreading
codebook), pushes the spread OFDM block through the configured channel
path, decodes with the configured detector and reports the full trace.

All randomness is derived from ``(config, rng stream)``: the codebooks come
from the master seed, each frame consumes bits, then channel taps, then
noise from its generator, so a frame is reproducible from (config, seed).
"""
from __future__ import annotations

import time
from dataclasses import dataclass, fields, replace
from math import comb

import numpy as np

from . import detectors
from .channel import ChannelRealization, NoiseSpec, apply_freq, apply_time, draw_channel
from .codebook import CodebookSet, generate_set
from .detectors import DetectionResult, MlCandidates, MmpDfParams, build_ml_candidates
from .index_codec import ApSpace, SparseMessage, SymbolSets, bits_to_int, encode_bits
from .transceiver import build_sparse_vector, ofdm_demodulate, ofdm_modulate, spread

SCHEMES = ("esvc", "secbim")
DETECTORS = ("mmpdf", "ml")
CHANNEL_PATHS = ("freq", "time")


@dataclass(frozen=True)
class SystemConfig:
    """Every dimensioning knob of a link in one validated, hashable record.

    N subcarriers, M virtual-domain positions, K active indices, CP length
    L, v channel taps, G codebooks (1 for the single-codebook scheme).
    Derived quantities (bits per symbol, Eb, noise variance, spectral
    efficiency) are always recomputed from these fields.
    """

    scheme: str = "esvc"
    N: int = 64
    M: int = 64
    K: int = 2
    L: int = 16
    v: int = 10
    G: int = 1
    ebn0_db: float = 10.0
    detector: str = "mmpdf"
    mmp: MmpDfParams = MmpDfParams()
    seed: int = 0
    channel_path: str = "freq"

    def __post_init__(self) -> None:
        if self.scheme not in SCHEMES:
            raise ValueError(f"scheme must be one of {SCHEMES}, got {self.scheme!r}")
        if self.detector not in DETECTORS:
            raise ValueError(f"detector must be one of {DETECTORS}, got {self.detector!r}")
        if self.channel_path not in CHANNEL_PATHS:
            raise ValueError(f"channel_path must be one of {CHANNEL_PATHS}, got {self.channel_path!r}")
        if self.N < 2 or self.N & (self.N - 1):
            raise ValueError(f"N must be a power of two >= 2, got {self.N}")
        if not 1 <= self.K < self.M:
            raise ValueError(f"need 1 <= K < M, got K={self.K}, M={self.M}")
        if comb(self.M, self.K) < 2:
            raise ValueError("fewer than two activation patterns")
        if not 0 <= self.L < self.N:
            raise ValueError(f"need 0 <= L < N, got L={self.L}, N={self.N}")
        if not 1 <= self.v <= self.L:
            raise ValueError(f"need 1 <= v <= L, got v={self.v}, L={self.L}")
        if self.G < 1 or self.G & (self.G - 1):
            raise ValueError(f"G must be a power of two, got {self.G}")
        if self.scheme == "esvc" and self.G != 1:
            raise ValueError("the single-codebook scheme requires G = 1")
        if self.mmp.k != self.K:
            raise ValueError(f"mmp.k={self.mmp.k} disagrees with K={self.K}")
        if np.isnan(self.ebn0_db):
            raise ValueError("ebn0_db must be a number (use +inf for noiseless)")

    def space(self) -> ApSpace:
        return ApSpace(M=self.M, K=self.K)

    def noise(self) -> NoiseSpec:
        return NoiseSpec.for_link(self.N, self.L, bits_per_symbol(self), self.ebn0_db)


def bits_per_symbol(cfg: SystemConfig) -> int:
    """Information bits per OFDM symbol: log2(G) + floor(log2 C(M,K)) + 1."""
    m2 = cfg.space().m_bits
    if cfg.scheme == "secbim":
        return (cfg.G.bit_length() - 1) + m2
    return m2


def spectral_efficiency(cfg: SystemConfig) -> float:
    """Bits per channel use, m / (N + L)."""
    return bits_per_symbol(cfg) / (cfg.N + cfg.L)


@dataclass(eq=False)
class FrameTrace:
    """One simulated frame end to end."""

    tx_bits: np.ndarray
    rx_bits: np.ndarray
    msg: SparseMessage
    ch: ChannelRealization
    detection: DetectionResult
    decode_ns: int = 0  # wall clock spent inside the detector call


@dataclass(eq=False)
class LinkContext:
    """Per-configuration state shared across frames: books and ML tables."""

    cfg: SystemConfig
    space: ApSpace
    sets: SymbolSets
    books: CodebookSet
    noise: NoiseSpec
    ml: MlCandidates | None

    @classmethod
    def for_config(cls, cfg: SystemConfig) -> "LinkContext":
        space = cfg.space()
        sets = SymbolSets.default(cfg.K)
        books = generate_set(cfg.seed, cfg.G, cfg.N, cfg.M)
        ml = None
        if cfg.detector == "ml":
            ml = build_ml_candidates(books.books, space, sets)
        return cls(cfg=cfg, space=space, sets=sets, books=books, noise=cfg.noise(), ml=ml)


def decode_frame(ctx: LinkContext, y_freq: np.ndarray, h_freq: np.ndarray) -> DetectionResult:
    """Dispatch to the configured detector with perfect channel knowledge."""
    cfg = ctx.cfg
    if cfg.detector == "ml":
        if cfg.scheme == "secbim":
            return detectors.ml_secbim(y_freq, h_freq, ctx.books, ctx.space, ctx.sets, cand=ctx.ml)
        return detectors.ml_esvc(y_freq, h_freq, ctx.books[1], ctx.space, ctx.sets, cand=ctx.ml)
    if cfg.scheme == "secbim":
        return detectors.secbim_decode(y_freq, h_freq, ctx.books, ctx.space, ctx.sets, cfg.mmp)
    return detectors.esvc_decode(y_freq, h_freq, ctx.books[1], ctx.space, ctx.sets, cfg.mmp)


def transmit_frame(cfg: SystemConfig, rng: np.random.Generator, ctx: LinkContext):
    """Everything before detection: bits, encode, channel, received block.

    Per frame the generator is consumed in a fixed order: message bits,
    then channel taps, then noise. Returns (tx_bits, msg, y_freq, ch).
    """
    m = bits_per_symbol(cfg)
    tx_bits = rng.integers(0, 2, size=m, dtype=np.uint8)

    if cfg.scheme == "secbim":
        m1 = cfg.G.bit_length() - 1
        g = 1 + bits_to_int(tx_bits[:m1])  # leading bits pick the codebook
        msg = replace(encode_bits(tx_bits[m1:], ctx.space), g=g)
    else:
        msg = encode_bits(tx_bits, ctx.space)

    s = build_sparse_vector(msg, ctx.sets, cfg.M)
    x_freq = spread(s, ctx.books[msg.g])
    ch = draw_channel(cfg.v, cfg.N, rng)

    if cfg.channel_path == "time":
        x_time = ofdm_modulate(x_freq, cfg.L)
        y_time = apply_time(x_time, ch, ctx.noise, rng, cfg.L)
        y_freq = ofdm_demodulate(y_time, cfg.L)
    else:
        y_freq = apply_freq(x_freq, ch, ctx.noise, rng)
    return tx_bits, msg, y_freq, ch


def run_frame(cfg: SystemConfig, rng: np.random.Generator, ctx: LinkContext | None = None) -> FrameTrace:
    """Simulate one frame: random bits through encode, channel and decode."""
    if ctx is None:
        ctx = LinkContext.for_config(cfg)
    tx_bits, msg, y_freq, ch = transmit_frame(cfg, rng, ctx)

    t0 = time.perf_counter_ns()
    det = decode_frame(ctx, y_freq, ch.cfr)
    decode_ns = time.perf_counter_ns() - t0
    return FrameTrace(
        tx_bits=tx_bits,
        rx_bits=det.bits,
        msg=msg,
        ch=ch,
        detection=det,
        decode_ns=decode_ns,
    )


# --- flat key=value config serialization (CLI and regression fixtures) ---

_MMP_KEYS = {"mmp_omega": "omega", "mmp_lam": "lam", "mmp_upsilon": "upsilon",
             "mmp_relative_stop": "relative_stop"}


def config_to_text(cfg: SystemConfig) -> str:
    """One ``key=value`` line per field; mmp params flattened as mmp_*."""
    lines = []
    for f in fields(cfg):
        if f.name == "mmp":
            continue
        lines.append(f"{f.name}={getattr(cfg, f.name)}")
    for key, attr in _MMP_KEYS.items():
        lines.append(f"{key}={getattr(cfg.mmp, attr)}")
    return "\n".join(lines) + "\n"


def _parse_value(name: str, raw: str):
    if name in ("scheme", "detector", "channel_path"):
        return raw
    if name in ("N", "M", "K", "L", "v", "G", "seed", "mmp_omega", "mmp_upsilon"):
        return int(raw)
    if name in ("ebn0_db", "mmp_lam"):
        return float(raw)
    if name == "mmp_relative_stop":
        return raw == "True"
    raise ValueError(f"unknown config key {name!r}")


def config_from_text(text: str) -> SystemConfig:
    kv = {}
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValueError(f"malformed config line {line!r}")
        name, raw = line.split("=", 1)
        kv[name.strip()] = _parse_value(name.strip(), raw.strip())
    mmp_kwargs = {attr: kv.pop(key) for key, attr in _MMP_KEYS.items() if key in kv}
    k = kv.get("K", SystemConfig.K)
    return SystemConfig(mmp=MmpDfParams(k=k, **mmp_kwargs), **kv)
