"""Monte Carlo BER sweeps, detector timing and result emission.

Sweeps shard each point into fixed-size blocks of trials. Shard ``i`` of
point ``p`` owns the generator seeded by ``(seed, tag, p, i)``, and a point
stops after the first shard (in shard order) at which the accumulated bit
errors reach ``min_errors`` or the trial cap is hit. Because shards are
always consumed in index order, the counts are byte-reproducible for a
fixed plan and seed regardless of the worker count; wall-clock timing is
the one intentionally nondeterministic field and can be disabled when a
reproducible CSV is needed.

Timing uses median-of-means over batches after a warm-up, single worker,
with the random frame inputs generated outside the timed region and the
batches interleaved across the measured configurations.
"""
from __future__ import annotations

import csv
import io
import json
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, fields as dc_fields, replace
from functools import lru_cache

import numpy as np

from .detectors import MmpDfParams
from .link import (
    LinkContext,
    SystemConfig,
    bits_per_symbol,
    decode_frame,
    run_frame,
    transmit_frame,
)

WORKERS_ENV = "SVCIM_WORKERS"

_FRAME_STREAM_TAG = 0xF4A3
_TIMING_STREAM_TAG = 0x71E0

SWEEP_AXES = ("ebn0", "N", "M", "G")


@dataclass(frozen=True)
class SweepPlan:
    """One BER experiment: a base config and the axis swept over it."""

    base: SystemConfig
    sweep_axis: str
    values: tuple
    min_errors: int = 100
    max_trials: int = 100_000
    shard_trials: int = 512

    def __post_init__(self) -> None:
        object.__setattr__(self, "values", tuple(self.values))
        if self.sweep_axis not in SWEEP_AXES:
            raise ValueError(f"sweep_axis must be one of {SWEEP_AXES}, got {self.sweep_axis!r}")
        if not self.values:
            raise ValueError("sweep needs at least one value")
        if self.min_errors < 1 or self.max_trials < 1 or self.shard_trials < 1:
            raise ValueError("min_errors, max_trials and shard_trials must be >= 1")
        for value in self.values:
            self.config_at(value)  # fail before any simulation

    def config_at(self, value) -> SystemConfig:
        field = "ebn0_db" if self.sweep_axis == "ebn0" else self.sweep_axis
        caster = float if field == "ebn0_db" else int
        return replace(self.base, **{field: caster(value)})


@dataclass(frozen=True)
class BerRecord:
    """One Monte Carlo result row."""

    config: SystemConfig
    trials: int
    bit_errors: int
    ber: float
    ci95: float
    wall_ns_per_decode: float

    @property
    def m(self) -> int:
        return bits_per_symbol(self.config)


@dataclass(frozen=True)
class TimingRecord:
    """Median-of-means decode time for one (config, detector) pair."""

    config: SystemConfig
    detector: str
    decodes: int
    mean_ns: float
    spread_ns: float  # standard deviation across batch means


def binomial_ci95(ber: float, n_bits: int) -> float:
    """Normal-approximation 95% half-width, 1.96 sqrt(p(1-p)/n)."""
    if n_bits < 1:
        raise ValueError("need at least one observed bit")
    return 1.96 * math.sqrt(max(ber * (1.0 - ber), 0.0) / n_bits)


def _worker_count(workers: int | None) -> int:
    if workers is not None:
        return max(1, workers)
    return max(1, int(os.environ.get(WORKERS_ENV, "1")))


@lru_cache(maxsize=16)
def _context_for(cfg: SystemConfig) -> LinkContext:
    return LinkContext.for_config(cfg)


def _run_shard(cfg: SystemConfig, point_idx: int, shard_idx: int, n_trials: int,
               measure_time: bool) -> tuple[int, int, int]:
    """Simulate one shard; returns (trials, bit_errors, decode_ns_total)."""
    ctx = _context_for(cfg)
    rng = np.random.default_rng(
        np.random.SeedSequence((cfg.seed, _FRAME_STREAM_TAG, point_idx, shard_idx))
    )
    errors = 0
    decode_ns = 0
    for _ in range(n_trials):
        trace = run_frame(cfg, rng, ctx)
        errors += int(np.count_nonzero(trace.tx_bits != trace.rx_bits))
        if measure_time:
            decode_ns += trace.decode_ns
    return n_trials, errors, decode_ns


def _point_shards(plan: SweepPlan) -> list[int]:
    sizes = []
    remaining = plan.max_trials
    while remaining > 0:
        sizes.append(min(plan.shard_trials, remaining))
        remaining -= sizes[-1]
    return sizes


def run_ber_sweep(plan: SweepPlan, workers: int | None = None,
                  measure_time: bool = True) -> list[BerRecord]:
    """Run every sweep point to its stop criterion and return the records."""
    workers = _worker_count(workers)
    records = []
    for point_idx, value in enumerate(plan.values):
        cfg = plan.config_at(value)
        shard_sizes = _point_shards(plan)
        trials = bit_errors = decode_ns = 0
        if workers == 1:
            for shard_idx, size in enumerate(shard_sizes):
                t, e, ns = _run_shard(cfg, point_idx, shard_idx, size, measure_time)
                trials += t
                bit_errors += e
                decode_ns += ns
                if bit_errors >= plan.min_errors:
                    break
        else:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                pending = {
                    shard_idx: pool.submit(_run_shard, cfg, point_idx, shard_idx, size, measure_time)
                    for shard_idx, size in enumerate(shard_sizes)
                }
                # consume strictly in shard order so the stop point is
                # independent of scheduling
                for shard_idx in range(len(shard_sizes)):
                    t, e, ns = pending[shard_idx].result()
                    trials += t
                    bit_errors += e
                    decode_ns += ns
                    if bit_errors >= plan.min_errors:
                        for fut in pending.values():
                            fut.cancel()
                        break
        n_bits = trials * bits_per_symbol(cfg)
        ber = bit_errors / n_bits
        records.append(
            BerRecord(
                config=cfg,
                trials=trials,
                bit_errors=bit_errors,
                ber=ber,
                ci95=binomial_ci95(ber, n_bits),
                wall_ns_per_decode=decode_ns / trials if measure_time else 0.0,
            )
        )
    return records


def run_timing(configs, detectors=("mmpdf",), decodes: int = 1000, warmup: int = 50,
               batches: int = 10) -> list[TimingRecord]:
    """Measure per-decode wall clock for each (config, detector) pair.

    Frames (message, channel, noise draws) are generated outside the timed
    region; only the detector call is timed: ``warmup`` decodes per pair
    first, then ``batches`` equal batches whose median batch mean is
    reported. Batches are interleaved round-robin across all measured
    pairs so that a transient slowdown of the host hits every pair alike
    and cancels out of time ratios.
    """
    pairs = []
    for base_cfg in configs:
        for detector in detectors:
            cfg = replace(base_cfg, detector=detector)
            pairs.append({
                "cfg": cfg,
                "detector": detector,
                "ctx": LinkContext.for_config(cfg),
                "rng": np.random.default_rng(
                    np.random.SeedSequence((cfg.seed, _TIMING_STREAM_TAG))
                ),
                "means": [],
            })
    per_batch = max(1, decodes // batches)
    for batch in range(batches + 1):  # batch 0 warms every pair up
        n = warmup if batch == 0 else per_batch
        if n == 0:
            continue
        for pair in pairs:
            inputs = [transmit_frame(pair["cfg"], pair["rng"], pair["ctx"])[2:] for _ in range(n)]
            t0 = time.perf_counter_ns()
            for y_freq, ch in inputs:
                decode_frame(pair["ctx"], y_freq, ch.cfr)
            elapsed = time.perf_counter_ns() - t0
            if batch > 0:
                pair["means"].append(elapsed / n)
    return [
        TimingRecord(
            config=pair["cfg"],
            detector=pair["detector"],
            decodes=per_batch * batches,
            mean_ns=float(np.median(pair["means"])),
            spread_ns=float(np.std(pair["means"])),
        )
        for pair in pairs
    ]


# --- CSV and plot emission ---

CSV_COLUMNS = (
    "scheme", "detector", "N", "M", "K", "L", "v", "G", "ebn0_db", "channel_path",
    "seed", "mmp_omega", "mmp_lam", "mmp_upsilon", "mmp_relative_stop",
    "m", "trials", "bit_errors", "ber", "ci95", "wall_ns_per_decode",
)

TIMING_CSV_COLUMNS = (
    "scheme", "detector", "N", "M", "K", "L", "v", "G", "ebn0_db", "seed",
    "decodes", "mean_ns", "spread_ns",
)


def _record_row(rec: BerRecord) -> list[str]:
    cfg = rec.config
    return [
        cfg.scheme, cfg.detector, str(cfg.N), str(cfg.M), str(cfg.K), str(cfg.L),
        str(cfg.v), str(cfg.G), repr(cfg.ebn0_db), cfg.channel_path, str(cfg.seed),
        str(cfg.mmp.omega), repr(cfg.mmp.lam), str(cfg.mmp.upsilon),
        str(cfg.mmp.relative_stop), str(rec.m), str(rec.trials), str(rec.bit_errors),
        repr(rec.ber), repr(rec.ci95), repr(rec.wall_ns_per_decode),
    ]


def write_ber_csv(records, fh) -> None:
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for rec in records:
        writer.writerow(_record_row(rec))


def read_ber_csv(fh) -> list[BerRecord]:
    """Inverse of :func:`write_ber_csv`: reconstructs records exactly."""
    reader = csv.DictReader(fh)
    records = []
    for row in reader:
        k = int(row["K"])
        cfg = SystemConfig(
            scheme=row["scheme"],
            detector=row["detector"],
            N=int(row["N"]), M=int(row["M"]), K=k, L=int(row["L"]),
            v=int(row["v"]), G=int(row["G"]), ebn0_db=float(row["ebn0_db"]),
            channel_path=row["channel_path"], seed=int(row["seed"]),
            mmp=MmpDfParams(
                k=k, omega=int(row["mmp_omega"]), lam=float(row["mmp_lam"]),
                upsilon=int(row["mmp_upsilon"]),
                relative_stop=row["mmp_relative_stop"] == "True",
            ),
        )
        records.append(
            BerRecord(
                config=cfg,
                trials=int(row["trials"]),
                bit_errors=int(row["bit_errors"]),
                ber=float(row["ber"]),
                ci95=float(row["ci95"]),
                wall_ns_per_decode=float(row["wall_ns_per_decode"]),
            )
        )
    return records


def _series_key(cfg: SystemConfig, axis_field: str):
    skip = {axis_field, "mmp"}
    return tuple((f.name, getattr(cfg, f.name)) for f in dc_fields(cfg) if f.name not in skip)


def plot_description(records, axis_field: str = "ebn0_db") -> dict:
    """Plot-ready series: x values against BER and log10(BER) per config."""
    series: dict = {}
    for rec in records:
        key = _series_key(rec.config, axis_field)
        entry = series.setdefault(
            key,
            {
                "label": f"{rec.config.scheme}/{rec.config.detector} "
                         f"N={rec.config.N} M={rec.config.M} G={rec.config.G}",
                "x": [], "ber": [], "log10_ber": [],
            },
        )
        entry["x"].append(getattr(rec.config, axis_field))
        entry["ber"].append(rec.ber)
        entry["log10_ber"].append(math.log10(rec.ber) if rec.ber > 0 else None)
    return {"x_axis": axis_field, "series": list(series.values())}


def emit_results(records, fmt: str, path) -> None:
    """Write records to ``path`` as ``csv`` or as a ``plot`` JSON description."""
    if fmt not in ("csv", "plot"):
        raise ValueError(f"format must be 'csv' or 'plot', got {fmt!r}")
    try:
        if fmt == "csv":
            buf = io.StringIO()
            write_ber_csv(records, buf)
            payload = buf.getvalue()
        else:
            payload = json.dumps(plot_description(records), indent=2) + "\n"
        with open(path, "w", newline="") as fh:
            fh.write(payload)
    except OSError as exc:
        raise OSError(f"could not write results to {path}: {exc}") from exc


def write_timing_csv(records, fh) -> None:
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(TIMING_CSV_COLUMNS)
    for rec in records:
        cfg = rec.config
        writer.writerow([
            cfg.scheme, rec.detector, cfg.N, cfg.M, cfg.K, cfg.L, cfg.v, cfg.G,
            repr(cfg.ebn0_db), cfg.seed, rec.decodes, repr(rec.mean_ns), repr(rec.spread_ns),
        ])
