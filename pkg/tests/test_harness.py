"""Sweep mechanics, interval calibration, CSV/plot emission, timing."""
import io
import json
import math

import numpy as np
import pytest

from svcim.harness import (
    BerRecord,
    SweepPlan,
    binomial_ci95,
    emit_results,
    plot_description,
    read_ber_csv,
    run_ber_sweep,
    run_timing,
    write_ber_csv,
    write_timing_csv,
)
from svcim.link import SystemConfig, bits_per_symbol

NOISELESS = float("inf")


def small_plan(**overrides):
    defaults = dict(
        base=SystemConfig(N=32, M=16, seed=7),
        sweep_axis="ebn0",
        values=(0.0, 6.0),
        min_errors=25,
        max_trials=400,
        shard_trials=100,
    )
    defaults.update(overrides)
    return SweepPlan(**defaults)


class TestSweepPlan:
    def test_invalid_axis(self):
        with pytest.raises(ValueError):
            small_plan(sweep_axis="taps")

    def test_empty_values(self):
        with pytest.raises(ValueError):
            small_plan(values=())

    def test_derived_configs_validated_before_running(self):
        # sweeping N through a non power of two must fail at plan build
        with pytest.raises(ValueError):
            small_plan(sweep_axis="N", values=(32, 48))

    def test_axis_substitution(self):
        plan = small_plan(sweep_axis="M", values=(16, 64))
        assert plan.config_at(64).M == 64
        assert plan.config_at(64).N == 32


class TestRunBerSweep:
    def test_effectively_noiseless_point_is_error_free(self):
        # 60 dB leaves per-sample noise ~1e-6: loopback in all but name
        plan = small_plan(
            base=SystemConfig(N=64, M=64, seed=3),
            values=(60.0,),
            min_errors=100,
            max_trials=10_000,
            shard_trials=2_500,
        )
        (rec,) = run_ber_sweep(plan)
        assert rec.trials == 10_000
        assert rec.bit_errors == 0
        assert rec.ber == 0.0

    def test_exactly_noiseless_point(self):
        plan = small_plan(
            base=SystemConfig(N=32, M=32, seed=3),
            values=(NOISELESS,),
            min_errors=100,
            max_trials=1_000,
            shard_trials=500,
        )
        (rec,) = run_ber_sweep(plan)
        assert rec.ber == 0.0

    def test_noise_dominated_point(self):
        plan = small_plan(
            base=SystemConfig(N=32, M=32, seed=5),
            values=(-20.0,),
            min_errors=10_000,
            max_trials=2_000,
            shard_trials=500,
        )
        (rec,) = run_ber_sweep(plan)
        assert abs(rec.ber - 0.5) < 0.05

    def test_stop_criterion_on_errors(self):
        plan = small_plan(values=(0.0,), min_errors=25, max_trials=10_000, shard_trials=50)
        (rec,) = run_ber_sweep(plan)
        assert rec.bit_errors >= 25
        assert rec.trials < 10_000  # stopped early, at a shard boundary
        assert rec.trials % 50 == 0

    def test_deterministic_across_worker_counts(self):
        plan = small_plan(values=(2.0, 8.0))
        serial = run_ber_sweep(plan, workers=1, measure_time=False)
        parallel = run_ber_sweep(plan, workers=4, measure_time=False)
        assert serial == parallel

    def test_records_match_configs(self):
        plan = small_plan()
        records = run_ber_sweep(plan, measure_time=False)
        assert [r.config.ebn0_db for r in records] == [0.0, 6.0]
        for rec in records:
            n_bits = rec.trials * bits_per_symbol(rec.config)
            assert rec.ber == rec.bit_errors / n_bits
            assert rec.ci95 == binomial_ci95(rec.ber, n_bits)


class TestConfidenceInterval:
    def test_formula(self):
        assert binomial_ci95(0.0, 100) == 0.0
        assert np.isclose(binomial_ci95(0.5, 100), 1.96 * math.sqrt(0.25 / 100))

    def test_coverage_on_synthetic_bernoulli(self):
        # calibrated oracle: the documented interval must bracket p = 0.1
        # in at least 90% of repeated meta-runs
        rng = np.random.default_rng(42)
        p, n = 0.1, 2_000
        covered = 0
        reps = 200
        for _ in range(reps):
            errors = rng.binomial(n, p)
            ber = errors / n
            half = binomial_ci95(ber, n)
            covered += (ber - half) <= p <= (ber + half)
        assert covered / reps >= 0.90


class TestEmission:
    def _records(self):
        plan = small_plan()
        return run_ber_sweep(plan, measure_time=False)

    def test_empty_csv_has_header_only(self):
        buf = io.StringIO()
        write_ber_csv([], buf)
        lines = buf.getvalue().splitlines()
        assert len(lines) == 1
        assert lines[0].startswith("scheme,detector,N,M,K,L,v,G,ebn0_db")

    def test_csv_roundtrip(self):
        records = self._records()
        buf = io.StringIO()
        write_ber_csv(records, buf)
        buf.seek(0)
        assert read_ber_csv(buf) == records

    def test_ber_column_self_consistent(self):
        records = self._records()
        buf = io.StringIO()
        write_ber_csv(records, buf)
        buf.seek(0)
        import csv

        for row in csv.DictReader(buf):
            recomputed = int(row["bit_errors"]) / (int(row["trials"]) * int(row["m"]))
            assert float(row["ber"]) == recomputed

    def test_csv_byte_identical_across_runs(self):
        plan = small_plan()
        a, b = io.StringIO(), io.StringIO()
        write_ber_csv(run_ber_sweep(plan, measure_time=False), a)
        write_ber_csv(run_ber_sweep(plan, workers=2, measure_time=False), b)
        assert a.getvalue() == b.getvalue()

    def test_emit_csv_and_plot_files(self, tmp_path):
        records = self._records()
        csv_path = tmp_path / "out.csv"
        emit_results(records, "csv", csv_path)
        with open(csv_path) as fh:
            assert read_ber_csv(fh) == records

        plot_path = tmp_path / "out.json"
        emit_results(records, "plot", plot_path)
        payload = json.loads(plot_path.read_text())
        assert payload["x_axis"] == "ebn0_db"
        (series,) = payload["series"]
        assert series["x"] == [0.0, 6.0]
        assert series["ber"] == [r.ber for r in records]

    def test_plot_log_ber_handles_zero(self):
        rec = BerRecord(
            config=SystemConfig(), trials=10, bit_errors=0, ber=0.0, ci95=0.0,
            wall_ns_per_decode=0.0,
        )
        payload = plot_description([rec])
        assert payload["series"][0]["log10_ber"] == [None]

    def test_emit_rejects_unknown_format(self, tmp_path):
        with pytest.raises(ValueError):
            emit_results([], "xml", tmp_path / "x")

    def test_emit_surfaces_path_errors(self, tmp_path):
        with pytest.raises(OSError, match="no/such"):
            emit_results([], "csv", tmp_path / "no/such/dir/x.csv")


class TestRunTiming:
    def test_basic_measurement(self):
        cfgs = [SystemConfig(N=32, M=16, ebn0_db=20.0, seed=2)]
        records = run_timing(cfgs, detectors=("mmpdf", "ml"), decodes=100, warmup=10, batches=5)
        assert len(records) == 2
        for rec in records:
            assert rec.mean_ns > 0
            assert rec.decodes == 100
            assert rec.spread_ns >= 0

    def test_secbim_time_scales_with_books(self):
        base = dict(M=32, N=32, K=2, L=16, v=10, ebn0_db=20.0, seed=4)
        single = SystemConfig(scheme="esvc", G=1, **base)
        joint = SystemConfig(scheme="secbim", G=4, **base)
        t_single, t_joint = run_timing(
            [single, joint], detectors=("mmpdf",), decodes=300, warmup=30, batches=5
        )
        ratio = t_joint.mean_ns / t_single.mean_ns
        assert 0.7 * 4 <= ratio <= 1.3 * 4

    def test_ml_time_scales_with_books(self):
        # candidate table grows by G, so should the enumeration time
        base = dict(M=64, N=32, K=2, L=16, v=10, ebn0_db=20.0, seed=6)
        single = SystemConfig(scheme="esvc", G=1, **base)
        joint = SystemConfig(scheme="secbim", G=4, **base)
        t_single, t_joint = run_timing(
            [single, joint], detectors=("ml",), decodes=400, warmup=40, batches=5
        )
        ratio = t_joint.mean_ns / t_single.mean_ns
        assert 2.0 <= ratio <= 7.0

    def test_timing_csv(self, tmp_path):
        cfgs = [SystemConfig(N=32, M=16, ebn0_db=20.0)]
        records = run_timing(cfgs, detectors=("mmpdf",), decodes=50, warmup=5, batches=5)
        buf = io.StringIO()
        write_timing_csv(records, buf)
        lines = buf.getvalue().splitlines()
        assert len(lines) == 2
        assert lines[0].startswith("scheme,detector")
