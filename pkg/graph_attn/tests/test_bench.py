import csv
import io
import json
from pathlib import Path

import pytest
from pydantic import ValidationError

from graph_attn.core.enums import Algorithm, SweepKind
from graph_attn.core.errors import ConfigurationError
from graph_attn.core.mask import (
    CooMask,
    CsrMask,
    Dilated2D,
    Global,
    Local,
    Random,
    gen_pattern_mask,
    local_nnz,
    save_csr,
)
from graph_attn.pipelines.bench import (
    BenchConfig,
    BenchReport,
    doubling_ratios,
    dense_time_ratios,
    estimate_footprint,
    fit_scaling,
    render_report,
    resolve_source,
    run_benchmark,
    sparsity_sweep,
    sweep,
    write_report,
)

pytestmark = pytest.mark.bench


def _cfg(**kwargs: object) -> BenchConfig:
    base: dict[str, object] = {"length": 32, "d": 8, "warmup": 0, "iters": 1, "dtype": "float64"}
    return BenchConfig(**{**base, **kwargs})


@pytest.mark.parametrize(
    "kwargs",
    [
        {"algorithm": Algorithm.flash_dense, "sparsity": 0.1},
        {"algorithm": Algorithm.local},
        {"algorithm": Algorithm.local, "pattern": Global(indices=(0,))},
        {"algorithm": Algorithm.csr},
        {"algorithm": Algorithm.csr, "pattern": Local(w=2), "mask_file": Path("m.csrm")},
        {"algorithm": Algorithm.csr, "sparsity": 0.1, "iters": 0},
        {"algorithm": Algorithm.csr, "sparsity": 0.1, "colour": "blue"},
    ],
)
def test_config_validation(kwargs: dict[str, object]) -> None:
    with pytest.raises(ValidationError):
        _cfg(**kwargs)


def test_with_returns_validated_copy() -> None:
    cfg = _cfg(algorithm=Algorithm.local, pattern=Local(w=3))
    moved = cfg.with_(length=64)
    assert moved.length == 64 and cfg.length == 32
    with pytest.raises(ValidationError):
        cfg.with_(pattern=None)


def test_resolve_source_by_algorithm(tmp_path: Path) -> None:
    assert resolve_source(_cfg(algorithm=Algorithm.local, pattern=Local(w=3))) == Local(w=3)
    assert isinstance(resolve_source(_cfg(algorithm=Algorithm.csr, pattern=Local(w=3))), CsrMask)
    assert isinstance(resolve_source(_cfg(algorithm=Algorithm.coo, sparsity=0.1)), CooMask)

    path = save_csr(gen_pattern_mask(Local(w=2), 16), tmp_path / "m.csrm")
    with pytest.raises(ConfigurationError, match="L=16"):
        resolve_source(_cfg(algorithm=Algorithm.csr, mask_file=path))


def test_single_run_reports_one_sample() -> None:
    report = run_benchmark(_cfg(algorithm=Algorithm.local, pattern=Local(w=3), oracle=True))
    assert len(report.samples_s) == 1
    assert report.min_s == report.max_s == report.mean_s == report.median_s >= 0
    assert report.work == local_nnz(3, 32)
    assert report.achieved_sf == pytest.approx(local_nnz(3, 32) / 32**2)
    assert report.oracle is not None and report.oracle.passed
    assert report.dense_cells == 0


@pytest.mark.parametrize("algorithm", [Algorithm.csr, Algorithm.coo])
def test_explicit_work_equals_random_nnz(algorithm: Algorithm) -> None:
    report = run_benchmark(_cfg(algorithm=algorithm, sparsity=0.1, iters=3))
    assert report.work == round(0.1 * 32 * 32)
    assert len(report.samples_s) == 3


def test_mask_file_benchmark(tmp_path: Path) -> None:
    mask = gen_pattern_mask(Dilated2D(b=8, r=2), 32)
    path = save_csr(mask, tmp_path / "blocks.csrm")
    report = run_benchmark(_cfg(algorithm=Algorithm.csr, mask_file=path, oracle=True))
    assert report.work == mask.nnz
    assert report.oracle is not None and report.oracle.passed


def test_dense_oracle_benchmark_counts_every_cell() -> None:
    report = run_benchmark(_cfg(algorithm=Algorithm.sdp, pattern=Local(w=3)))
    assert report.work == report.dense_cells == 32 * 32


def test_report_sample_count_is_checked() -> None:
    cfg = _cfg(algorithm=Algorithm.csr, sparsity=0.1, iters=2)
    with pytest.raises(ValidationError):
        BenchReport(config=cfg, samples_s=[0.1], work=1, achieved_sf=0.1)


def test_report_serialization() -> None:
    report = run_benchmark(_cfg(algorithm=Algorithm.csr, pattern=Random(s_f=0.2, seed=1), iters=2))
    payload = json.loads(render_report(report, "json"))
    assert isinstance(payload, dict)
    assert payload["config"]["algorithm"] == "csr"
    assert payload["config"]["pattern"] == {"kind": "random", "s_f": 0.2, "seed": 1}
    assert len(payload["samples_s"]) == 2
    assert "oracle" not in payload

    listed = json.loads(render_report([report, report], "json"))
    assert isinstance(listed, list) and len(listed) == 2

    rows = list(csv.DictReader(io.StringIO(render_report([report], "csv"))))
    assert rows[0]["algorithm"] == "csr"
    assert int(rows[0]["work"]) == report.work


def test_write_report_targets(tmp_path: Path) -> None:
    report = run_benchmark(_cfg(algorithm=Algorithm.local, pattern=Local(w=2)))
    default = write_report(report, "json", stem="one")
    assert default.name == "one.json" and default.parent.name == "reports"
    assert json.loads(default.read_text(encoding="utf-8"))["work"] == report.work

    into_dir = write_report([report], "csv", tmp_path, stem="sweep")
    assert into_dir == tmp_path / "sweep.csv"
    explicit = write_report(report, "json", tmp_path / "out" / "r.json")
    assert explicit.is_file()


def test_footprint_estimates() -> None:
    dense = estimate_footprint(Algorithm.sdp, 1024, 64, 1.0, "float64")
    assert dense >= 25 * 1024 * 1024
    local32 = estimate_footprint(Algorithm.local, 1024, 64, 0.01, "float32")
    local64 = estimate_footprint(Algorithm.local, 1024, 64, 0.01, "float64")
    assert local64 == 2 * local32


def test_sweep_constant_window_keeps_pattern() -> None:
    base = _cfg(algorithm=Algorithm.local, pattern=Local(w=3))
    rows = sweep("constant_window", [32, 64], base)
    kernel_rows = [r for r in rows if r.algorithm is Algorithm.local]
    dense_rows = [r for r in rows if r.algorithm is Algorithm.sdp]
    assert [r.work for r in kernel_rows] == [local_nnz(3, 32), local_nnz(3, 64)]
    assert all(r.pattern == Local(w=3).model_dump_json() for r in kernel_rows)
    assert [r.dense_cells for r in dense_rows] == [32 * 32, 64 * 64]
    assert all(r.status == "ok" for r in rows)


def test_sweep_constant_window_shrinks_random_sparsity() -> None:
    base = _cfg(algorithm=Algorithm.csr, sparsity=0.1)
    rows = sweep(SweepKind.constant_window, [32, 64], base, include_dense=False)
    assert [r.work for r in rows] == [102, 204]


def test_sweep_constant_sparsity_resizes_window() -> None:
    base = _cfg(algorithm=Algorithm.local, pattern=Local(w=5))
    target = local_nnz(5, 32) / 32**2
    rows = sweep("constant_sparsity", [32, 64, 128], base, include_dense=False)
    assert len(rows) == 3
    for row in rows:
        assert row.achieved_sf == pytest.approx(target, abs=0.03)


def test_sweep_skips_dense_rows_over_the_cap() -> None:
    base = _cfg(algorithm=Algorithm.local, pattern=Local(w=3))
    rows = sweep("constant_window", [32], base, dense_cap_bytes=1_000)
    skipped = [r for r in rows if r.status == "skipped"]
    assert len(skipped) == 1
    assert skipped[0].algorithm is Algorithm.sdp
    assert "cap is 1000" in skipped[0].reason
    assert skipped[0].mean_s is None


def test_sweep_rejects_bad_inputs() -> None:
    base = _cfg(algorithm=Algorithm.local, pattern=Local(w=3))
    with pytest.raises(ConfigurationError):
        sweep("constant_window", [64, 32], base)
    with pytest.raises(ConfigurationError):
        sweep("constant_window", [], base)
    glob = _cfg(algorithm=Algorithm.global_, pattern=Global(indices=(0,), w=1))
    with pytest.raises(ConfigurationError, match="constant sparsity"):
        sweep("constant_sparsity", [32, 64], glob, include_dense=False)


def test_sweeps_reject_mask_file_bases(tmp_path: Path) -> None:
    path = save_csr(gen_pattern_mask(Local(w=2), 32), tmp_path / "m.csrm")
    base = _cfg(algorithm=Algorithm.csr, mask_file=path)
    with pytest.raises(ConfigurationError, match="not a mask file"):
        sweep("constant_sparsity", [32, 64], base, include_dense=False)
    with pytest.raises(ConfigurationError, match="not a mask file"):
        sparsity_sweep([0.05, 0.1], base, include_dense=False)


def test_sweep_points_to_sparsity_sweep_for_fixed_length() -> None:
    base = _cfg(algorithm=Algorithm.csr, sparsity=0.1)
    with pytest.raises(ConfigurationError, match="sparsity_sweep"):
        sweep(SweepKind.sparsity, [32], base)


def test_sparsity_sweep_holds_length_and_tracks_targets() -> None:
    base = _cfg(algorithm=Algorithm.csr, sparsity=0.1)
    rows = sparsity_sweep([0.05, 0.1, 0.2], base)
    kernel_rows = [r for r in rows if r.algorithm is Algorithm.csr]
    dense_rows = [r for r in rows if r.algorithm is Algorithm.sdp]

    assert all(r.kind is SweepKind.sparsity and r.length == 32 for r in rows)
    assert [r.target_sf for r in kernel_rows] == [0.05, 0.1, 0.2]
    assert [r.work for r in kernel_rows] == [51, 102, 205]
    assert [r.target_sf for r in dense_rows] == [0.05, 0.1, 0.2]

    ratios = dense_time_ratios(rows)
    assert [row.target_sf for row, _ in ratios] == [0.05, 0.1, 0.2]
    assert all(ratio > 0 for _, ratio in ratios)


def test_sparsity_sweep_resizes_local_window() -> None:
    base = _cfg(algorithm=Algorithm.local, length=64, pattern=Local(w=2))
    rows = sparsity_sweep([0.05, 0.2, 0.5], base, include_dense=False)
    achieved = [r.achieved_sf for r in rows]
    assert achieved == sorted(achieved)
    for row in rows:
        assert row.target_sf is not None
        assert row.achieved_sf == pytest.approx(row.target_sf, abs=0.03)


@pytest.mark.parametrize("values", [[], [0.2, 0.1], [0.0, 0.1], [0.5, 1.5]])
def test_sparsity_sweep_rejects_bad_targets(values: list[float]) -> None:
    base = _cfg(algorithm=Algorithm.csr, sparsity=0.1)
    with pytest.raises(ConfigurationError):
        sparsity_sweep(values, base, include_dense=False)


def test_dense_time_ratios_skip_missing_dense_rows() -> None:
    base = _cfg(algorithm=Algorithm.local, pattern=Local(w=3))
    rows = sweep("constant_window", [32], base, dense_cap_bytes=1_000)
    assert dense_time_ratios(rows) == []


def test_fit_scaling_separates_linear_and_quadratic_growth() -> None:
    lengths = [1000, 2000, 4000, 8000]
    linear = fit_scaling(lengths, [0.01 + 1e-6 * L for L in lengths])
    assert linear.quadratic_share < 1e-6
    assert linear.linear == pytest.approx(1e-6, rel=1e-6)
    assert linear.predict(16000) == pytest.approx(0.026, rel=1e-6)

    quadratic = fit_scaling(lengths, [1e-9 * L * L for L in lengths])
    assert quadratic.quadratic_share == pytest.approx(1.0, rel=1e-6)
    with pytest.raises(ConfigurationError):
        fit_scaling(lengths[:2], [0.1, 0.2])


def test_doubling_ratios() -> None:
    assert doubling_ratios([1024, 2048, 4096], [1.0, 4.0, 16.0]) == [4.0, 4.0]
    with pytest.raises(ConfigurationError, match="double"):
        doubling_ratios([1024, 3072], [1.0, 9.0])


@pytest.mark.slow
def test_local_kernel_time_grows_linearly() -> None:
    lengths = [8192, 16384, 32768, 65536]
    times = [
        run_benchmark(
            BenchConfig(
                algorithm=Algorithm.local, length=L, d=32, pattern=Local(w=16),
                warmup=2, iters=5, seed=0, dtype="float32",
            )
        ).min_s
        for L in lengths
    ]  # fmt: skip
    assert fit_scaling(lengths, times).quadratic_share < 0.10


@pytest.mark.slow
def test_dense_oracle_time_quadruples_per_doubling() -> None:
    lengths = [4096, 8192]
    times = [
        run_benchmark(
            BenchConfig(
                algorithm=Algorithm.sdp, length=L, d=32, pattern=Local(w=16),
                warmup=1, iters=3, seed=0, dtype="float32",
            )
        ).min_s
        for L in lengths
    ]  # fmt: skip
    for ratio in doubling_ratios(lengths, times):
        assert 3.0 <= ratio <= 5.0


@pytest.mark.slow
def test_csr_advantage_over_dense_shrinks_as_density_grows() -> None:
    base = BenchConfig(
        algorithm=Algorithm.csr, length=8192, d=64, sparsity=1e-3,
        warmup=1, iters=3, seed=0, dtype="float32",
    )  # fmt: skip
    rows = sparsity_sweep([1e-3, 1e-2, 1e-1], base)
    ratios = [ratio for _, ratio in dense_time_ratios(rows)]
    assert len(ratios) == 3
    assert ratios == sorted(ratios)
    assert ratios[0] < 1.0
