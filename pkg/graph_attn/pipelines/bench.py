# graph_attn/pipelines/bench.py
"""
Benchmark harness: warm-up runs, timed runs and plot-ready reports.

Only the kernel call is timed. Inputs and masks are built once per configuration before
the warm-up runs start.
"""

from __future__ import annotations

import csv
import io
import json
import statistics
import sys
import time
from collections.abc import Callable, Sequence
from pathlib import Path
from typing import Any, Literal, Self

import numpy as np
import torch
from platformdirs import user_data_dir
from pydantic import BaseModel, ConfigDict, Field, model_validator
from tqdm import tqdm

from graph_attn.core.attention import AttentionResult, attend, sdp_masked_oracle
from graph_attn.core.config import LogContext, get_logger, settings
from graph_attn.core.enums import Algorithm, DType, OutputFormat, SweepKind
from graph_attn.core.errors import ConfigurationError, FootprintError
from graph_attn.core.mask import (
    CooMask,
    CsrMask,
    Dilated1D,
    Dilated2D,
    Global,
    Local,
    MaskPattern,
    Random,
    block_for_sparsity,
    csr_to_coo,
    expected_nnz,
    gen_pattern_mask,
    load_mask,
    window_for_sparsity,
)
from graph_attn.core.memmodel import accounting_for, footprint_bytes
from graph_attn.core.tensor import DenseMatrix, Deviation, random_qkv
from graph_attn.pipelines.verify import compare_to_oracle

logger = get_logger(__name__)

__all__: list[str] = [
    "BenchConfig",
    "BenchReport",
    "SweepRow",
    "run_benchmark",
    "sweep",
    "sparsity_sweep",
    "dense_time_ratios",
    "ScalingFit",
    "fit_scaling",
    "doubling_ratios",
    "resolve_source",
    "estimate_footprint",
    "peak_rss_bytes",
    "default_report_dir",
    "render_report",
    "write_report",
]

# float64 scores, masked scores and softmax weights plus the boolean mask grid
_ORACLE_BYTES_PER_CELL = 3 * 8 + 1

MaskSource = CsrMask | CooMask | MaskPattern


class BenchConfig(BaseModel):
    """One benchmark: kernel, problem size, mask source and timing protocol."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    algorithm: Algorithm
    length: int = Field(ge=1, description="context length L")
    d: int = Field(default=64, ge=1, description="embedded dimension")
    pattern: MaskPattern | None = None
    mask_file: Path | None = None
    sparsity: float | None = Field(
        default=None, gt=0.0, le=1.0, description="random-mask S_f when no pattern is given"
    )
    warmup: int = Field(default_factory=lambda: settings.warmup, ge=0)
    iters: int = Field(default_factory=lambda: settings.iters, ge=1)
    seed: int = Field(default_factory=lambda: settings.seed)
    dtype: Literal["float32", "float64"] = Field(default_factory=lambda: settings.dtype)
    oracle: bool = Field(default=False, description="compare the output with the dense oracle")
    row_block: int | None = Field(default=None, ge=1)

    @model_validator(mode="after")
    def _check_source(self) -> Self:
        if not self.algorithm.is_runnable:
            raise ValueError(f"{self.algorithm} has no executable kernel")
        if self.pattern is not None and self.mask_file is not None:
            raise ValueError("give a pattern or a mask file, not both")
        if self.algorithm.is_implicit:
            if self.pattern is None or self.pattern.algorithm is not self.algorithm:
                raise ValueError(f"the {self.algorithm} kernel needs a {self.algorithm} pattern")
        elif self.pattern is None and self.mask_file is None and self.sparsity is None:
            raise ValueError(f"{self.algorithm} needs a pattern, a mask file or a sparsity")
        return self

    def with_(self, **changes: Any) -> BenchConfig:
        """Validated copy with some fields replaced."""
        return BenchConfig(**{**dict(self), **changes})


class BenchReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    config: BenchConfig
    samples_s: list[float]
    work: int
    achieved_sf: float
    dense_cells: int = 0
    peak_rss_bytes: int | None = None
    oracle: Deviation | None = None

    @model_validator(mode="after")
    def _check_samples(self) -> Self:
        if len(self.samples_s) != self.config.iters:
            raise ValueError(f"expected {self.config.iters} samples, got {len(self.samples_s)}")
        return self

    @property
    def mean_s(self) -> float:
        return statistics.fmean(self.samples_s)

    @property
    def median_s(self) -> float:
        return statistics.median(self.samples_s)

    @property
    def min_s(self) -> float:
        return min(self.samples_s)

    @property
    def max_s(self) -> float:
        return max(self.samples_s)

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {
            "config": self.config.model_dump(mode="json"),
            "samples_s": list(self.samples_s),
            "mean_s": self.mean_s,
            "median_s": self.median_s,
            "min_s": self.min_s,
            "max_s": self.max_s,
            "work": self.work,
            "achieved_sf": self.achieved_sf,
            "dense_cells": self.dense_cells,
            "peak_rss_bytes": self.peak_rss_bytes,
        }
        if self.oracle is not None:
            out["oracle"] = self.oracle.model_dump(mode="json")
        return out

    def to_row(self) -> dict[str, Any]:
        """Flat CSV row; samples are summarized."""
        cfg = self.config
        return {
            "algorithm": str(cfg.algorithm),
            "length": cfg.length,
            "d": cfg.d,
            "pattern": cfg.pattern.model_dump_json() if cfg.pattern is not None else "",
            "dtype": cfg.dtype,
            "seed": cfg.seed,
            "iters": cfg.iters,
            "mean_s": self.mean_s,
            "median_s": self.median_s,
            "min_s": self.min_s,
            "max_s": self.max_s,
            "work": self.work,
            "achieved_sf": self.achieved_sf,
            "dense_cells": self.dense_cells,
        }


class SweepRow(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: SweepKind
    length: int
    algorithm: Algorithm
    pattern: str = ""
    target_sf: float | None = None
    status: Literal["ok", "skipped"] = "ok"
    reason: str = ""
    mean_s: float | None = None
    median_s: float | None = None
    min_s: float | None = None
    work: int | None = None
    achieved_sf: float | None = None
    dense_cells: int | None = None

    @classmethod
    def from_report(
        cls, kind: SweepKind, report: BenchReport, target_sf: float | None = None
    ) -> SweepRow:
        cfg = report.config
        return cls(
            kind=kind,
            target_sf=target_sf,
            length=cfg.length,
            algorithm=cfg.algorithm,
            pattern=cfg.pattern.model_dump_json() if cfg.pattern is not None else "",
            mean_s=report.mean_s,
            median_s=report.median_s,
            min_s=report.min_s,
            work=report.work,
            achieved_sf=report.achieved_sf,
            dense_cells=report.dense_cells,
        )

    def to_row(self) -> dict[str, Any]:
        return self.model_dump(mode="json")


def resolve_source(cfg: BenchConfig) -> MaskSource:
    """The mask or pattern the configured kernel runs on, validated for cfg.length."""
    if cfg.mask_file is not None:
        mask: CsrMask = load_mask(cfg.mask_file)
        if mask.length != cfg.length:
            raise ConfigurationError(
                f"mask file has L={mask.length}, config asks for L={cfg.length}",
                mask_file=str(cfg.mask_file),
            )
    elif cfg.pattern is not None:
        pattern = cfg.pattern.validate_for(cfg.length)
        if cfg.algorithm.is_implicit:
            return pattern
        mask = gen_pattern_mask(pattern, cfg.length)
    else:
        assert cfg.sparsity is not None
        mask = gen_pattern_mask(Random(s_f=cfg.sparsity, seed=cfg.seed), cfg.length)

    return csr_to_coo(mask) if cfg.algorithm is Algorithm.coo else mask


def _source_nnz(source: MaskSource, L: int) -> int:
    if isinstance(source, CsrMask | CooMask):
        return source.nnz
    return expected_nnz(source, L)


def estimate_footprint(algorithm: Algorithm, L: int, d: int, s_f: float, dtype: str) -> int:
    """Modelled bytes of one run; the dense oracle counts its float64 temporaries."""
    width = DType(dtype).bytes
    if algorithm is Algorithm.sdp:
        acc = accounting_for(
            Algorithm.sdp,
            element_bytes=4,
            index_bytes=8,
            d=d,
            per_token_bytes=4 * d * width,
            quadratic_dense_bytes=_ORACLE_BYTES_PER_CELL,
        )
        return footprint_bytes(acc, L, s_f)
    acc = accounting_for(algorithm, element_bytes=4, index_bytes=8, d=d)
    return footprint_bytes(acc, L, s_f) * width // 4


def peak_rss_bytes() -> int | None:
    """Peak resident set size of this process, where the platform reports one."""
    try:
        import resource
    except ImportError:
        return None
    peak = resource.getrusage(resource.RUSAGE_SELF).ru_maxrss
    # kilobytes on Linux, bytes on macOS
    return int(peak) if sys.platform == "darwin" else int(peak) * 1024


def _runner(
    cfg: BenchConfig, source: MaskSource, Q: DenseMatrix, K: DenseMatrix, V: DenseMatrix
) -> Callable[[], tuple[DenseMatrix, int]]:
    if cfg.algorithm is Algorithm.sdp:
        assert isinstance(source, CsrMask | CooMask)
        dtype = DType(cfg.dtype)

        def dense() -> tuple[DenseMatrix, int]:
            return sdp_masked_oracle(Q, K, V, source, dtype=dtype), cfg.length * cfg.length

        return dense

    def kernel() -> tuple[DenseMatrix, int]:
        result: AttentionResult = attend(Q, K, V, source, row_block=cfg.row_block)
        return result.O, result.work

    return kernel


def run_benchmark(cfg: BenchConfig) -> BenchReport:
    """Run ``cfg.warmup`` untimed and ``cfg.iters`` timed calls of the configured kernel."""
    source = resolve_source(cfg)
    L = cfg.length
    nnz = _source_nnz(source, L)
    achieved_sf = nnz / (L * L)
    Q, K, V = random_qkv(L, cfg.d, cfg.seed, DType(cfg.dtype))
    call = _runner(cfg, source, Q, K, V)

    logger.info(
        "Benchmark %s: L=%d d=%d S_f=%.3g warmup=%d iters=%d",
        cfg.algorithm,
        L,
        cfg.d,
        achieved_sf,
        cfg.warmup,
        cfg.iters,
        extra={"algorithm": str(cfg.algorithm), "length": L, "d": cfg.d, "seed": cfg.seed},
    )

    samples: list[float] = []
    try:
        for _ in range(cfg.warmup):
            call()
        for _ in range(cfg.iters):
            start = time.perf_counter()
            out, work = call()
            samples.append(time.perf_counter() - start)
    except (MemoryError, torch.cuda.OutOfMemoryError) as e:
        requested = estimate_footprint(cfg.algorithm, L, cfg.d, achieved_sf, cfg.dtype)
        raise FootprintError(
            f"{cfg.algorithm} at L={L} ran out of memory (modelled footprint {requested} bytes)",
            requested_bytes=requested,
        ) from e

    deviation: Deviation | None = None
    if cfg.oracle:
        mask = source if isinstance(source, CsrMask | CooMask) else gen_pattern_mask(source, L)
        deviation = compare_to_oracle(out, sdp_masked_oracle(Q, K, V, mask))
        if not deviation.passed:
            logger.warning(
                "%s output differs from the oracle at %s", cfg.algorithm, deviation.first_failure
            )

    report = BenchReport(
        config=cfg,
        samples_s=samples,
        work=work,
        achieved_sf=achieved_sf,
        dense_cells=L * L if cfg.algorithm is Algorithm.sdp else 0,
        peak_rss_bytes=peak_rss_bytes(),
        oracle=deviation,
    )
    logger.info(
        "Benchmark %s: mean %.6fs median %.6fs work=%d",
        cfg.algorithm,
        report.mean_s,
        report.median_s,
        report.work,
        extra={"algorithm": str(cfg.algorithm), "length": L, "work": report.work},
    )
    return report


def _pattern_at(kind: SweepKind, base: BenchConfig, L: int, target_sf: float) -> BenchConfig:
    """The base configuration moved to context length L under a sweep policy."""
    pattern = base.pattern
    if kind is SweepKind.constant_window:
        # random masks keep their neighbors per row, so S_f shrinks as 1/L
        shrunk = min(1.0, target_sf * base.length / L)
        match pattern:
            case None:
                return base.with_(length=L, sparsity=shrunk)
            case Random(seed=seed):
                return base.with_(length=L, pattern=Random(s_f=shrunk, seed=seed))
        return base.with_(length=L)

    match pattern:
        case None:
            return base.with_(length=L, sparsity=target_sf)
        case Local():
            return base.with_(length=L, pattern=Local(w=window_for_sparsity(target_sf, L)))
        case Dilated1D(r=r):
            w = window_for_sparsity(target_sf, L, r)
            return base.with_(length=L, pattern=Dilated1D(w=w, r=r))
        case Dilated2D(r=r):
            return base.with_(length=L, pattern=Dilated2D(b=block_for_sparsity(target_sf, L), r=r))
        case Random(seed=seed):
            return base.with_(length=L, pattern=Random(s_f=target_sf, seed=seed))
        case Global():
            raise ConfigurationError("global patterns cannot be held at a constant sparsity")
    raise ConfigurationError(f"cannot sweep pattern {pattern!r}")


def _check_sweep_base(base: BenchConfig) -> None:
    if base.mask_file is not None:
        raise ConfigurationError(
            "sweeps resize the mask at every point; give a pattern or a sparsity, not a mask file",
            mask_file=str(base.mask_file),
        )


def _run_points(
    kind: SweepKind,
    points: Sequence[tuple[BenchConfig, float | None]],
    include_dense: bool,
    dense_cap_bytes: int | None,
) -> list[SweepRow]:
    cap = dense_cap_bytes if dense_cap_bytes is not None else settings.dense_memory_cap_bytes
    rows: list[SweepRow] = []
    legs = 2 if include_dense else 1
    with (
        LogContext("graph_attn.core", "WARNING"),
        tqdm(total=len(points) * legs, desc=f"sweep {kind}", unit="run", disable=None) as bar,
    ):
        for cfg, target in points:
            L = cfg.length
            report = run_benchmark(cfg)
            rows.append(SweepRow.from_report(kind, report, target))
            bar.update(1)
            if not include_dense:
                continue

            footprint = estimate_footprint(Algorithm.sdp, L, cfg.d, report.achieved_sf, cfg.dtype)
            if footprint > cap:
                reason = f"dense oracle needs ~{footprint} bytes, cap is {cap}"
                logger.warning("Skipping dense leg at L=%d: %s", L, reason)
                rows.append(
                    SweepRow(
                        kind=kind,
                        length=L,
                        algorithm=Algorithm.sdp,
                        target_sf=target,
                        status="skipped",
                        reason=reason,
                        dense_cells=L * L,
                    )
                )
            else:
                dense_cfg = cfg.with_(algorithm=Algorithm.sdp, oracle=False)
                rows.append(SweepRow.from_report(kind, run_benchmark(dense_cfg), target))
            bar.update(1)
    return rows


def sweep(
    kind: SweepKind | str,
    lengths: Sequence[int],
    base: BenchConfig,
    *,
    include_dense: bool = True,
    dense_cap_bytes: int | None = None,
) -> list[SweepRow]:
    """
    Benchmark ``base`` across ascending context lengths.

    constant_window keeps the pattern parameters (S_f falls roughly as 1/L); constant_sparsity
    re-sizes the window or block at each L to hold the S_f that ``base`` has at its own length.
    Each length also gets a dense-oracle row unless its modelled footprint exceeds the cap,
    in which case the row is recorded as skipped.
    """
    kind = SweepKind(kind)
    if kind is SweepKind.sparsity:
        raise ConfigurationError("sparsity sweeps hold L fixed; use sparsity_sweep")
    if list(lengths) != sorted(lengths) or not lengths:
        raise ConfigurationError(f"sweep lengths must be non-empty and ascending, got {list(lengths)}")
    _check_sweep_base(base)

    base_source = resolve_source(base)
    target_sf = _source_nnz(base_source, base.length) / (base.length * base.length)
    points = [(_pattern_at(kind, base, L, target_sf), None) for L in lengths]
    return _run_points(kind, points, include_dense, dense_cap_bytes)


def sparsity_sweep(
    sparsities: Sequence[float],
    base: BenchConfig,
    *,
    include_dense: bool = True,
    dense_cap_bytes: int | None = None,
) -> list[SweepRow]:
    """
    Benchmark ``base`` at its own length across ascending target S_f values.

    The window, block or random density is re-sized to each target the same way
    constant_sparsity does; every row records its target next to the achieved S_f.
    """
    values = list(sparsities)
    if not values or values != sorted(values) or not all(0.0 < s <= 1.0 for s in values):
        raise ConfigurationError(
            f"sparsities must be non-empty, ascending and in (0, 1], got {values}"
        )
    _check_sweep_base(base)

    points = [
        (_pattern_at(SweepKind.constant_sparsity, base, base.length, s_f), s_f) for s_f in values
    ]
    return _run_points(SweepKind.sparsity, points, include_dense, dense_cap_bytes)


def dense_time_ratios(rows: Sequence[SweepRow]) -> list[tuple[SweepRow, float]]:
    """
    Each measured kernel row with its min time divided by the dense row's at the same point.

    Points whose dense row was skipped are left out.
    """
    dense = {
        (r.length, r.target_sf): r
        for r in rows
        if r.algorithm is Algorithm.sdp and r.status == "ok" and r.min_s
    }
    out: list[tuple[SweepRow, float]] = []
    for r in rows:
        if r.algorithm is Algorithm.sdp or r.status != "ok" or r.min_s is None:
            continue
        ref = dense.get((r.length, r.target_sf))
        if ref is not None and ref.min_s:
            out.append((r, r.min_s / ref.min_s))
    return out


class ScalingFit(BaseModel):
    """Least-squares t(L) = intercept + linear·L + quadratic·L²."""

    model_config = ConfigDict(frozen=True)

    intercept: float
    linear: float
    quadratic: float
    largest_length: int

    def predict(self, L: int) -> float:
        return self.intercept + self.linear * L + self.quadratic * L * L

    @property
    def quadratic_share(self) -> float:
        """|quadratic·L²| over the fitted time at the largest measured L."""
        L = self.largest_length
        total = self.predict(L)
        return abs(self.quadratic * L * L) / total if total > 0 else float("inf")


def fit_scaling(lengths: Sequence[int], seconds: Sequence[float]) -> ScalingFit:
    if len(lengths) != len(seconds) or len(lengths) < 3:
        raise ConfigurationError("a scaling fit needs at least three (L, time) points")
    quadratic, linear, intercept = np.polyfit(
        np.asarray(lengths, dtype=np.float64), np.asarray(seconds, dtype=np.float64), 2
    )
    return ScalingFit(
        intercept=float(intercept),
        linear=float(linear),
        quadratic=float(quadratic),
        largest_length=max(lengths),
    )


def doubling_ratios(lengths: Sequence[int], seconds: Sequence[float]) -> list[float]:
    """Time ratio between successive lengths that double; other steps are rejected."""
    if len(lengths) != len(seconds) or len(lengths) < 2:
        raise ConfigurationError("doubling ratios need at least two (L, time) points")
    ratios: list[float] = []
    for k in range(1, len(lengths)):
        if lengths[k] != 2 * lengths[k - 1]:
            raise ConfigurationError(
                f"lengths must double at each step, got {lengths[k - 1]} -> {lengths[k]}"
            )
        ratios.append(seconds[k] / seconds[k - 1])
    return ratios


def default_report_dir() -> Path:
    """Platform data directory for reports (e.g. ~/.local/share/graph_attn/reports)."""
    path = Path(user_data_dir("graph_attn", "graph_attn")) / "reports"
    path.mkdir(parents=True, exist_ok=True)
    return path


def render_report(
    records: BenchReport | Sequence[BenchReport] | Sequence[SweepRow],
    fmt: OutputFormat | str = OutputFormat.json,
) -> str:
    """JSON (one object, or a list) or CSV (one row per record) text."""
    fmt = OutputFormat(fmt)
    items = [records] if isinstance(records, BenchReport) else list(records)
    if fmt is OutputFormat.json:
        payload: Any = [
            r.to_dict() if isinstance(r, BenchReport) else r.to_row() for r in items
        ]
        if isinstance(records, BenchReport):
            payload = payload[0]
        return json.dumps(payload, indent=2)

    rows = [r.to_row() for r in items]
    buf = io.StringIO()
    if rows:
        writer = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
    return buf.getvalue()


def write_report(
    records: BenchReport | Sequence[BenchReport] | Sequence[SweepRow],
    fmt: OutputFormat | str = OutputFormat.json,
    out: Path | str | None = None,
    stem: str = "report",
) -> Path:
    """Write a report; ``out`` may be a file, a directory, or None for the default directory."""
    fmt = OutputFormat(fmt)
    target = Path(out) if out is not None else default_report_dir()
    if target.is_dir():
        target = target / f"{stem}.{fmt}"
    target.parent.mkdir(parents=True, exist_ok=True)
    target.write_text(render_report(records, fmt), encoding="utf-8")
    logger.info("Report written to %s", target)
    return target
