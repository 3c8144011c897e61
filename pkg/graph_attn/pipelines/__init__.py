# graph_attn/pipelines/__init__.py
"""Harnesses built on the core kernels: presets, benchmarks and verification."""

from graph_attn.pipelines.bench import (
    BenchConfig,
    BenchReport,
    SweepRow,
    render_report,
    run_benchmark,
    sparsity_sweep,
    sweep,
    write_report,
)
from graph_attn.pipelines.presets import PresetLeg, PresetPlan, preset
from graph_attn.pipelines.verify import (
    SuiteSummary,
    VerifyCase,
    run_suite,
    verify_composition,
    verify_kernel,
    verify_reference_sdpa,
    verify_work,
)

__all__: list[str] = [
    "BenchConfig",
    "BenchReport",
    "SweepRow",
    "run_benchmark",
    "sweep",
    "sparsity_sweep",
    "render_report",
    "write_report",
    "PresetLeg",
    "PresetPlan",
    "preset",
    "VerifyCase",
    "SuiteSummary",
    "verify_kernel",
    "verify_work",
    "verify_composition",
    "verify_reference_sdpa",
    "run_suite",
]
