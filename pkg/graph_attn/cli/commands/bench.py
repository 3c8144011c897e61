# graph_attn/cli/commands/bench.py
"""`bench` and `sweep` subcommands."""

from pathlib import Path
from typing import Annotated

import typer

from graph_attn.cli.commands.common import (
    build_pattern,
    emit,
    handles_errors,
    parse_floats,
    parse_ints,
)
from graph_attn.core.config import settings
from graph_attn.core.enums import Algorithm, OutputFormat, SweepKind
from graph_attn.core.errors import ConfigurationError
from graph_attn.pipelines.bench import (
    BenchConfig,
    render_report,
    run_benchmark,
    sparsity_sweep,
    sweep,
    write_report,
)

AlgoOpt = Annotated[Algorithm, typer.Option("--algo", "-a", help="Kernel to run")]
DimOpt = Annotated[int, typer.Option("--dim", "-d", min=1, help="Embedded dimension")]
WindowOpt = Annotated[int | None, typer.Option("--window", "-w", min=1, help="Window size w")]
DilationOpt = Annotated[int, typer.Option("--dilation", "-r", min=1, help="Dilation factor r")]
BlockOpt = Annotated[int | None, typer.Option("--block", "-b", min=1, help="2D block size b")]
GlobalOpt = Annotated[
    str | None, typer.Option("--global-indices", help="Comma-separated global token indices")
]
MaskFileOpt = Annotated[
    Path | None, typer.Option("--mask-file", exists=True, dir_okay=False, help="CSR or CSV mask")
]
SparsityOpt = Annotated[
    float | None, typer.Option("--sparsity", "-s", min=0.0, max=1.0, help="Target S_f")
]
PatternOpt = Annotated[str | None, typer.Option("--pattern", help='Pattern JSON, e.g. {"kind":"local","w":51}')]
WarmupOpt = Annotated[int | None, typer.Option("--warmup", min=0, help="Untimed runs")]
ItersOpt = Annotated[int | None, typer.Option("--iters", min=1, help="Timed runs")]
SeedOpt = Annotated[int | None, typer.Option("--seed", help="Input and mask seed")]
DtypeOpt = Annotated[str | None, typer.Option("--dtype", help="float32 or float64")]
FormatOpt = Annotated[OutputFormat, typer.Option("--format", "-f", help="Report format")]
OutOpt = Annotated[Path | None, typer.Option("--out", "-o", help="Output file or directory")]


def _config(
    algo: Algorithm,
    length: int,
    dim: int,
    window: int | None,
    dilation: int,
    block: int | None,
    global_indices: str | None,
    mask_file: Path | None,
    sparsity: float | None,
    pattern: str | None,
    warmup: int | None,
    iters: int | None,
    seed: int | None,
    dtype: str | None,
    oracle: bool = False,
) -> BenchConfig:
    built = (
        None
        if mask_file is not None
        else build_pattern(
            algo,
            length,
            window=window,
            dilation=dilation,
            block=block,
            global_indices=global_indices,
            sparsity=sparsity,
            pattern_json=pattern,
        )
    )
    return BenchConfig(
        algorithm=algo,
        length=length,
        d=dim,
        pattern=built,
        mask_file=mask_file,
        sparsity=sparsity if built is None and mask_file is None else None,
        warmup=settings.warmup if warmup is None else warmup,
        iters=settings.iters if iters is None else iters,
        seed=settings.seed if seed is None else seed,
        dtype=dtype or settings.dtype,
        oracle=oracle,
    )


def _emit_report(records: object, fmt: OutputFormat, out: Path | None, stem: str) -> None:
    if out is not None and out.is_dir():
        write_report(records, fmt, out, stem=stem)  # type: ignore[arg-type]
    else:
        emit(render_report(records, fmt), out)  # type: ignore[arg-type]


@handles_errors
def bench_command(
    algo: AlgoOpt,
    length: Annotated[int, typer.Option("--length", "-L", min=1, help="Context length")],
    dim: DimOpt = 64,
    window: WindowOpt = None,
    dilation: DilationOpt = 1,
    block: BlockOpt = None,
    global_indices: GlobalOpt = None,
    mask_file: MaskFileOpt = None,
    sparsity: SparsityOpt = None,
    pattern: PatternOpt = None,
    warmup: WarmupOpt = None,
    iters: ItersOpt = None,
    seed: SeedOpt = None,
    dtype: DtypeOpt = None,
    oracle: Annotated[bool, typer.Option("--oracle", help="Compare with the dense oracle")] = False,
    fmt: FormatOpt = OutputFormat.json,
    out: OutOpt = None,
) -> None:
    """Time one kernel: warm-up runs, then timed runs on fixed seeded inputs."""
    cfg = _config(
        algo, length, dim, window, dilation, block, global_indices, mask_file,
        sparsity, pattern, warmup, iters, seed, dtype, oracle,
    )  # fmt: skip
    report = run_benchmark(cfg)
    _emit_report(report, fmt, out, stem=f"bench-{algo}-{length}")


@handles_errors
def sweep_command(
    algo: AlgoOpt,
    lengths: Annotated[str, typer.Option("--lengths", help="Ascending, comma-separated")],
    kind: Annotated[SweepKind, typer.Option("--kind", help="Sweep policy")] = SweepKind.constant_window,
    sparsities: Annotated[
        str | None,
        typer.Option("--sparsities", help="Ascending S_f targets for --kind sparsity"),
    ] = None,
    dim: DimOpt = 64,
    window: WindowOpt = None,
    dilation: DilationOpt = 1,
    block: BlockOpt = None,
    global_indices: GlobalOpt = None,
    sparsity: SparsityOpt = None,
    pattern: PatternOpt = None,
    warmup: WarmupOpt = None,
    iters: ItersOpt = None,
    seed: SeedOpt = None,
    dtype: DtypeOpt = None,
    dense: Annotated[bool, typer.Option("--dense/--no-dense", help="Add dense-oracle rows")] = True,
    dense_cap: Annotated[
        int | None, typer.Option("--dense-cap", min=1, help="Skip dense rows above this many bytes")
    ] = None,
    fmt: Annotated[OutputFormat, typer.Option("--format", "-f")] = OutputFormat.csv,
    out: OutOpt = None,
) -> None:
    """Benchmark across context lengths, or across S_f at one length with --kind sparsity."""
    L_list = parse_ints(lengths)
    if not L_list:
        raise ConfigurationError("--lengths needs at least one context length")

    if kind is SweepKind.sparsity:
        targets = parse_floats(sparsities)
        if not targets:
            raise ConfigurationError("--kind sparsity needs --sparsities")
        if len(L_list) != 1:
            raise ConfigurationError("--kind sparsity runs at a single length")
        base = _config(
            algo, L_list[0], dim, window, dilation, block, global_indices, None,
            sparsity if sparsity is not None else targets[0], pattern, warmup, iters, seed, dtype,
        )  # fmt: skip
        rows = sparsity_sweep(targets, base, include_dense=dense, dense_cap_bytes=dense_cap)
        _emit_report(rows, fmt, out, stem=f"sweep-{kind}-{algo}-{L_list[0]}")
        return

    base = _config(
        algo, L_list[0], dim, window, dilation, block, global_indices, None,
        sparsity, pattern, warmup, iters, seed, dtype,
    )  # fmt: skip
    rows = sweep(kind, L_list, base, include_dense=dense, dense_cap_bytes=dense_cap)
    _emit_report(rows, fmt, out, stem=f"sweep-{kind}-{algo}")
