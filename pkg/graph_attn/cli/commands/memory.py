# graph_attn/cli/commands/memory.py
"""`maxlen` subcommand: theoretical maximum context length as CSV."""

import csv
import io
from pathlib import Path
from typing import Annotated

import typer

from graph_attn.cli.commands.common import emit, handles_errors
from graph_attn.core.enums import Algorithm
from graph_attn.core.memmodel import HardwareBudget, capacity_curve

COLUMNS = ("algorithm", "dtype_bytes", "index_bytes", "d", "heads", "s_f", "max_L")


@handles_errors
def maxlen_command(
    algos: Annotated[
        list[Algorithm], typer.Option("--algo", "-a", help="Algorithm family (repeatable)")
    ],
    dtype_bytes: Annotated[int, typer.Option("--dtype-bytes", help="Element width: 2 or 4")] = 4,
    index_bytes: Annotated[int, typer.Option("--index-bytes", min=1, help="Index width")] = 4,
    dim: Annotated[int, typer.Option("--dim", "-d", min=1)] = 64,
    heads: Annotated[int, typer.Option("--heads", min=1)] = 1,
    sparsity: Annotated[
        list[float] | None, typer.Option("--sparsity", "-s", help="S_f values (repeatable)")
    ] = None,
    budget_bytes: Annotated[
        int | None, typer.Option("--budget-bytes", min=1, help="Device budget (default 80 GiB)")
    ] = None,
    budget_fraction: Annotated[
        float, typer.Option("--budget-fraction", help="Share of the budget left to attention")
    ] = 1.0,
    out: Annotated[Path | None, typer.Option("--out", "-o")] = None,
) -> None:
    """Largest context length that fits the device, per algorithm and sparsity."""
    budget = HardwareBudget(bytes=budget_bytes) if budget_bytes else HardwareBudget.from_settings()
    budget = budget.scaled(budget_fraction)
    s_f_list = sparsity or [1e-4]

    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(COLUMNS)
    for algo in algos:
        for point in capacity_curve(algo, dtype_bytes, index_bytes, dim, heads, s_f_list, budget):
            writer.writerow((str(algo), dtype_bytes, index_bytes, dim, heads, point.s_f, point.max_L))
    emit(buf.getvalue(), out)
