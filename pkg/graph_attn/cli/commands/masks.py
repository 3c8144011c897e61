# graph_attn/cli/commands/masks.py
"""`maskgen` subcommand."""

import json
from pathlib import Path
from typing import Annotated

import typer

from graph_attn.cli.commands.common import build_pattern, emit, handles_errors
from graph_attn.core.enums import Algorithm
from graph_attn.core.errors import ConfigurationError
from graph_attn.core.mask import Random, gen_pattern_mask, save_csr, sparsity_factor


@handles_errors
def maskgen_command(
    kind: Annotated[
        Algorithm, typer.Option("--kind", "-k", help="local, dilated1d, dilated2d, global or csr (random)")
    ],
    length: Annotated[int, typer.Option("--length", "-L", min=1)],
    out: Annotated[Path, typer.Option("--out", "-o", help="Binary CSR mask file")],
    window: Annotated[int | None, typer.Option("--window", "-w", min=1)] = None,
    dilation: Annotated[int, typer.Option("--dilation", "-r", min=1)] = 1,
    block: Annotated[int | None, typer.Option("--block", "-b", min=1)] = None,
    global_indices: Annotated[str | None, typer.Option("--global-indices")] = None,
    sparsity: Annotated[float | None, typer.Option("--sparsity", "-s", min=0.0, max=1.0)] = None,
    seed: Annotated[int, typer.Option("--seed")] = 0,
    pattern: Annotated[str | None, typer.Option("--pattern", help="Pattern JSON")] = None,
) -> None:
    """Materialize a pattern as a CSR mask file."""
    if kind in (Algorithm.coo, Algorithm.sdp, Algorithm.flash_dense):
        raise ConfigurationError(f"cannot generate a mask of kind {kind}")

    built = build_pattern(
        kind,
        length,
        window=window,
        dilation=dilation,
        block=block,
        global_indices=global_indices,
        sparsity=sparsity,
        pattern_json=pattern,
    )
    if built is None:
        if sparsity is None:
            raise ConfigurationError("a random mask needs --sparsity")
        built = Random(s_f=sparsity, seed=seed)

    mask = gen_pattern_mask(built, length)
    path = save_csr(mask, out)
    emit(
        json.dumps(
            {
                "path": str(path),
                "pattern": built.model_dump(mode="json"),
                "length": mask.length,
                "nnz": mask.nnz,
                "s_f": sparsity_factor(mask),
            }
        ),
        None,
    )
