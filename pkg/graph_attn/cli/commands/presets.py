# graph_attn/cli/commands/presets.py
"""`preset` subcommand."""

import json
from typing import Annotated

import typer

from graph_attn.cli.commands.common import EXIT_FAILED, emit, handles_errors
from graph_attn.core.enums import PresetName
from graph_attn.core.mask import sparsity_factor
from graph_attn.pipelines.presets import preset
from graph_attn.pipelines.verify import verify_composition


@handles_errors
def preset_command(
    name: Annotated[PresetName, typer.Option("--name", "-n", help="Preset to build")],
    length: Annotated[int, typer.Option("--length", "-L", min=1, help="Context length")],
    seed: Annotated[int, typer.Option("--seed", help="Random-leg seed")] = 0,
    dilation: Annotated[int, typer.Option("--dilation", "-r", min=1)] = 2,
    check: Annotated[
        bool, typer.Option("--check", help="Compare sequential legs with the union CSR call")
    ] = False,
    dim: Annotated[int, typer.Option("--dim", "-d", min=1)] = 32,
) -> None:
    """Describe a preset's legs and union mask, optionally checking their composition."""
    plan = preset(name, length, seed, dilation=dilation)
    summary: dict[str, object] = {
        "name": str(plan.name),
        "length": plan.length,
        "legs": [
            {
                "algorithm": str(leg.algorithm),
                "pattern": leg.pattern.model_dump(mode="json") if leg.pattern is not None else None,
                "nnz": leg.materialize(length).nnz,
            }
            for leg in plan.legs
        ],
        "union_nnz": plan.union.nnz,
        "union_sf": sparsity_factor(plan.union),
    }

    failed = False
    if check:
        legs = [leg.mask if leg.mask is not None else leg.pattern for leg in plan.legs]
        result = verify_composition(legs, length, dim, seed)  # type: ignore[arg-type]
        summary["composition"] = {
            "passed": result.passed,
            "max_abs": result.deviation.max_abs,
            "work": result.work,
        }
        failed = not result.passed

    emit(json.dumps(summary, indent=2), None)
    if failed:
        raise typer.Exit(EXIT_FAILED)
