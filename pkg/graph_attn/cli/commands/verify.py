# graph_attn/cli/commands/verify.py
"""`verify` subcommand."""

import json
from typing import Annotated

import typer

from graph_attn.cli.commands.common import EXIT_FAILED, emit, handles_errors
from graph_attn.core.config import get_logger
from graph_attn.core.enums import Suite
from graph_attn.pipelines.verify import run_suite

logger = get_logger(__name__)


@handles_errors
def verify_command(
    suite: Annotated[Suite, typer.Option("--suite", help="Which checks to run")] = Suite.all,
    seed: Annotated[int | None, typer.Option("--seed")] = None,
    cases: Annotated[int, typer.Option("--cases", min=1, help="Random patterns per kernel")] = 20,
    length: Annotated[int, typer.Option("--length", "-L", min=1)] = 256,
    dim: Annotated[int, typer.Option("--dim", "-d", min=1)] = 32,
    as_json: Annotated[bool, typer.Option("--json", help="Print a JSON summary")] = False,
) -> None:
    """Check kernels against the oracle, audit their work and test composition."""
    summary = run_suite(suite, seed, cases, length=length, d=dim)
    if as_json:
        emit(json.dumps(summary.to_dict(), indent=2), None)
    else:
        typer.echo(f"{summary.passed} passed, {summary.failed} failed")
        for check in summary.failures():
            logger.error("FAILED %s", check.model_dump_json())
    if not summary.ok:
        raise typer.Exit(EXIT_FAILED)
