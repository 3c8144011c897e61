# graph_attn/cli/__main__.py
from pathlib import Path
from typing import Annotated, Literal

import torch
import typer
from dotenv import load_dotenv

from graph_attn.cli.commands import (
    bench_command,
    maskgen_command,
    maxlen_command,
    preset_command,
    sweep_command,
    verify_command,
)
from graph_attn.core.config import get_logger, settings, setup_logging

logger = get_logger(__name__)

app = typer.Typer(
    name="graph-attn",
    help="Work-optimal masked attention: benchmarks, verification and capacity planning.",
    no_args_is_help=True,
    add_completion=False,
)

app.command("bench")(bench_command)
app.command("sweep")(sweep_command)
app.command("preset")(preset_command)
app.command("maxlen")(maxlen_command)
app.command("verify")(verify_command)
app.command("maskgen")(maskgen_command)


@app.callback()
def configure(
    verbose: Annotated[bool, typer.Option("--verbose", "-v", help="Debug logging")] = False,
    log_format: Annotated[
        str | None, typer.Option("--log-format", help="simple, detailed or json")
    ] = None,
    log_file: Annotated[Path | None, typer.Option("--log-file", help="Write logs to file")] = None,
) -> None:
    load_dotenv()
    fmt: Literal["simple", "detailed", "json"] | None = (
        log_format if log_format in ("simple", "detailed", "json") else None  # type: ignore[assignment]
    )
    setup_logging(level="DEBUG" if verbose else None, format_type=fmt, log_file=log_file)
    if settings.num_threads is not None:
        torch.set_num_threads(settings.num_threads)
    logger.debug("graph-attn - environment: %s", settings.environment)


def main() -> None:
    app()


if __name__ == "__main__":
    main()
