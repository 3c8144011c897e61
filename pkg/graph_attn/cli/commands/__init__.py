# graph_attn/cli/commands/__init__.py
"""Subcommands of the graph-attn CLI, one module per command group."""

from graph_attn.cli.commands.bench import bench_command, sweep_command
from graph_attn.cli.commands.masks import maskgen_command
from graph_attn.cli.commands.memory import maxlen_command
from graph_attn.cli.commands.presets import preset_command
from graph_attn.cli.commands.verify import verify_command

__all__: list[str] = [
    "bench_command",
    "sweep_command",
    "preset_command",
    "maxlen_command",
    "verify_command",
    "maskgen_command",
]
