# graph_attn/cli/__init__.py
"""CLI entry point."""

from graph_attn.cli.__main__ import app, main

__all__: list[str] = ["app", "main"]
