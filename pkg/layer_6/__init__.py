"""Layer 6: the typer command-line front end.

Exports:
- app (typer application with inspect, coarsen, baseline, evaluate, sample,
  augment-test and spectrum)
"""
from .cli import app, handle_errors

__all__ = ["app", "handle_errors"]
