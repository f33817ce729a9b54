"""Command-line front end and expression parser."""

from .main import main, run_command
from .parser import evaluate, parse, parse_poly

__all__ = ["main", "run_command", "parse", "parse_poly", "evaluate"]
