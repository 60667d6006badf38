"""Command line layer - argument parsing and subcommand handlers"""

from .commands import COMMANDS, dispatch
from .parser import build_parser

__all__ = ["COMMANDS", "dispatch", "build_parser"]
