"""
This package handles lexing, parsing and printing of the structured-text subset
"""

from .emitter import emit_program
from .parser import load_program, parse_program, parse_text

__all__ = ["emit_program", "load_program", "parse_program", "parse_text"]
