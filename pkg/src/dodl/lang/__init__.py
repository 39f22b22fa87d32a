"""The definition language: lexer, parser, canonical printer and loader."""

from .loader import LoadResult, build, load_files, load_texts, validate
from .parser import parse, parse_query
from .printer import dump
from .syntax import Diagnostic, SourceUnit

__all__ = [
    "Diagnostic",
    "LoadResult",
    "SourceUnit",
    "build",
    "dump",
    "load_files",
    "load_texts",
    "parse",
    "parse_query",
    "validate",
]
