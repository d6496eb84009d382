"""Error types shared across the toolkit."""

from __future__ import annotations


class ParseError(Exception):
    """Rejection of malformed input, from either the lexer or the parser.

    Carries enough position information to report ``file:line:col`` and to
    classify corpus entries as excluded.
    """

    def __init__(self, message: str, line: int, col: int, lexeme: str = "", phase: str = "parse"):
        self.message = message
        self.line = line
        self.col = col
        self.lexeme = lexeme
        self.phase = phase  # "lex" or "parse"
        super().__init__(f"{phase} error at line {line}, col {col}: {message}")


class ManifestError(Exception):
    """Malformed or inconsistent corpus manifest."""


class ConfigError(Exception):
    """Invalid analysis configuration (bad values, bad config file)."""


class SampleSizeError(ConfigError):
    """Requested sample exceeds the population it is drawn from."""


class ReportSchemaError(Exception):
    """Report or tree JSON that violates the documented schema.

    ``path`` is a JSON-pointer-style location of the offending element.
    """

    def __init__(self, message: str, path: str):
        self.path = path
        super().__init__(f"{message} (at {path})")
