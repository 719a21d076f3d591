"""
Exception hierarchy. Every error carries a human-readable ``detail`` and the
process exit code the CLI maps it to.
"""

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_RUNTIME = 3


class CurvGlyphError(Exception):
    exit_code: int = EXIT_RUNTIME

    def __init__(self, detail: str):
        super().__init__(detail)
        self.detail = detail


# ── Usage ──────────────────────────────────────────────────────────────────────

class UsageError(CurvGlyphError):
    exit_code = EXIT_USAGE


class ConfigInvalid(UsageError):
    pass


# ── Data ───────────────────────────────────────────────────────────────────────

class DataError(CurvGlyphError):
    exit_code = EXIT_DATA


class ParseError(DataError):
    """Malformed IDX stream."""


class BadMagic(ParseError):
    pass


class DimMismatch(ParseError):
    pass


class Truncated(ParseError):
    pass


class LabelOutOfRange(DataError):
    pass


class EmptyClass(DataError):
    pass


class MissingFile(DataError):
    def __init__(self, path):
        super().__init__(f"Required file not found: {path}")
        self.path = path


class IndexOutOfRange(DataError):
    pass


class EmptyIndexSet(DataError):
    pass


class DataMismatch(DataError):
    pass


class CorruptBlob(DataError):
    pass


# ── Model / runtime ────────────────────────────────────────────────────────────

class ModelError(CurvGlyphError):
    exit_code = EXIT_RUNTIME


class BatchTooSmall(ModelError):
    pass


class CacheMismatch(ModelError):
    pass


class ShapeMismatch(ModelError):
    pass


class DegenerateTangent(ModelError):
    pass


class ZeroLength(ModelError):
    pass


class VersionMismatch(ModelError):
    pass


class IoFailure(ModelError):
    pass


class ClassCountMismatch(VersionMismatch):
    """Checkpoint and dataset disagree on the number of classes."""

    exit_code = EXIT_DATA
