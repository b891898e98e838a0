"""Exception hierarchy shared across the toolkit."""

from __future__ import annotations


class AcuEvalError(Exception):
    """Base class for all toolkit errors."""


class ParseError(AcuEvalError):
    """A file could not be parsed under its declared format."""

    def __init__(self, message: str, *, path: str = "", line: int | None = None,
                 field: str = ""):
        self.path = path
        self.line = line
        self.field = field
        where = []
        if path:
            where.append(path)
        if line is not None:
            where.append(f"line {line}")
        if field:
            where.append(f"field '{field}'")
        prefix = f"[{': '.join(where)}] " if where else ""
        super().__init__(prefix + message)


class ValidationError(AcuEvalError):
    """Data violates a documented invariant."""


class AlignmentError(ValidationError):
    """Two score matrices do not share the same document/system ids."""


class BackendError(AcuEvalError):
    """An extractor/checker backend failed; carries the backend name."""

    def __init__(self, backend: str, message: str):
        self.backend = backend
        super().__init__(f"backend '{backend}': {message}")


class ExtractionError(AcuEvalError):
    """Unit extraction produced no usable content units."""


class DegenerateInputError(AcuEvalError):
    """Correlation input has zero variance; no coefficient is defined."""


class ScoringError(AcuEvalError):
    """Scoring a corpus cell failed; carries the offending coordinates."""

    def __init__(self, example_id: str, system_id: str, message: str):
        self.example_id = example_id
        self.system_id = system_id
        super().__init__(f"example '{example_id}', system '{system_id}': {message}")
