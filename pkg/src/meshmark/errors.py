"""Exception hierarchy shared across the library."""


class MeshmarkError(Exception):
    """Base class for all library errors."""


class ParseError(MeshmarkError):
    """Malformed mesh file syntax.

    Carries the 1-based line number (text formats) or byte offset
    (binary formats) where parsing failed, when known.
    """

    def __init__(self, message, line=None, offset=None):
        self.line = line
        self.offset = offset
        if line is not None:
            message = f"line {line}: {message}"
        elif offset is not None:
            message = f"offset {offset}: {message}"
        super().__init__(message)


class FaceIndexError(ParseError):
    """A face references a vertex that does not exist."""


class EmptyMeshError(ParseError):
    """The file parsed cleanly but contains no faces."""


class InvalidStrokeError(MeshmarkError):
    """Brush stroke with no samples or non-positive radius."""


class InvalidPolygonError(MeshmarkError):
    """Lasso polygon with fewer than three vertices."""


class MeshMismatchError(MeshmarkError):
    """Two objects that must refer to the same mesh do not."""


class EmptyRoiError(MeshmarkError):
    """An annotation was requested for an empty face set."""


class SchemaViolationError(MeshmarkError):
    """Field values do not conform to their schema.

    ``keys`` lists the offending field keys.
    """

    def __init__(self, message, keys=()):
        self.keys = list(keys)
        super().__init__(message)


class UnknownMeshError(MeshmarkError):
    """Referenced model id is not in the store."""


class UnknownAnnotationError(MeshmarkError):
    """Referenced annotation id is not in the store."""


class ValidationError(MeshmarkError):
    """A document failed structural validation.

    ``violations`` holds the individual findings when available.
    """

    def __init__(self, message, violations=()):
        self.violations = list(violations)
        super().__init__(message)


class SelectorUnsupportedError(ValidationError):
    """Annotation target selector is not a mesh face selector."""

    def __init__(self, message):
        super().__init__(message, violations=[])


class DegenerateMeshError(MeshmarkError):
    """Mesh bounding box has zero diagonal; scale-relative operations undefined."""


class DetectorError(MeshmarkError):
    """Base class for detector invocation failures."""


class DetectorUnknownError(DetectorError):
    """Detector name is not registered."""


class DetectorUnreachableError(DetectorError):
    """The detector endpoint could not be reached or returned non-200."""

    def __init__(self, message, body=None):
        self.body = body
        super().__init__(message)


class DetectorTimeoutError(DetectorError):
    """The detector did not answer within the configured timeout."""


class ProtocolError(DetectorError):
    """The detector answered with a malformed or invalid payload."""


class IdConflictError(MeshmarkError):
    """An imported annotation id already exists in the store."""
