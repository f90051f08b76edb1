"""Exception hierarchy for the shape3d engine.

Every error raised on purpose by this package derives from ShapeEngineError,
so callers can catch one type at pipeline boundaries (e.g. to skip a corrupt
corpus file) without swallowing programming errors.
"""


class ShapeEngineError(Exception):
    """Base class for all shape3d errors."""


# --- OFF parsing ---------------------------------------------------------

class MalformedHeader(ShapeEngineError):
    """Counts line (or file header) could not be read."""


class TruncatedFile(ShapeEngineError):
    """File ended before the declared vertices/faces were read."""


class IndexOutOfRange(ShapeEngineError):
    """A face references a vertex index outside [0, vertex_count)."""


class EmptyMesh(ShapeEngineError):
    """Mesh declares zero vertices or zero faces."""


# --- mesh measures -------------------------------------------------------

class OpenMesh(ShapeEngineError):
    """Mesh is not closed (a boundary edge was found)."""


class ZeroArea(ShapeEngineError):
    """Total surface area is zero."""


class DegenerateCovariance(ShapeEngineError):
    """Vertices are coincident or collinear, principal axes undefined."""


class NonOrthonormalRotation(ShapeEngineError):
    pass


class DegenerateMeasure(ShapeEngineError):
    """A shape-index denominator is zero or negative."""


# --- convex hull ---------------------------------------------------------

class DegenerateHull(ShapeEngineError):
    """Input points are coplanar or collinear within tolerance."""


# --- semantics -----------------------------------------------------------

class TooFewValues(ShapeEngineError):
    pass


class DegenerateClusters(ShapeEngineError):
    """Fewer distinct values than requested clusters, or duplicate centers."""


class MissingVocabulary(ShapeEngineError):
    pass


class EmptyClassifier(ShapeEngineError):
    pass


# --- ontology ------------------------------------------------------------

class DuplicateModel(ShapeEngineError):
    pass


class UnknownPredicate(ShapeEngineError):
    pass


class DegenerateEntity(ShapeEngineError):
    """A spatial entity collapsed (e.g. zero-length principal axis)."""


# --- retrieval -----------------------------------------------------------

class DimensionMismatch(ShapeEngineError):
    pass


class AllZeroWeights(ShapeEngineError):
    pass


class UnknownModel(ShapeEngineError):
    pass


class EmptyIndex(ShapeEngineError):
    pass


class EmptyRelevantSet(ShapeEngineError):
    pass


class CountMismatch(ShapeEngineError):
    """Declared class/model counts in a .cla file do not match its body."""


# --- indexing / service --------------------------------------------------

class NoModelsFound(ShapeEngineError):
    pass


class WriteFailure(ShapeEngineError):
    pass


class PortInUse(ShapeEngineError):
    pass
