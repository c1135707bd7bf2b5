class GroveDimerError(Exception):
    """Base class for every error raised by this package."""


class SizeLimitError(GroveDimerError):
    pass


class PlanarityError(GroveDimerError):
    pass


class StructureError(GroveDimerError):
    """Graph is malformed: disconnected, bad rotation system, node off the outer face..."""


class EmbeddingRequiredError(StructureError):
    pass


class OracleSizeError(SizeLimitError):
    pass


class NoPerfectMatchingError(GroveDimerError):
    pass


class NumericToleranceError(GroveDimerError):
    pass


class DomainError(GroveDimerError, ValueError):
    pass
