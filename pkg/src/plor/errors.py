"""Exception types shared across the package."""


class PlorError(Exception):
    """Base class for all package errors."""


class NegativeLength(PlorError):
    pass


class LengthBelowOne(PlorError):
    pass


class NotPlanarEmbedding(PlorError):
    """Euler check failed, or the input is otherwise not a valid embedding."""


class DisconnectedInput(NotPlanarEmbedding):
    """Public builders reject disconnected graphs; callers split components."""


class DuplicateEdge(PlorError):
    """Coordinate mode: two darts at a node with coincident angles."""


class FaceNotFound(PlorError):
    pass


class SourceNotOnFace(PlorError):
    pass


class SourceUnknown(PlorError):
    pass


class NodeUnknown(PlorError):
    pass


class ConstantsExceeded(PlorError):
    """A structural bound of a division could not be met; indicates a separator bug."""


class CycleTooLong(PlorError):
    pass


class CycleNotNonSelfCrossing(PlorError):
    pass


class SnapshotError(PlorError):
    pass
