"""Exception hierarchy shared by the mesh, dual and solver layers."""


class DecError(Exception):
    """Base class for all errors raised by :mod:`decdirac`."""


class MeshError(DecError, ValueError):
    pass


class NonManifold(MeshError):
    pass


class InvertedTriangle(MeshError):
    pass


class DuplicateVertex(MeshError):
    pass


class ParseError(MeshError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class NotWellCentered(MeshError):
    pass


class PerturbationBreaksWellCenteredness(NotWellCentered):
    pass


class TopologyError(MeshError):
    pass


class DimensionMismatch(DecError, ValueError):
    pass


class MissingDerivatives(DecError):
    pass


class UnknownCase(DecError, KeyError):
    pass


class SolverFailure(DecError, RuntimeError):
    pass


class SingularSystem(SolverFailure):
    pass
