"""Exception hierarchy shared by all modules."""


class PolyRigidError(Exception):
    pass


class RangeError(PolyRigidError, ValueError):
    """Argument outside the open domain of a function or chart."""


class DivergenceGuard(PolyRigidError, ArithmeticError):
    """An integral diverges at the requested argument."""


class QuadratureFailure(PolyRigidError, ArithmeticError):
    pass


class NonpositiveLength(RangeError):
    pass


class SphericalRange(RangeError):
    pass


class DegenerateTriangle(PolyRigidError, ValueError):
    pass


class TooCloseToBoundary(PolyRigidError, ValueError):
    pass


# mesh construction and file I/O

class MeshError(PolyRigidError, ValueError):
    pass


class OpenEdge(MeshError):
    pass


class NonManifoldVertex(MeshError):
    pass


class IndexOutOfRange(MeshError):
    pass


class DuplicateTriangle(MeshError):
    pass


class ParseError(MeshError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class MissingEntry(MeshError):
    pass


class DuplicateEntry(MeshError):
    pass


class InadmissibleMetric(PolyRigidError, ValueError):
    def __init__(self, triangle, domain_class):
        self.triangle = triangle
        self.domain_class = domain_class
        super().__init__(f"triangle {triangle} is {domain_class}")


# solvers

class SolverError(PolyRigidError):
    def __init__(self, message, report=None):
        self.report = report
        super().__init__(message)


class MaxIterations(SolverError):
    pass


class TargetUnattainable(SolverError):
    def __init__(self, message, report=None, direction=None):
        self.direction = direction
        super().__init__(message, report)


class NoSolutionPossible(SolverError):
    pass


class UnsupportedSpec(PolyRigidError, ValueError):
    pass
