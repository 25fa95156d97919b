"""Exception hierarchy shared by all modules."""


class GeometryError(Exception):
    pass


class UndefinedCrossRatio(GeometryError):
    pass


class DegenerateTriple(GeometryError):
    pass


class NoSuchInvolution(GeometryError):
    pass


class DegenerateQuadratic(GeometryError):
    pass


class SingularMap(GeometryError):
    pass


class ContainedLine(GeometryError):
    pass


class SingularPointOfConic(GeometryError):
    pass


class BasePoint(GeometryError):
    pass


class AllMembersSingular(GeometryError):
    pass


class DegeneratePencil(GeometryError):
    pass


class SingularConic(GeometryError):
    pass


class BasePointOfStructure(GeometryError):
    pass


class VerificationFailed(GeometryError):
    pass


class EvaluationOnExceptionalLine(GeometryError):
    pass


class PencilNotPreserved(GeometryError):
    pass


class NotTypeA(GeometryError):
    pass


class ZeroMu(GeometryError):
    pass


class TangentialIncidence(GeometryError):
    pass


class CornerHit(GeometryError):
    pass


class NoRealTangent(GeometryError):
    pass


class UnsupportedFieldKind(GeometryError):
    pass


class DegenerateQuadrilateral(GeometryError):
    pass


class IncompatibleFields(GeometryError):
    """Arithmetic between two different quadratic extensions."""


class ParseError(Exception):
    def __init__(self, message, location=None):
        self.location = location
        super().__init__(f"{location}: {message}" if location else message)


class ValidationFailed(Exception):
    pass


class DegenerateMu(GeometryError):
    """mu = 1 turns the ordered-pair product into a constant."""
