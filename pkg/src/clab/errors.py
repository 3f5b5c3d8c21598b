"""Exception types raised across the package."""


class ClabError(Exception):
    pass


# quadratic forms
class AllDirectionsNull(ClabError):
    pass


class DegeneratePencil(ClabError):
    pass


# charts
class OutOfDomain(ClabError):
    pass


class DerivativeUnavailable(ClabError):
    pass


class DegenerateImmersion(ClabError):
    pass


# invariants / geometry
class OnSigmaN(ClabError):
    pass


class KernelDirection(ClabError):
    pass


class NormalCongruenceDegenerate(ClabError):
    pass


# classification
class NotUmbilic(ClabError):
    pass


class NotMorse(ClabError):
    pass


class NotOnDiscriminant(ClabError):
    pass


class AllCoefficientsZero(ClabError):
    pass


class NotOnSigmaN(ClabError):
    pass


# tracing
class EllipticPoint(ClabError):
    pass


class DegeneratePoint(ClabError):
    pass


class SeedElliptic(ClabError):
    pass


class SeedDegenerate(ClabError):
    pass


# scene files
class SceneError(ClabError):
    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        if line is not None:
            message = f"line {line}, column {column}: {message}"
        super().__init__(message)


class ParseError(SceneError):
    pass


class SchemaError(SceneError):
    pass


class RangeError(SceneError):
    pass
