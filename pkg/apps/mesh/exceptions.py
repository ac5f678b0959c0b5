from django.core.exceptions import ValidationError


class MeshValidationError(ValidationError):
    """
    Base class for rejected inputs. Each subclass carries a stable error code
    that the API and the management commands report alongside the message.
    """

    default_code = "invalid"

    def __init__(self, message, code=None, params=None):
        super().__init__(message, code=code or self.default_code, params=params)

    def __str__(self):
        return self.message


class NumericalError(Exception):
    """Base class for failures of the numerical pipeline on accepted inputs."""

    code = "numerical_error"


class MalformedMesh(MeshValidationError):
    default_code = "malformed_mesh"


class UnpairedSide(MeshValidationError):
    default_code = "unpaired_side"


class LengthMismatch(MeshValidationError):
    default_code = "length_mismatch"


class TriangleInequalityViolated(MeshValidationError):
    default_code = "triangle_inequality_violated"


class NonOrientable(MeshValidationError):
    default_code = "non_orientable"


class Disconnected(MeshValidationError):
    default_code = "disconnected"


class HasBoundary(MeshValidationError):
    default_code = "has_boundary"
