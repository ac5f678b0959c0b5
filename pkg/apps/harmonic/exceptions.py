from apps.mesh.exceptions import MeshValidationError, NumericalError


class MissingImaginaryPart(MeshValidationError):
    default_code = "missing_imaginary_part"


class SolverFailure(NumericalError):
    code = "solver_failure"


class NotHarmonic(NumericalError):
    """No conjugate function exists: ``c * Du`` is not closed around some vertex."""

    code = "not_harmonic"


class ZeroWeightEdge(NumericalError):
    code = "zero_weight_edge"
