from apps.mesh.exceptions import MeshValidationError, NumericalError


class GenusZero(MeshValidationError):
    default_code = "genus_zero"


class NotClosed(MeshValidationError):
    default_code = "not_closed"


class BasisMismatch(MeshValidationError):
    """Supplied basis loops do not form a symplectic basis of homology."""

    default_code = "basis_mismatch"


class IntersectionFormError(NumericalError):
    code = "intersection_form_error"
