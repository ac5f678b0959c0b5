from apps.mesh.exceptions import MeshValidationError, NumericalError


class NotDelaunay(MeshValidationError):
    default_code = "not_delaunay"


class NonPositiveQuadArea(NumericalError):
    """A quad of the quadrangulation is degenerate or folded over."""

    code = "non_positive_quad_area"


class DegenerateDiagonal(NumericalError):
    code = "degenerate_diagonal"
