from apps.mesh.exceptions import MeshValidationError, NumericalError


class BrokenChain(MeshValidationError):
    default_code = "broken_chain"


class CoincidentPoles(MeshValidationError):
    default_code = "coincident_poles"


class NotAdmissible(MeshValidationError):
    """The divisor is positive at a vertex or a face, or negative at an edge."""

    default_code = "not_admissible"


class InvalidDivisor(MeshValidationError):
    default_code = "invalid_divisor"


class MultiValued(MeshValidationError):
    default_code = "multi_valued"


class TooLarge(NumericalError):
    code = "too_large"


class RankAmbiguous(NumericalError):
    """No clear gap between the singular values kept and those dropped."""

    code = "rank_ambiguous"
