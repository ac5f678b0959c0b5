from apps.mesh.exceptions import NumericalError


class SingularBlock(NumericalError):
    code = "singular_block"


class ConsistencyFailure(NumericalError):
    """Two routes to the same quantity disagree beyond tolerance."""

    code = "consistency_failure"
