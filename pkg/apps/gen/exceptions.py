from apps.mesh.exceptions import MeshValidationError


class DegenerateEta(MeshValidationError):
    default_code = "degenerate_eta"


class InvalidGeneratorParameter(MeshValidationError):
    default_code = "invalid_generator_parameter"
