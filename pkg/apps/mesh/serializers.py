from rest_framework import serializers

from .exceptions import MeshValidationError
from .io import parse_mesh


class MeshInputSerializer(serializers.Serializer):
    """
    Accepts a mesh in the glued text format and parses it into a SurfaceMesh.
    """

    mesh = serializers.CharField(
        help_text="One face per line: 'l0 l1 l2 F:S F:S F:S'.",
        trim_whitespace=False,
    )
    tol = serializers.FloatField(
        required=False,
        min_value=0.0,
        help_text="Relative residual tolerance of linear solves.",
    )

    def validate_mesh(self, value):
        """
        Parse and validate the mesh text.
        """
        try:
            return parse_mesh(value)
        except MeshValidationError as e:
            raise serializers.ValidationError(e.message, code=e.code)


class GeometryReportSerializer(serializers.Serializer):
    genus = serializers.IntegerField()
    h = serializers.FloatField()
    delta_min = serializers.FloatField()
    aperture = serializers.ListField(child=serializers.FloatField())
    gamma = serializers.ListField(child=serializers.FloatField())
    gamma_s = serializers.FloatField()
    is_delaunay = serializers.BooleanField()
    delaunay_margin = serializers.FloatField()
    total_area = serializers.FloatField()
    n_vertices = serializers.IntegerField()
    n_edges = serializers.IntegerField()
    n_faces = serializers.IntegerField()
