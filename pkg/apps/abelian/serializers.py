from rest_framework import serializers

from apps.mesh.exceptions import MeshValidationError
from apps.periods.serializers import PeriodRequestSerializer

from .divisors import Divisor


class RiemannRochRequestSerializer(PeriodRequestSerializer):
    """
    A mesh and a divisor given as ``[kind, index, value]`` triples with kind
    one of ``vertex``, ``edge``, ``face``.
    """

    divisor = serializers.JSONField(
        help_text="Nonzero divisor values, e.g. [[\"edge\", 4, 1], [\"vertex\", 0, -1]]."
    )
    direct = serializers.BooleanField(
        default=True,
        help_text="Cross-check i(D) with the dense nullity computation when the mesh is small.",
    )

    def validate(self, attrs):
        try:
            attrs["divisor"] = Divisor.from_json(attrs["mesh"], attrs["divisor"])
        except MeshValidationError as e:
            raise serializers.ValidationError({"divisor": e.message}, code=e.code)
        return attrs


class RiemannRochResultSerializer(serializers.Serializer):
    l_minus_d = serializers.IntegerField()
    i_d = serializers.IntegerField()
    degree = serializers.IntegerField()
    genus = serializers.IntegerField()
    rank = serializers.IntegerField()
    n_rows = serializers.IntegerField()
    identity_holds = serializers.BooleanField()
    i_direct = serializers.IntegerField(allow_null=True)
