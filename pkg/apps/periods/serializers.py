from rest_framework import serializers

from apps.mesh.serializers import MeshInputSerializer


class PeriodRequestSerializer(MeshInputSerializer):
    """
    A mesh with an optional symplectic basis of ``2g`` primal loops, alphas
    first, each a list of half-edge indices.
    """

    loops = serializers.ListField(
        child=serializers.ListField(child=serializers.IntegerField(min_value=0)),
        required=False,
        allow_empty=False,
    )


class CheckSerializer(serializers.Serializer):
    passed = serializers.BooleanField()
    defect = serializers.FloatField()


class PeriodBundleSerializer(serializers.Serializer):
    """
    Period matrices as nested lists of ``[re, im]`` pairs.
    """

    genus = serializers.IntegerField()
    energy = serializers.ListField(child=serializers.ListField(child=serializers.FloatField()))
    pi_t = serializers.JSONField()
    pi_t_star = serializers.JSONField()
    pi_q = serializers.JSONField()
    diagnostics = serializers.DictField(child=serializers.FloatField())
    checks = serializers.DictField(child=CheckSerializer())
    basis_loops = serializers.ListField(child=serializers.ListField(child=serializers.IntegerField()))
