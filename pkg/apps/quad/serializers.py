from rest_framework import serializers

from apps.periods.serializers import PeriodRequestSerializer


class QuadrangulationRequestSerializer(PeriodRequestSerializer):
    periods = serializers.BooleanField(
        default=False,
        help_text="Also compute the quad-surface period matrix (positive genus only).",
    )


class QuadSerializer(serializers.Serializer):
    edge = serializers.IntegerField()
    corners = serializers.ListField(child=serializers.ListField())
    chart = serializers.ListField(child=serializers.ListField(child=serializers.FloatField()))
    area = serializers.FloatField()


class QuadSurfaceSerializer(serializers.Serializer):
    """
    Quad charts for visualization; each quad lists its corners
    counterclockwise as black/white vertex references with planar coordinates.
    """

    n_black = serializers.IntegerField()
    n_white = serializers.IntegerField()
    h_prime = serializers.FloatField()
    total_area = serializers.FloatField()
    quads = QuadSerializer(many=True)
    pi_q = serializers.JSONField(required=False)
