from rest_framework import serializers

from .models import ConvergenceRun, ConvergenceSample


class ConvergenceSampleSerializer(serializers.ModelSerializer):
    class Meta:
        model = ConvergenceSample
        fields = ["n", "h", "error", "scaled_error", "pi_t", "elapsed_seconds"]


class ConvergenceRunSerializer(serializers.ModelSerializer):
    """Convergence run with its samples ordered by n"""

    family_display = serializers.CharField(source="get_family_display", read_only=True)
    samples = ConvergenceSampleSerializer(many=True, read_only=True)

    class Meta:
        model = ConvergenceRun
        fields = [
            "id",
            "family",
            "family_display",
            "eta_re",
            "eta_im",
            "reference",
            "gamma_s",
            "solver_tol",
            "created_at",
            "samples",
        ]
