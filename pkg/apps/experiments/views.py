from django_filters.rest_framework import DjangoFilterBackend
from drf_spectacular.utils import (
    OpenApiParameter,
    OpenApiResponse,
    extend_schema,
    extend_schema_view,
)
from rest_framework import filters, viewsets

from .models import ConvergenceRun
from .serializers import ConvergenceRunSerializer


@extend_schema_view(
    list=extend_schema(
        summary="List convergence runs",
        description="List stored convergence experiments with their samples.",
        parameters=[
            OpenApiParameter(
                name="family",
                description="Filter runs by surface family",
                required=False,
                type=str,
            ),
        ],
        responses={200: ConvergenceRunSerializer(many=True)},
    ),
    retrieve=extend_schema(
        summary="Retrieve a convergence run",
        description="Retrieve one convergence experiment with its samples.",
        responses={
            200: ConvergenceRunSerializer,
            404: OpenApiResponse(description="Convergence run not found."),
        },
    ),
)
class ConvergenceRunViewSet(viewsets.ReadOnlyModelViewSet):
    """
    Read-only access to convergence experiments stored by
    ``manage.py convergence --save``.
    """

    queryset = ConvergenceRun.objects.prefetch_related("samples")
    serializer_class = ConvergenceRunSerializer
    filter_backends = [DjangoFilterBackend, filters.OrderingFilter]
    filterset_fields = ["family"]
    ordering_fields = ["created_at", "gamma_s"]
    ordering = ["-created_at"]
