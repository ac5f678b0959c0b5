import logging

from django.core.exceptions import ValidationError
from drf_spectacular.utils import OpenApiResponse, extend_schema
from rest_framework import status
from rest_framework.response import Response
from rest_framework.views import APIView

from .exceptions import NumericalError
from .geometry import geometry_report
from .serializers import GeometryReportSerializer, MeshInputSerializer

logger = logging.getLogger(__name__)


class SurfaceAPIView(APIView):
    """
    Base view for the computational endpoints. Rejected inputs raised by the
    library answer 400, failures of the numerics on accepted inputs answer 422,
    both as ``{"detail": ..., "code": ...}``.
    """

    def handle_exception(self, exc):
        if isinstance(exc, ValidationError):
            code = getattr(exc, "code", None) or "invalid"
            return Response(
                {"detail": " ".join(exc.messages), "code": code},
                status=status.HTTP_400_BAD_REQUEST,
            )
        if isinstance(exc, NumericalError):
            logger.warning(f"{type(exc).__name__} in {type(self).__name__}: {exc}")
            return Response(
                {"detail": str(exc), "code": exc.code},
                status=status.HTTP_422_UNPROCESSABLE_ENTITY,
            )
        return super().handle_exception(exc)


class ValidateMeshView(SurfaceAPIView):
    """
    Validate a glued triangle complex and report its geometry.
    """

    @extend_schema(
        summary="Validate a mesh",
        description="Parse a mesh in the glued text format, validate it and return its metric summary.",
        request=MeshInputSerializer,
        responses={
            200: GeometryReportSerializer,
            400: OpenApiResponse(description="Bad request - the mesh was rejected."),
        },
        tags=["meshes"],
    )
    def post(self, request):
        serializer = MeshInputSerializer(data=request.data)
        serializer.is_valid(raise_exception=True)
        mesh = serializer.validated_data["mesh"]
        report = geometry_report(mesh).as_dict()
        report.update(
            n_vertices=mesh.n_vertices, n_edges=mesh.n_edges, n_faces=mesh.n_faces
        )
        return Response(GeometryReportSerializer(report).data)
