from drf_spectacular.utils import OpenApiResponse, extend_schema
from rest_framework.response import Response

from apps.mesh.views import SurfaceAPIView

from .pipeline import period_bundle_payload
from .serializers import PeriodBundleSerializer, PeriodRequestSerializer


class PeriodMatrixView(SurfaceAPIView):
    """
    Compute the period matrices of a closed triangulated surface.
    """

    @extend_schema(
        summary="Compute period matrices",
        description=(
            "Build a homology basis (or use the supplied loops), solve the 2g "
            "harmonic problems and return the energy matrix with the period "
            "matrices pi_t, pi_t_star and pi_q. Results are cached per mesh."
        ),
        request=PeriodRequestSerializer,
        responses={
            200: PeriodBundleSerializer,
            400: OpenApiResponse(description="Bad request - the mesh or the loops were rejected."),
            422: OpenApiResponse(description="The numerical pipeline failed on this mesh."),
        },
        tags=["periods"],
    )
    def post(self, request):
        serializer = PeriodRequestSerializer(data=request.data)
        serializer.is_valid(raise_exception=True)
        data = serializer.validated_data
        payload = period_bundle_payload(
            data["mesh"], loops=data.get("loops"), tol=data.get("tol")
        )
        return Response(PeriodBundleSerializer(payload).data)
