import logging

from drf_spectacular.utils import OpenApiResponse, extend_schema
from rest_framework.response import Response

from apps.mesh.conf import setting
from apps.mesh.views import SurfaceAPIView
from apps.periods.pipeline import compute_period_bundle

from .riemann_roch import direct_i_dimension, riemann_roch
from .serializers import RiemannRochRequestSerializer, RiemannRochResultSerializer

logger = logging.getLogger(__name__)


class RiemannRochView(SurfaceAPIView):
    """
    Evaluate both sides of the discrete Riemann-Roch identity for a divisor.
    """

    @extend_schema(
        summary="Riemann-Roch dimensions",
        description=(
            "Compute l(-D), i(D) and deg D for an admissible divisor and report "
            "whether l(-D) = deg D - 2g + 2 + i(D). On small meshes i(D) is "
            "cross-checked by a dense nullity computation."
        ),
        request=RiemannRochRequestSerializer,
        responses={
            200: RiemannRochResultSerializer,
            400: OpenApiResponse(description="Bad request - mesh or divisor rejected."),
            422: OpenApiResponse(description="The rank computation was ambiguous or a solve failed."),
        },
        tags=["divisors"],
    )
    def post(self, request):
        serializer = RiemannRochRequestSerializer(data=request.data)
        serializer.is_valid(raise_exception=True)
        data = serializer.validated_data
        mesh, divisor = data["mesh"], data["divisor"]
        computation = compute_period_bundle(mesh, loops=data.get("loops"), tol=data.get("tol"))
        result = riemann_roch(
            mesh,
            computation.weights,
            computation.homology,
            divisor,
            bundle=computation.bundle,
            solver=computation.solver,
            tol=data.get("tol"),
        ).as_dict()
        result["i_direct"] = None
        if data["direct"] and mesh.n_edges <= setting("PERIODS_DENSE_EDGE_LIMIT"):
            result["i_direct"] = direct_i_dimension(mesh, computation.weights, divisor)
            if result["i_direct"] != result["i_d"]:
                logger.warning(
                    f"i(D) = {result['i_d']} disagrees with dense nullity {result['i_direct']}"
                )
        return Response(RiemannRochResultSerializer(result).data)
