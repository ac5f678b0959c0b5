from drf_spectacular.utils import OpenApiResponse, extend_schema
from rest_framework.response import Response

from apps.mesh.geometry import cotan_weights
from apps.mesh.views import SurfaceAPIView
from apps.periods.bundle import complex_pairs
from apps.periods.pipeline import compute_period_bundle

from .quadrangulation import build_quad_surface, quad_period_matrix
from .serializers import QuadrangulationRequestSerializer, QuadSurfaceSerializer


class QuadrangulateView(SurfaceAPIView):
    """
    Build the Delaunay-Voronoi quadrangulation of a Delaunay mesh.
    """

    @extend_schema(
        summary="Quadrangulate a mesh",
        description=(
            "Join every face circumcenter to the face's corners and return one "
            "planar chart per edge quad. With periods=true the quad-surface "
            "period matrix is computed from the normalized quad integrals."
        ),
        request=QuadrangulationRequestSerializer,
        responses={
            200: QuadSurfaceSerializer,
            400: OpenApiResponse(description="Bad request - the mesh is not Delaunay."),
            422: OpenApiResponse(description="A quad is degenerate or a solve failed."),
        },
        tags=["quadrangulations"],
    )
    def post(self, request):
        serializer = QuadrangulationRequestSerializer(data=request.data)
        serializer.is_valid(raise_exception=True)
        data = serializer.validated_data
        mesh = data["mesh"]
        quad = build_quad_surface(mesh, cotan_weights(mesh))
        payload = quad.as_dict()
        if data["periods"]:
            computation = compute_period_bundle(mesh, loops=data.get("loops"), tol=data.get("tol"))
            payload["pi_q"] = complex_pairs(
                quad_period_matrix(
                    quad,
                    computation.homology,
                    computation.weights,
                    computation.bundle,
                    computation.solver,
                )
            )
        return Response(QuadSurfaceSerializer(payload).data)
