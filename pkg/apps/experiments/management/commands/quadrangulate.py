from apps.experiments.cli import SurfaceCommand, read_json_argument
from apps.mesh.geometry import cotan_weights
from apps.periods.bundle import complex_pairs
from apps.periods.pipeline import compute_period_bundle
from apps.quad.quadrangulation import build_quad_surface, quad_period_matrix


class Command(SurfaceCommand):
    help = "Export the Delaunay-Voronoi quadrangulation of a Delaunay mesh"

    def add_arguments(self, parser):
        self.add_mesh_argument(parser)
        parser.add_argument(
            "--periods",
            action="store_true",
            help="Also compute the quad-surface period matrix.",
        )
        parser.add_argument(
            "--basis",
            default=None,
            help="JSON list of 2g primal loops for the period matrix, inline or a file.",
        )
        super().add_arguments(parser)

    def compute(self, mesh, periods=False, basis=None, tol=None, **options):
        mesh = self.load(mesh)
        quad = build_quad_surface(mesh, cotan_weights(mesh))
        payload = quad.as_dict()
        if periods:
            loops = None if basis is None else read_json_argument(basis)
            c = compute_period_bundle(mesh, loops=loops, tol=tol)
            payload["pi_q"] = complex_pairs(
                quad_period_matrix(quad, c.homology, c.weights, c.bundle, c.solver)
            )
        return payload

    def csv_table(self, payload):
        header = ["edge", "area"]
        for k in range(1, 5):
            header += [f"z{k}_re", f"z{k}_im"]
        rows = [
            [quad["edge"], quad["area"]] + [x for point in quad["chart"] for x in point]
            for quad in payload["quads"]
        ]
        return header, rows
