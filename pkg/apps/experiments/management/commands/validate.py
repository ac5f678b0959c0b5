from apps.experiments.cli import SurfaceCommand
from apps.mesh.geometry import geometry_report


class Command(SurfaceCommand):
    help = "Validate a mesh and print its geometry report"

    def add_arguments(self, parser):
        self.add_mesh_argument(parser)
        super().add_arguments(parser)

    def compute(self, mesh, **options):
        mesh = self.load(mesh)
        report = geometry_report(mesh).as_dict()
        report.update(
            n_vertices=mesh.n_vertices, n_edges=mesh.n_edges, n_faces=mesh.n_faces
        )
        return report

    def csv_table(self, payload):
        rows = [
            [vertex, aperture, gamma]
            for vertex, (aperture, gamma) in enumerate(zip(payload["aperture"], payload["gamma"]))
        ]
        return ["vertex", "aperture", "gamma"], rows
