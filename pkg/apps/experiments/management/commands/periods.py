from apps.experiments.cli import SurfaceCommand, read_json_argument
from apps.periods.pipeline import period_bundle_payload


class Command(SurfaceCommand):
    help = "Compute the period matrices of a closed triangulated surface"

    def add_arguments(self, parser):
        self.add_mesh_argument(parser)
        parser.add_argument(
            "--basis",
            default=None,
            help="JSON list of 2g primal loops (half-edge lists, alphas first), inline or a file.",
        )
        super().add_arguments(parser)

    def compute(self, mesh, basis=None, tol=None, **options):
        mesh = self.load(mesh)
        loops = None if basis is None else read_json_argument(basis)
        return period_bundle_payload(mesh, loops=loops, tol=tol)

    def csv_table(self, payload):
        rows = []
        for name in ("pi_t", "pi_t_star", "pi_q"):
            for k, row in enumerate(payload[name]):
                for l, (re, im) in enumerate(row):
                    rows.append([name, k, l, re, im])
        return ["matrix", "k", "l", "re", "im"], rows
