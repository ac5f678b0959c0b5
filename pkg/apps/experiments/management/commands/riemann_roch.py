from apps.abelian.divisors import Divisor
from apps.abelian.riemann_roch import direct_i_dimension, riemann_roch
from apps.experiments.cli import SurfaceCommand, read_json_argument
from apps.periods.pipeline import compute_period_bundle


class Command(SurfaceCommand):
    help = "Evaluate both sides of the discrete Riemann-Roch identity for a divisor"

    def add_arguments(self, parser):
        self.add_mesh_argument(parser)
        parser.add_argument(
            "--divisor",
            required=True,
            help='Divisor as [kind, index, value] triples, inline or a file, e.g. [["edge", 0, 1]].',
        )
        parser.add_argument(
            "--direct",
            action="store_true",
            help="Cross-check i(D) with the dense nullity computation.",
        )
        super().add_arguments(parser)

    def compute(self, mesh, divisor, direct=False, tol=None, **options):
        mesh = self.load(mesh)
        divisor = Divisor.from_json(mesh, read_json_argument(divisor))
        computation = compute_period_bundle(mesh, tol=tol)
        result = riemann_roch(
            mesh,
            computation.weights,
            computation.homology,
            divisor,
            bundle=computation.bundle,
            solver=computation.solver,
            tol=tol,
        ).as_dict()
        if direct:
            result["i_direct"] = direct_i_dimension(mesh, computation.weights, divisor)
        if not result["identity_holds"]:
            self.stderr.write(self.style.WARNING("The Riemann-Roch identity does not hold."))
        return result

    def csv_table(self, payload):
        header = list(payload)
        return header, [[payload[key] for key in header]]
