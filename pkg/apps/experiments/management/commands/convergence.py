from django.core.management.base import CommandError

from apps.experiments.cli import (
    SurfaceCommand,
    parse_complex,
    parse_int_list,
    read_json_argument,
)
from apps.experiments.convergence import (
    HEADER,
    REFINED_FAMILIES,
    run_convergence,
    save_convergence,
)
from apps.periods.bundle import from_complex_pairs


class Command(SurfaceCommand):
    help = "Measure the convergence of discrete period matrices under refinement"

    def add_arguments(self, parser):
        parser.add_argument("--family", required=True, choices=REFINED_FAMILIES)
        parser.add_argument(
            "--n",
            dest="ns",
            type=parse_int_list,
            required=True,
            help="Comma separated refinement levels, e.g. 8,16,32,64.",
        )
        parser.add_argument("--eta", type=parse_complex, default=None, help="Cell shape as re,im.")
        parser.add_argument(
            "--reference",
            default=None,
            help="Reference period matrix as nested [re, im] pairs, inline or a file.",
        )
        parser.add_argument(
            "--save",
            action="store_true",
            help="Store the run and its samples in the database.",
        )
        super().add_arguments(parser)

    def compute(self, family, ns, eta=None, reference=None, save=False, tol=None, **options):
        if reference is not None:
            try:
                reference = from_complex_pairs(read_json_argument(reference))
            except (TypeError, ValueError, IndexError) as e:
                raise CommandError(f"Invalid reference matrix: {e}", returncode=2)
        result = run_convergence(family, ns, reference=reference, eta=eta, tol=tol)
        payload = result.as_dict()
        if save:
            run = save_convergence(result)
            payload["run_id"] = run.pk
            self.stderr.write(self.style.SUCCESS(f"Saved convergence run {run.pk}"))
        return payload

    def csv_table(self, payload):
        return HEADER, [[sample[key] for key in HEADER] for sample in payload["samples"]]
