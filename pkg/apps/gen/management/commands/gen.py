import json
from pathlib import Path

from apps.experiments.cli import SurfaceCommand, parse_complex
from apps.gen.surfaces import GENERATORS
from apps.mesh.io import dump_mesh


class Command(SurfaceCommand):
    help = "Generate an example surface in the glued text format"

    def add_arguments(self, parser):
        parser.add_argument("name", choices=sorted(GENERATORS))
        parser.add_argument("--n", type=int, default=4, help="Refinement level.")
        parser.add_argument(
            "--eta", type=parse_complex, default=None, help="Cell shape as re,im (default i)."
        )
        parser.add_argument(
            "--output", default=None, help="Write the mesh here instead of stdout."
        )
        parser.add_argument(
            "--loops", default=None, help="Write the shipped basis loops as JSON to this path."
        )

    def compute(self, name, n=4, eta=None, **options):
        kwargs = {}
        if name != "pyramid":
            kwargs["n"] = n
        if name in ("flat_torus", "genus2_parallelograms"):
            kwargs["eta"] = 1j if eta is None else eta
        surface = GENERATORS[name](**kwargs)
        return {
            "mesh": dump_mesh(surface.mesh),
            "loops": [[int(he) for he in loop] for loop in surface.loops],
            "output": options.get("output"),
            "loops_path": options.get("loops"),
        }

    def emit(self, payload, csv_path=None):
        if payload["loops_path"]:
            Path(payload["loops_path"]).write_text(json.dumps(payload["loops"]))
        if payload["output"]:
            Path(payload["output"]).write_text(payload["mesh"])
            self.stderr.write(self.style.SUCCESS(f"Wrote {payload['output']}"))
        else:
            self.stdout.write(payload["mesh"], ending="")
