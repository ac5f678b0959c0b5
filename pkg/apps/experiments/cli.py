"""
Shared plumbing of the management commands.

Commands print JSON to stdout, or write a CSV table with ``--csv``. Rejected
inputs exit with status 2 and numerical failures with status 3.
"""

import argparse
import csv
import json
import logging
from pathlib import Path

import numpy as np
from django.core.exceptions import ValidationError
from django.core.management.base import BaseCommand, CommandError

from apps.mesh.exceptions import NumericalError
from apps.mesh.io import load_mesh

logger = logging.getLogger(__name__)

VALIDATION_EXIT = 2
NUMERICAL_EXIT = 3


def parse_complex(text):
    """``re,im`` or any literal ``complex()`` accepts."""
    try:
        if "," in text:
            re, im = text.split(",")
            return complex(float(re), float(im))
        return complex(text.replace(" ", ""))
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not a complex number")


def parse_int_list(text):
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not a comma separated list of integers")


def read_json_argument(value):
    """Parse ``value`` as JSON, reading it from a file when it names one."""
    try:
        text = Path(value).read_text()
    except OSError:
        text = value
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise CommandError(f"Invalid JSON in {value!r}: {e}", returncode=VALIDATION_EXIT)


def _jsonable(value):
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, complex):
        return [value.real, value.imag]
    raise TypeError(f"{type(value).__name__} is not JSON serializable")


class SurfaceCommand(BaseCommand):
    """
    Base class: subclasses implement ``compute(**options)`` returning a
    JSON-ready payload and, if they support ``--csv``, ``csv_table(payload)``
    returning a header and rows.
    """

    def add_arguments(self, parser):
        parser.add_argument(
            "--tol",
            type=float,
            default=None,
            help="Relative residual tolerance of linear solves (default 1e-10).",
        )
        parser.add_argument(
            "--csv",
            dest="csv_path",
            default=None,
            help="Write the result as a CSV table to this path instead of JSON to stdout.",
        )

    def add_mesh_argument(self, parser):
        parser.add_argument("mesh", help="Mesh file in the glued text format or .obj")

    def load(self, path):
        try:
            return load_mesh(path)
        except OSError as e:
            raise CommandError(f"Cannot read {path}: {e}", returncode=VALIDATION_EXIT)

    def handle(self, *args, **options):
        try:
            payload = self.compute(**options)
        except ValidationError as e:
            code = getattr(e, "code", None) or "invalid"
            raise CommandError(f"[{code}] {' '.join(e.messages)}", returncode=VALIDATION_EXIT)
        except NumericalError as e:
            raise CommandError(f"[{e.code}] {e}", returncode=NUMERICAL_EXIT)
        self.emit(payload, options.get("csv_path"))

    def compute(self, **options):
        raise NotImplementedError

    def csv_table(self, payload):
        raise CommandError(f"{type(self).__module__} has no CSV output.")

    def emit(self, payload, csv_path=None):
        if csv_path:
            header, rows = self.csv_table(payload)
            with open(csv_path, "w", newline="") as handle:
                writer = csv.writer(handle)
                writer.writerow(header)
                writer.writerows(rows)
            self.stderr.write(self.style.SUCCESS(f"Wrote {len(rows)} rows to {csv_path}"))
            return
        self.stdout.write(json.dumps(payload, indent=2, default=_jsonable))
