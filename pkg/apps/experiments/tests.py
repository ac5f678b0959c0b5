import csv
import json
import math
import os
import tempfile
import unittest
from io import StringIO
from pathlib import Path

import numpy as np
from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase, TestCase
from django.urls import reverse
from rest_framework import status
from rest_framework.test import APITestCase

from apps.gen.exceptions import InvalidGeneratorParameter
from apps.gen.surfaces import EQUILATERAL_ETA, flat_torus, genus2_squares
from apps.mesh.io import dump_mesh

from .convergence import HEADER, lambda_s, run_convergence, save_convergence
from .models import ConvergenceRun

SLOW_TESTS = os.environ.get("PERIODS_SLOW_TESTS", "").lower() in ("1", "true", "yes")

SQUARE_TORUS = """
1 1.4142135623730951 1  1:1 1:2 1:0
1 1 1.4142135623730951  0:2 0:0 0:1
"""


class LambdaTests(SimpleTestCase):
    def test_exponent_cases(self):
        self.assertEqual(lambda_s(0.25, 1.0), 0.25)
        self.assertAlmostEqual(lambda_s(0.25, 0.5), 0.25 * math.log(4))
        self.assertAlmostEqual(lambda_s(0.125, 1 / 3), 0.25)


class RunConvergenceTests(SimpleTestCase):
    def test_flat_torus_is_exact(self):
        result = run_convergence("flat_torus", [4, 1, 2], eta=1j)
        self.assertEqual([s.n for s in result.samples], [1, 2, 4])
        self.assertAlmostEqual(result.gamma_s, 1.0)
        for sample in result.samples:
            self.assertLess(sample.error, 1e-9)
        self.assertIsNone(result.samples[0].observed_order)

    def test_genus_two_squares(self):
        result = run_convergence("genus2_squares", [8, 16])
        self.assertAlmostEqual(result.gamma_s, 1 / 3)
        errors = [s.error for s in result.samples]
        scaled = [s.scaled_error for s in result.samples]
        np.testing.assert_allclose(errors, [0.611, 0.363], atol=0.01)
        np.testing.assert_allclose(scaled, [1.22, 1.15], atol=0.05)
        self.assertAlmostEqual(result.samples[0].h, math.sqrt(2) / 4)
        self.assertGreater(result.samples[1].observed_order, 0.6)
        self.assertLess(result.samples[1].observed_order, 0.9)

    @unittest.skipUnless(SLOW_TESTS, "set PERIODS_SLOW_TESTS=1 for the full refinement table")
    def test_full_table(self):
        result = run_convergence("genus2_squares", [8, 16, 32, 64])
        np.testing.assert_allclose(
            [s.error for s in result.samples], [0.611, 0.363, 0.220, 0.136], atol=0.01
        )
        np.testing.assert_allclose(
            [s.scaled_error for s in result.samples], [1.22, 1.15, 1.11, 1.08], atol=0.05
        )

    def test_missing_reference(self):
        with self.assertRaises(InvalidGeneratorParameter):
            run_convergence("genus2_parallelograms", [4], eta=EQUILATERAL_ETA)

    def test_unknown_family(self):
        with self.assertRaises(InvalidGeneratorParameter):
            run_convergence("pyramid", [1])

    def test_explicit_reference(self):
        result = run_convergence("flat_torus", [2], eta=1j, reference=[[1j + 0.1]])
        self.assertAlmostEqual(result.samples[0].error, 0.1)


class SaveConvergenceTests(TestCase):
    def test_save(self):
        result = run_convergence("flat_torus", [1, 2], eta=0.5 + 2j)
        with self.assertLogs("apps.experiments.signals", level="INFO") as logs:
            run = save_convergence(result)
        self.assertIn(f"Stored convergence run {run.pk}", logs.output[0])
        self.assertEqual(run.samples.count(), 2)
        self.assertEqual((run.eta_re, run.eta_im), (0.5, 2.0))
        self.assertEqual(run.reference, [[[0.5, 2.0]]])
        self.assertEqual(run.samples.first().n, 1)


class ConvergenceRunAPITests(APITestCase):
    @classmethod
    def setUpTestData(cls):
        cls.torus_run = save_convergence(run_convergence("flat_torus", [1, 2], eta=1j))
        cls.squares_run = save_convergence(run_convergence("genus2_squares", [4]))

    def test_list_filtered_by_family(self):
        response = self.client.get(reverse("convergence-run-list"), {"family": "flat_torus"})
        self.assertEqual(response.status_code, status.HTTP_200_OK)
        self.assertEqual(response.data["count"], 1)
        self.assertEqual(response.data["results"][0]["id"], self.torus_run.pk)

    def test_retrieve(self):
        response = self.client.get(
            reverse("convergence-run-detail", args=[self.squares_run.pk])
        )
        self.assertEqual(response.status_code, status.HTTP_200_OK)
        self.assertEqual(response.data["family_display"], "Genus two, three squares")
        self.assertEqual([s["n"] for s in response.data["samples"]], [4])

    def test_read_only(self):
        response = self.client.post(reverse("convergence-run-list"), {"family": "flat_torus"})
        self.assertEqual(response.status_code, status.HTTP_405_METHOD_NOT_ALLOWED)


class CommandTests(TestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)
        self.dir = Path(self.tmp.name)

    def write(self, name, text):
        path = self.dir / name
        path.write_text(text)
        return str(path)

    def run_json(self, *args):
        out = StringIO()
        call_command(*args, stdout=out, stderr=StringIO())
        return json.loads(out.getvalue())

    def test_validate(self):
        path = self.write("squares.mesh", dump_mesh(genus2_squares(4).mesh))
        report = self.run_json("validate", path)
        self.assertEqual(report["genus"], 2)
        self.assertEqual(report["n_edges"], 36)
        self.assertAlmostEqual(report["gamma_s"], 1 / 3)

    def test_validate_rejects_malformed_mesh(self):
        path = self.write("bad.mesh", "1 1 1  0:0 0:1 -\n")
        with self.assertRaises(CommandError) as ctx:
            call_command("validate", path, stdout=StringIO())
        self.assertEqual(ctx.exception.returncode, 2)

    def test_periods_with_basis(self):
        surface = flat_torus(0.3 + 0.8j, 2)
        mesh = self.write("torus.mesh", dump_mesh(surface.mesh))
        basis = json.dumps([loop.tolist() for loop in surface.loops])
        payload = self.run_json("periods", mesh, "--basis", basis)
        np.testing.assert_allclose(payload["pi_t"], [[[0.3, 0.8]]], atol=1e-8)
        self.assertTrue(payload["checks"]["energy_positive"]["passed"])

    def test_periods_csv(self):
        mesh = self.write("torus.mesh", dump_mesh(flat_torus(1j, 2).mesh))
        csv_path = self.dir / "periods.csv"
        call_command("periods", mesh, "--csv", str(csv_path), stdout=StringIO(), stderr=StringIO())
        with open(csv_path, newline="") as handle:
            rows = list(csv.reader(handle))
        self.assertEqual(rows[0], ["matrix", "k", "l", "re", "im"])
        self.assertEqual([row[0] for row in rows[1:]], ["pi_t", "pi_t_star", "pi_q"])

    def test_riemann_roch(self):
        mesh = self.write("torus.mesh", dump_mesh(flat_torus(EQUILATERAL_ETA, 2).mesh))
        result = self.run_json("riemann_roch", mesh, "--divisor", '[["edge", 0, 1]]', "--direct")
        self.assertEqual(result["l_minus_d"], 2)
        self.assertEqual(result["i_d"], result["i_direct"])
        self.assertTrue(result["identity_holds"])

    def test_riemann_roch_rejects_bad_json(self):
        mesh = self.write("torus.mesh", dump_mesh(flat_torus(EQUILATERAL_ETA, 2).mesh))
        with self.assertRaises(CommandError) as ctx:
            call_command("riemann_roch", mesh, "--divisor", "[[edge", stdout=StringIO())
        self.assertEqual(ctx.exception.returncode, 2)

    def test_quadrangulate(self):
        surface = flat_torus(EQUILATERAL_ETA, 2)
        mesh = self.write("torus.mesh", dump_mesh(surface.mesh))
        basis = json.dumps([loop.tolist() for loop in surface.loops])
        payload = self.run_json("quadrangulate", mesh, "--periods", "--basis", basis)
        self.assertEqual(len(payload["quads"]), 12)
        np.testing.assert_allclose(payload["pi_q"], [[[-0.5, math.sqrt(3) / 2]]], atol=1e-8)

    def test_quadrangulate_flat_quads_exit_code(self):
        mesh = self.write("square.mesh", SQUARE_TORUS)
        with self.assertRaises(CommandError) as ctx:
            call_command("quadrangulate", mesh, stdout=StringIO())
        self.assertEqual(ctx.exception.returncode, 3)

    def test_convergence_csv_and_save(self):
        csv_path = self.dir / "table.csv"
        call_command(
            "convergence",
            "--family",
            "flat_torus",
            "--n",
            "1,2",
            "--eta",
            "0,1",
            "--csv",
            str(csv_path),
            "--save",
            stdout=StringIO(),
            stderr=StringIO(),
        )
        with open(csv_path, newline="") as handle:
            rows = list(csv.reader(handle))
        self.assertEqual(rows[0], HEADER)
        self.assertEqual([row[0] for row in rows[1:]], ["1", "2"])
        self.assertEqual(ConvergenceRun.objects.get().samples.count(), 2)
