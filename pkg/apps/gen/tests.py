import json
import math
import tempfile
from io import StringIO
from pathlib import Path

import numpy as np
from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase

from apps.mesh.geometry import geometry_report
from apps.mesh.io import parse_mesh
from apps.periods.bundle import frobenius
from apps.periods.pipeline import compute_period_bundle
from apps.topology.homology import homology_basis

from .exceptions import DegenerateEta, InvalidGeneratorParameter
from .surfaces import (
    EQUILATERAL_ETA,
    GENUS2_SQUARES_PERIODS,
    flat_torus,
    genus2_parallelograms,
    genus2_squares,
    jitter_lengths,
    pyramid,
)


class FlatTorusTests(SimpleTestCase):
    def test_counts(self):
        for n in (1, 2, 5):
            with self.subTest(n=n):
                mesh = flat_torus(0.3 + 0.8j, n).mesh
                self.assertEqual(
                    (mesh.n_vertices, mesh.n_edges, mesh.n_faces), (n * n, 3 * n * n, 2 * n * n)
                )
                self.assertEqual(mesh.genus, 1)
                self.assertAlmostEqual(mesh.total_area, 0.8)

    def test_degenerate_eta(self):
        for eta in (1.0, -1j, complex("nan")):
            with self.subTest(eta=eta):
                with self.assertRaises(DegenerateEta) as ctx:
                    flat_torus(eta, 2)
                self.assertEqual(ctx.exception.code, "degenerate_eta")

    def test_bad_n(self):
        for n in (0, 2.5, -1):
            with self.subTest(n=n):
                with self.assertRaises(InvalidGeneratorParameter):
                    flat_torus(1j, n)

    def test_period_is_eta(self):
        for eta in (1j, 0.3 + 0.8j, 0.5 + 2j):
            for n in (1, 2, 4):
                with self.subTest(eta=eta, n=n):
                    surface = flat_torus(eta, n)
                    bundle = compute_period_bundle(surface.mesh, loops=surface.loops).bundle
                    np.testing.assert_allclose(bundle.pi_t, surface.reference, atol=1e-8)


class PyramidTests(SimpleTestCase):
    def test_structure(self):
        surface = pyramid()
        self.assertEqual(surface.mesh.genus, 1)
        np.testing.assert_array_equal(surface.mesh.lengths, 1.0)
        homology_basis(surface.mesh, loops=surface.loops)

    def test_periods(self):
        surface = pyramid()
        bundle = compute_period_bundle(surface.mesh, loops=surface.loops).bundle
        np.testing.assert_allclose(bundle.pi_t, [[2j / math.sqrt(3)]], atol=1e-10)
        np.testing.assert_allclose(bundle.pi_t_star, [[1j * math.sqrt(3) / 2]], atol=1e-10)


class GenusTwoTests(SimpleTestCase):
    def test_counts(self):
        mesh = genus2_squares(4).mesh
        self.assertEqual((mesh.n_vertices, mesh.n_edges, mesh.n_faces), (10, 36, 24))
        self.assertEqual(mesh.genus, 2)
        self.assertAlmostEqual(mesh.total_area, 3.0)

    def test_gamma_s(self):
        report = geometry_report(genus2_squares(4).mesh)
        self.assertAlmostEqual(report.gamma_s, 1 / 3)
        self.assertAlmostEqual(report.aperture.max(), 6 * math.pi)

    def test_odd_n(self):
        with self.assertRaises(InvalidGeneratorParameter):
            genus2_squares(5)

    def test_shipped_loops_are_symplectic(self):
        for surface in (
            genus2_squares(2),
            genus2_squares(6),
            genus2_parallelograms(4, EQUILATERAL_ETA),
            genus2_parallelograms(4, 0.4 + 1.3j),
        ):
            with self.subTest(surface=surface.name, n=surface.parameters["n"]):
                hd = homology_basis(surface.mesh, loops=surface.loops)
                self.assertEqual(hd.genus, 2)

    def test_equilateral_parallelograms(self):
        mesh = genus2_parallelograms(4, EQUILATERAL_ETA).mesh
        np.testing.assert_allclose(mesh.lengths, 0.5)
        self.assertGreater(geometry_report(mesh).delaunay_margin, 1.0)

    def test_reference_only_for_squares(self):
        self.assertIsNone(genus2_parallelograms(4, EQUILATERAL_ETA).reference)
        np.testing.assert_array_equal(genus2_parallelograms(4).reference, GENUS2_SQUARES_PERIODS)

    def test_first_refinement_level(self):
        surface = genus2_squares(8)
        bundle = compute_period_bundle(surface.mesh, loops=surface.loops).bundle
        self.assertAlmostEqual(frobenius(bundle.pi_t - surface.reference), 0.611, delta=0.01)


class JitterTests(SimpleTestCase):
    def test_keeps_combinatorics(self):
        mesh = genus2_squares(4).mesh
        jittered = jitter_lengths(mesh, np.random.default_rng(1), amplitude=0.02)
        np.testing.assert_array_equal(jittered.twin, mesh.twin)
        ratio = jittered.lengths / mesh.lengths
        self.assertTrue(np.all(np.abs(ratio - 1) <= 0.02))
        self.assertFalse(np.allclose(ratio, 1))


class GenCommandTests(SimpleTestCase):
    def test_writes_mesh_and_loops(self):
        with tempfile.TemporaryDirectory() as tmp:
            loops_path = Path(tmp) / "loops.json"
            out = StringIO()
            call_command("gen", "genus2_squares", "--n", "4", "--loops", str(loops_path), stdout=out)
            mesh = parse_mesh(out.getvalue())
            loops = json.loads(loops_path.read_text())
        self.assertEqual(mesh.genus, 2)
        self.assertEqual(len(loops), 4)
        homology_basis(mesh, loops=loops)

    def test_eta(self):
        out = StringIO()
        call_command("gen", "flat_torus", "--n", "2", "--eta", "0.5,2", stdout=out)
        self.assertAlmostEqual(parse_mesh(out.getvalue()).total_area, 2.0)

    def test_degenerate_eta_exit_code(self):
        with self.assertRaises(CommandError) as ctx:
            call_command("gen", "flat_torus", "--eta", "1,0", stdout=StringIO())
        self.assertEqual(ctx.exception.returncode, 2)
