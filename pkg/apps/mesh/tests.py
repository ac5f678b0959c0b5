import math

import numpy as np
from django.test import SimpleTestCase
from django.urls import reverse
from rest_framework import status
from rest_framework.test import APITestCase

from .exceptions import (
    Disconnected,
    HasBoundary,
    LengthMismatch,
    NonOrientable,
    TriangleInequalityViolated,
    UnpairedSide,
)
from .geometry import cotan_weights, geometry_report, is_delaunay_edge
from .io import dump_mesh, mesh_digest, parse_mesh, parse_obj
from .surface import Gluing, build_mesh

PILLOW = """
# two unit triangles glued along all three sides
1 1 1  1:0 1:2 1:1
1 1 1  0:0 0:2 0:1
"""

SQUARE_TORUS = """
1 1.4142135623730951 1  1:1 1:2 1:0
1 1 1.4142135623730951  0:2 0:0 0:1
"""

TETRAHEDRON_OBJ = """
v 0 0 0
v 1 0 0
v 0 1 0
v 0 0 1
f 1 2 3
f 1 3 4
f 1 4 2
f 2 4 3
"""


class BuildMeshTests(SimpleTestCase):
    def test_pillow_is_a_sphere(self):
        mesh = parse_mesh(PILLOW)
        self.assertEqual(
            (mesh.n_vertices, mesh.n_edges, mesh.n_faces), (3, 3, 2)
        )
        self.assertEqual(mesh.genus, 0)

    def test_one_vertex_torus(self):
        mesh = parse_mesh(SQUARE_TORUS)
        self.assertEqual(
            (mesh.n_vertices, mesh.n_edges, mesh.n_faces), (1, 3, 2)
        )
        self.assertEqual(mesh.genus, 1)

    def test_halfedge_accessors_are_consistent(self):
        mesh = parse_mesh(SQUARE_TORUS)
        for he in range(3 * mesh.n_faces):
            tw = int(mesh.twin[he])
            self.assertEqual(mesh.head(tw), mesh.tail(he))
            self.assertEqual(mesh.left(tw), mesh.right(he))
            self.assertEqual(mesh.edge(tw), mesh.edge(he))
            self.assertEqual(mesh.sign(tw), -mesh.sign(he))

    def test_gluing_records_accept_tuples(self):
        mesh = build_mesh(
            2,
            [[1, 1, 1], [1, 1, 1]],
            [(0, 0, 1, 0), (0, 1, 1, 2), Gluing(0, 2, 1, 1)],
        )
        self.assertEqual(mesh.genus, 0)

    def test_length_mismatch(self):
        with self.assertRaises(LengthMismatch) as ctx:
            parse_mesh("1 1 1 1:0 1:1 1:2\n1.1 1 1 0:0 0:1 0:2")
        self.assertEqual(ctx.exception.code, "length_mismatch")

    def test_unpaired_side(self):
        with self.assertRaises(UnpairedSide):
            parse_mesh("1 1 1 1:0 1:1 1:2\n1 1 1 0:0 0:1 0:0")

    def test_boundary_is_rejected(self):
        with self.assertRaises(HasBoundary):
            parse_mesh("1 1 1 - - -")

    def test_degenerate_triangle(self):
        with self.assertRaises(TriangleInequalityViolated):
            parse_mesh("1 1 2 1:0 1:1 1:2\n1 1 2 0:0 0:1 0:2")

    def test_conflicting_orientation_flags(self):
        with self.assertRaises(NonOrientable):
            parse_mesh("1 1 1 1:0 1:1! 1:2\n1 1 1 0:0 0:1! 0:2")

    def test_two_components(self):
        text = PILLOW + "1 1 1 3:0 3:1 3:2\n1 1 1 2:0 2:1 2:2\n"
        with self.assertRaises(Disconnected):
            parse_mesh(text)

    def test_orientation_preserving_gluings_are_reoriented(self):
        mesh = parse_mesh("1 1 1 1:0! 1:1! 1:2!\n1 1 1 0:0! 0:1! 0:2!")
        self.assertEqual(mesh.genus, 0)
        self.assertEqual(mesh.n_vertices, 3)
        for he in range(6):
            self.assertEqual(mesh.head(int(mesh.twin[he])), mesh.tail(he))

    def test_dump_and_parse(self):
        mesh = parse_mesh(SQUARE_TORUS)
        again = parse_mesh(dump_mesh(mesh))
        self.assertEqual(mesh_digest(mesh), mesh_digest(again))

    def test_obj_import(self):
        mesh = parse_obj(TETRAHEDRON_OBJ)
        self.assertEqual(
            (mesh.n_vertices, mesh.n_edges, mesh.n_faces), (4, 6, 4)
        )
        self.assertAlmostEqual(mesh.lengths.max(), math.sqrt(2))


class GeometryTests(SimpleTestCase):
    def test_square_torus_weights(self):
        mesh = parse_mesh(SQUARE_TORUS)
        weights = cotan_weights(mesh)
        diagonal = mesh.edge(1)
        for edge, c in enumerate(weights.c):
            expected = 0.0 if edge == diagonal else 1.0
            self.assertAlmostEqual(c, expected, places=12)

    def test_equilateral_weight(self):
        weights = cotan_weights(parse_mesh(PILLOW))
        np.testing.assert_allclose(weights.c, 1.0 / math.sqrt(3.0))

    def test_half_equilateral_weights(self):
        r3 = math.sqrt(3.0)
        mesh = parse_mesh(f"1 {r3} 2 1:0 1:1 1:2\n1 {r3} 2 0:0 0:1 0:2")
        c = cotan_weights(mesh).c
        # side 0 faces the 30 degree corner on both sides
        self.assertAlmostEqual(c[mesh.edge(0)], r3)
        self.assertAlmostEqual(c[mesh.edge(1)], 1.0 / r3)
        self.assertAlmostEqual(c[mesh.edge(2)], 0.0)

    def test_weights_are_scale_invariant(self):
        rng = np.random.default_rng(3)
        base = parse_mesh(PILLOW)
        lengths = base.lengths * (1.0 + rng.random())
        moved = build_mesh(
            2, lengths, [(0, s, 1, s) for s in range(3)]
        )
        np.testing.assert_allclose(
            cotan_weights(moved).c, cotan_weights(base).c, rtol=1e-12
        )

    def test_square_torus_report(self):
        report = geometry_report(parse_mesh(SQUARE_TORUS))
        self.assertEqual(report.genus, 1)
        self.assertAlmostEqual(report.gamma_s, 1.0)
        self.assertAlmostEqual(report.delta_min, math.pi / 4)
        self.assertAlmostEqual(report.h, math.sqrt(2))
        self.assertTrue(report.is_delaunay)
        self.assertAlmostEqual(report.delaunay_margin, 0.0, places=12)

    def test_aperture_sum(self):
        mesh = parse_obj(TETRAHEDRON_OBJ)
        report = geometry_report(mesh)
        self.assertAlmostEqual(report.aperture.sum(), math.pi * mesh.n_faces)
        self.assertLess(report.gamma_s, 1.0 + 1e-15)

    def test_total_area(self):
        mesh = parse_mesh(SQUARE_TORUS)
        self.assertAlmostEqual(mesh.total_area, 1.0)
        self.assertTrue(is_delaunay_edge(mesh, 0))


class ValidateMeshAPITests(APITestCase):
    def test_validate_pillow(self):
        response = self.client.post(
            reverse("mesh-validate"), {"mesh": PILLOW}, format="json"
        )
        self.assertEqual(response.status_code, status.HTTP_200_OK)
        self.assertEqual(response.data["genus"], 0)
        self.assertEqual(response.data["n_faces"], 2)

    def test_rejected_mesh(self):
        response = self.client.post(
            reverse("mesh-validate"),
            {"mesh": "1 1 1 1:0 1:1 1:2\n1.1 1 1 0:0 0:1 0:2"},
            format="json",
        )
        self.assertEqual(response.status_code, status.HTTP_400_BAD_REQUEST)
        self.assertIn("mesh", response.data)
