import math

import numpy as np
from django.test import SimpleTestCase
from django.urls import reverse
from rest_framework import status
from rest_framework.test import APITestCase

from apps.gen.surfaces import (
    EQUILATERAL_ETA,
    flat_torus,
    genus2_parallelograms,
    genus2_squares,
    jitter_lengths,
    pyramid,
)
from apps.harmonic.exceptions import MissingImaginaryPart
from apps.harmonic.fields import MultiValuedField, constant_field, edge_du, edge_dv
from apps.mesh.geometry import cotan_weights
from apps.mesh.io import parse_mesh
from apps.periods.integrals import first_kind_basis
from apps.periods.pipeline import compute_period_bundle

from .exceptions import DegenerateDiagonal, NonPositiveQuadArea, NotDelaunay
from .quadrangulation import (
    build_quad_surface,
    circumcenters,
    diagonal_residual,
    quad_analyticity_residuals,
    quad_bilinear_residual,
    quad_first_kind_basis,
    quad_period_matrix,
    to_quad_function,
)

EQUILATERAL_TORUS = """
1 1 1  1:1 1:2 1:0
1 1 1  0:2 0:0 0:1
"""

SQUARE_TORUS = """
1 1.4142135623730951 1  1:1 1:2 1:0
1 1 1.4142135623730951  0:2 0:0 0:1
"""

# parallelogram tori whose triangles are all acute
ACUTE_ETA = -0.3 + 1j


def quadrangulate(surface):
    computation = compute_period_bundle(surface.mesh, loops=surface.loops)
    quad = build_quad_surface(surface.mesh, computation.weights)
    return quad, computation


class CircumcenterTests(SimpleTestCase):
    def test_equilateral(self):
        centers = circumcenters(parse_mesh(EQUILATERAL_TORUS))
        np.testing.assert_allclose(centers.radius, 1 / math.sqrt(3))
        np.testing.assert_allclose(centers.center, 0.5 + 0.5j / math.sqrt(3))
        self.assertAlmostEqual(centers.h_prime, 2 / math.sqrt(3))

    def test_right_isoceles(self):
        centers = circumcenters(parse_mesh(SQUARE_TORUS), strict=False)
        np.testing.assert_allclose(centers.radius, math.sqrt(2) / 2)
        self.assertAlmostEqual(centers.center[0], 0.5 + 0.5j)

    def test_boundary_case_is_not_strictly_delaunay(self):
        with self.assertRaises(NotDelaunay) as ctx:
            circumcenters(parse_mesh(SQUARE_TORUS))
        self.assertEqual(ctx.exception.code, "not_delaunay")


class QuadSurfaceTests(SimpleTestCase):
    def test_equilateral_torus_rhombi(self):
        n = 3
        mesh = flat_torus(EQUILATERAL_ETA, n).mesh
        quad = build_quad_surface(mesh, cotan_weights(mesh))
        length = 1 / n
        np.testing.assert_allclose(quad.areas, length**2 / (2 * math.sqrt(3)))
        self.assertAlmostEqual(quad.total_area, mesh.total_area, places=12)
        sides = np.abs(np.roll(quad.points, -1, axis=1) - quad.points)
        np.testing.assert_allclose(sides, length / math.sqrt(3))

    def test_area_formula_and_orthogonal_diagonals(self):
        for surface in (
            flat_torus(ACUTE_ETA, 4),
            pyramid(),
            genus2_parallelograms(4, EQUILATERAL_ETA),
        ):
            with self.subTest(surface=surface.name):
                mesh = surface.mesh
                w = cotan_weights(mesh)
                quad = build_quad_surface(mesh, w)
                np.testing.assert_allclose(
                    quad.areas, mesh.edge_lengths**2 * w.c / 2, rtol=1e-12
                )
                self.assertTrue(np.all(quad.areas > 0))
                self.assertLess(
                    abs(quad.total_area - mesh.total_area), 1e-10 * mesh.total_area
                )
                primal = quad.points[:, 0] - quad.points[:, 2]
                dual = quad.points[:, 1] - quad.points[:, 3]
                np.testing.assert_allclose(
                    (primal * np.conj(dual)).real, 0.0, atol=1e-12
                )

    def test_grid_and_diagonal_edges_of_square_torus(self):
        mesh = parse_mesh(SQUARE_TORUS)
        with self.assertRaises(NonPositiveQuadArea):
            build_quad_surface(mesh, cotan_weights(mesh))

    def test_not_delaunay(self):
        mesh = jitter_lengths(genus2_squares(4).mesh, np.random.default_rng(3), 0.05)
        with self.assertRaises(NotDelaunay):
            build_quad_surface(mesh, cotan_weights(mesh))

    def test_json(self):
        mesh = parse_mesh(EQUILATERAL_TORUS)
        data = build_quad_surface(mesh, cotan_weights(mesh)).as_dict()
        self.assertEqual(len(data["quads"]), 3)
        self.assertEqual((data["n_black"], data["n_white"]), (1, 2))
        kinds = [kind for kind, _ in data["quads"][0]["corners"]]
        self.assertEqual(kinds, ["black", "white", "black", "white"])
        self.assertEqual(data["quads"][0]["chart"][0], [0.0, 0.0])


class AnalyticityTests(SimpleTestCase):
    def setUp(self):
        self.rng = np.random.default_rng(5)

    def test_affine_maps(self):
        points = self.rng.normal(size=(6, 4)) + 1j * self.rng.normal(size=(6, 4))
        a, b = 0.7 - 1.2j, 2.0 + 0.5j
        np.testing.assert_allclose(diagonal_residual(points, a * points + b), 0.0, atol=1e-12)
        values = self.rng.normal(size=(6, 4))
        self.assertGreater(np.abs(diagonal_residual(points, values)).max(), 1e-3)

    def test_degenerate_diagonal(self):
        points = np.array([[0, 1j, 0, -1j]])
        with self.assertRaises(DegenerateDiagonal):
            diagonal_residual(points, np.zeros((1, 4)))

    def test_constants(self):
        surface = flat_torus(EQUILATERAL_ETA, 2)
        quad, computation = quadrangulate(surface)
        F = to_quad_function(constant_field(surface.mesh, 1, u=2.0, v=-3.0))
        np.testing.assert_allclose(F.white, -3j)
        np.testing.assert_allclose(
            quad_analyticity_residuals(quad, F, computation.homology), 0.0, atol=1e-14
        )

    def test_needs_imaginary_part(self):
        mesh = flat_torus(EQUILATERAL_ETA, 2).mesh
        with self.assertRaises(MissingImaginaryPart):
            to_quad_function(constant_field(mesh, 1))

    def test_residual_is_edge_residue(self):
        surface = genus2_parallelograms(4, EQUILATERAL_ETA)
        quad, computation = quadrangulate(surface)
        mesh, hd, w = surface.mesh, computation.homology, computation.weights
        f = MultiValuedField(
            u_base=self.rng.normal(size=mesh.n_vertices),
            p_re=self.rng.normal(size=4),
            v_base=self.rng.normal(size=mesh.n_faces),
            p_im=self.rng.normal(size=4),
        )
        residual = quad_analyticity_residuals(quad, to_quad_function(f), hd)
        np.testing.assert_allclose(
            residual * mesh.edge_lengths * w.c,
            w.c * edge_du(f, hd) - edge_dv(f, hd),
            atol=1e-10,
        )

    def test_first_kind_integrals_are_analytic(self):
        for surface in (flat_torus(ACUTE_ETA, 4), genus2_parallelograms(4, EQUILATERAL_ETA)):
            with self.subTest(surface=surface.name):
                quad, c = quadrangulate(surface)
                fields = first_kind_basis(surface.mesh, c.weights, c.homology, c.bundle, c.solver)
                for f in fields:
                    residual = quad_analyticity_residuals(quad, to_quad_function(f), c.homology)
                    self.assertLess(np.abs(residual).max(), 1e-9)


class QuadBilinearTests(SimpleTestCase):
    def setUp(self):
        self.rng = np.random.default_rng(17)
        self.surface = genus2_parallelograms(4, EQUILATERAL_ETA)
        self.quad, self.computation = quadrangulate(self.surface)
        self.hd = self.computation.homology

    def random_function(self):
        mesh = self.surface.mesh
        return to_quad_function(
            MultiValuedField(
                u_base=self.rng.normal(size=mesh.n_vertices),
                p_re=self.rng.normal(size=4),
                v_base=self.rng.normal(size=mesh.n_faces),
                p_im=self.rng.normal(size=4),
            )
        )

    def test_random_functions(self):
        for _ in range(5):
            F, F_prime = self.random_function(), self.random_function()
            self.assertLess(quad_bilinear_residual(self.quad, F, F_prime, self.hd), 1e-10)

    def test_constant_partner(self):
        constant = to_quad_function(constant_field(self.surface.mesh, 2, u=1.0, v=1.0))
        F = self.random_function()
        self.assertLess(quad_bilinear_residual(self.quad, F, constant, self.hd), 1e-12)

    def test_first_kind_pairs(self):
        c = self.computation
        basis = quad_first_kind_basis(self.hd, c.weights, c.bundle, c.solver)
        for F in basis:
            for F_prime in basis:
                self.assertLess(quad_bilinear_residual(self.quad, F, F_prime, self.hd), 1e-9)


class QuadPeriodMatrixTests(SimpleTestCase):
    def test_normalization(self):
        surface = genus2_parallelograms(4, EQUILATERAL_ETA)
        quad, c = quadrangulate(surface)
        for l, F in enumerate(quad_first_kind_basis(c.homology, c.weights, c.bundle, c.solver)):
            np.testing.assert_allclose(F.black_periods[:2], np.eye(2)[l], atol=1e-8)
            np.testing.assert_allclose(F.white_periods[:2], np.eye(2)[l], atol=1e-8)

    def test_flat_torus(self):
        quad, c = quadrangulate(flat_torus(ACUTE_ETA, 3))
        pi = quad_period_matrix(quad, c.homology, c.weights, c.bundle, c.solver)
        np.testing.assert_allclose(pi, [[ACUTE_ETA]], atol=1e-9)

    def test_genus_two(self):
        quad, c = quadrangulate(genus2_parallelograms(4, EQUILATERAL_ETA))
        pi = quad_period_matrix(quad, c.homology, c.weights, c.bundle, c.solver)
        np.testing.assert_allclose(pi, pi.T, atol=1e-9)
        self.assertTrue(np.all(np.linalg.eigvalsh(pi.imag) > 0))


class QuadrangulateAPITests(APITestCase):
    def test_equilateral_torus(self):
        response = self.client.post(
            reverse("quadrangulate"),
            {"mesh": EQUILATERAL_TORUS, "periods": True},
            format="json",
        )
        self.assertEqual(response.status_code, status.HTTP_200_OK)
        self.assertEqual(len(response.data["quads"]), 3)
        self.assertAlmostEqual(response.data["total_area"], math.sqrt(3) / 2)
        self.assertGreater(response.data["pi_q"][0][0][1], 0)

    def test_without_periods(self):
        response = self.client.post(
            reverse("quadrangulate"), {"mesh": EQUILATERAL_TORUS}, format="json"
        )
        self.assertEqual(response.status_code, status.HTTP_200_OK)
        self.assertNotIn("pi_q", response.data)

    def test_flat_quads(self):
        response = self.client.post(
            reverse("quadrangulate"), {"mesh": SQUARE_TORUS}, format="json"
        )
        self.assertEqual(response.status_code, status.HTTP_422_UNPROCESSABLE_ENTITY)
        self.assertEqual(response.data["code"], "non_positive_quad_area")
