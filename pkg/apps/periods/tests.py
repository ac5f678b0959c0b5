import math

import numpy as np
from django.test import SimpleTestCase
from django.urls import reverse
from rest_framework import status
from rest_framework.test import APITestCase

from apps.gen.surfaces import (
    EQUILATERAL_ETA,
    GENUS2_SQUARES_PERIODS,
    flat_torus,
    genus2_parallelograms,
    genus2_squares,
    pyramid,
)
from apps.harmonic.fields import (
    MultiValuedField,
    constant_field,
    dirichlet_energy,
    halfedge_du,
    halfedge_dv,
)
from apps.harmonic.solvers import LaplaceSolver
from apps.mesh.geometry import cotan_weights
from apps.topology.homology import homology_basis

from .bundle import (
    PeriodBundle,
    bundle_is_valid,
    from_complex_pairs,
    period_matrices_from_energy,
    transform_energy_matrix,
    validate_period_bundle,
)
from .exceptions import SingularBlock
from .identities import riemann_bilinear_residual
from .integrals import (
    CauchyRiemannSystem,
    energy_matrix,
    first_kind_basis,
    solve_first_kind,
)
from .pipeline import compute_period_bundle

SQUARE_TORUS = """
1 1.4142135623730951 1  1:1 1:2 1:0
1 1 1.4142135623730951  0:2 0:0 0:1
"""


def setup_surface(surface):
    mesh = surface.mesh
    return mesh, cotan_weights(mesh), homology_basis(mesh, loops=surface.loops)


class EnergyMatrixTests(SimpleTestCase):
    def test_flat_tori(self):
        for eta in (1j, 0.3 + 0.8j, 0.5 + 2j):
            for n in (1, 2, 4):
                with self.subTest(eta=eta, n=n):
                    mesh, w, hd = setup_surface(flat_torus(eta, n))
                    expected = np.array(
                        [
                            [abs(eta) ** 2 / eta.imag, -eta.real / eta.imag],
                            [-eta.real / eta.imag, 1 / eta.imag],
                        ]
                    )
                    np.testing.assert_allclose(
                        energy_matrix(mesh, w, hd), expected, atol=1e-9
                    )

    def test_pyramid(self):
        mesh, w, hd = setup_surface(pyramid())
        np.testing.assert_allclose(
            energy_matrix(mesh, w, hd), np.diag([2 / math.sqrt(3)] * 2), atol=1e-10
        )

    def test_positive_definite(self):
        mesh, w, hd = setup_surface(genus2_squares(4))
        energy = energy_matrix(mesh, w, hd)
        np.testing.assert_allclose(energy, energy.T)
        self.assertGreater(np.linalg.eigvalsh(energy).min(), 0)

    def test_basis_covariance(self):
        surface = genus2_squares(4)
        mesh, w, hd = setup_surface(surface)
        alpha1, alpha2, beta1, beta2 = surface.loops
        change = np.array(
            [[1, 0, 0, 0], [0, 1, 0, 0], [1, 0, 1, 0], [0, 0, 0, 1]]
        )
        moved = homology_basis(
            mesh, loops=(alpha1, alpha2, np.concatenate([beta1, alpha1]), beta2)
        )
        np.testing.assert_allclose(
            energy_matrix(mesh, w, moved),
            transform_energy_matrix(energy_matrix(mesh, w, hd), change),
            atol=1e-9,
        )
        shift = np.array([[1, 0], [0, 0]])
        before = period_matrices_from_energy(energy_matrix(mesh, w, hd))
        after = period_matrices_from_energy(energy_matrix(mesh, w, moved))
        np.testing.assert_allclose(after.pi_t, before.pi_t + shift, atol=1e-9)
        np.testing.assert_allclose(after.pi_t_star, before.pi_t_star + shift, atol=1e-9)
        self.assertGreater(np.linalg.eigvalsh(after.pi_t.imag).min(), 0)
        system = CauchyRiemannSystem(mesh, w, moved)
        for l in range(2):
            f = system.solve(np.eye(2)[l])
            np.testing.assert_allclose(f.b_periods, after.pi_t[:, l], atol=1e-8)


class PeriodBundleTests(SimpleTestCase):
    def test_identity_energy(self):
        pb = period_matrices_from_energy(np.eye(2))
        for matrix in (pb.pi_t, pb.pi_t_star, pb.pi_q):
            np.testing.assert_allclose(matrix, [[1j]])

    def test_pyramid_energy(self):
        pb = period_matrices_from_energy(np.diag([2 / math.sqrt(3)] * 2))
        np.testing.assert_allclose(pb.pi_t, [[2j / math.sqrt(3)]])
        np.testing.assert_allclose(pb.pi_t_star, [[1j * math.sqrt(3) / 2]])
        np.testing.assert_allclose(
            pb.pi_q, [[1j * (2 / math.sqrt(3) + math.sqrt(3) / 2) / 2]]
        )

    def test_singular_block(self):
        with self.assertRaises(SingularBlock):
            period_matrices_from_energy(np.diag([1.0, 0.0]))
        with self.assertRaises(SingularBlock):
            period_matrices_from_energy(np.eye(3))

    def test_flat_tori_are_exact(self):
        for eta in (1j, 0.3 + 0.8j, 0.5 + 2j):
            for n in (1, 2, 4, 8):
                with self.subTest(eta=eta, n=n):
                    pb = compute_period_bundle(
                        flat_torus(eta, n).mesh, loops=flat_torus(eta, n).loops
                    ).bundle
                    self.assertLess(abs(pb.pi_t[0, 0] - eta), 1e-8)
                    self.assertLess(abs(pb.pi_t_star[0, 0] - eta), 1e-8)

    def test_pyramid_is_not_complex_linear(self):
        surface = pyramid()
        pb = compute_period_bundle(surface.mesh, loops=surface.loops).bundle
        self.assertLess(abs(pb.pi_t[0, 0] - 2j / math.sqrt(3)), 1e-8)
        self.assertLess(abs(pb.pi_t_star[0, 0] - 1j * math.sqrt(3) / 2), 1e-8)
        checks = validate_period_bundle(pb)
        self.assertTrue(bundle_is_valid(checks))
        self.assertFalse(checks["complex_linear"].passed)

    def test_structure_on_genus_two(self):
        surface = genus2_squares(8)
        pb = compute_period_bundle(surface.mesh, loops=surface.loops).bundle
        checks = validate_period_bundle(pb)
        self.assertTrue(bundle_is_valid(checks))
        np.testing.assert_allclose(pb.pi_q, pb.pi_q.T, atol=1e-10)
        self.assertLess(
            np.linalg.norm(pb.pi_t - GENUS2_SQUARES_PERIODS), np.linalg.norm(GENUS2_SQUARES_PERIODS)
        )

    def test_hand_built_bundle_fails(self):
        pi = np.array([[1j, 0.5j], [0.0, 1j]])
        pb = PeriodBundle(genus=2, energy=np.eye(4), pi_t=pi, pi_t_star=pi, pi_q=pi)
        checks = validate_period_bundle(pb)
        self.assertFalse(checks["im_pi_t_symmetric"].passed)
        self.assertAlmostEqual(checks["im_pi_t_symmetric"].defect, math.sqrt(0.5))
        self.assertFalse(bundle_is_valid(checks))

    def test_json_pairs(self):
        pb = period_matrices_from_energy(np.diag([2 / math.sqrt(3)] * 2))
        data = pb.as_dict()
        self.assertEqual(data["genus"], 1)
        np.testing.assert_allclose(from_complex_pairs(data["pi_t"]), pb.pi_t)
        self.assertIn("re_transpose_defect", data["diagnostics"])


class FirstKindTests(SimpleTestCase):
    def setUp(self):
        self.surface = genus2_squares(4)
        self.mesh, self.w, self.hd = setup_surface(self.surface)
        self.solver = LaplaceSolver(self.mesh, self.w, self.hd)
        self.bundle = period_matrices_from_energy(
            energy_matrix(self.mesh, self.w, self.hd, solver=self.solver)
        )
        self.rng = np.random.default_rng(11)

    def test_zero_periods_give_constant(self):
        f = solve_first_kind(self.mesh, self.w, self.hd, [0, 0], solver=self.solver)
        np.testing.assert_allclose(f.u_base, 0.0, atol=1e-12)
        np.testing.assert_allclose(f.v_base, 0.0, atol=1e-12)
        np.testing.assert_allclose(f.b_periods, 0.0, atol=1e-12)

    def test_flat_torus_b_period(self):
        for eta in (1j, EQUILATERAL_ETA, 0.5 + 2j):
            with self.subTest(eta=eta):
                mesh, w, hd = setup_surface(flat_torus(eta, 3))
                f = solve_first_kind(mesh, w, hd, [1.0], cross_check=True)
                np.testing.assert_allclose(f.b_periods, [eta], atol=1e-9)

    def test_prescribed_a_periods_and_analyticity(self):
        A = self.rng.normal(size=2) + 1j * self.rng.normal(size=2)
        f = solve_first_kind(self.mesh, self.w, self.hd, A, bundle=self.bundle, solver=self.solver)
        np.testing.assert_allclose(f.a_periods, A, atol=1e-9)
        c = self.w.c[self.mesh.halfedge_edge]
        np.testing.assert_allclose(
            halfedge_dv(f, self.hd), c * halfedge_du(f, self.hd), atol=1e-9
        )

    def test_real_linearity(self):
        A1 = self.rng.normal(size=2) + 1j * self.rng.normal(size=2)
        A2 = self.rng.normal(size=2) + 1j * self.rng.normal(size=2)
        f1, f2, f12 = (
            solve_first_kind(self.mesh, self.w, self.hd, A, bundle=self.bundle, solver=self.solver)
            for A in (A1, A2, A1 - 2.5 * A2)
        )
        np.testing.assert_allclose(f12.b_periods, f1.b_periods - 2.5 * f2.b_periods, atol=1e-9)
        np.testing.assert_allclose(f12.v_base, f1.v_base - 2.5 * f2.v_base, atol=1e-9)

    def test_two_routes_agree(self):
        for l in range(2):
            A = np.eye(2)[l]
            f = solve_first_kind(self.mesh, self.w, self.hd, A, cross_check=True)
            np.testing.assert_allclose(f.b_periods, self.bundle.pi_t[:, l], atol=1e-8)
            g = solve_first_kind(self.mesh, self.w, self.hd, 1j * A, cross_check=True)
            np.testing.assert_allclose(g.b_periods / 1j, self.bundle.pi_t_star[:, l], atol=1e-8)

    def test_first_kind_basis(self):
        for dual, matrix in ((False, self.bundle.pi_t), (True, self.bundle.pi_t_star)):
            fields = first_kind_basis(self.mesh, self.w, self.hd, self.bundle, self.solver, dual=dual)
            unit = 1j if dual else 1.0
            for l, f in enumerate(fields):
                np.testing.assert_allclose(f.a_periods, unit * np.eye(2)[l], atol=1e-9)
                np.testing.assert_allclose(f.b_periods, unit * matrix[:, l], atol=1e-9)

    def test_im_pi_from_energy_conservation(self):
        for _ in range(5):
            A = self.rng.normal(size=2)
            f = solve_first_kind(self.mesh, self.w, self.hd, A, bundle=self.bundle, solver=self.solver)
            self.assertAlmostEqual(
                A @ self.bundle.pi_t.imag @ A, dirichlet_energy(f, self.hd, self.w), places=9
            )


class CauchyRiemannSystemTests(SimpleTestCase):
    def test_first_kind_rows(self):
        mesh, w, hd = setup_surface(genus2_squares(4))
        system = CauchyRiemannSystem(mesh, w, hd, anchor_vertex=2, anchor_face=5)
        f = system.solve([1.0, 0.5j])
        np.testing.assert_allclose(f.a_periods, [1.0, 0.5j])
        self.assertAlmostEqual(f.u_base[2], 0.0, places=12)
        self.assertAlmostEqual(f.v_base[5], 0.0, places=12)
        c = w.c[mesh.halfedge_edge]
        np.testing.assert_allclose(halfedge_dv(f, hd), c * halfedge_du(f, hd), atol=1e-9)

    def test_edge_residue(self):
        mesh, w, hd = setup_surface(flat_torus(0.3 + 0.8j, 3))
        residues = np.zeros(mesh.n_edges)
        residues[4] = 1.0
        f = CauchyRiemannSystem(mesh, w, hd).solve(residues=residues)
        he = mesh.edge_halfedge
        defect = w.c * halfedge_du(f, hd)[he] - halfedge_dv(f, hd)[he]
        np.testing.assert_allclose(defect, residues, atol=1e-9)
        np.testing.assert_allclose(f.a_periods, [0.0])


class NonzeroRealPartTests(SimpleTestCase):
    """Genus two surface of equilateral triangles; its period matrix has a real part."""

    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        surface = genus2_parallelograms(4, EQUILATERAL_ETA)
        computation = compute_period_bundle(surface.mesh, loops=surface.loops)
        cls.mesh = computation.mesh
        cls.w = computation.weights
        cls.hd = computation.homology
        cls.bundle = computation.bundle

    def test_real_part_is_present(self):
        self.assertGreater(np.abs(self.bundle.pi_t.real).max(), 0.1)

    def test_structure(self):
        pb = self.bundle
        self.assertTrue(bundle_is_valid(validate_period_bundle(pb)))
        np.testing.assert_allclose(pb.pi_t.imag, pb.pi_t.imag.T, atol=1e-10)
        self.assertGreater(np.linalg.eigvalsh(pb.pi_t.imag).min(), 0)
        np.testing.assert_allclose(pb.pi_t_star.real, pb.pi_t.real.T, atol=1e-10)

    def test_agrees_with_cauchy_riemann_system(self):
        system = CauchyRiemannSystem(self.mesh, self.w, self.hd)
        for l in range(2):
            A = np.eye(2)[l]
            np.testing.assert_allclose(
                system.solve(A).b_periods, self.bundle.pi_t[:, l], atol=1e-8
            )
            np.testing.assert_allclose(
                system.solve(1j * A).b_periods / 1j, self.bundle.pi_t_star[:, l], atol=1e-8
            )

    def test_cross_checked_integral(self):
        f = solve_first_kind(self.mesh, self.w, self.hd, [1.0, 0.5j], cross_check=True)
        np.testing.assert_allclose(f.a_periods, [1.0, 0.5j], atol=1e-9)

    def test_known_entries(self):
        pi = self.bundle.pi_t
        self.assertAlmostEqual(pi[0, 0], -0.5385 + 2.3982j, delta=1e-3)
        self.assertAlmostEqual(pi[0, 1], 0.5192 - 1.6321j, delta=1e-3)
        self.assertAlmostEqual(pi[1, 0], 0.5192 - 1.6321j, delta=1e-3)


class BilinearIdentityTests(SimpleTestCase):
    def setUp(self):
        self.rng = np.random.default_rng(8)

    def random_field(self, mesh, genus):
        return MultiValuedField(
            u_base=self.rng.normal(size=mesh.n_vertices),
            p_re=self.rng.normal(size=2 * genus),
            v_base=self.rng.normal(size=mesh.n_faces),
            p_im=self.rng.normal(size=2 * genus),
        )

    def test_arbitrary_multi_valued_fields(self):
        for surface in (genus2_squares(4), flat_torus(0.3 + 0.8j, 4), pyramid()):
            mesh, w, hd = setup_surface(surface)
            for _ in range(10):
                with self.subTest(surface=surface.name):
                    f, f_prime = (self.random_field(mesh, hd.genus) for _ in range(2))
                    self.assertLess(riemann_bilinear_residual(f, f_prime, hd, w).bilinear, 1e-9)

    def test_constant_partner(self):
        mesh, w, hd = setup_surface(genus2_squares(4))
        f = self.random_field(mesh, 2)
        residual = riemann_bilinear_residual(f, constant_field(mesh, 2, v=1.0), hd, w)
        self.assertAlmostEqual(residual.lhs, 0.0, places=12)
        self.assertEqual(residual.rhs, 0.0)

    def test_square_torus_first_kind(self):
        mesh, w, hd = setup_surface(flat_torus(1j, 1))
        phi = solve_first_kind(mesh, w, hd, [1.0])
        residual = riemann_bilinear_residual(phi, phi, hd, w, first_kind=True)
        self.assertAlmostEqual(residual.lhs, 1.0, places=10)
        self.assertAlmostEqual(residual.rhs, 1.0, places=10)
        self.assertLess(residual.energy_conservation, 1e-10)

    def test_first_kind_pairs(self):
        mesh, w, hd = setup_surface(genus2_squares(4))
        solver = LaplaceSolver(mesh, w, hd)
        for _ in range(5):
            A1, A2 = (self.rng.normal(size=2) + 1j * self.rng.normal(size=2) for _ in range(2))
            f1 = solve_first_kind(mesh, w, hd, A1, solver=solver)
            f2 = solve_first_kind(mesh, w, hd, A2, solver=solver)
            residual = riemann_bilinear_residual(f1, f2, hd, w, first_kind=True)
            self.assertLess(residual.worst(), 1e-8)
            self.assertIsNotNone(residual.period_symmetry)

    def test_specializations_need_first_kind(self):
        mesh, w, hd = setup_surface(genus2_squares(4))
        f, f_prime = (self.random_field(mesh, 2) for _ in range(2))
        residual = riemann_bilinear_residual(f, f_prime, hd, w)
        self.assertIsNone(residual.energy_conservation)
        self.assertIsNone(residual.period_symmetry)
        self.assertEqual(residual.worst(), residual.bilinear)


class PeriodMatrixAPITests(APITestCase):
    def test_square_torus_with_loops(self):
        url = reverse("period-matrices")
        response = self.client.post(
            url, {"mesh": SQUARE_TORUS, "loops": [[2], [0]]}, format="json"
        )
        self.assertEqual(response.status_code, status.HTTP_200_OK)
        self.assertEqual(response.data["genus"], 1)
        np.testing.assert_allclose(from_complex_pairs(response.data["pi_t"]), [[1j]], atol=1e-9)
        self.assertTrue(response.data["checks"]["complex_linear"]["passed"])

    def test_tree_cotree_basis_is_cached(self):
        url = reverse("period-matrices")
        first = self.client.post(url, {"mesh": SQUARE_TORUS}, format="json")
        second = self.client.post(url, {"mesh": SQUARE_TORUS}, format="json")
        self.assertEqual(first.status_code, status.HTTP_200_OK)
        self.assertEqual(first.data, second.data)
        pi = from_complex_pairs(first.data["pi_t"])
        self.assertGreater(pi.imag[0, 0], 0)
        self.assertTrue(all(check["passed"] for name, check in first.data["checks"].items()))

    def test_swapped_loops_are_rejected(self):
        url = reverse("period-matrices")
        response = self.client.post(
            url, {"mesh": SQUARE_TORUS, "loops": [[0], [2]]}, format="json"
        )
        self.assertEqual(response.status_code, status.HTTP_400_BAD_REQUEST)
        self.assertEqual(response.data["code"], "basis_mismatch")

    def test_sphere_is_rejected(self):
        url = reverse("period-matrices")
        response = self.client.post(
            url, {"mesh": "1 1 1 1:0 1:2 1:1\n1 1 1 0:0 0:2 0:1"}, format="json"
        )
        self.assertEqual(response.status_code, status.HTTP_400_BAD_REQUEST)
        self.assertEqual(response.data["code"], "genus_zero")
