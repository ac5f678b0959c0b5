import numpy as np
from django.test import SimpleTestCase
from django.urls import reverse
from rest_framework import status
from rest_framework.test import APITestCase

from apps.gen.surfaces import EQUILATERAL_ETA, flat_torus, genus2_squares
from apps.harmonic.fields import constant_field, halfedge_du
from apps.harmonic.solvers import LaplaceSolver
from apps.mesh.geometry import cotan_weights
from apps.periods.bundle import period_matrices_from_energy
from apps.periods.integrals import (
    CauchyRiemannSystem,
    energy_matrix,
    first_kind_basis,
    solve_first_kind,
)
from apps.topology.homology import homology_basis

from .differentials import (
    EdgeDifferential,
    MeromorphicFunction,
    differential_of,
    edge_residue,
    edge_residues,
    integrate,
    residues,
    second_kind_b_periods,
    solve_second_kind,
    solve_third_kind,
)
from .divisors import Divisor, divisor_of, random_admissible_divisor
from .exceptions import (
    BrokenChain,
    CoincidentPoles,
    InvalidDivisor,
    MultiValued,
    NotAdmissible,
    RankAmbiguous,
    TooLarge,
)
from .riemann_roch import direct_i_dimension, numerical_rank, riemann_roch

EQUILATERAL_TORUS = """
1 1 1  1:1 1:2 1:0
1 1 1  0:2 0:0 0:1
"""


def setup_surface(surface):
    mesh = surface.mesh
    return mesh, cotan_weights(mesh), homology_basis(mesh, loops=surface.loops)


def torus_halfedge(n, i, j, side):
    """Side 2 of a lower face points along 1, side 0 along eta."""
    return 3 * 2 * (i + n * j) + side


def divisor_with_poles(mesh, halfedges, vertices=(), faces=()):
    divisor = Divisor.zero(mesh)
    divisor.edge[[mesh.edge(he) for he in halfedges]] = 1
    divisor.vertex[list(vertices)] = -1
    divisor.face[list(faces)] = -1
    return divisor


class DifferentialTests(SimpleTestCase):
    def test_constant_has_zero_differential(self):
        mesh, w, hd = setup_surface(genus2_squares(4))
        omega = differential_of(constant_field(mesh, 2, u=4.0), hd)
        np.testing.assert_array_equal(omega.values, 0.0)

    def test_real_part_of_z_on_square_torus(self):
        n = 3
        mesh, w, hd = setup_surface(flat_torus(1j, n))
        omega = differential_of(solve_first_kind(mesh, w, hd, [1.0]), hd)
        for i in range(n):
            for j in range(n):
                self.assertAlmostEqual(omega.at(torus_halfedge(n, i, j, 2)), 1 / n, places=10)
                self.assertAlmostEqual(omega.at(torus_halfedge(n, i, j, 0)), 0.0, places=10)
                self.assertAlmostEqual(omega.at(torus_halfedge(n, i, j, 1)), -1 / n, places=10)

    def test_first_kind_has_no_residues(self):
        rng = np.random.default_rng(21)
        mesh, w, hd = setup_surface(genus2_squares(4))
        A = rng.normal(size=2) + 1j * rng.normal(size=2)
        res = residues(differential_of(solve_first_kind(mesh, w, hd, A), hd), w)
        self.assertLess(np.abs(res.vertex).max(), 1e-9)
        self.assertLess(np.abs(res.face).max(), 1e-9)

    def test_residue_sums_vanish(self):
        rng = np.random.default_rng(22)
        mesh, w, hd = setup_surface(genus2_squares(4))
        omega = EdgeDifferential(mesh, rng.normal(size=mesh.n_edges))
        res = residues(omega, w)
        self.assertAlmostEqual(res.vertex.sum(), 0.0, places=10)
        self.assertAlmostEqual(res.face.sum(), 0.0, places=10)
        zero = residues(EdgeDifferential(mesh, np.zeros(mesh.n_edges)), w)
        np.testing.assert_array_equal(zero.vertex, 0.0)
        np.testing.assert_array_equal(zero.face, 0.0)

    def test_antisymmetry(self):
        rng = np.random.default_rng(23)
        mesh = flat_torus(EQUILATERAL_ETA, 3).mesh
        omega = EdgeDifferential(mesh, rng.normal(size=mesh.n_edges))
        for he in range(3 * mesh.n_faces):
            self.assertEqual(omega.at(he), -omega.at(int(mesh.twin[he])))


class IntegrationTests(SimpleTestCase):
    def setUp(self):
        self.mesh, self.w, self.hd = setup_surface(flat_torus(EQUILATERAL_ETA, 3))
        rng = np.random.default_rng(24)
        self.omega = EdgeDifferential(self.mesh, rng.normal(size=self.mesh.n_edges))

    def test_face_boundary_is_face_residue(self):
        res = residues(self.omega, self.w)
        for face in (0, 7):
            self.assertAlmostEqual(
                integrate(self.omega, self.mesh.face_halfedges(face)), res.face[face]
            )

    def test_two_triangles(self):
        # lower face 0 and upper face 1 share only the diagonal, side 1 of face 0
        c = self.w.c[self.mesh.edge(1)]
        value = integrate(self.omega, [0, 1], kind="faces", w=self.w)
        self.assertAlmostEqual(value, c * self.omega.at(1))
        self.assertAlmostEqual(integrate(self.omega, [1, 0], kind="faces", w=self.w), -value)

    def test_reversed_primal_path(self):
        path = list(self.hd.alpha_cycles[0])
        reverse = [int(self.mesh.twin[he]) for he in reversed(path)]
        self.assertAlmostEqual(
            integrate(self.omega, reverse), -integrate(self.omega, path)
        )

    def test_broken_chains(self):
        with self.assertRaises(BrokenChain):
            integrate(self.omega, [2, 2])
        with self.assertRaises(BrokenChain):
            integrate(self.omega, [0, 5], kind="faces", w=self.w)


class SecondKindTests(SimpleTestCase):
    def setUp(self):
        self.mesh, self.w, self.hd = setup_surface(genus2_squares(4))
        self.system = CauchyRiemannSystem(self.mesh, self.w, self.hd)
        self.rng = np.random.default_rng(25)

    def test_single_pole(self):
        he = 17
        f = solve_second_kind(self.mesh, self.w, self.hd, he, system=self.system)
        self.assertAlmostEqual(edge_residue(f, self.w, he, hd=self.hd), 1.0, places=10)
        self.assertAlmostEqual(
            edge_residue(f, self.w, int(self.mesh.twin[he]), hd=self.hd), -1.0, places=10
        )
        res = edge_residues(f, self.w, hd=self.hd)
        res[self.mesh.edge(he)] = 0.0
        self.assertLess(np.abs(res).max(), 1e-9)
        np.testing.assert_array_equal(f.a_periods, 0.0)

    def test_scaling(self):
        unit = solve_second_kind(self.mesh, self.w, self.hd, 5, system=self.system)
        scaled = solve_second_kind(self.mesh, self.w, self.hd, 5, residue=2.5, system=self.system)
        np.testing.assert_allclose(scaled.u_base, 2.5 * unit.u_base, atol=1e-10)
        np.testing.assert_allclose(scaled.b_periods, 2.5 * unit.b_periods, atol=1e-10)

    def test_b_periods_from_first_kind_integrals(self):
        solver = LaplaceSolver(self.mesh, self.w, self.hd)
        bundle = period_matrices_from_energy(
            energy_matrix(self.mesh, self.w, self.hd, solver=solver)
        )
        basis = first_kind_basis(self.mesh, self.w, self.hd, bundle, solver)
        dual_basis = first_kind_basis(self.mesh, self.w, self.hd, bundle, solver, dual=True)
        for he in self.rng.choice(3 * self.mesh.n_faces, size=10, replace=False):
            f = solve_second_kind(self.mesh, self.w, self.hd, int(he), system=self.system)
            np.testing.assert_allclose(
                f.b_periods,
                second_kind_b_periods(self.hd, int(he), basis, dual_basis),
                atol=1e-8,
            )


class ThirdKindTests(SimpleTestCase):
    def test_vertex_poles(self):
        for surface in (flat_torus(EQUILATERAL_ETA, 3), genus2_squares(4)):
            with self.subTest(surface=surface.name):
                mesh, w, hd = setup_surface(surface)
                z, other = 1, mesh.n_vertices - 1
                omega = solve_third_kind(mesh, w, hd, (z, other))
                res = residues(omega, w)
                expected = np.zeros(mesh.n_vertices)
                expected[z], expected[other] = 1.0, -1.0
                np.testing.assert_allclose(res.vertex, expected, atol=1e-9)
                np.testing.assert_allclose(res.face, 0.0, atol=1e-9)
                for loop in hd.alpha_cycles:
                    self.assertAlmostEqual(integrate(omega, loop), 0.0, places=9)
                for loop in hd.dual_basis_loops[: hd.genus]:
                    self.assertAlmostEqual(integrate(omega, loop, kind="dual", w=w), 0.0, places=9)
                swapped = solve_third_kind(mesh, w, hd, (other, z))
                np.testing.assert_allclose(swapped.values, -omega.values, atol=1e-9)

    def test_face_poles(self):
        mesh, w, hd = setup_surface(genus2_squares(4))
        omega = solve_third_kind(mesh, w, hd, (3, 10), kind="face")
        res = residues(omega, w)
        expected = np.zeros(mesh.n_faces)
        expected[3], expected[10] = 1.0, -1.0
        np.testing.assert_allclose(res.face, expected, atol=1e-9)
        np.testing.assert_allclose(res.vertex, 0.0, atol=1e-9)

    def test_coincident_poles(self):
        mesh, w, hd = setup_surface(flat_torus(EQUILATERAL_ETA, 2))
        with self.assertRaises(CoincidentPoles):
            solve_third_kind(mesh, w, hd, (2, 2))

    def test_values_of_meromorphic_functions(self):
        n = 3
        mesh, w, hd = setup_surface(flat_torus(EQUILATERAL_ETA, n))
        system = CauchyRiemannSystem(mesh, w, hd)
        first = solve_second_kind(mesh, w, hd, torus_halfedge(n, 0, 0, 2), system=system)
        second = solve_second_kind(
            mesh, w, hd, torus_halfedge(n, 1, 1, 2), residue=-1.0, system=system
        )
        f = MeromorphicFunction.from_field(first + second)
        res = edge_residues(f, w, mesh=mesh)

        z, other = 1, 4
        dphi = solve_third_kind(mesh, w, hd, (z, other))
        self.assertAlmostEqual(f.re[z] - f.re[other], np.sum(dphi.values * res), places=9)

        x, y = 2, 9
        dphi = solve_third_kind(mesh, w, hd, (x, y), kind="face")
        self.assertAlmostEqual(f.im[x] - f.im[y], -np.sum(dphi.values * res), places=9)

    def test_multi_valued_is_not_meromorphic(self):
        mesh, w, hd = setup_surface(flat_torus(EQUILATERAL_ETA, 2))
        f = solve_second_kind(mesh, w, hd, 2)
        with self.assertRaises(MultiValued):
            MeromorphicFunction.from_field(f)


class DivisorTests(SimpleTestCase):
    def setUp(self):
        self.mesh, self.w, self.hd = setup_surface(flat_torus(EQUILATERAL_ETA, 3))

    def test_json(self):
        divisor = Divisor.from_json(
            self.mesh, [["edge", 4, 1], ["vertex", 0, -1], ["face", 3, -1]]
        )
        self.assertEqual(divisor.degree, -1)
        self.assertTrue(divisor.is_admissible)
        self.assertEqual(divisor.poles.tolist(), [4])
        self.assertEqual(
            sorted(divisor.to_json()), [["edge", 4, 1], ["face", 3, -1], ["vertex", 0, -1]]
        )

    def test_invalid_json(self):
        for entries in (
            [["corner", 0, 1]],
            [["edge", 0, 2]],
            [["edge", 0]],
            [["edge", 999, 1]],
            [["edge", 1, 1], ["edge", 1, 1]],
        ):
            with self.subTest(entries=entries), self.assertRaises(InvalidDivisor):
                Divisor.from_json(self.mesh, entries)

    def test_nonzero_constant(self):
        f = MeromorphicFunction(re=np.full(self.mesh.n_vertices, 2.0), im=np.full(self.mesh.n_faces, -1.0))
        divisor = divisor_of(f, self.w, mesh=self.mesh)
        self.assertEqual(divisor.to_json(), [])

    def test_differential(self):
        rng = np.random.default_rng(26)
        values = rng.uniform(1.0, 2.0, size=self.mesh.n_edges)
        values[5] = 0.0
        divisor = divisor_of(EdgeDifferential(self.mesh, values), self.w)
        self.assertEqual(divisor.poles.tolist(), [5])
        self.assertEqual(np.flatnonzero(divisor.edge).tolist(), [5])
        self.assertTrue((divisor.edge >= 0).all())
        res = residues(EdgeDifferential(self.mesh, values), self.w)
        np.testing.assert_array_equal(divisor.vertex, np.where(res.vertex != 0, -1, 0))
        np.testing.assert_array_equal(divisor.face, np.where(res.face != 0, -1, 0))

    def test_function_with_two_poles(self):
        n = 3
        system = CauchyRiemannSystem(self.mesh, self.w, self.hd)
        he1, he2 = torus_halfedge(n, 0, 0, 2), torus_halfedge(n, 1, 1, 2)
        f = solve_second_kind(self.mesh, self.w, self.hd, he1, system=system) + solve_second_kind(
            self.mesh, self.w, self.hd, he2, residue=-1.0, system=system
        )
        divisor = divisor_of(f, self.w, hd=self.hd)
        self.assertEqual(
            sorted(np.flatnonzero(divisor.edge).tolist()),
            sorted([self.mesh.edge(he1), self.mesh.edge(he2)]),
        )
        self.assertTrue((divisor.edge <= 0).all())
        self.assertEqual(divisor.vertex[0], 1)


class RankTests(SimpleTestCase):
    def test_clear_gap(self):
        self.assertEqual(numerical_rank(np.diag([1.0, 1e-3, 1e-14])), 2)
        self.assertEqual(numerical_rank(np.zeros((3, 2))), 0)
        self.assertEqual(numerical_rank(np.ones((2, 5))), 1)

    def test_ambiguous(self):
        with self.assertRaises(RankAmbiguous):
            numerical_rank(np.diag([1.0, 1e-7, 1e-9]))


class RiemannRochTests(SimpleTestCase):
    def test_zero_divisor(self):
        for surface in (flat_torus(EQUILATERAL_ETA, 3), genus2_squares(4)):
            with self.subTest(surface=surface.name):
                mesh, w, hd = setup_surface(surface)
                result = riemann_roch(mesh, w, hd, Divisor.zero(mesh))
                self.assertEqual(result.l_minus_d, 2)
                self.assertEqual(result.i_d, 2 * hd.genus)
                self.assertTrue(result.identity_holds)
                self.assertEqual(direct_i_dimension(mesh, w, Divisor.zero(mesh)), 2 * hd.genus)

    def test_torus_single_pole(self):
        n = 4
        mesh, w, hd = setup_surface(flat_torus(1j, n))
        for he in (torus_halfedge(n, 0, 0, 2), torus_halfedge(n, 2, 1, 0), torus_halfedge(n, 1, 3, 1)):
            with self.subTest(he=he):
                result = riemann_roch(mesh, w, hd, divisor_with_poles(mesh, [he]))
                self.assertEqual(result.l_minus_d, 2)
                self.assertTrue(result.identity_holds)

    def test_torus_two_poles(self):
        n = 4
        for eta in (1j, EQUILATERAL_ETA):
            mesh, w, hd = setup_surface(flat_torus(eta, n))
            for side in (0, 1, 2):
                with self.subTest(eta=eta, side=side):
                    parallel = divisor_with_poles(
                        mesh, [torus_halfedge(n, 0, 0, side), torus_halfedge(n, 2, 1, side)]
                    )
                    self.assertGreaterEqual(riemann_roch(mesh, w, hd, parallel).l_minus_d, 3)
                    crossing = divisor_with_poles(
                        mesh,
                        [torus_halfedge(n, 0, 0, side), torus_halfedge(n, 2, 1, (side + 1) % 3)],
                    )
                    self.assertEqual(riemann_roch(mesh, w, hd, crossing).l_minus_d, 2)

    def test_random_admissible_divisors(self):
        rng = np.random.default_rng(27)
        for surface in (flat_torus(EQUILATERAL_ETA, 3), flat_torus(0.3 + 0.8j, 2), genus2_squares(4)):
            mesh, w, hd = setup_surface(surface)
            for _ in range(8):
                divisor = random_admissible_divisor(
                    mesh,
                    rng,
                    n_poles=int(rng.integers(0, 7)),
                    n_vertices=int(rng.integers(0, min(3, mesh.n_vertices) + 1)),
                    n_faces=int(rng.integers(0, 4)),
                )
                with self.subTest(surface=surface.name, divisor=divisor.to_json()):
                    result = riemann_roch(mesh, w, hd, divisor)
                    self.assertTrue(result.identity_holds)
                    self.assertEqual(result.i_d, direct_i_dimension(mesh, w, divisor))

    def test_not_admissible(self):
        mesh, w, hd = setup_surface(flat_torus(EQUILATERAL_ETA, 2))
        divisor = Divisor.zero(mesh)
        divisor.vertex[0] = 1
        with self.assertRaises(NotAdmissible):
            riemann_roch(mesh, w, hd, divisor)
        with self.assertRaises(NotAdmissible):
            direct_i_dimension(mesh, w, divisor)

    def test_dense_limit(self):
        mesh, w, hd = setup_surface(flat_torus(EQUILATERAL_ETA, 3))
        with self.assertRaises(TooLarge):
            direct_i_dimension(mesh, w, Divisor.zero(mesh), limit=10)


class RiemannRochAPITests(APITestCase):
    def test_single_pole(self):
        response = self.client.post(
            reverse("riemann-roch"),
            {"mesh": EQUILATERAL_TORUS, "divisor": [["edge", 0, 1]]},
            format="json",
        )
        self.assertEqual(response.status_code, status.HTTP_200_OK)
        self.assertEqual(response.data["l_minus_d"], 2)
        self.assertEqual(response.data["degree"], 1)
        self.assertTrue(response.data["identity_holds"])
        self.assertEqual(response.data["i_direct"], response.data["i_d"])

    def test_not_admissible(self):
        response = self.client.post(
            reverse("riemann-roch"),
            {"mesh": EQUILATERAL_TORUS, "divisor": [["edge", 0, -1]]},
            format="json",
        )
        self.assertEqual(response.status_code, status.HTTP_400_BAD_REQUEST)
        self.assertEqual(response.data["code"], "not_admissible")

    def test_malformed_divisor(self):
        response = self.client.post(
            reverse("riemann-roch"),
            {"mesh": EQUILATERAL_TORUS, "divisor": [["edge", 7, 1]]},
            format="json",
        )
        self.assertEqual(response.status_code, status.HTTP_400_BAD_REQUEST)
        self.assertIn("divisor", response.data)
