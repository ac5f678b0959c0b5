import numpy as np
from django.test import SimpleTestCase

from apps.gen.surfaces import flat_torus, genus2_squares, pyramid
from apps.mesh.io import parse_mesh

from .exceptions import BasisMismatch, GenusZero, NotClosed
from .homology import (
    homology_basis,
    intersection_number,
    loop_class,
    push_to_primal,
    reverse_loop,
)
from .symplectic import standard_symplectic, symplectic_reduction

PILLOW = "1 1 1 1:0 1:2 1:1\n1 1 1 0:0 0:2 0:1"


def _elementary(n, rng):
    matrix = np.eye(n, dtype=np.int64)
    i, j = rng.choice(n, size=2, replace=False)
    matrix[i, j] = rng.integers(-2, 3)
    return matrix


class SymplecticReductionTests(SimpleTestCase):
    def test_standard_form_is_fixed(self):
        J = standard_symplectic(2)
        P = symplectic_reduction(J)
        np.testing.assert_array_equal(P @ J @ P.T, J)

    def test_random_unimodular_congruence(self):
        rng = np.random.default_rng(11)
        J = standard_symplectic(3)
        for _ in range(10):
            A = np.eye(6, dtype=np.int64)
            for _ in range(8):
                A = A @ _elementary(6, rng)
            omega = A @ J @ A.T
            P = symplectic_reduction(omega)
            np.testing.assert_array_equal(P @ omega @ P.T, J)


class HomologyBasisTests(SimpleTestCase):
    def test_one_vertex_torus(self):
        surface = flat_torus(1j, 1)
        hd = homology_basis(surface.mesh)
        self.assertEqual(hd.genus, 1)
        self.assertEqual(len(hd.basis_cycles), 2)
        np.testing.assert_array_equal(hd.intersection, standard_symplectic(1))

    def test_sphere_has_no_basis(self):
        with self.assertRaises(GenusZero):
            homology_basis(parse_mesh(PILLOW))

    def test_shipped_loops_are_symplectic(self):
        for surface in (flat_torus(0.3 + 0.8j, 3), pyramid(), genus2_squares(4)):
            with self.subTest(surface=surface.name):
                hd = homology_basis(surface.mesh, loops=surface.loops)
                np.testing.assert_array_equal(
                    hd.intersection, standard_symplectic(hd.genus)
                )

    def test_swapped_loops_are_rejected(self):
        surface = flat_torus(1j, 2)
        alpha, beta = surface.loops
        with self.assertRaises(BasisMismatch):
            homology_basis(surface.mesh, loops=(beta, alpha))

    def test_open_path_is_rejected(self):
        surface = flat_torus(1j, 3)
        with self.assertRaises(NotClosed):
            homology_basis(surface.mesh, loops=(surface.loops[0][:2], surface.loops[1]))

    def test_cocycles_are_closed(self):
        mesh = genus2_squares(4).mesh
        hd = homology_basis(mesh)
        per_face = hd.halfedge_kappa.reshape(mesh.n_faces, 3, -1).sum(axis=1)
        np.testing.assert_allclose(per_face, 0.0, atol=1e-12)
        per_vertex = np.zeros((mesh.n_vertices, 2 * hd.genus))
        np.add.at(per_vertex, mesh.halfedge_head, hd.halfedge_kappa_star)
        np.testing.assert_allclose(per_vertex, 0.0, atol=1e-12)

    def test_cocycles_are_antisymmetric(self):
        mesh = flat_torus(0.5 + 2j, 2).mesh
        hd = homology_basis(mesh)
        np.testing.assert_allclose(
            hd.halfedge_kappa[mesh.twin], -hd.halfedge_kappa
        )
        np.testing.assert_allclose(
            hd.halfedge_kappa_star[mesh.twin], -hd.halfedge_kappa_star
        )

    def test_dual_loops_match_basis_cycles(self):
        mesh = genus2_squares(4).mesh
        hd = homology_basis(mesh)
        eye = np.eye(2 * hd.genus, dtype=np.int64)
        for j, loop in enumerate(hd.dual_basis_loops):
            np.testing.assert_array_equal(loop_class(hd, loop, kind="dual"), eye[j])
            np.testing.assert_array_equal(
                loop_class(hd, push_to_primal(mesh, loop)), eye[j]
            )

    def test_intersection_with_dual_loops(self):
        surface = flat_torus(1j, 3)
        hd = homology_basis(surface.mesh, loops=surface.loops)
        alpha, beta = hd.basis_cycles
        self.assertEqual(intersection_number(surface.mesh, alpha, hd.dual_basis_loops[1]), 1)
        self.assertEqual(intersection_number(surface.mesh, beta, hd.dual_basis_loops[0]), -1)
        self.assertEqual(intersection_number(surface.mesh, alpha, hd.dual_basis_loops[0]), 0)
        self.assertIsInstance(intersection_number(surface.mesh, alpha, hd.dual_basis_loops[1]), int)


class LoopClassTests(SimpleTestCase):
    def setUp(self):
        self.surface = genus2_squares(4)
        self.hd = homology_basis(self.surface.mesh, loops=self.surface.loops)

    def test_face_boundary_is_null(self):
        for face in (0, 7, 23):
            boundary = [3 * face, 3 * face + 1, 3 * face + 2]
            np.testing.assert_array_equal(loop_class(self.hd, boundary), 0)

    def test_basis_cycles(self):
        for j, cycle in enumerate(self.hd.basis_cycles):
            expected = np.zeros(4, dtype=np.int64)
            expected[j] = 1
            np.testing.assert_array_equal(loop_class(self.hd, cycle), expected)

    def test_concatenation_adds(self):
        alpha1, alpha2 = self.surface.loops[:2]
        joined = np.concatenate([alpha1, alpha2])
        np.testing.assert_array_equal(loop_class(self.hd, joined), [1, 1, 0, 0])

    def test_reversal_negates(self):
        beta2 = self.surface.loops[3]
        reversed_class = loop_class(self.hd, reverse_loop(self.surface.mesh, beta2))
        np.testing.assert_array_equal(reversed_class, [0, 0, 0, -1])

    def test_not_closed(self):
        with self.assertRaises(NotClosed):
            loop_class(self.hd, self.surface.loops[3][:-1])

    def test_tree_choice_changes_kappa_by_a_coboundary(self):
        mesh = self.surface.mesh
        other = homology_basis(
            mesh, root_vertex=mesh.n_vertices - 1, root_face=mesh.n_faces - 1,
            loops=self.surface.loops,
        )
        probe = homology_basis(mesh, root_vertex=3, root_face=5)
        for cycle in probe.basis_cycles:
            np.testing.assert_array_equal(
                loop_class(self.hd, cycle), loop_class(other, cycle)
            )
