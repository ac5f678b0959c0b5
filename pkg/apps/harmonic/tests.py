import math
from dataclasses import replace

import numpy as np
from django.test import SimpleTestCase

from apps.gen.surfaces import (
    EQUILATERAL_ETA,
    flat_torus,
    genus2_squares,
    jitter_lengths,
    pyramid,
)
from apps.mesh.geometry import cotan_weights
from apps.mesh.io import parse_mesh
from apps.topology.homology import homology_basis

from .exceptions import MissingImaginaryPart, NotHarmonic, ZeroWeightEdge
from .fields import (
    MultiValuedField,
    constant_field,
    dirichlet_energy,
    dual_difference,
    dual_energy,
    edge_difference,
    energy_pairing,
    halfedge_du,
    halfedge_dv,
)
from .interpolation import (
    face_corner_values,
    interpolation_energy,
    random_disk,
    stokes_sides,
    triangle_interpolation_energy,
)
from .solvers import LaplaceSolver, conjugate_function, solve_harmonic, vertex_divergence


def setup_surface(surface):
    mesh = surface.mesh
    return mesh, cotan_weights(mesh), homology_basis(mesh, loops=surface.loops)


def random_field(mesh, genus, rng, imaginary=True):
    return MultiValuedField(
        u_base=rng.normal(size=mesh.n_vertices),
        p_re=rng.normal(size=2 * genus),
        v_base=rng.normal(size=mesh.n_faces) if imaginary else None,
        p_im=rng.normal(size=2 * genus) if imaginary else None,
    )


class TransportTests(SimpleTestCase):
    def setUp(self):
        self.mesh, self.w, self.hd = setup_surface(genus2_squares(4))
        self.rng = np.random.default_rng(5)

    def test_constant_field_has_no_differences(self):
        f = constant_field(self.mesh, 2, u=3.0, v=-1.0)
        np.testing.assert_allclose(halfedge_du(f, self.hd), 0.0)
        np.testing.assert_allclose(halfedge_dv(f, self.hd), 0.0)
        self.assertEqual(edge_difference(f, self.hd, 7), 0.0)

    def test_sum_along_basis_loops_reads_periods(self):
        f = random_field(self.mesh, 2, self.rng)
        du = halfedge_du(f, self.hd)
        dv = halfedge_dv(f, self.hd)
        for j in range(4):
            self.assertAlmostEqual(du[self.hd.basis_cycles[j]].sum(), f.p_re[j])
            self.assertAlmostEqual(dv[self.hd.dual_basis_loops[j]].sum(), f.p_im[j])

    def test_differences_are_antisymmetric(self):
        f = random_field(self.mesh, 2, self.rng)
        for he in (0, 4, 17):
            tw = int(self.mesh.twin[he])
            self.assertAlmostEqual(
                edge_difference(f, self.hd, tw), -edge_difference(f, self.hd, he)
            )
            self.assertAlmostEqual(
                dual_difference(f, self.hd, tw), -dual_difference(f, self.hd, he)
            )

    def test_missing_imaginary_part(self):
        f = random_field(self.mesh, 2, self.rng, imaginary=False)
        with self.assertRaises(MissingImaginaryPart):
            dual_difference(f, self.hd, 0)

    def test_one_vertex_torus_real_part(self):
        mesh, w, hd = setup_surface(flat_torus(1j, 1))
        f = MultiValuedField(u_base=[0.0], p_re=[1.0, 0.0])
        # half-edge 2 is the horizontal side of the lower face
        self.assertAlmostEqual(edge_difference(f, hd, 2), 1.0)
        self.assertAlmostEqual(edge_difference(f, hd, 0), 0.0)


class EnergyTests(SimpleTestCase):
    def test_constant_has_zero_energy(self):
        mesh, w, hd = setup_surface(flat_torus(1j, 3))
        self.assertEqual(dirichlet_energy(constant_field(mesh, 1, u=2.0), hd, w), 0.0)

    def test_real_part_of_z_on_square_torus(self):
        for n in (1, 2, 4):
            mesh, w, hd = setup_surface(flat_torus(1j, n))
            f = solve_harmonic(mesh, w, hd, [1.0, 0.0])
            self.assertAlmostEqual(dirichlet_energy(f, hd, w), 1.0, places=10)

    def test_real_and_imaginary_part_of_z_are_orthogonal(self):
        mesh, w, hd = setup_surface(flat_torus(1j, 3))
        f1 = solve_harmonic(mesh, w, hd, [1.0, 0.0])
        f2 = solve_harmonic(mesh, w, hd, [0.0, 1.0])
        self.assertAlmostEqual(energy_pairing(f1, f2, hd, w), 0.0, places=10)
        self.assertAlmostEqual(
            energy_pairing(f1, f1, hd, w), dirichlet_energy(f1, hd, w)
        )

    def test_dual_energy_needs_nonzero_weights(self):
        mesh, w, hd = setup_surface(flat_torus(1j, 2))
        f = constant_field(mesh, 1, v=0.0)
        with self.assertRaises(ZeroWeightEdge):
            dual_energy(f, hd, w)

    def test_energy_positivity_on_non_delaunay_meshes(self):
        rng = np.random.default_rng(17)
        for base in (flat_torus(1j, 4), genus2_squares(4)):
            surface = replace(base, mesh=jitter_lengths(base.mesh, rng, 0.08))
            mesh, w, hd = setup_surface(surface)
            self.assertTrue((w.c < 0).any())
            for _ in range(20):
                f = random_field(mesh, hd.genus, rng, imaginary=False)
                self.assertGreater(dirichlet_energy(f, hd, w), 0.0)

    def test_variational_principle(self):
        rng = np.random.default_rng(23)
        surface = genus2_squares(4)
        mesh = jitter_lengths(surface.mesh, rng, 0.05)
        w = cotan_weights(mesh)
        hd = homology_basis(mesh, loops=surface.loops)
        f = solve_harmonic(mesh, w, hd, rng.normal(size=4))
        energy = dirichlet_energy(f, hd, w)
        for _ in range(100):
            delta = MultiValuedField(
                u_base=rng.normal(scale=0.1, size=mesh.n_vertices), p_re=np.zeros(4)
            )
            self.assertGreaterEqual(
                dirichlet_energy(f + delta, hd, w), energy - 1e-12
            )


class SolverTests(SimpleTestCase):
    def test_zero_periods_give_zero(self):
        mesh, w, hd = setup_surface(genus2_squares(4))
        f = solve_harmonic(mesh, w, hd, np.zeros(4))
        np.testing.assert_allclose(f.u_base, 0.0)

    def test_linear_function_on_flat_torus(self):
        eta = 0.3 + 0.8j
        n = 4
        surface = flat_torus(eta, n)
        mesh, w, hd = setup_surface(surface)
        f = solve_harmonic(mesh, w, hd, [1.0, eta.real])
        du = halfedge_du(f, hd)
        # lower triangles have corners 0, 1/n, (1 + eta)/n; Du is the change of Re z
        lower = 3 * np.arange(0, mesh.n_faces, 2)
        np.testing.assert_allclose(du[lower + 2], 1 / n, atol=1e-10)
        np.testing.assert_allclose(du[lower], eta.real / n, atol=1e-10)
        np.testing.assert_allclose(du[lower + 1], -(1 + eta.real) / n, atol=1e-10)
        self.assertAlmostEqual(dirichlet_energy(f, hd, w), eta.imag, places=10)

    def test_harmonicity_and_anchor(self):
        rng = np.random.default_rng(2)
        mesh, w, hd = setup_surface(genus2_squares(6))
        f = solve_harmonic(mesh, w, hd, rng.normal(size=4), anchor_vertex=9)
        self.assertEqual(f.u_base[9], 0.0)
        divergence = vertex_divergence(mesh, w, halfedge_du(f, hd))
        np.testing.assert_allclose(divergence, 0.0, atol=1e-10)

    def test_linearity(self):
        rng = np.random.default_rng(8)
        mesh, w, hd = setup_surface(genus2_squares(4))
        solver = LaplaceSolver(mesh, w, hd)
        p1, p2 = rng.normal(size=4), rng.normal(size=4)
        u1, u2, u12 = (solver.solve(p) for p in (p1, p2, p1 + p2))
        np.testing.assert_allclose(u1 + u2, u12, atol=1e-10)
        block = solver.solve(np.column_stack([p1, p2]))
        np.testing.assert_allclose(block[:, 0], u1, atol=1e-12)


class ConjugateFunctionTests(SimpleTestCase):
    def test_zero_field(self):
        mesh, w, hd = setup_surface(flat_torus(1j, 2))
        f = conjugate_function(mesh, w, hd, constant_field(mesh, 1))
        np.testing.assert_allclose(f.v_base, 0.0)
        np.testing.assert_allclose(f.p_im, 0.0)

    def test_square_torus_periods(self):
        mesh, w, hd = setup_surface(flat_torus(1j, 3))
        f = conjugate_function(mesh, w, hd, solve_harmonic(mesh, w, hd, [1.0, 0.0]))
        np.testing.assert_allclose(f.p_im, [0.0, 1.0], atol=1e-10)
        np.testing.assert_allclose(f.b_periods, [1j], atol=1e-10)

    def test_cauchy_riemann_relation(self):
        rng = np.random.default_rng(4)
        mesh, w, hd = setup_surface(genus2_squares(4))
        f = conjugate_function(
            mesh, w, hd, solve_harmonic(mesh, w, hd, rng.normal(size=4)), anchor_face=3
        )
        self.assertEqual(f.v_base[3], 0.0)
        c = w.c[mesh.halfedge_edge]
        np.testing.assert_allclose(
            halfedge_dv(f, hd), c * halfedge_du(f, hd), atol=1e-10
        )

    def test_random_values_are_not_harmonic(self):
        rng = np.random.default_rng(6)
        mesh, w, hd = setup_surface(genus2_squares(4))
        f = random_field(mesh, 2, rng, imaginary=False)
        with self.assertRaises(NotHarmonic):
            conjugate_function(mesh, w, hd, f)

    def test_conjugate_functions_principle(self):
        for surface in (flat_torus(EQUILATERAL_ETA, 3), pyramid()):
            with self.subTest(surface=surface.name):
                mesh, w, hd = setup_surface(surface)
                f = conjugate_function(mesh, w, hd, solve_harmonic(mesh, w, hd, [0.7, -0.2]))
                self.assertAlmostEqual(
                    dual_energy(f, hd, w), dirichlet_energy(f, hd, w), places=9
                )


class InterpolationTests(SimpleTestCase):
    def test_equal_values(self):
        mesh = parse_mesh("1 1 1 1:0 1:2 1:1\n1 1 1 0:0 0:2 0:1")
        self.assertEqual(triangle_interpolation_energy(mesh, 0, [2.0, 2.0, 2.0]), 0.0)

    def test_right_isosceles(self):
        mesh = flat_torus(1j, 1).mesh
        # corner 1 of the lower face carries the right angle
        self.assertAlmostEqual(triangle_interpolation_energy(mesh, 0, [1.0, 0.0, 0.0]), 0.5)

    def test_equilateral(self):
        mesh = parse_mesh("1 1 1 1:0 1:2 1:1\n1 1 1 0:0 0:2 0:1")
        self.assertAlmostEqual(
            triangle_interpolation_energy(mesh, 0, [0.0, 1.0, 1.0]), 1 / math.sqrt(3)
        )

    def test_per_face_energies_add_up(self):
        rng = np.random.default_rng(12)
        surface = genus2_squares(4)
        mesh = jitter_lengths(surface.mesh, rng, 0.05)
        w = cotan_weights(mesh)
        hd = homology_basis(mesh, loops=surface.loops)
        for _ in range(5):
            f = random_field(mesh, 2, rng, imaginary=False)
            self.assertAlmostEqual(
                interpolation_energy(mesh, hd, f), dirichlet_energy(f, hd, w), places=9
            )

    def test_corner_values_close_up(self):
        rng = np.random.default_rng(1)
        mesh, w, hd = setup_surface(flat_torus(0.3 + 0.8j, 2))
        f = random_field(mesh, 1, rng, imaginary=False)
        du = halfedge_du(f, hd)
        for face in range(mesh.n_faces):
            a = face_corner_values(mesh, hd, f, face)
            self.assertAlmostEqual(a[2] - a[1], du[3 * face])


class StokesTests(SimpleTestCase):
    def test_random_disks(self):
        rng = np.random.default_rng(31)
        mesh, w, hd = setup_surface(genus2_squares(6))
        for _ in range(20):
            f = random_field(mesh, 2, rng, imaginary=False)
            f_prime = random_field(mesh, 2, rng)
            disk = random_disk(mesh, int(rng.integers(1, 30)), rng)
            lhs, rhs = stokes_sides(mesh, f, f_prime, hd, disk)
            self.assertAlmostEqual(lhs, rhs, delta=1e-9 * max(1.0, abs(lhs)))

    def test_disk_faces_are_distinct(self):
        rng = np.random.default_rng(0)
        mesh = genus2_squares(4).mesh
        disk = random_disk(mesh, 10, rng)
        faces = [face for face, _ in disk]
        self.assertEqual(len(faces), len(set(faces)))
        for face, attach in disk[1:]:
            self.assertEqual(attach // 3, face)
