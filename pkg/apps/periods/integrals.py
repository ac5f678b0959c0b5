"""
Discrete Abelian integrals of the first kind and the energy matrix.
"""

import logging

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import splu

from apps.harmonic.fields import MultiValuedField
from apps.harmonic.solvers import (
    LaplaceSolver,
    conjugate_function,
    incidence_matrix,
)
from apps.mesh.conf import setting

from .bundle import period_matrices_from_energy
from .exceptions import ConsistencyFailure

logger = logging.getLogger(__name__)


def basis_differences(solver):
    """``Du`` on every edge for the ``2g`` harmonic functions with unit real periods."""
    hd = solver.hd
    u = solver.solve(np.eye(2 * hd.genus))
    return incidence_matrix(hd.mesh) @ u + hd.kappa


def energy_matrix(mesh, w, hd, solver=None, tol=None):
    """Gram matrix of Dirichlet energies of the ``2g`` unit-period harmonic functions."""
    solver = solver or LaplaceSolver(mesh, w, hd, tol=tol)
    du = basis_differences(solver)
    energy = du.T @ (w.c[:, None] * du)
    return (energy + energy.T) / 2


def _complex_periods(A, genus):
    A = np.asarray(A, dtype=complex).reshape(-1)
    if len(A) != genus:
        raise ValueError(f"Expected {genus} A-periods, got {len(A)}.")
    return A


def solve_first_kind(
    mesh,
    w,
    hd,
    A,
    anchor_vertex=0,
    anchor_face=0,
    bundle=None,
    solver=None,
    cross_check=False,
    tol=None,
    rtol=None,
):
    """
    The discrete Abelian integral of the first kind with A-periods ``A``.

    The real B-periods follow from the period matrices,
    ``Re B = Re pi_t Re A - Im pi_t* Im A``; the real part is then the harmonic
    function with periods ``(Re A, Re B)`` and the imaginary part its conjugate.
    The imaginary A-periods of the result must reproduce ``Im A``. With
    ``cross_check`` the square Cauchy-Riemann system is solved as well and
    both results must agree.
    """
    g = hd.genus
    A = _complex_periods(A, g)
    rtol = setting("PERIODS_IDENTITY_RTOL", rtol)
    if solver is None or solver.anchor_vertex != anchor_vertex:
        solver = LaplaceSolver(mesh, w, hd, anchor_vertex=anchor_vertex, tol=tol)
    if bundle is None:
        bundle = period_matrices_from_energy(energy_matrix(mesh, w, hd, solver=solver))

    re_b = bundle.pi_t.real @ A.real - bundle.pi_t_star.imag @ A.imag
    p_re = np.concatenate([A.real, re_b])
    f = conjugate_function(
        mesh, w, hd, solver.fields(p_re)[0], anchor_face=anchor_face
    )

    scale = max(1.0, float(np.abs(A).max()))
    defect = float(np.abs(f.p_im[:g] - A.imag).max())
    if defect > rtol * scale:
        raise ConsistencyFailure(
            f"Imaginary A-periods of the integral miss the prescription by {defect:.3e}."
        )

    if cross_check:
        direct = CauchyRiemannSystem(
            mesh, w, hd, anchor_vertex=anchor_vertex, anchor_face=anchor_face
        ).solve(A)
        b_defect = float(np.abs(direct.b_periods - f.b_periods).max())
        if b_defect > rtol * scale:
            raise ConsistencyFailure(
                f"Energy route and Cauchy-Riemann system disagree on B-periods by {b_defect:.3e}."
            )
    return f


def first_kind_basis(mesh, w, hd, bundle, solver, dual=False, anchor_face=0):
    """
    The normalized integrals with A-periods ``delta_kl`` (or ``i delta_kl`` when
    ``dual``), one per ``l``, built from the period matrices without further
    consistency solves.
    """
    g = hd.genus
    eye = np.eye(g)
    if dual:
        p_re = np.vstack([np.zeros((g, g)), -bundle.pi_t_star.imag])
    else:
        p_re = np.vstack([eye, bundle.pi_t.real])
    return [
        conjugate_function(mesh, w, hd, field, anchor_face=anchor_face)
        for field in solver.fields(p_re)
    ]


class CauchyRiemannSystem:
    """
    The square linear system for integrals with prescribed A-periods and edge
    residues. Unknowns are ``u`` on vertices, ``v`` on faces, ``Re B`` and
    ``Im B``; there is one equation per edge,

        c(e) Du(e) - Dv(e) = r(e)

    plus ``u(anchor_vertex) = 0`` and ``v(anchor_face) = 0``. Residues
    ``r = 0`` give first-kind integrals, a unit residue on a single edge gives
    the second-kind integral with that pole.
    """

    def __init__(self, mesh, w, hd, anchor_vertex=0, anchor_face=0):
        self.mesh, self.weights, self.hd = mesh, w, hd
        self.anchor_vertex, self.anchor_face = anchor_vertex, anchor_face
        g = hd.genus
        V, F, E = mesh.n_vertices, mesh.n_faces, mesh.n_edges
        self._g = g
        c = w.c
        edges = np.arange(E)

        blocks = [
            (edges, mesh.edge_head, c),
            (edges, mesh.edge_tail, -c),
            (edges, V + mesh.edge_left, -np.ones(E)),
            (edges, V + mesh.edge_right, np.ones(E)),
        ]
        for k in range(g):
            blocks.append((edges, np.full(E, V + F + k), c * hd.kappa[:, g + k]))
            blocks.append((edges, np.full(E, V + F + g + k), -hd.kappa_star[:, g + k]))
        blocks.append((np.array([E]), np.array([anchor_vertex]), np.ones(1)))
        blocks.append((np.array([E + 1]), np.array([V + anchor_face]), np.ones(1)))

        rows = np.concatenate([b[0] for b in blocks])
        cols = np.concatenate([b[1] for b in blocks])
        data = np.concatenate([b[2] for b in blocks])
        size = V + F + 2 * g
        if size != E + 2:
            raise ConsistencyFailure(f"Cauchy-Riemann system is not square: {E + 2} x {size}.")
        self.matrix = sp.csc_matrix((data, (rows, cols)), shape=(E + 2, size))
        self._lu = splu(self.matrix)
        logger.info(f"Factorized Cauchy-Riemann system of size {size} for {mesh!r}")

    def solve(self, A=None, residues=None):
        """Integral with A-periods ``A`` (default 0) and edge residues ``residues``."""
        mesh, hd, g = self.mesh, self.hd, self._g
        V, F, E = mesh.n_vertices, mesh.n_faces, mesh.n_edges
        A = np.zeros(g, dtype=complex) if A is None else _complex_periods(A, g)
        rhs = np.zeros(E + 2)
        if residues is not None:
            rhs[:E] = residues
        rhs[:E] -= self.weights.c * (hd.kappa[:, :g] @ A.real)
        rhs[:E] += hd.kappa_star[:, :g] @ A.imag
        x = self._lu.solve(rhs)
        return MultiValuedField(
            u_base=x[:V],
            p_re=np.concatenate([A.real, x[V + F : V + F + g]]),
            v_base=x[V : V + F],
            p_im=np.concatenate([A.imag, x[V + F + g :]]),
        )
