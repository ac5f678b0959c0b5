"""
Discrete Abelian differentials, residues, chain integrals and the integrals
and differentials of the second and third kind.

An edge differential stores one value per unoriented edge, stated for the
edge's canonical half-edge; the opposite orientation carries the negated
value. The residue of a differential at a vertex is ``i`` times the number
reported by :func:`residues`.
"""

import logging
from dataclasses import dataclass
from functools import cached_property
from typing import NamedTuple

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import splu

from apps.harmonic.exceptions import MissingImaginaryPart, SolverFailure
from apps.harmonic.fields import edge_du, edge_dv, halfedge_du
from apps.mesh.conf import setting
from apps.mesh.exceptions import MeshValidationError
from apps.periods.integrals import CauchyRiemannSystem
from apps.topology.homology import signed_count

from .exceptions import BrokenChain, CoincidentPoles, MultiValued

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class EdgeDifferential:
    mesh: object
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.shape != (self.mesh.n_edges,):
            raise ValueError(
                f"Expected {self.mesh.n_edges} edge values, got shape {values.shape}."
            )
        object.__setattr__(self, "values", values)

    @cached_property
    def halfedge_values(self):
        return self.mesh.halfedge_sign * self.values[self.mesh.halfedge_edge]

    def at(self, he):
        return float(self.halfedge_values[he])

    def __neg__(self):
        return EdgeDifferential(self.mesh, -self.values)

    def __add__(self, other):
        return EdgeDifferential(self.mesh, self.values + other.values)

    def scaled(self, factor):
        return EdgeDifferential(self.mesh, factor * self.values)


@dataclass(frozen=True, eq=False)
class MeromorphicFunction:
    """Single-valued discrete function: ``re`` on vertices, ``im`` on faces."""

    re: np.ndarray
    im: np.ndarray

    @classmethod
    def from_field(cls, f, atol=1e-9):
        if not f.has_imaginary_part:
            raise MissingImaginaryPart("A meromorphic function needs an imaginary part.")
        periods = np.concatenate([f.p_re, f.p_im])
        scale = max(1.0, float(np.abs(f.u_base).max()), float(np.abs(f.v_base).max()))
        if periods.size and np.abs(periods).max() > atol * scale:
            raise MultiValued(
                f"Field has nonzero periods (max {np.abs(periods).max():.3e}); "
                "it is not single-valued."
            )
        return cls(re=np.array(f.u_base), im=np.array(f.v_base))


class Residues(NamedTuple):
    vertex: np.ndarray
    face: np.ndarray


def differential_of(f, hd):
    """``df(e) = Re f(h_e) - Re f(t_e)``, transported across the period cocycle."""
    return EdgeDifferential(hd.mesh, edge_du(f, hd))


def residues(omega, w):
    """
    Vertex residues (as real coefficients of ``i``) and face residues
    (counterclockwise boundary integrals) of ``omega``.
    """
    mesh = omega.mesh
    flux = w.c * omega.values
    vertex = np.bincount(mesh.edge_head, weights=flux, minlength=mesh.n_vertices)
    vertex -= np.bincount(mesh.edge_tail, weights=flux, minlength=mesh.n_vertices)
    faces = np.arange(3 * mesh.n_faces) // 3
    face = np.bincount(faces, weights=omega.halfedge_values, minlength=mesh.n_faces)
    return Residues(vertex=vertex, face=face)


def _check_primal_path(mesh, path):
    for k in range(len(path) - 1):
        if mesh.head(path[k]) != mesh.tail(path[k + 1]):
            raise BrokenChain(
                f"Half-edges {path[k]} and {path[k + 1]} are not consecutive.",
                params={"position": k},
            )


def faces_to_crossings(mesh, faces):
    """Crossings of a chain of faces; consecutive faces must share exactly one side."""
    crossings = []
    for k in range(len(faces) - 1):
        a, b = faces[k], faces[k + 1]
        sides = [he for he in mesh.face_halfedges(a) if mesh.twin[he] // 3 == b]
        if len(sides) != 1:
            reason = "share no side" if not sides else "share several sides; pass crossings instead"
            raise BrokenChain(f"Faces {a} and {b} {reason}.", params={"position": k})
        crossings.append(int(mesh.twin[sides[0]]))
    return crossings


def integrate(omega, path, kind="primal", w=None):
    """
    Integral of ``omega`` along a path.

    ``kind="primal"``: half-edges, the sum of values. ``kind="dual"``:
    crossings, each moving from the face ``A`` on its right across the side
    ``s`` of ``A`` and adding ``c(s) omega(s)``. ``kind="faces"``: a chain of
    faces, converted to crossings.
    """
    mesh = omega.mesh
    path = [int(x) for x in path]
    if kind == "primal":
        _check_primal_path(mesh, path)
        return float(sum(omega.halfedge_values[he] for he in path))
    if kind == "faces":
        path, kind = faces_to_crossings(mesh, path), "dual"
    if kind != "dual":
        raise ValueError(f"Unknown path kind '{kind}'.")
    if w is None:
        raise ValueError("Dual chain integrals need the edge weights.")
    for k in range(len(path) - 1):
        if path[k] // 3 != mesh.twin[path[k + 1]] // 3:
            raise BrokenChain(
                f"Crossings {path[k]} and {path[k + 1]} do not share a face.",
                params={"position": k},
            )
    total = 0.0
    for crossing in path:
        side = int(mesh.twin[crossing])
        total += w.c[mesh.halfedge_edge[side]] * omega.halfedge_values[side]
    return float(total)


def edge_residues(f, w, hd=None, mesh=None):
    """
    ``res_e f = Im f(r_e) - Im f(l_e) + c(e) (Re f(h_e) - Re f(t_e))`` on every
    canonical edge. Multi-valued fields use transported differences.
    """
    if isinstance(f, MeromorphicFunction):
        mesh = mesh or hd.mesh
        return (
            f.im[mesh.edge_right]
            - f.im[mesh.edge_left]
            + w.c * (f.re[mesh.edge_head] - f.re[mesh.edge_tail])
        )
    if not f.has_imaginary_part:
        raise MissingImaginaryPart("Residues need the imaginary part of the field.")
    return w.c * edge_du(f, hd) - edge_dv(f, hd)


def edge_residue(f, w, he, hd=None, mesh=None):
    mesh = mesh or hd.mesh
    values = edge_residues(f, w, hd=hd, mesh=mesh)
    return float(mesh.halfedge_sign[he] * values[mesh.halfedge_edge[he]])


def solve_second_kind(
    mesh, w, hd, he, residue=1.0, anchor_vertex=0, anchor_face=0, system=None
):
    """
    The integral of the second kind with vanishing A-periods and a single pole
    at half-edge ``he`` with residue ``residue``.
    """
    if system is None:
        system = CauchyRiemannSystem(
            mesh, w, hd, anchor_vertex=anchor_vertex, anchor_face=anchor_face
        )
    rhs = np.zeros(mesh.n_edges)
    rhs[mesh.halfedge_edge[he]] = mesh.halfedge_sign[he] * residue
    return system.solve(residues=rhs)


def second_kind_b_periods(hd, he, basis, dual_basis):
    """
    B-periods of the second-kind integral with unit residue at ``he``, read off
    the normalized first-kind integrals: ``B_l = -Du*_l(he) - i Du_l(he)``
    where ``Du_l`` and ``Du*_l`` are the differences of ``basis[l]`` and
    ``dual_basis[l]``.
    """
    du = np.array([halfedge_du(f, hd)[he] for f in basis])
    du_star = np.array([halfedge_du(f, hd)[he] for f in dual_basis])
    return -du_star - 1j * du


class ThirdKindSystem:
    """
    The square system for differentials of the third kind with poles in
    vertices (``kind="vertex"``) or faces (``kind="face"``), with the
    equation of pole ``omit`` left out. Solving for pole ``z`` gives the
    differential with residue ``+1`` at ``z`` and ``-1`` at ``omit`` (``i``
    and ``-i`` for vertices), all other residues and all real and imaginary
    A-periods zero. One factorization serves every ``z``.
    """

    def __init__(self, mesh, w, hd, kind="vertex", omit=0, tol=None):
        if kind not in ("vertex", "face"):
            raise ValueError(f"Unknown pole kind '{kind}'.")
        count = mesh.n_vertices if kind == "vertex" else mesh.n_faces
        if not 0 <= omit < count:
            raise MeshValidationError(f"There is no {kind} {omit}.", code="invalid_pole")
        self.mesh, self.weights, self.hd = mesh, w, hd
        self.kind, self.omit = kind, omit
        self.tol = setting("PERIODS_SOLVER_TOL", tol)
        V, F, E, g = mesh.n_vertices, mesh.n_faces, mesh.n_edges, hd.genus
        c = w.c
        edges = np.arange(E)

        vertex_rows = sp.csr_matrix(
            (
                np.concatenate([c, -c]),
                (np.concatenate([mesh.edge_head, mesh.edge_tail]), np.tile(edges, 2)),
            ),
            shape=(V, E),
        )
        halfedges = np.arange(3 * mesh.n_faces)
        face_rows = sp.csr_matrix(
            (mesh.halfedge_sign, (halfedges // 3, mesh.halfedge_edge)), shape=(F, E)
        )
        keep_vertices = np.flatnonzero(np.arange(V) != (omit if kind == "vertex" else V - 1))
        keep_faces = np.flatnonzero(np.arange(F) != (omit if kind == "face" else F - 1))
        real_periods = np.array(
            [signed_count(mesh, loop) for loop in hd.alpha_cycles]
        )
        imaginary_periods = np.array(
            [signed_count(mesh, loop) * c for loop in hd.dual_basis_loops[:g]]
        )
        self.matrix = sp.vstack(
            [
                vertex_rows[keep_vertices],
                face_rows[keep_faces],
                sp.csr_matrix(real_periods),
                sp.csr_matrix(imaginary_periods),
            ]
        ).tocsc()
        if self.matrix.shape != (E, E):
            raise SolverFailure(f"Third-kind system has shape {self.matrix.shape}.")
        self._offset = 0 if kind == "vertex" else len(keep_vertices)
        self._rows = keep_vertices if kind == "vertex" else keep_faces
        self._lu = splu(self.matrix)
        logger.info(f"Factorized {kind} third-kind system of size {E} for {mesh!r}")

    def solve(self, z):
        count = self.mesh.n_vertices if self.kind == "vertex" else self.mesh.n_faces
        if not 0 <= z < count:
            raise MeshValidationError(f"There is no {self.kind} {z}.", code="invalid_pole")
        if z == self.omit:
            raise CoincidentPoles(f"Both poles are {self.kind} {z}.")
        rhs = np.zeros(self.matrix.shape[0])
        rhs[self._offset + int(np.searchsorted(self._rows, z))] = 1.0
        x = self._lu.solve(rhs)
        residual = np.linalg.norm(self.matrix @ x - rhs)
        if residual > self.tol:
            raise SolverFailure(
                f"Third-kind solve missed the tolerance: residual {residual:.3e}."
            )
        return EdgeDifferential(self.mesh, x)


def solve_third_kind(mesh, w, hd, pole_pair, kind="vertex", tol=None):
    """``d phi_{z,w}``: residues ``i, -i`` (vertices) or ``1, -1`` (faces) at ``z, w``."""
    z, other = (int(p) for p in pole_pair)
    if z == other:
        raise CoincidentPoles(f"Both poles are {kind} {z}.")
    return ThirdKindSystem(mesh, w, hd, kind=kind, omit=other, tol=tol).solve(z)

