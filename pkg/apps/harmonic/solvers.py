import logging
from collections import deque

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import cg, splu

from apps.mesh.conf import setting

from .exceptions import NotHarmonic, SolverFailure
from .fields import MultiValuedField, halfedge_du

logger = logging.getLogger(__name__)


def incidence_matrix(mesh):
    """Edge-vertex incidence, ``+1`` at the head and ``-1`` at the tail."""
    rows = np.repeat(np.arange(mesh.n_edges), 2)
    cols = np.column_stack([mesh.edge_head, mesh.edge_tail]).ravel()
    data = np.tile([1.0, -1.0], mesh.n_edges)
    return sp.csr_matrix((data, (rows, cols)), shape=(mesh.n_edges, mesh.n_vertices))


def cotan_laplacian(mesh, w):
    G = incidence_matrix(mesh)
    return (G.T @ sp.diags(w.c) @ G).tocsc()


class LaplaceSolver:
    """
    Factorized cotan Laplacian with the anchor vertex pinned.

    One sparse LU factorization serves every period vector; :meth:`solve`
    takes a single vector of length ``2g`` or a ``2g x k`` block of them.
    """

    def __init__(self, mesh, w, hd, anchor_vertex=0, tol=None):
        self.mesh = mesh
        self.weights = w
        self.hd = hd
        self.anchor_vertex = anchor_vertex
        self.tol = setting("PERIODS_SOLVER_TOL", tol)

        G = incidence_matrix(mesh)
        weighted = sp.diags(w.c) @ G
        laplacian = (G.T @ weighted).tocsc()
        self._rhs = -(weighted.T @ hd.kappa)
        self._keep = np.flatnonzero(np.arange(mesh.n_vertices) != anchor_vertex)
        self._reduced = laplacian[self._keep][:, self._keep].tocsc()
        self._lu = splu(self._reduced) if len(self._keep) else None
        logger.info(
            f"Factorized cotan Laplacian of size {len(self._keep)} for {mesh!r}"
        )

    def _refine(self, rhs, x):
        columns = []
        for k in range(rhs.shape[1]):
            b = rhs[:, k]
            if np.linalg.norm(self._reduced @ x[:, k] - b) <= self.tol * np.linalg.norm(b):
                columns.append(x[:, k])
                continue
            logger.warning(
                "Direct solve missed the residual tolerance; refining with conjugate gradients."
            )
            refined, info = cg(self._reduced, b, x0=x[:, k], rtol=self.tol, atol=0.0)
            residual = np.linalg.norm(self._reduced @ refined - b)
            if info != 0 or residual > 10 * self.tol * np.linalg.norm(b):
                raise SolverFailure(
                    f"Laplace solve did not converge: relative residual "
                    f"{residual / np.linalg.norm(b):.3e} (cg info {info})."
                )
            columns.append(refined)
        return np.column_stack(columns)

    def solve(self, periods):
        """Vertex values of the harmonic functions with real periods ``periods``."""
        periods = np.asarray(periods, dtype=float)
        single = periods.ndim == 1
        block = periods.reshape(len(periods), -1)
        u = np.zeros((self.mesh.n_vertices, block.shape[1]))
        if self._lu is not None:
            rhs = (self._rhs @ block)[self._keep]
            x = self._lu.solve(rhs)
            u[self._keep] = self._refine(rhs, x)
        return u[:, 0] if single else u

    def fields(self, periods):
        """One :class:`MultiValuedField` per column of ``periods``."""
        periods = np.asarray(periods, dtype=float).reshape(2 * self.hd.genus, -1)
        u = self.solve(periods)
        return [
            MultiValuedField(u_base=u[:, k], p_re=periods[:, k])
            for k in range(periods.shape[1])
        ]


def vertex_divergence(mesh, w, du):
    """``sum_{e: t_e = z} c(e) Du(e)`` at every vertex ``z``."""
    flux = w.c[mesh.halfedge_edge] * du
    return np.bincount(mesh.halfedge_tail, weights=flux, minlength=mesh.n_vertices)


def solve_harmonic(mesh, w, hd, p_re, anchor_vertex=0, tol=None, solver=None):
    """
    The discrete harmonic multi-valued function with real periods ``p_re``,
    normalized by ``u(anchor_vertex) = 0``.
    """
    if solver is None or solver.anchor_vertex != anchor_vertex:
        solver = LaplaceSolver(mesh, w, hd, anchor_vertex=anchor_vertex, tol=tol)
    return solver.fields(p_re)[0]


def conjugate_function(mesh, w, hd, f_real, anchor_face=0, rtol=None):
    """
    Complete a discrete harmonic ``f_real`` to an analytic field: find ``v`` and
    imaginary periods with ``Dv(e) = c(e) Du(e)`` on every edge and
    ``v(anchor_face) = 0``.
    """
    rtol = setting("PERIODS_CONJUGATE_RTOL", rtol)
    du = halfedge_du(f_real, hd)
    tau = w.c[mesh.halfedge_edge] * du
    scale = float(np.abs(tau).max()) or 1.0

    divergence = vertex_divergence(mesh, w, du)
    worst = int(np.argmax(np.abs(divergence)))
    if abs(divergence[worst]) > rtol * scale:
        raise NotHarmonic(
            f"c * Du is not closed around vertex {worst}: "
            f"divergence {divergence[worst]:.3e} against scale {scale:.3e}."
        )

    p_im = np.array([tau[loop].sum() for loop in hd.dual_basis_loops])
    sigma = tau - hd.halfedge_kappa_star @ p_im

    v = np.full(mesh.n_faces, np.nan)
    v[anchor_face] = 0.0
    queue = deque([anchor_face])
    while queue:
        face = queue.popleft()
        for he in mesh.face_halfedges(face):
            crossing = int(mesh.twin[he])
            other = crossing // 3
            if np.isnan(v[other]):
                v[other] = v[face] + sigma[crossing]
                queue.append(other)

    f = f_real.with_imaginary_part(v, p_im)
    faces = np.arange(3 * mesh.n_faces) // 3
    defect = v[faces] - v[mesh.twin // 3] + hd.halfedge_kappa_star @ p_im - tau
    if np.abs(defect).max() > rtol * scale:
        he = int(np.argmax(np.abs(defect)))
        raise NotHarmonic(
            f"Conjugate integration is inconsistent across half-edge {he}: "
            f"defect {defect[he]:.3e}."
        )
    return f
