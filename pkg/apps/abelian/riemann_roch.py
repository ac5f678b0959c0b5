"""
Dimensions of the spaces in the discrete Riemann-Roch identity

    l(-D) = deg D - 2g + 2 + i(D)

for admissible divisors ``D``. ``l(-D)`` counts meromorphic functions with
poles in the edges of ``D``, vanishing real part at its vertices and
vanishing imaginary part at its faces; ``i(D)`` counts differentials of the
third kind vanishing at the edges of ``D`` with residues only at its vertices
and faces.
"""

import logging
from dataclasses import asdict, dataclass

import numpy as np
import scipy.linalg

from apps.harmonic.fields import edge_du
from apps.harmonic.solvers import LaplaceSolver
from apps.mesh.conf import setting
from apps.periods.bundle import period_matrices_from_energy
from apps.periods.integrals import energy_matrix, first_kind_basis

from .differentials import ThirdKindSystem
from .divisors import check_admissible
from .exceptions import RankAmbiguous, TooLarge

logger = logging.getLogger(__name__)


def numerical_rank(matrix, cutoff=None, gap=None):
    """
    Rank from singular values: those above ``cutoff * sigma_max`` count, and
    the last kept value must exceed the first dropped one by ``gap``.
    """
    cutoff = setting("PERIODS_RANK_CUTOFF", cutoff)
    gap = setting("PERIODS_RANK_GAP", gap)
    matrix = np.atleast_2d(np.asarray(matrix, dtype=float))
    if matrix.size == 0:
        return 0
    sigma = scipy.linalg.svd(matrix, compute_uv=False)
    if sigma[0] == 0:
        return 0
    rank = int(np.sum(sigma > cutoff * sigma[0]))
    if rank < len(sigma) and sigma[rank] > 0 and sigma[rank - 1] / sigma[rank] < gap:
        raise RankAmbiguous(
            f"Singular values {sigma[rank - 1]:.3e} and {sigma[rank]:.3e} are too close "
            f"to separate rank {rank} from {rank + 1}."
        )
    return rank


def _normalized(rows):
    """Scale each full-mesh row by its largest magnitude."""
    rows = np.atleast_2d(np.asarray(rows, dtype=float))
    scale = np.abs(rows).max(axis=1, keepdims=True)
    scale[scale == 0] = 1.0
    return rows / scale


@dataclass(frozen=True)
class RiemannRochResult:
    l_minus_d: int
    i_d: int
    degree: int
    genus: int
    rank: int
    n_rows: int
    identity_holds: bool

    def as_dict(self):
        return asdict(self)


def pole_rows(mesh, w, hd, divisor, bundle=None, solver=None, tol=None):
    """
    Full-mesh rows of the Riemann-Roch system: the ``2g`` first-kind
    differentials, then the third-kind differentials joining the first zero
    vertex (face) of ``divisor`` to each other one.
    """
    solver = solver or LaplaceSolver(mesh, w, hd, tol=tol)
    if bundle is None:
        bundle = period_matrices_from_energy(energy_matrix(mesh, w, hd, solver=solver))
    rows = [
        edge_du(f, hd)
        for dual in (False, True)
        for f in first_kind_basis(mesh, w, hd, bundle, solver, dual=dual)
    ]
    for kind, support in (("vertex", divisor.zero_vertices), ("face", divisor.zero_faces)):
        if len(support) < 2:
            continue
        system = ThirdKindSystem(mesh, w, hd, kind=kind, omit=int(support[0]), tol=tol)
        rows.extend(system.solve(int(z)).values for z in support[1:])
    return np.array(rows)


def riemann_roch(mesh, w, hd, divisor, bundle=None, solver=None, tol=None, cutoff=None, gap=None):
    check_admissible(divisor)
    poles = divisor.poles
    rows = pole_rows(mesh, w, hd, divisor, bundle=bundle, solver=solver, tol=tol)
    matrix = _normalized(rows)[:, poles]
    rank = numerical_rank(matrix, cutoff=cutoff, gap=gap) if len(poles) else 0

    constants = int(len(divisor.zero_vertices) == 0) + int(len(divisor.zero_faces) == 0)
    l_minus_d = len(poles) - rank + constants
    i_d = len(rows) - rank
    degree = divisor.degree
    holds = l_minus_d == degree - 2 * hd.genus + 2 + i_d
    if not holds:
        logger.warning(
            f"Riemann-Roch identity fails: l(-D) = {l_minus_d}, deg D = {degree}, "
            f"i(D) = {i_d}, g = {hd.genus}"
        )
    return RiemannRochResult(
        l_minus_d=l_minus_d,
        i_d=i_d,
        degree=degree,
        genus=hd.genus,
        rank=rank,
        n_rows=len(rows),
        identity_holds=holds,
    )


def direct_i_dimension(mesh, w, divisor, limit=None, cutoff=None, gap=None):
    """
    ``i(D)`` as the nullity of the constraints on edge functions: zero at the
    poles of ``D``, zero residue at every vertex and face outside its support.
    Dense; meshes above ``PERIODS_DENSE_EDGE_LIMIT`` edges are refused.
    """
    limit = setting("PERIODS_DENSE_EDGE_LIMIT", limit)
    check_admissible(divisor)
    E = mesh.n_edges
    if E > limit:
        raise TooLarge(f"Dense nullity needs at most {limit} edges, the mesh has {E}.")

    vertex_rows = np.zeros((mesh.n_vertices, E))
    np.add.at(vertex_rows, (mesh.edge_head, np.arange(E)), w.c)
    np.add.at(vertex_rows, (mesh.edge_tail, np.arange(E)), -w.c)
    face_rows = np.zeros((mesh.n_faces, E))
    np.add.at(
        face_rows,
        (np.arange(3 * mesh.n_faces) // 3, mesh.halfedge_edge),
        mesh.halfedge_sign,
    )
    constraints = np.vstack(
        [
            np.eye(E)[divisor.poles],
            vertex_rows[divisor.vertex == 0],
            face_rows[divisor.face == 0],
        ]
    )
    return E - numerical_rank(_normalized(constraints), cutoff=cutoff, gap=gap)
