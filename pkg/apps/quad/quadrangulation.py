"""
Delaunay-Voronoi quadrangulation of a Delaunay triangle complex.

Every edge ``e`` of the mesh becomes one quad whose corners, listed
counterclockwise, are ``t_e``, the circumcenter of the right face ``r_e``,
``h_e`` and the circumcenter of the left face ``l_e``. Mesh vertices are the
black quad vertices and faces (through their circumcenters) the white ones.
A quad's chart is obtained by developing its two triangles into the plane
with ``t_e`` at ``0`` and ``h_e`` at ``|e|``.
"""

import logging
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from apps.abelian.exceptions import MultiValued
from apps.harmonic.exceptions import MissingImaginaryPart
from apps.mesh.conf import setting
from apps.mesh.geometry import DELAUNAY_SLACK, opposite_angle_sums
from apps.periods.exceptions import ConsistencyFailure
from apps.periods.integrals import first_kind_basis

from .exceptions import DegenerateDiagonal, NonPositiveQuadArea, NotDelaunay

logger = logging.getLogger(__name__)

AREA_RTOL = 1e-12
AREA_SUM_RTOL = 1e-10


def face_charts(mesh):
    """
    Planar corner positions of every face: corner 0 at the origin, corner 1
    on the positive real axis, corner 2 in the upper half plane.
    """
    lengths, angles = mesh.lengths, mesh.angles
    charts = np.zeros((mesh.n_faces, 3), dtype=complex)
    charts[:, 1] = lengths[:, 2]
    charts[:, 2] = lengths[:, 1] * np.exp(1j * angles[:, 0])
    return charts


class Circumcenters(NamedTuple):
    center: np.ndarray
    radius: np.ndarray
    h_prime: float


def _check_delaunay(mesh, strict):
    margin = np.pi - opposite_angle_sums(mesh)
    worst = float(margin.min()) if len(margin) else np.inf
    if (strict and worst <= DELAUNAY_SLACK) or worst < -DELAUNAY_SLACK:
        bad = int(np.sum(margin <= DELAUNAY_SLACK if strict else margin < -DELAUNAY_SLACK))
        raise NotDelaunay(
            f"{bad} edges violate the Delaunay condition (margin {worst:.3e}).",
            params={"margin": worst},
        )
    return worst


def circumcenters(mesh, strict=True):
    """
    Circumcenter of every face in its own chart (see :func:`face_charts`),
    the circumradii and ``h' = 2 max R``. With ``strict`` the opposite angles
    of every edge must sum to strictly less than pi.
    """
    _check_delaunay(mesh, strict)
    charts = face_charts(mesh)
    bx = charts[:, 1].real
    c = charts[:, 2]
    center = bx / 2 + 1j * (np.abs(c) ** 2 - c.real * bx) / (2 * c.imag)
    radius = mesh.lengths[:, 0] / (2 * np.sin(mesh.angles[:, 0]))
    return Circumcenters(center=center, radius=radius, h_prime=float(2 * radius.max()))


def _develop(mesh, charts, halfedges, points):
    """Move face-chart ``points`` into the chart of each half-edge: tail at 0, head at its length."""
    faces, sides = np.divmod(halfedges, 3)
    tail = charts[faces, (sides + 1) % 3]
    head = charts[faces, (sides + 2) % 3]
    length = np.abs(head - tail)
    return (points - tail) * np.conj(head - tail) / length


def oriented_area(points):
    """Shoelace area of closed polygons given as rows of complex corners."""
    following = np.roll(points, -1, axis=-1)
    return 0.5 * np.sum((np.conj(points) * following).imag, axis=-1)


@dataclass(frozen=True, eq=False)
class QuadSurface:
    """
    ``points[e]`` holds the chart of the quad of edge ``e`` as the complex
    corners ``(t_e, r_e*, h_e, l_e*)``.
    """

    mesh: object
    points: np.ndarray
    areas: np.ndarray
    circumradius: np.ndarray
    h_prime: float

    @property
    def n_quads(self):
        return len(self.points)

    @property
    def corners(self):
        """``(kind, index)`` of the four corners of every quad."""
        mesh = self.mesh
        return np.stack(
            [mesh.edge_tail, mesh.edge_right, mesh.edge_head, mesh.edge_left], axis=1
        )

    @property
    def total_area(self):
        return float(self.areas.sum())

    def as_dict(self):
        quads = [
            {
                "edge": e,
                "corners": [
                    ["black", int(t)],
                    ["white", int(r)],
                    ["black", int(h)],
                    ["white", int(l)],
                ],
                "chart": [[float(z.real), float(z.imag)] for z in self.points[e]],
                "area": float(self.areas[e]),
            }
            for e, (t, r, h, l) in enumerate(self.corners)
        ]
        return {
            "n_black": self.mesh.n_vertices,
            "n_white": self.mesh.n_faces,
            "h_prime": self.h_prime,
            "total_area": self.total_area,
            "quads": quads,
        }


def build_quad_surface(mesh, w):
    """
    Quadrangulate ``mesh``. Meshes with an edge whose opposite angles sum
    past pi are rejected with :class:`NotDelaunay`; edges on the boundary
    case produce flat quads and fail with :class:`NonPositiveQuadArea`.
    """
    centers = circumcenters(mesh, strict=False)
    charts = face_charts(mesh)
    first = mesh.edge_halfedge
    second = mesh.twin[first]
    length = mesh.edge_lengths

    points = np.empty((mesh.n_edges, 4), dtype=complex)
    points[:, 0] = 0.0
    points[:, 1] = length - _develop(mesh, charts, second, centers.center[second // 3])
    points[:, 2] = length
    points[:, 3] = _develop(mesh, charts, first, centers.center[first // 3])

    areas = oriented_area(points)
    flat = areas <= AREA_RTOL * length**2
    if flat.any():
        raise NonPositiveQuadArea(
            f"{int(flat.sum())} quads have non-positive area, first at edge "
            f"{int(np.flatnonzero(flat)[0])}."
        )

    # |e|^2 (cot a + cot b) / 4 with c(e) the mean of the two cotangents
    expected = length**2 * w.c / 2
    scale = max(1.0, float(np.abs(expected).max()))
    if not np.allclose(areas, expected, rtol=0.0, atol=setting("PERIODS_IDENTITY_RTOL") * scale):
        raise ConsistencyFailure("Quad chart areas disagree with the cotan weights.")
    if abs(areas.sum() - mesh.total_area) > AREA_SUM_RTOL * mesh.total_area:
        raise ConsistencyFailure(
            f"Quads cover area {areas.sum():.12g}, the surface has {mesh.total_area:.12g}."
        )

    logger.info(f"Built {mesh.n_edges} quads for {mesh!r}, h' = {centers.h_prime:.4g}")
    return QuadSurface(
        mesh=mesh,
        points=points,
        areas=areas,
        circumradius=centers.radius,
        h_prime=centers.h_prime,
    )


@dataclass(frozen=True, eq=False)
class QuadFunction:
    """
    Complex function on quad vertices: ``black`` on mesh vertices, ``white``
    on faces, with separate periods ``(A_1..A_g, B_1..B_g)`` for each color.
    """

    black: np.ndarray
    white: np.ndarray
    black_periods: np.ndarray
    white_periods: np.ndarray

    @property
    def genus(self):
        return len(self.black_periods) // 2

    def scaled(self, factor):
        return QuadFunction(
            black=factor * self.black,
            white=factor * self.white,
            black_periods=factor * self.black_periods,
            white_periods=factor * self.white_periods,
        )

    def __add__(self, other):
        return QuadFunction(
            black=self.black + other.black,
            white=self.white + other.white,
            black_periods=self.black_periods + other.black_periods,
            white_periods=self.white_periods + other.white_periods,
        )


def to_quad_function(f):
    """``u`` on the black vertices and ``i v`` on the white ones."""
    if not f.has_imaginary_part:
        raise MissingImaginaryPart("A quad function needs both parts of the field.")
    return QuadFunction(
        black=f.u_base.astype(complex),
        white=1j * f.v_base,
        black_periods=f.p_re.astype(complex),
        white_periods=1j * f.p_im,
    )


def quad_diagonals(Q, F, hd=None):
    """
    ``f(z1) - f(z3)`` and ``f(z2) - f(z4)`` on every quad, lifted across the
    period cocycles of ``hd``. Without ``hd`` the function must be single-valued.
    """
    mesh = Q.mesh
    first = mesh.edge_halfedge
    d13 = F.black[mesh.edge_tail] - F.black[mesh.edge_head]
    d24 = F.white[mesh.edge_right] - F.white[mesh.edge_left]
    if hd is not None:
        d13 = d13 - hd.halfedge_kappa[first] @ F.black_periods
        d24 = d24 - hd.halfedge_kappa_star[first] @ F.white_periods
    elif np.any(F.black_periods) or np.any(F.white_periods):
        raise MultiValued("A multi-valued quad function needs its homology data.")
    return d13, d24


def _diagonals(points):
    first = points[..., 0] - points[..., 2]
    second = points[..., 1] - points[..., 3]
    if np.any(first == 0) or np.any(second == 0):
        raise DegenerateDiagonal("A quad has a diagonal of zero length.")
    return first, second


def diagonal_residual(points, values):
    """Difference of the two diagonal quotients for quads given by corner points and values."""
    points = np.asarray(points, dtype=complex)
    values = np.asarray(values, dtype=complex)
    first, second = _diagonals(points)
    return (values[..., 0] - values[..., 2]) / first - (values[..., 1] - values[..., 3]) / second


def quad_analyticity_residuals(Q, F, hd=None):
    """
    ``(f(z1) - f(z3)) / (z1 - z3) - (f(z2) - f(z4)) / (z2 - z4)`` per quad;
    zero exactly where ``F`` is discrete analytic.
    """
    first, second = _diagonals(Q.points)
    d13, d24 = quad_diagonals(Q, F, hd)
    return d13 / first - d24 / second


def quad_bilinear_sides(Q, F, F_prime, hd):
    """
    Both sides of the bilinear identity on the quad surface,

        sum_quads (d13 d24' - d24 d13') = sum_k (A_k BB'_k - BB_k A'_k + AA_k B'_k - B_k AA'_k)

    with bold ``A, B`` the black and doubled ``AA, BB`` the white periods.
    """
    g = hd.genus
    d13, d24 = quad_diagonals(Q, F, hd)
    d13_p, d24_p = quad_diagonals(Q, F_prime, hd)
    lhs = complex(np.sum(d13 * d24_p - d24 * d13_p))

    a, b = F.black_periods[:g], F.black_periods[g:]
    aa, bb = F.white_periods[:g], F.white_periods[g:]
    a_p, b_p = F_prime.black_periods[:g], F_prime.black_periods[g:]
    aa_p, bb_p = F_prime.white_periods[:g], F_prime.white_periods[g:]
    rhs = complex(a @ bb_p - bb @ a_p + aa @ b_p - b @ aa_p)
    return lhs, rhs


def quad_bilinear_residual(Q, F, F_prime, hd):
    lhs, rhs = quad_bilinear_sides(Q, F, F_prime, hd)
    return abs(lhs - rhs) / max(1.0, abs(lhs), abs(rhs))


def quad_first_kind_basis(hd, w, bundle, solver):
    """
    Quad integrals with black and white A-periods ``delta_kl``: the integral
    with A-periods ``delta_kl`` plus ``-i`` times the one with A-periods
    ``i delta_kl``.
    """
    mesh = hd.mesh
    primal = first_kind_basis(mesh, w, hd, bundle, solver)
    dual = first_kind_basis(mesh, w, hd, bundle, solver, dual=True)
    return [
        to_quad_function(phi) + to_quad_function(psi).scaled(-1j)
        for phi, psi in zip(primal, dual)
    ]


def quad_period_matrix(Q, hd, w, bundle, solver, rtol=None):
    """
    ``(B_k^l + BB_k^l) / 2`` of the normalized quad integrals, checked against
    ``(pi_t + pi_t*) / 2`` of ``bundle``.
    """
    rtol = setting("PERIODS_IDENTITY_RTOL", rtol)
    g = hd.genus
    basis = quad_first_kind_basis(hd, w, bundle, solver)
    pi = np.empty((g, g), dtype=complex)
    for l, F in enumerate(basis):
        pi[:, l] = (F.black_periods[g:] + F.white_periods[g:]) / 2

    defect = float(np.abs(pi - bundle.pi_q).max())
    if defect > rtol * max(1.0, float(np.abs(bundle.pi_q).max())):
        raise ConsistencyFailure(
            f"Quad period matrix differs from (pi_t + pi_t*)/2 by {defect:.3e}."
        )
    logger.info(f"Quad period matrix of genus {g} matches pi_q to {defect:.2e}")
    return pi
