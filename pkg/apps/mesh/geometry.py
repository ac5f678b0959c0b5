import logging
import math
from dataclasses import dataclass

import numpy as np

logger = logging.getLogger(__name__)

DELAUNAY_SLACK = 1e-12


@dataclass(frozen=True)
class EdgeWeights:
    """Cotan weights ``c(e) = (cot a_e + cot b_e) / 2`` per unoriented edge."""

    c: np.ndarray

    def __len__(self):
        return len(self.c)

    def at(self, mesh, he):
        return float(self.c[mesh.halfedge_edge[he]])

    @property
    def max_abs(self):
        return float(np.abs(self.c).max()) if len(self.c) else 0.0


@dataclass(frozen=True)
class GeometryReport:
    genus: int
    h: float
    delta_min: float
    aperture: np.ndarray
    gamma: np.ndarray
    gamma_s: float
    is_delaunay: bool
    delaunay_margin: float
    total_area: float

    def as_dict(self):
        return {
            "genus": self.genus,
            "h": self.h,
            "delta_min": self.delta_min,
            "aperture": self.aperture.tolist(),
            "gamma": self.gamma.tolist(),
            "gamma_s": self.gamma_s,
            "is_delaunay": self.is_delaunay,
            "delaunay_margin": self.delaunay_margin,
            "total_area": self.total_area,
        }


def cotan_weights(mesh):
    """Return the cotan weight of every edge of ``mesh``."""
    cot = mesh.halfedge_cot
    first = mesh.edge_halfedge
    second = mesh.twin[first]
    c = 0.5 * (cot[first] + cot[second])
    c.flags.writeable = False
    return EdgeWeights(c=c)


def opposite_angle_sums(mesh):
    """``a_e + b_e`` for every edge, the two angles facing it."""
    angles = mesh.angles.ravel()
    first = mesh.edge_halfedge
    return angles[first] + angles[mesh.twin[first]]


def is_delaunay_edge(mesh, edge):
    return bool(opposite_angle_sums(mesh)[edge] <= math.pi + DELAUNAY_SLACK)


def geometry_report(mesh):
    """Metric summary of ``mesh``: mesh size, angles, apertures and Delaunay data."""
    aperture = np.bincount(
        mesh.corner_vertex.ravel(),
        weights=mesh.angles.ravel(),
        minlength=mesh.n_vertices,
    )
    gamma = 2.0 * math.pi / aperture
    sums = opposite_angle_sums(mesh)
    margin = float(np.min(math.pi - sums))

    report = GeometryReport(
        genus=mesh.genus,
        h=float(mesh.lengths.max()),
        delta_min=float(mesh.angles.min()),
        aperture=aperture,
        gamma=gamma,
        gamma_s=float(min(1.0, gamma.min())),
        is_delaunay=bool(margin >= -DELAUNAY_SLACK),
        delaunay_margin=margin,
        total_area=mesh.total_area,
    )
    if not report.is_delaunay:
        violations = int(np.sum(sums > math.pi + DELAUNAY_SLACK))
        logger.warning(f"Mesh is not Delaunay: {violations} edges have opposite angles summing past pi.")
    return report
