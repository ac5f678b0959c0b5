"""
Multi-valued fields and their transported differences.

A multi-valued function ``f`` is stored as a vertex function ``u_base`` for
``Re f``, a face function ``v_base`` for ``Im f`` and the real and imaginary
parts of its periods ``(A_1..A_g, B_1..B_g)``. Differences across an edge are
corrected by the period cocycles of a :class:`HomologyData`:

    Du(e) = u(h_e) - u(t_e) + kappa(e) . p_re
    Dv(e) = v(l_e) - v(r_e) + kappa_star(e) . p_im
"""

from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from .exceptions import MissingImaginaryPart, ZeroWeightEdge

ZERO_WEIGHT_RTOL = 1e-12


@dataclass(frozen=True, eq=False)
class MultiValuedField:
    u_base: np.ndarray
    p_re: np.ndarray
    v_base: Optional[np.ndarray] = None
    p_im: Optional[np.ndarray] = None

    def __post_init__(self):
        object.__setattr__(self, "u_base", np.asarray(self.u_base, dtype=float))
        object.__setattr__(self, "p_re", np.asarray(self.p_re, dtype=float))
        if self.v_base is not None:
            object.__setattr__(self, "v_base", np.asarray(self.v_base, dtype=float))
            p_im = np.zeros_like(self.p_re) if self.p_im is None else self.p_im
            object.__setattr__(self, "p_im", np.asarray(p_im, dtype=float))

    @property
    def genus(self):
        return len(self.p_re) // 2

    @property
    def has_imaginary_part(self):
        return self.v_base is not None

    @property
    def a_periods(self):
        """Complex A-periods; imaginary parts are zero for real fields."""
        g = self.genus
        im = self.p_im[:g] if self.has_imaginary_part else 0.0
        return self.p_re[:g] + 1j * im

    @property
    def b_periods(self):
        g = self.genus
        im = self.p_im[g:] if self.has_imaginary_part else 0.0
        return self.p_re[g:] + 1j * im

    def with_imaginary_part(self, v_base, p_im):
        return replace(self, v_base=v_base, p_im=p_im)

    def real_part(self):
        return MultiValuedField(u_base=self.u_base, p_re=self.p_re)

    def scaled(self, factor):
        return MultiValuedField(
            u_base=factor * self.u_base,
            p_re=factor * self.p_re,
            v_base=None if self.v_base is None else factor * self.v_base,
            p_im=None if self.p_im is None else factor * self.p_im,
        )

    def __add__(self, other):
        both = self.has_imaginary_part and other.has_imaginary_part
        return MultiValuedField(
            u_base=self.u_base + other.u_base,
            p_re=self.p_re + other.p_re,
            v_base=self.v_base + other.v_base if both else None,
            p_im=self.p_im + other.p_im if both else None,
        )


def constant_field(mesh, genus, u=0.0, v=None):
    return MultiValuedField(
        u_base=np.full(mesh.n_vertices, float(u)),
        p_re=np.zeros(2 * genus),
        v_base=None if v is None else np.full(mesh.n_faces, float(v)),
    )


def halfedge_du(f, hd):
    """``Du`` on every half-edge."""
    mesh = hd.mesh
    return (
        f.u_base[mesh.halfedge_head]
        - f.u_base[mesh.halfedge_tail]
        + hd.halfedge_kappa @ f.p_re
    )


def halfedge_dv(f, hd):
    """``Dv`` on every half-edge."""
    if not f.has_imaginary_part:
        raise MissingImaginaryPart("The field has no imaginary part.")
    mesh = hd.mesh
    faces = np.arange(3 * mesh.n_faces) // 3
    return (
        f.v_base[faces]
        - f.v_base[mesh.twin // 3]
        + hd.halfedge_kappa_star @ f.p_im
    )


def edge_du(f, hd):
    """``Du`` on the canonical half-edge of every edge."""
    return halfedge_du(f, hd)[hd.mesh.edge_halfedge]


def edge_dv(f, hd):
    return halfedge_dv(f, hd)[hd.mesh.edge_halfedge]


def edge_difference(f, hd, he):
    mesh = hd.mesh
    return float(
        f.u_base[mesh.head(he)] - f.u_base[mesh.tail(he)] + hd.halfedge_kappa[he] @ f.p_re
    )


def dual_difference(f, hd, he):
    if not f.has_imaginary_part:
        raise MissingImaginaryPart("The field has no imaginary part.")
    mesh = hd.mesh
    return float(
        f.v_base[mesh.left(he)]
        - f.v_base[mesh.right(he)]
        + hd.halfedge_kappa_star[he] @ f.p_im
    )


def energy_pairing(f1, f2, hd, w):
    """Polarized Dirichlet energy ``sum_e c(e) Du1(e) Du2(e)``."""
    return float(np.sum(w.c * edge_du(f1, hd) * edge_du(f2, hd)))


def dirichlet_energy(f, hd, w):
    du = edge_du(f, hd)
    return float(np.sum(w.c * du * du))


def dual_energy(f, hd, w):
    """``sum_e Dv(e)^2 / c(e)``; defined only when no weight vanishes."""
    scale = w.max_abs
    zero = np.flatnonzero(np.abs(w.c) <= ZERO_WEIGHT_RTOL * scale)
    if zero.size:
        raise ZeroWeightEdge(
            f"{zero.size} edges have vanishing cotan weight (first: edge {int(zero[0])})."
        )
    dv = edge_dv(f, hd)
    return float(np.sum(dv * dv / w.c))
