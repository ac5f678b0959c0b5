"""
Parametric example surfaces, each shipped with explicit homology basis loops.

Surfaces tiled by parallelograms are assembled from unit cells spanned by 1 and
``eta``. Every cell is cut into ``m x m`` sub-parallelograms and each of those
into a lower face ``(p00, p10, p11)`` and an upper face ``(p00, p11, p01)``.
Side identifications between cells are given by two permutations: ``right[k]``
is the cell whose left side is glued to the right side of cell ``k`` and
``top[k]`` the cell whose bottom is glued to the top of cell ``k``.
"""

import cmath
import logging
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from apps.mesh.surface import Gluing, build_mesh

from .exceptions import DegenerateEta, InvalidGeneratorParameter

logger = logging.getLogger(__name__)

EQUILATERAL_ETA = cmath.exp(2j * math.pi / 3)

# three-cell genus two surface: L and R side by side, T on top of R
CELL_L, CELL_R, CELL_T = 0, 1, 2
GENUS2_RIGHT = (CELL_R, CELL_L, CELL_T)
GENUS2_TOP = (CELL_L, CELL_T, CELL_R)
GENUS2_SQUARES_PERIODS = (1j / 3) * np.array([[5, -4], [-4, 5]])


@dataclass(frozen=True)
class GeneratedSurface:
    name: str
    mesh: object
    loops: tuple
    reference: Optional[np.ndarray] = None
    parameters: Optional[dict] = None


class ParallelogramComplex:
    """Face numbering and gluing of a surface tiled by parallelogram cells."""

    def __init__(self, right, top, eta, m):
        self.right = tuple(right)
        self.top = tuple(top)
        self.below = tuple(self.top.index(k) for k in range(len(self.top)))
        self.eta = complex(eta)
        self.m = m
        self.n_cells = len(self.right)

    def lower(self, cell, i, j):
        return 2 * (cell * self.m * self.m + i + self.m * j)

    def upper(self, cell, i, j):
        return self.lower(cell, i, j) + 1

    def _right_of(self, cell, i, j):
        if i + 1 < self.m:
            return cell, i + 1, j
        return self.right[cell], 0, j

    def _below(self, cell, i, j):
        if j > 0:
            return cell, i, j - 1
        return self.below[cell], i, self.m - 1

    def build(self):
        m = self.m
        a = abs(self.eta) / m
        d = abs(1 + self.eta) / m
        b = 1.0 / m
        n_faces = 2 * self.n_cells * m * m
        lengths = np.empty((n_faces, 3))
        gluing = []
        for cell in range(self.n_cells):
            for j in range(m):
                for i in range(m):
                    lo, up = self.lower(cell, i, j), self.upper(cell, i, j)
                    lengths[lo] = (a, d, b)
                    lengths[up] = (b, a, d)
                    gluing.append(Gluing(lo, 1, up, 2))
                    gluing.append(Gluing(lo, 0, self.upper(*self._right_of(cell, i, j)), 1))
                    gluing.append(Gluing(lo, 2, self.upper(*self._below(cell, i, j)), 0))
        return build_mesh(n_faces, lengths, gluing)


def _check_eta(eta):
    eta = complex(eta)
    if not math.isfinite(eta.real) or not math.isfinite(eta.imag) or eta.imag <= 0:
        raise DegenerateEta(
            f"eta = {eta} must have positive imaginary part.", params={"eta": eta}
        )
    return eta


def flat_torus(eta, n):
    """
    The flat torus C / (Z + Z eta) cut into ``n x n`` parallelograms, each
    split along the diagonal from 0 to 1 + eta. The basis loops are the
    bottom row (translation by 1) and the column at ``x = 1/n`` (translation
    by eta).
    """
    eta = _check_eta(eta)
    if int(n) != n or n < 1:
        raise InvalidGeneratorParameter(f"n = {n} must be a positive integer.")
    n = int(n)
    complex_ = ParallelogramComplex(right=(0,), top=(0,), eta=eta, m=n)
    mesh = complex_.build()
    alpha = [3 * complex_.lower(0, i, 0) + 2 for i in range(n)]
    beta = [3 * complex_.lower(0, 0, j) for j in range(n)]
    return GeneratedSurface(
        name="flat_torus",
        mesh=mesh,
        loops=(np.array(alpha), np.array(beta)),
        reference=np.array([[eta]]),
        parameters={"eta": eta, "n": n},
    )


def pyramid():
    """
    Side surface of a square pyramid with equilateral unit faces; opposite
    sides of the base are identified by translation. Face ``k`` has corners
    ``(Q_k, Q_k+1, P)``.
    """
    lengths = np.ones((4, 3))
    gluing = [Gluing(k, 0, (k + 1) % 4, 1) for k in range(4)]
    gluing += [Gluing(0, 2, 2, 2), Gluing(1, 2, 3, 2)]
    mesh = build_mesh(4, lengths, gluing)
    return GeneratedSurface(
        name="pyramid",
        mesh=mesh,
        loops=(np.array([2]), np.array([5])),
        parameters={},
    )


def genus2_parallelograms(n, eta=1j):
    """
    Genus two surface glued from three parallelogram cells L, R, T: L and R
    side by side, T on top of R. Horizontal strips are (L, R) and (T),
    vertical strips are (L) and (R, T). Each cell is cut into ``n/2 x n/2``
    sub-cells, so ``n`` must be even.

    Basis loops, all through the cone point:

    * alpha 1: bottom side of L, left to right
    * alpha 2: bottom sides of L and R, left to right
    * beta 1: left side of T, top to bottom
    * beta 2: right sides of R and T, bottom to top
    """
    eta = _check_eta(eta)
    if int(n) != n or n < 2 or n % 2:
        raise InvalidGeneratorParameter(f"n = {n} must be an even integer >= 2.")
    n = int(n)
    m = n // 2
    complex_ = ParallelogramComplex(GENUS2_RIGHT, GENUS2_TOP, eta, m)
    mesh = complex_.build()

    bottom_l = [3 * complex_.lower(CELL_L, i, 0) + 2 for i in range(m)]
    bottom_r = [3 * complex_.lower(CELL_R, i, 0) + 2 for i in range(m)]
    left_t = [3 * complex_.upper(CELL_T, 0, j) + 1 for j in reversed(range(m))]
    right_rt = [3 * complex_.lower(CELL_R, m - 1, j) for j in range(m)]
    right_rt += [3 * complex_.lower(CELL_T, m - 1, j) for j in range(m)]
    loops = tuple(
        np.array(loop) for loop in (bottom_l, bottom_l + bottom_r, left_t, right_rt)
    )
    reference = GENUS2_SQUARES_PERIODS if eta == 1j else None
    return GeneratedSurface(
        name="genus2_parallelograms",
        mesh=mesh,
        loops=loops,
        reference=reference,
        parameters={"eta": eta, "n": n},
    )


def genus2_squares(n):
    """Three unit squares glued into a genus two surface, ``n/2`` sub-squares per side."""
    surface = genus2_parallelograms(n, 1j)
    return GeneratedSurface(
        name="genus2_squares",
        mesh=surface.mesh,
        loops=surface.loops,
        reference=GENUS2_SQUARES_PERIODS,
        parameters={"n": surface.parameters["n"]},
    )


def jitter_lengths(mesh, rng, amplitude=0.05):
    """
    Multiply every edge length by an independent factor in
    ``[1 - amplitude, 1 + amplitude]``; used to produce non-Delaunay meshes.
    """
    factors = 1.0 + amplitude * rng.uniform(-1.0, 1.0, size=mesh.n_edges)
    lengths = mesh.lengths.ravel() * factors[mesh.halfedge_edge]
    gluing = [
        Gluing(he // 3, he % 3, int(mesh.twin[he]) // 3, int(mesh.twin[he]) % 3)
        for he in mesh.edge_halfedge.tolist()
    ]
    return build_mesh(mesh.n_faces, lengths.reshape(-1, 3), gluing)


GENERATORS = {
    "flat_torus": flat_torus,
    "pyramid": pyramid,
    "genus2_squares": genus2_squares,
    "genus2_parallelograms": genus2_parallelograms,
}
