"""
Homology bases and period cocycles of a closed triangle complex.

Multi-valued functions are stored as single-valued data plus periods; the
cocycles ``kappa`` (on primal edges) and ``kappa_star`` (on dual edges) say how
much of each period a function picks up across an edge.

Conventions:

* A primal loop is a list of half-edges, each starting where the previous
  one ends.
* A dual loop is a list of crossings. Crossing half-edge ``c`` moves from the
  face on its right, ``twin[c] // 3``, into the face on its left, ``c // 3``.
* The intersection number of a primal loop with a dual loop is the signed
  number of crossings, positive when the dual loop crosses from the right of
  the primal loop to its left.
"""

import logging
from collections import deque
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from apps.mesh.exceptions import MeshValidationError

from .exceptions import BasisMismatch, GenusZero, IntersectionFormError, NotClosed
from .symplectic import (
    check_intersection_form,
    integer_inverse,
    standard_symplectic,
    symplectic_reduction,
)

logger = logging.getLogger(__name__)

NORMALIZATION_ATOL = 1e-9


@dataclass(frozen=True, eq=False)
class HomologyData:
    """
    A symplectic homology basis with its primal and dual period cocycles.

    ``kappa`` and ``kappa_star`` have one row per unoriented edge, stated for
    the edge's canonical half-edge; use :attr:`halfedge_kappa` and
    :attr:`halfedge_kappa_star` for per-half-edge values.
    """

    mesh: object
    basis_cycles: tuple
    intersection: np.ndarray
    kappa: np.ndarray
    kappa_star: np.ndarray
    dual_basis_loops: tuple
    root_vertex: int = 0
    root_face: int = 0

    @property
    def genus(self):
        return len(self.basis_cycles) // 2

    @property
    def alpha_cycles(self):
        return self.basis_cycles[: self.genus]

    @property
    def beta_cycles(self):
        return self.basis_cycles[self.genus :]

    @cached_property
    def halfedge_kappa(self):
        mesh = self.mesh
        return mesh.halfedge_sign[:, None] * self.kappa[mesh.halfedge_edge]

    @cached_property
    def halfedge_kappa_star(self):
        mesh = self.mesh
        return mesh.halfedge_sign[:, None] * self.kappa_star[mesh.halfedge_edge]

    def as_dict(self):
        return {
            "genus": self.genus,
            "root_vertex": self.root_vertex,
            "root_face": self.root_face,
            "basis_cycles": [loop.tolist() for loop in self.basis_cycles],
            "dual_basis_loops": [loop.tolist() for loop in self.dual_basis_loops],
            "intersection": self.intersection.tolist(),
        }


# Loops


def check_primal_loop(mesh, loop):
    loop = np.asarray(loop, dtype=np.int64)
    if loop.ndim != 1 or loop.size == 0:
        raise NotClosed("A loop needs at least one half-edge.")
    if loop.min() < 0 or loop.max() >= 3 * mesh.n_faces:
        raise NotClosed("Loop refers to a missing half-edge.")
    heads = mesh.halfedge_head[loop]
    tails = mesh.halfedge_tail[np.roll(loop, -1)]
    broken = np.flatnonzero(heads != tails)
    if broken.size:
        i = int(broken[0])
        raise NotClosed(
            f"Half-edge {int(loop[i])} ends at vertex {int(heads[i])} but the next "
            f"one starts at vertex {int(tails[i])}."
        )
    return loop


def check_dual_loop(mesh, loop):
    loop = np.asarray(loop, dtype=np.int64)
    if loop.ndim != 1 or loop.size == 0:
        raise NotClosed("A dual loop needs at least one crossing.")
    if loop.min() < 0 or loop.max() >= 3 * mesh.n_faces:
        raise NotClosed("Dual loop refers to a missing half-edge.")
    arrived = loop // 3
    departed = mesh.twin[np.roll(loop, -1)] // 3
    broken = np.flatnonzero(arrived != departed)
    if broken.size:
        i = int(broken[0])
        raise NotClosed(
            f"Crossing {int(loop[i])} enters face {int(arrived[i])} but the next "
            f"crossing leaves face {int(departed[i])}."
        )
    return loop


def reverse_loop(mesh, loop):
    """The same loop traversed backwards; valid for primal and dual loops."""
    return mesh.twin[np.asarray(loop, dtype=np.int64)[::-1]]


def reduce_loop(mesh, loop):
    """Cancel immediate backtracking, including around the base point."""
    stack = []
    for he in np.asarray(loop, dtype=np.int64):
        if stack and stack[-1] == mesh.twin[he]:
            stack.pop()
        else:
            stack.append(int(he))
    while len(stack) >= 2 and stack[0] == mesh.twin[stack[-1]]:
        stack = stack[1:-1]
    return np.array(stack, dtype=np.int64)


def signed_count(mesh, halfedges):
    """Per-edge count of ``halfedges``, signed by orientation against the canonical one."""
    halfedges = np.asarray(halfedges, dtype=np.int64)
    counts = np.zeros(mesh.n_edges)
    np.add.at(counts, mesh.halfedge_edge[halfedges], mesh.halfedge_sign[halfedges])
    return counts


def pair(mesh, halfedges, cochain):
    """Sum of an edge cochain (canonical orientation) along half-edges."""
    halfedges = np.asarray(halfedges, dtype=np.int64)
    signs = mesh.halfedge_sign[halfedges]
    values = np.asarray(cochain)[mesh.halfedge_edge[halfedges]]
    return np.tensordot(signs, values, axes=1)


def intersection_number(mesh, primal_loop, dual_loop):
    """Signed crossings of ``dual_loop`` over ``primal_loop``."""
    check_primal_loop(mesh, primal_loop)
    check_dual_loop(mesh, dual_loop)
    return int(np.rint(pair(mesh, primal_loop, signed_count(mesh, dual_loop))))


def push_to_primal(mesh, dual_loop):
    """
    A primal loop homologous to ``dual_loop``, obtained by sliding the dual
    loop onto the face boundaries on its left.
    """
    dual_loop = check_dual_loop(mesh, dual_loop)
    path = []
    for i, crossing in enumerate(dual_loop):
        following = int(dual_loop[(i + 1) % len(dual_loop)])
        face, side = divmod(int(crossing), 3)
        exit_side = int(mesh.twin[following]) % 3
        corner, stop = (side + 1) % 3, (exit_side + 2) % 3
        while corner != stop:
            path.append(3 * face + (corner + 2) % 3)
            corner = (corner + 1) % 3
    if not path:
        return np.empty(0, dtype=np.int64)
    return reduce_loop(mesh, path)


def _concatenate(mesh, coefficients, loops):
    pieces = []
    for coefficient, loop in zip(coefficients, loops):
        coefficient = int(coefficient)
        piece = loop if coefficient > 0 else reverse_loop(mesh, loop)
        pieces.extend([piece] * abs(coefficient))
    if not pieces:
        return np.empty(0, dtype=np.int64)
    return reduce_loop(mesh, np.concatenate(pieces))


# Tree-cotree decomposition


@dataclass(frozen=True)
class _TreeCotree:
    vertex_parent: list
    face_parent: list
    leftover: list


def _tree_cotree(mesh, root_vertex, root_face):
    vertex_parent = [None] * mesh.n_vertices
    in_tree = np.zeros(mesh.n_edges, dtype=bool)
    seen = np.zeros(mesh.n_vertices, dtype=bool)
    seen[root_vertex] = True
    queue = deque([root_vertex])
    while queue:
        vertex = queue.popleft()
        for he in mesh.outgoing[vertex]:
            head = mesh.head(he)
            if not seen[head]:
                seen[head] = True
                vertex_parent[head] = he
                in_tree[mesh.edge(he)] = True
                queue.append(head)

    face_parent = [None] * mesh.n_faces
    in_cotree = np.zeros(mesh.n_edges, dtype=bool)
    reached = np.zeros(mesh.n_faces, dtype=bool)
    reached[root_face] = True
    queue = deque([root_face])
    while queue:
        face = queue.popleft()
        for he in mesh.face_halfedges(face):
            if in_tree[mesh.edge(he)]:
                continue
            crossing = int(mesh.twin[he])
            other = crossing // 3
            if not reached[other]:
                reached[other] = True
                face_parent[other] = crossing
                in_cotree[mesh.edge(he)] = True
                queue.append(other)

    leftover = np.flatnonzero(~in_tree & ~in_cotree).tolist()
    return _TreeCotree(vertex_parent, face_parent, leftover)


def _vertex_path(mesh, split, vertex):
    path = []
    while split.vertex_parent[vertex] is not None:
        he = split.vertex_parent[vertex]
        path.append(he)
        vertex = mesh.tail(he)
    return path[::-1]


def _face_path(mesh, split, face):
    path = []
    while split.face_parent[face] is not None:
        crossing = split.face_parent[face]
        path.append(crossing)
        face = mesh.right(crossing)
    return path[::-1]


def _generator_loops(mesh, split):
    """Root-based primal and dual loops through each leftover edge."""
    primal, dual = [], []
    for edge in split.leftover:
        he = int(mesh.edge_halfedge[edge])
        up = _vertex_path(mesh, split, mesh.tail(he))
        back = reverse_loop(mesh, _vertex_path(mesh, split, mesh.head(he)))
        primal.append(np.array(up + [he] + back.tolist(), dtype=np.int64))

        down = _face_path(mesh, split, mesh.right(he))
        home = reverse_loop(mesh, _face_path(mesh, split, mesh.left(he)))
        dual.append(np.array(down + [he] + home.tolist(), dtype=np.int64))
    return primal, dual


# Basis


def homology_basis(mesh, root_vertex=0, root_face=0, loops=None):
    """
    Build a symplectic homology basis and its period cocycles.

    Without ``loops`` the basis comes from a tree-cotree decomposition rooted
    at ``root_vertex`` and ``root_face``, brought to standard symplectic form.
    With ``loops`` (``2g`` closed primal loops, alphas then betas) those loops
    are the basis; they must have intersection matrix ``J``.
    """
    genus = mesh.genus
    if genus == 0:
        raise GenusZero("A genus zero surface has no homology basis.")
    if not (0 <= root_vertex < mesh.n_vertices and 0 <= root_face < mesh.n_faces):
        raise MeshValidationError(
            f"Root vertex {root_vertex} or root face {root_face} does not exist.",
            code="invalid_root",
        )

    split = _tree_cotree(mesh, root_vertex, root_face)
    if len(split.leftover) != 2 * genus:
        raise IntersectionFormError(
            f"Tree-cotree split left {len(split.leftover)} edges, expected {2 * genus}."
        )
    generators, dual_generators = _generator_loops(mesh, split)
    zeta = np.array([signed_count(mesh, d) for d in dual_generators])

    pushed = [push_to_primal(mesh, d) for d in dual_generators]
    crossings = np.rint(
        np.array([[pair(mesh, p, z) for z in zeta] for p in pushed])
    ).astype(np.int64)
    omega = integer_inverse(crossings).T
    check_intersection_form(omega)

    J = standard_symplectic(genus)
    if loops is None:
        change = symplectic_reduction(omega)
        cycles = tuple(_concatenate(mesh, row, generators) for row in change)
    else:
        if len(loops) != 2 * genus:
            raise BasisMismatch(
                f"Expected {2 * genus} basis loops on a genus {genus} surface, got {len(loops)}."
            )
        cycles = tuple(check_primal_loop(mesh, loop) for loop in loops)
        change = np.rint(
            np.array([[pair(mesh, c, z) for z in zeta] for c in cycles])
        ).astype(np.int64)
        if np.any(change @ omega @ change.T != J):
            raise BasisMismatch(
                f"Supplied loops have intersection matrix "
                f"{(change @ omega @ change.T).tolist()}, expected {J.tolist()}."
            )

    intersection = change @ omega @ change.T
    kappa = zeta.T @ integer_inverse(change)

    dual_change = change @ integer_inverse(crossings)
    dual_loops = tuple(
        _concatenate(mesh, row, dual_generators) for row in dual_change
    )

    traversal = np.array([signed_count(mesh, c) for c in cycles])
    kappa_star = traversal.T @ integer_inverse(intersection).T

    hd = HomologyData(
        mesh=mesh,
        basis_cycles=cycles,
        intersection=intersection,
        kappa=kappa,
        kappa_star=kappa_star,
        dual_basis_loops=dual_loops,
        root_vertex=root_vertex,
        root_face=root_face,
    )
    _check_normalization(hd)
    logger.info(
        f"Homology basis of genus {genus} built from "
        f"{'supplied loops' if loops is not None else 'tree-cotree'} on {mesh!r}"
    )
    return hd


def _check_normalization(hd):
    eye = np.eye(2 * hd.genus)
    primal = np.array([pair(hd.mesh, c, hd.kappa) for c in hd.basis_cycles])
    dual = np.array([pair(hd.mesh, d, hd.kappa_star) for d in hd.dual_basis_loops])
    if not np.allclose(primal, eye, atol=NORMALIZATION_ATOL):
        raise IntersectionFormError("Primal cocycle is not dual to the basis cycles.")
    if not np.allclose(dual, eye, atol=NORMALIZATION_ATOL):
        raise IntersectionFormError("Dual cocycle is not dual to the dual basis loops.")


def loop_class(hd, loop, kind="primal"):
    """
    Homology class of a closed loop in the coordinates of ``hd``'s basis.

    ``kind`` is ``"primal"`` for half-edge loops and ``"dual"`` for crossing
    loops.
    """
    if kind == "primal":
        loop = check_primal_loop(hd.mesh, loop)
        values = pair(hd.mesh, loop, hd.kappa)
    elif kind == "dual":
        loop = check_dual_loop(hd.mesh, loop)
        values = pair(hd.mesh, loop, hd.kappa_star)
    else:
        raise ValueError(f"Unknown loop kind '{kind}'.")
    return np.rint(values).astype(np.int64)
