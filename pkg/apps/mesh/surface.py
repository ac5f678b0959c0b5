import logging
from collections import deque
from functools import cached_property
from typing import NamedTuple, Optional

import numpy as np

from .exceptions import (
    Disconnected,
    HasBoundary,
    LengthMismatch,
    MalformedMesh,
    NonOrientable,
    TriangleInequalityViolated,
    UnpairedSide,
)

logger = logging.getLogger(__name__)

LENGTH_RTOL = 1e-9

# side permutation of a face whose orientation is reversed: corner 0 stays,
# corners 1 and 2 trade places
_FLIP = np.array([0, 2, 1])


def _frozen(array):
    array.flags.writeable = False
    return array


class Gluing(NamedTuple):
    """Identification of side ``side`` of ``face`` with a side of another face."""

    face: int
    side: int
    other_face: Optional[int]
    other_side: Optional[int]
    preserves_orientation: bool = False


class SurfaceMesh:
    """
    Closed oriented triangle complex glued from flat triangles.

    Half-edge ``3 * f + s`` is side ``s`` of face ``f``. It lies opposite
    corner ``s`` and runs from corner ``(s + 1) % 3`` to corner ``(s + 2) % 3``,
    so face ``f`` is on its left. ``twin[h]`` is the half-edge glued to ``h``;
    an unoriented edge is represented by the smaller of its two half-edges.

    Instances are immutable; build them through :func:`build_mesh`.
    """

    def __init__(self, lengths, twin, corner_vertex):
        self.lengths = _frozen(np.array(lengths, dtype=float).reshape(-1, 3))
        self.twin = _frozen(np.array(twin, dtype=np.int64))
        self.corner_vertex = _frozen(np.array(corner_vertex, dtype=np.int64))
        self.n_faces = len(self.lengths)
        self.n_vertices = int(self.corner_vertex.max()) + 1

        halfedges = np.arange(3 * self.n_faces)
        canonical = halfedges < self.twin
        self.edge_halfedge = _frozen(halfedges[canonical])
        self.n_edges = len(self.edge_halfedge)

        edge_of = np.empty(3 * self.n_faces, dtype=np.int64)
        edge_of[self.edge_halfedge] = np.arange(self.n_edges)
        edge_of[self.twin[self.edge_halfedge]] = np.arange(self.n_edges)
        self.halfedge_edge = _frozen(edge_of)
        self.halfedge_sign = _frozen(np.where(canonical, 1, -1))

    def __repr__(self):
        return (
            f"SurfaceMesh(V={self.n_vertices}, E={self.n_edges}, "
            f"F={self.n_faces}, genus={self.genus})"
        )

    # Combinatorics

    @property
    def euler_characteristic(self):
        return self.n_vertices - self.n_edges + self.n_faces

    @property
    def genus(self):
        return (2 - self.euler_characteristic) // 2

    @cached_property
    def halfedge_tail(self):
        faces, sides = np.divmod(np.arange(3 * self.n_faces), 3)
        return _frozen(self.corner_vertex[faces, (sides + 1) % 3])

    @cached_property
    def halfedge_head(self):
        faces, sides = np.divmod(np.arange(3 * self.n_faces), 3)
        return _frozen(self.corner_vertex[faces, (sides + 2) % 3])

    @cached_property
    def edge_tail(self):
        return _frozen(self.halfedge_tail[self.edge_halfedge])

    @cached_property
    def edge_head(self):
        return _frozen(self.halfedge_head[self.edge_halfedge])

    @cached_property
    def edge_left(self):
        return _frozen(self.edge_halfedge // 3)

    @cached_property
    def edge_right(self):
        return _frozen(self.twin[self.edge_halfedge] // 3)

    def tail(self, he):
        return int(self.halfedge_tail[he])

    def head(self, he):
        return int(self.halfedge_head[he])

    def left(self, he):
        return int(he) // 3

    def right(self, he):
        return int(self.twin[he]) // 3

    def edge(self, he):
        return int(self.halfedge_edge[he])

    def sign(self, he):
        return int(self.halfedge_sign[he])

    def next(self, he):
        face, side = divmod(int(he), 3)
        return 3 * face + (side + 1) % 3

    def prev(self, he):
        face, side = divmod(int(he), 3)
        return 3 * face + (side + 2) % 3

    def face_halfedges(self, face):
        return [3 * face, 3 * face + 1, 3 * face + 2]

    @cached_property
    def outgoing(self):
        """Half-edges grouped by tail vertex, in increasing id order."""
        groups = [[] for _ in range(self.n_vertices)]
        for he, tail in enumerate(self.halfedge_tail):
            groups[tail].append(he)
        return groups

    # Metric

    @cached_property
    def face_areas(self):
        # Heron's formula in Kahan's numerically stable arrangement
        a, b, c = np.sort(self.lengths, axis=1)[:, ::-1].T
        product = (a + (b + c)) * (c - (a - b)) * (c + (a - b)) * (a + (b - c))
        return _frozen(0.25 * np.sqrt(np.maximum(product, 0.0)))

    @cached_property
    def total_area(self):
        return float(self.face_areas.sum())

    @cached_property
    def angles(self):
        """Corner angles, ``angles[f, k]`` opposite side ``k``."""
        a = self.lengths
        b = np.roll(a, -1, axis=1)
        c = np.roll(a, -2, axis=1)
        four_area = 4.0 * self.face_areas[:, None]
        return _frozen(np.arctan2(four_area * np.ones_like(a), b**2 + c**2 - a**2))

    @cached_property
    def halfedge_cot(self):
        """Cotangent of the angle opposite each half-edge."""
        a = self.lengths
        b = np.roll(a, -1, axis=1)
        c = np.roll(a, -2, axis=1)
        cot = (b**2 + c**2 - a**2) / (4.0 * self.face_areas[:, None])
        return _frozen(cot.ravel())

    @cached_property
    def edge_lengths(self):
        return _frozen(self.lengths.ravel()[self.edge_halfedge])


def _coerce_gluing(entry):
    if isinstance(entry, Gluing):
        return entry
    return Gluing(*entry)


def _pair_sides(n_faces, gluing):
    """Fill the twin array and the orientation flags from gluing records."""
    twin = np.full(3 * n_faces, -1, dtype=np.int64)
    preserving = np.zeros(3 * n_faces, dtype=bool)
    boundary = []

    for raw in gluing:
        entry = _coerce_gluing(raw)
        if not (0 <= entry.face < n_faces and 0 <= entry.side < 3):
            raise MalformedMesh(f"Gluing {tuple(entry)} refers to a missing side.")
        slot = 3 * entry.face + entry.side
        if entry.other_face is None:
            boundary.append(slot)
            continue
        if not (0 <= entry.other_face < n_faces and 0 <= entry.other_side < 3):
            raise MalformedMesh(f"Gluing {tuple(entry)} refers to a missing side.")
        other = 3 * entry.other_face + entry.other_side
        if slot == other:
            raise UnpairedSide(f"Side {entry.face}:{entry.side} is glued to itself.")
        for s in (slot, other):
            if twin[s] != -1:
                raise UnpairedSide(f"Side {s // 3}:{s % 3} is glued more than once.")
        twin[slot], twin[other] = other, slot
        preserving[slot] = preserving[other] = entry.preserves_orientation

    if boundary:
        face, side = divmod(boundary[0], 3)
        raise HasBoundary(
            f"Side {face}:{side} is a free boundary side; only closed surfaces are supported."
        )
    missing = np.flatnonzero(twin == -1)
    if missing.size:
        face, side = divmod(int(missing[0]), 3)
        raise UnpairedSide(f"Side {face}:{side} is not glued to any other side.")
    return twin, preserving


def _orient(n_faces, twin, preserving):
    """
    Assign every face an orientation parity by breadth-first search so that
    all gluings reverse orientation. Raise NonOrientable on a parity conflict
    and Disconnected if some face is unreachable.
    """
    parity = np.full(n_faces, -1, dtype=np.int64)
    parity[0] = 0
    queue = deque([0])
    while queue:
        face = queue.popleft()
        for he in range(3 * face, 3 * face + 3):
            other = int(twin[he]) // 3
            wanted = parity[face] ^ int(preserving[he])
            if parity[other] == -1:
                parity[other] = wanted
                queue.append(other)
            elif parity[other] != wanted:
                raise NonOrientable(
                    f"Faces {face} and {other} cannot be oriented consistently."
                )
    unreached = np.flatnonzero(parity == -1)
    if unreached.size:
        raise Disconnected(
            f"Face {int(unreached[0])} is not connected to face 0 "
            f"({unreached.size} unreachable faces)."
        )
    return parity.astype(bool)


def _label_vertices(n_faces, twin):
    """Vertices are the classes of corners identified across glued sides."""
    parent = list(range(3 * n_faces))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(x, y):
        rx, ry = find(x), find(y)
        if rx != ry:
            parent[max(rx, ry)] = min(rx, ry)

    for he in range(3 * n_faces):
        other = int(twin[he])
        if he > other:
            continue
        f, s = divmod(he, 3)
        g, t = divmod(other, 3)
        union(3 * f + (s + 1) % 3, 3 * g + (t + 2) % 3)
        union(3 * f + (s + 2) % 3, 3 * g + (t + 1) % 3)

    labels = {}
    corner_vertex = np.empty(3 * n_faces, dtype=np.int64)
    for corner in range(3 * n_faces):
        root = find(corner)
        corner_vertex[corner] = labels.setdefault(root, len(labels))
    return corner_vertex.reshape(n_faces, 3)


def build_mesh(triangles, side_lengths, gluing):
    """
    Validate a glued triangle complex and return a :class:`SurfaceMesh`.

    ``triangles`` is the number of faces, ``side_lengths`` holds per face the
    lengths of the sides opposite corners 0, 1 and 2, and ``gluing`` is an
    iterable of :class:`Gluing` records (or plain tuples of the same shape).
    Faces glued with ``preserves_orientation=True`` are reoriented when the
    complex is orientable.
    """
    lengths = np.array(side_lengths, dtype=float)
    if lengths.ndim != 2 or lengths.shape[1] != 3 or len(lengths) != triangles:
        raise MalformedMesh(
            f"Expected side lengths for {triangles} faces, got shape {lengths.shape}."
        )
    if triangles == 0:
        raise MalformedMesh("A surface needs at least one face.")
    if not np.all(np.isfinite(lengths)) or np.any(lengths <= 0):
        raise MalformedMesh("Side lengths must be finite and positive.")

    longest = lengths.max(axis=1)
    violating = np.flatnonzero(2.0 * longest >= lengths.sum(axis=1))
    if violating.size:
        face = int(violating[0])
        raise TriangleInequalityViolated(
            f"Face {face} with sides {lengths[face].tolist()} violates the strict triangle inequality."
        )

    twin, preserving = _pair_sides(triangles, gluing)

    flat = lengths.ravel()
    mismatch = np.abs(flat - flat[twin]) > LENGTH_RTOL * np.maximum(flat, flat[twin])
    if mismatch.any():
        he = int(np.flatnonzero(mismatch)[0])
        raise LengthMismatch(
            f"Side {he // 3}:{he % 3} (length {flat[he]}) is glued to side "
            f"{twin[he] // 3}:{twin[he] % 3} (length {flat[twin[he]]})."
        )

    flipped = _orient(triangles, twin, preserving)
    if flipped.any():
        logger.warning(f"Reoriented {int(flipped.sum())} faces to make all gluings reverse orientation.")
        slot_map = np.arange(3 * triangles).reshape(triangles, 3)
        slot_map[flipped] = slot_map[flipped][:, _FLIP]
        slot_map = slot_map.ravel()
        # new slot of each old slot
        relabel = np.empty_like(slot_map)
        relabel[slot_map] = np.arange(3 * triangles)
        twin = relabel[twin[slot_map]]
        lengths = lengths.ravel()[slot_map].reshape(triangles, 3)

    corner_vertex = _label_vertices(triangles, twin)
    mesh = SurfaceMesh(lengths, twin, corner_vertex)
    if mesh.euler_characteristic % 2:
        raise NonOrientable(
            f"Euler characteristic {mesh.euler_characteristic} is odd."
        )
    logger.info(f"Accepted {mesh!r}")
    return mesh
