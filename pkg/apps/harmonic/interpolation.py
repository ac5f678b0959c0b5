"""
Per-triangle energies of linear interpolants and Stokes' formula on
simply-connected patches.
"""

import numpy as np

from .fields import halfedge_du, halfedge_dv


def triangle_interpolation_energy(mesh, face, values):
    """
    Dirichlet energy of the linear interpolant of corner ``values`` on ``face``:
    ``1/2 sum_s cot(angle_s) (value_{s+2} - value_{s+1})^2``.
    """
    values = np.asarray(values, dtype=float)
    cot = mesh.halfedge_cot[3 * face : 3 * face + 3]
    jumps = np.roll(values, -2) - np.roll(values, -1)
    return float(0.5 * np.sum(cot * jumps * jumps))


def face_corner_values(mesh, hd, f, face):
    """Values of ``Re f`` at the corners of ``face``, developed from corner 0."""
    du = halfedge_du(f, hd)
    start = f.u_base[mesh.corner_vertex[face, 0]]
    return np.array(
        [start, start + du[3 * face + 2], start - du[3 * face + 1]]
    )


def interpolation_energy(mesh, hd, f):
    """Sum of the per-face interpolant energies of ``Re f``."""
    return sum(
        triangle_interpolation_energy(mesh, face, face_corner_values(mesh, hd, f, face))
        for face in range(mesh.n_faces)
    )


def random_disk(mesh, size, rng, start=None):
    """
    Grow a tree of distinct triangles from ``start``. Returns a list of
    ``(face, attaching half-edge)`` pairs; the attaching half-edge lies in
    ``face`` and its twin in a face added earlier (``None`` for the root).
    """
    start = int(rng.integers(mesh.n_faces)) if start is None else start
    disk = [(start, None)]
    used = {start}
    frontier = [he for he in mesh.face_halfedges(start)]
    while len(disk) < size and frontier:
        he = frontier.pop(int(rng.integers(len(frontier))))
        attach = int(mesh.twin[he])
        face = attach // 3
        if face in used:
            continue
        used.add(face)
        disk.append((face, attach))
        frontier.extend(h for h in mesh.face_halfedges(face) if h != attach)
    return disk


def stokes_sides(mesh, f, f_prime, hd, disk):
    """
    Both sides of Stokes' formula on the triangulated polygon ``disk``
    (as produced by :func:`random_disk`), with ``u = Re f`` and
    ``v' = Im f_prime`` lifted to the polygon:

        sum over polygon edges of Dv'(e) Du(e)
            = sum over boundary sides b of v'(outside of b) * (-Du(b))

    Boundary sides are oriented with the polygon on their left.
    """
    du = halfedge_du(f, hd)
    dv = halfedge_dv(f_prime, hd)

    lifted = {}
    interior = set()
    for face, attach in disk:
        if attach is None:
            lifted[face] = 0.0
            continue
        parent = mesh.right(attach)
        lifted[face] = lifted[parent] + dv[attach]
        interior.update((attach, int(mesh.twin[attach])))

    lhs = sum(dv[he] * du[he] for _, he in disk if he is not None)
    rhs = 0.0
    for face, _ in disk:
        for b in mesh.face_halfedges(face):
            if b in interior:
                continue
            lhs += dv[b] * du[b]
            outside = lifted[face] - dv[b]
            rhs += outside * -du[b]
    return float(lhs), float(rhs)


def stokes_defect(mesh, f, f_prime, hd, disk):
    lhs, rhs = stokes_sides(mesh, f, f_prime, hd, disk)
    return abs(lhs - rhs)
