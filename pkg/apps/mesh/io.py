"""
Text formats for glued triangle complexes.

Glued format, one face per line (blank lines and ``#`` comments ignored)::

    l0 l1 l2  F:S F:S F:S

``l0 l1 l2`` are the lengths of the sides opposite corners 0, 1, 2 and the
three targets name the face and side each side is glued to. A trailing ``!``
(``F:S!``) marks a gluing that preserves orientation; such faces are reoriented
on import. ``-`` marks a free side, which is rejected because surfaces must be
closed. Both ends of a gluing must name each other.

Indexed format (subset of Wavefront OBJ)::

    v x y z
    f i j k

Vertices are 1-based. Intrinsic lengths are computed from the coordinates,
which are then discarded.
"""

import hashlib
import logging
from pathlib import Path

import numpy as np

from .exceptions import MalformedMesh, UnpairedSide
from .surface import Gluing, build_mesh

logger = logging.getLogger(__name__)


def _parse_target(token, lineno):
    if token == "-":
        return None
    preserving = token.endswith("!")
    body = token[:-1] if preserving else token
    try:
        face, side = (int(part) for part in body.split(":"))
    except ValueError:
        raise MalformedMesh(f"Line {lineno}: cannot read gluing target '{token}'.")
    return face, side, preserving


def parse_mesh(text):
    """Parse the glued text format and return a validated SurfaceMesh."""
    lengths = []
    targets = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        if len(tokens) != 6:
            raise MalformedMesh(
                f"Line {lineno}: expected three lengths and three gluing targets."
            )
        try:
            lengths.append([float(token) for token in tokens[:3]])
        except ValueError:
            raise MalformedMesh(f"Line {lineno}: side lengths must be numbers.")
        targets.append([_parse_target(token, lineno) for token in tokens[3:]])

    gluing = []
    for face, row in enumerate(targets):
        for side, target in enumerate(row):
            if target is None:
                gluing.append(Gluing(face, side, None, None))
                continue
            other_face, other_side, preserving = target
            if not (0 <= other_face < len(targets) and 0 <= other_side < 3):
                raise MalformedMesh(
                    f"Face {face} side {side} is glued to missing side {other_face}:{other_side}."
                )
            back = targets[other_face][other_side]
            if back is None or back[:2] != (face, side) or back[2] != preserving:
                raise UnpairedSide(
                    f"Gluing {face}:{side} -> {other_face}:{other_side} is not matched "
                    f"by the reverse entry."
                )
            if (face, side) < (other_face, other_side):
                gluing.append(Gluing(face, side, other_face, other_side, preserving))
            elif (face, side) == (other_face, other_side):
                raise UnpairedSide(f"Side {face}:{side} is glued to itself.")

    return build_mesh(len(lengths), lengths, gluing)


def load_mesh(path):
    """Read a mesh file; ``.obj`` files use the indexed importer."""
    path = Path(path)
    text = path.read_text()
    if path.suffix.lower() == ".obj":
        return parse_obj(text)
    return parse_mesh(text)


def dump_mesh(mesh):
    """Serialize ``mesh`` to the glued text format."""
    lines = [
        f"# V={mesh.n_vertices} E={mesh.n_edges} F={mesh.n_faces} genus={mesh.genus}"
    ]
    for face in range(mesh.n_faces):
        lengths = " ".join(repr(float(x)) for x in mesh.lengths[face])
        sides = " ".join(
            f"{int(mesh.twin[3 * face + side]) // 3}:{int(mesh.twin[3 * face + side]) % 3}"
            for side in range(3)
        )
        lines.append(f"{lengths} {sides}")
    return "\n".join(lines) + "\n"


def parse_obj(text):
    """Import an indexed triangle mesh with 3D coordinates."""
    points = []
    faces = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        tokens = raw.split("#", 1)[0].split()
        if not tokens:
            continue
        try:
            if tokens[0] == "v":
                points.append([float(x) for x in tokens[1:4]])
            elif tokens[0] == "f":
                if len(tokens) != 4:
                    raise MalformedMesh(f"Line {lineno}: only triangular faces are supported.")
                faces.append([int(token.split("/")[0]) - 1 for token in tokens[1:]])
        except ValueError:
            raise MalformedMesh(f"Line {lineno}: cannot parse '{raw.strip()}'.")

    points = np.array(points, dtype=float)
    faces = np.array(faces, dtype=np.int64).reshape(-1, 3)
    if faces.size and (faces.min() < 0 or faces.max() >= len(points)):
        raise MalformedMesh("Face refers to a missing vertex.")

    lengths = np.empty(faces.shape, dtype=float)
    sides = {}
    for f, corners in enumerate(faces):
        for s in range(3):
            tail, head = corners[(s + 1) % 3], corners[(s + 2) % 3]
            lengths[f, s] = np.linalg.norm(points[head] - points[tail])
            sides.setdefault(frozenset((int(tail), int(head))), []).append((f, s, tail))

    gluing = []
    for key, members in sides.items():
        if len(members) == 1:
            f, s, _ = members[0]
            gluing.append(Gluing(f, s, None, None))
        elif len(members) == 2:
            (f, s, tail), (g, t, other_tail) = members
            gluing.append(Gluing(f, s, g, t, bool(tail == other_tail)))
        else:
            raise MalformedMesh(
                f"Edge {sorted(key)} is shared by {len(members)} faces."
            )
    logger.info(f"Imported indexed mesh with {len(points)} points and {len(faces)} faces")
    return build_mesh(len(faces), lengths, gluing)


def mesh_digest(mesh):
    """Stable hash of the combinatorics and lengths, used as a cache key."""
    digest = hashlib.sha256()
    digest.update(np.ascontiguousarray(mesh.lengths).tobytes())
    digest.update(np.ascontiguousarray(mesh.twin).tobytes())
    return digest.hexdigest()
