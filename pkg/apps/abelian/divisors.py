import logging
from dataclasses import dataclass

import jsonschema
import numpy as np

from apps.harmonic.fields import MultiValuedField
from apps.mesh.conf import setting

from .differentials import (
    EdgeDifferential,
    MeromorphicFunction,
    edge_residues,
    residues,
)
from .exceptions import InvalidDivisor, NotAdmissible

logger = logging.getLogger(__name__)

KINDS = ("vertex", "edge", "face")

DIVISOR_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "Divisor",
    "description": "Nonzero values of a divisor as [cell kind, index, value] triples.",
    "type": "array",
    "items": {
        "type": "array",
        "prefixItems": [
            {"enum": list(KINDS)},
            {"type": "integer", "minimum": 0},
            {"enum": [-1, 0, 1]},
        ],
        "minItems": 3,
        "maxItems": 3,
    },
}


@dataclass(frozen=True, eq=False)
class Divisor:
    """A map from vertices, edges and faces to ``{-1, 0, +1}``."""

    vertex: np.ndarray
    edge: np.ndarray
    face: np.ndarray

    @classmethod
    def zero(cls, mesh):
        return cls(
            vertex=np.zeros(mesh.n_vertices, dtype=np.int8),
            edge=np.zeros(mesh.n_edges, dtype=np.int8),
            face=np.zeros(mesh.n_faces, dtype=np.int8),
        )

    @classmethod
    def from_json(cls, mesh, entries):
        try:
            jsonschema.validate(instance=entries, schema=DIVISOR_SCHEMA)
        except jsonschema.ValidationError as e:
            raise InvalidDivisor(f"Divisor does not match its schema: {e.message}")
        divisor = cls.zero(mesh)
        seen = set()
        for kind, index, value in entries:
            target = getattr(divisor, kind)
            if index >= len(target):
                raise InvalidDivisor(
                    f"There is no {kind} {index}; the mesh has {len(target)}.",
                    params={"kind": kind, "index": index},
                )
            if (kind, index) in seen:
                raise InvalidDivisor(f"The {kind} {index} is listed twice.")
            seen.add((kind, index))
            target[index] = value
        return divisor

    def to_json(self):
        return [
            [kind, int(index), int(values[index])]
            for kind, values in zip(KINDS, (self.vertex, self.edge, self.face))
            for index in np.flatnonzero(values)
        ]

    @property
    def degree(self):
        return int(self.vertex.sum() + self.edge.sum() + self.face.sum())

    @property
    def poles(self):
        """Edges with value ``+1``."""
        return np.flatnonzero(self.edge > 0)

    @property
    def zero_vertices(self):
        return np.flatnonzero(self.vertex < 0)

    @property
    def zero_faces(self):
        return np.flatnonzero(self.face < 0)

    @property
    def is_admissible(self):
        return bool(
            (self.vertex <= 0).all() and (self.edge >= 0).all() and (self.face <= 0).all()
        )

    def __ge__(self, other):
        return bool(
            (self.vertex >= other.vertex).all()
            and (self.edge >= other.edge).all()
            and (self.face >= other.face).all()
        )

    def __neg__(self):
        return Divisor(vertex=-self.vertex, edge=-self.edge, face=-self.face)


def check_admissible(divisor):
    if not divisor.is_admissible:
        raise NotAdmissible(
            "An admissible divisor is nonpositive at vertices and faces and "
            "nonnegative at edges."
        )
    return divisor


def random_admissible_divisor(mesh, rng, n_poles, n_vertices=0, n_faces=0):
    divisor = Divisor.zero(mesh)
    divisor.edge[rng.choice(mesh.n_edges, size=n_poles, replace=False)] = 1
    divisor.vertex[rng.choice(mesh.n_vertices, size=n_vertices, replace=False)] = -1
    divisor.face[rng.choice(mesh.n_faces, size=n_faces, replace=False)] = -1
    return divisor


def _is_zero(values, scale, threshold):
    return np.abs(values) <= threshold * scale


def divisor_of(obj, w, hd=None, mesh=None, threshold=None):
    """
    Divisor of a meromorphic function (``+1`` at zeros of ``Re f`` and
    ``Im f``, ``-1`` at edges with nonzero residue) or of an edge
    differential (``-1`` at vertices and faces with nonzero residue, ``+1`` at
    edges where it vanishes). Zero tests are relative to the largest magnitude
    involved.
    """
    threshold = setting("PERIODS_ZERO_THRESHOLD", threshold)
    if isinstance(obj, EdgeDifferential):
        res = residues(obj, w)
        scale = max(
            float(np.abs(obj.values).max(initial=0.0)),
            float(np.abs(res.vertex).max(initial=0.0)),
            float(np.abs(res.face).max(initial=0.0)),
        )
        return Divisor(
            vertex=np.where(_is_zero(res.vertex, scale, threshold), 0, -1).astype(np.int8),
            edge=np.where(_is_zero(obj.values, scale, threshold), 1, 0).astype(np.int8),
            face=np.where(_is_zero(res.face, scale, threshold), 0, -1).astype(np.int8),
        )

    if isinstance(obj, MultiValuedField):
        obj = MeromorphicFunction.from_field(obj)
    mesh = mesh or hd.mesh
    res = edge_residues(obj, w, mesh=mesh)
    scale = max(
        float(np.abs(obj.re).max(initial=0.0)),
        float(np.abs(obj.im).max(initial=0.0)),
        float(np.abs(res).max(initial=0.0)),
    )
    return Divisor(
        vertex=np.where(_is_zero(obj.re, scale, threshold), 1, 0).astype(np.int8),
        edge=np.where(_is_zero(res, scale, threshold), 0, -1).astype(np.int8),
        face=np.where(_is_zero(obj.im, scale, threshold), 1, 0).astype(np.int8),
    )
