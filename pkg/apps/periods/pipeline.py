import hashlib
import logging
from dataclasses import dataclass

from django.core.cache import cache

from apps.harmonic.solvers import LaplaceSolver
from apps.mesh.conf import setting
from apps.mesh.geometry import cotan_weights
from apps.mesh.io import mesh_digest
from apps.topology.homology import homology_basis

from .bundle import period_matrices_from_energy, validate_period_bundle
from .integrals import energy_matrix

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class PeriodComputation:
    """Everything the period pipeline builds for one mesh, for reuse downstream."""

    mesh: object
    weights: object
    homology: object
    solver: LaplaceSolver
    bundle: object


def compute_period_bundle(mesh, loops=None, root_vertex=0, root_face=0, tol=None):
    w = cotan_weights(mesh)
    hd = homology_basis(mesh, root_vertex=root_vertex, root_face=root_face, loops=loops)
    solver = LaplaceSolver(mesh, w, hd, anchor_vertex=root_vertex, tol=tol)
    bundle = period_matrices_from_energy(energy_matrix(mesh, w, hd, solver=solver))
    logger.info(f"Computed period bundle of genus {hd.genus} for {mesh!r}")
    return PeriodComputation(mesh=mesh, weights=w, homology=hd, solver=solver, bundle=bundle)


def _cache_key(mesh, loops, tol):
    digest = hashlib.sha256(mesh_digest(mesh).encode())
    digest.update(repr(None if loops is None else [list(map(int, loop)) for loop in loops]).encode())
    digest.update(repr(setting("PERIODS_SOLVER_TOL", tol)).encode())
    return f"periods:bundle:{digest.hexdigest()}"


def period_bundle_payload(mesh, loops=None, tol=None):
    """
    JSON-ready period bundle with its validation checks, cached by mesh digest,
    basis loops and solver tolerance.
    """
    key = _cache_key(mesh, loops, tol)
    payload = cache.get(key)
    if payload is not None:
        logger.info(f"Period bundle cache hit for {mesh!r}")
        return payload

    computation = compute_period_bundle(mesh, loops=loops, tol=tol)
    checks = validate_period_bundle(computation.bundle)
    payload = computation.bundle.as_dict()
    payload["checks"] = {
        name: {"passed": bool(check.passed), "defect": check.defect}
        for name, check in checks.items()
    }
    payload["basis_loops"] = [
        [int(he) for he in loop] for loop in computation.homology.basis_cycles
    ]
    cache.set(key, payload, timeout=setting("PERIODS_CACHE_TIMEOUT"))
    return payload
