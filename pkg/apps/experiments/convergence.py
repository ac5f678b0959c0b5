"""
Empirical convergence of discrete period matrices under refinement.

For each ``n`` the family's surface is generated, its period matrix computed
and compared with the reference in the Frobenius norm. The error is also
divided by the predicted order ``lambda_s(h)``; a nearly constant scaled
column confirms the exponent.
"""

import logging
import math
import time
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from django.db import transaction

from apps.gen.exceptions import InvalidGeneratorParameter
from apps.gen.surfaces import GENERATORS
from apps.mesh.conf import setting
from apps.mesh.geometry import geometry_report
from apps.periods.bundle import complex_pairs, frobenius
from apps.periods.pipeline import compute_period_bundle

from .models import ConvergenceRun, ConvergenceSample

logger = logging.getLogger(__name__)

REFINED_FAMILIES = ("flat_torus", "genus2_squares", "genus2_parallelograms")
HEADER = ["n", "h", "error", "scaled_error", "observed_order", "elapsed_seconds"]


def lambda_s(h, gamma_s):
    """Predicted order of the period matrix error for mesh size ``h``."""
    if math.isclose(gamma_s, 0.5, rel_tol=1e-9):
        return h * abs(math.log(h))
    if gamma_s > 0.5:
        return h
    return h ** (2 * gamma_s)


@dataclass(frozen=True)
class Sample:
    n: int
    h: float
    error: float
    scaled_error: float
    pi_t: np.ndarray
    elapsed_seconds: float
    observed_order: Optional[float] = None


@dataclass
class ConvergenceResult:
    family: str
    eta: Optional[complex]
    reference: np.ndarray
    gamma_s: float
    solver_tol: float
    samples: list = field(default_factory=list)

    def rows(self):
        return [
            [s.n, s.h, s.error, s.scaled_error, s.observed_order, s.elapsed_seconds]
            for s in self.samples
        ]

    def as_dict(self):
        return {
            "family": self.family,
            "eta": None if self.eta is None else [self.eta.real, self.eta.imag],
            "reference": complex_pairs(self.reference),
            "gamma_s": self.gamma_s,
            "solver_tol": self.solver_tol,
            "samples": [dict(zip(HEADER, row)) for row in self.rows()],
        }


def _generate(family, n, eta):
    if family not in REFINED_FAMILIES:
        raise InvalidGeneratorParameter(
            f"Unknown family {family!r}; choose from {', '.join(REFINED_FAMILIES)}."
        )
    if family == "genus2_squares":
        return GENERATORS[family](n)
    if eta is None:
        raise InvalidGeneratorParameter(f"Family {family!r} needs eta.")
    return GENERATORS[family](n=n, eta=eta)


def run_convergence(family, ns, reference=None, eta=None, tol=None):
    """
    Refine ``family`` over ``ns`` and measure ``||pi_t - reference||``. The
    reference defaults to the one shipped with the generated surface.
    """
    tol = setting("PERIODS_SOLVER_TOL", tol)
    eta = None if eta is None else complex(eta)
    result = None
    previous = None
    for n in sorted(int(n) for n in ns):
        started = time.perf_counter()
        surface = _generate(family, n, eta)
        report = geometry_report(surface.mesh)
        if result is None:
            ref = surface.reference if reference is None else reference
            if ref is None:
                raise InvalidGeneratorParameter(
                    f"No reference period matrix for {family!r}; pass one."
                )
            result = ConvergenceResult(
                family=family,
                eta=eta,
                reference=np.asarray(ref, dtype=complex),
                gamma_s=report.gamma_s,
                solver_tol=tol,
            )

        bundle = compute_period_bundle(surface.mesh, loops=surface.loops, tol=tol).bundle
        elapsed = time.perf_counter() - started

        error = frobenius(bundle.pi_t - result.reference)
        order = None
        if previous is not None and previous.error > 0 and error > 0 and previous.h != report.h:
            order = math.log(previous.error / error) / math.log(previous.h / report.h)
        sample = Sample(
            n=n,
            h=report.h,
            error=error,
            scaled_error=error / lambda_s(report.h, result.gamma_s),
            pi_t=bundle.pi_t,
            elapsed_seconds=elapsed,
            observed_order=order,
        )
        logger.info(
            f"{family} n={n}: h={sample.h:.4g} error={sample.error:.4g} "
            f"scaled={sample.scaled_error:.4g} in {elapsed:.2f}s"
        )
        result.samples.append(sample)
        previous = sample
    return result


@transaction.atomic
def save_convergence(result):
    """Persist ``result`` as a ConvergenceRun with one sample per refinement level."""
    run = ConvergenceRun.objects.create(
        family=result.family,
        eta_re=None if result.eta is None else result.eta.real,
        eta_im=None if result.eta is None else result.eta.imag,
        reference=complex_pairs(result.reference),
        gamma_s=result.gamma_s,
        solver_tol=result.solver_tol,
    )
    ConvergenceSample.objects.bulk_create(
        ConvergenceSample(
            run=run,
            n=s.n,
            h=s.h,
            error=s.error,
            scaled_error=s.scaled_error,
            pi_t=complex_pairs(s.pi_t),
            elapsed_seconds=s.elapsed_seconds,
        )
        for s in result.samples
    )
    return run
