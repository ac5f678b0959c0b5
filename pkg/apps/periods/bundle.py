import logging
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from apps.mesh.conf import setting

from .exceptions import SingularBlock

logger = logging.getLogger(__name__)

SINGULAR_RCOND = 1e-14


def complex_pairs(matrix):
    """JSON form of a complex matrix: nested lists of ``[re, im]`` pairs."""
    matrix = np.asarray(matrix, dtype=complex)
    return np.stack([matrix.real, matrix.imag], axis=-1).tolist()


def from_complex_pairs(data):
    array = np.asarray(data, dtype=float)
    return array[..., 0] + 1j * array[..., 1]


def frobenius(matrix):
    return float(np.linalg.norm(np.asarray(matrix), "fro"))


@dataclass(frozen=True, eq=False)
class PeriodBundle:
    """
    Period matrices of a triangulated surface: ``pi_t`` (B-periods of the
    first-kind integrals with A-periods ``delta``), ``pi_t_star`` (A-periods
    ``i delta``, divided by ``i``), their mean ``pi_q`` and the energy matrix
    they were derived from.
    """

    genus: int
    energy: np.ndarray
    pi_t: np.ndarray
    pi_t_star: np.ndarray
    pi_q: np.ndarray

    @property
    def diagnostics(self):
        im_t = self.pi_t.imag
        im_star = self.pi_t_star.imag
        return {
            "im_pi_t_asymmetry": frobenius(im_t - im_t.T),
            "im_pi_t_min_eigenvalue": float(np.linalg.eigvalsh((im_t + im_t.T) / 2).min()),
            "im_pi_t_star_min_eigenvalue": float(
                np.linalg.eigvalsh((im_star + im_star.T) / 2).min()
            ),
            "re_transpose_defect": frobenius(self.pi_t_star.real - self.pi_t.real.T),
        }

    def as_dict(self):
        return {
            "genus": self.genus,
            "energy": self.energy.tolist(),
            "pi_t": complex_pairs(self.pi_t),
            "pi_t_star": complex_pairs(self.pi_t_star),
            "pi_q": complex_pairs(self.pi_q),
            "diagnostics": self.diagnostics,
        }


def period_matrices_from_energy(energy):
    """
    Split a ``2g x 2g`` energy matrix ``[[E11, E12], [E21, E22]]`` into period
    matrices:

        Im pi_t* = E22^-1         Re pi_t  = -E22^-1 E21
        Re pi_t* = -E12 E22^-1    Im pi_t  = E11 - E12 E22^-1 E21
    """
    energy = np.asarray(energy, dtype=float)
    if energy.ndim != 2 or energy.shape[0] != energy.shape[1] or energy.shape[0] % 2:
        raise SingularBlock(f"Energy matrix has shape {energy.shape}.")
    energy = (energy + energy.T) / 2
    g = len(energy) // 2
    e11, e12 = energy[:g, :g], energy[:g, g:]
    e21, e22 = energy[g:, :g], energy[g:, g:]
    if np.linalg.cond(e22) * SINGULAR_RCOND > 1:
        raise SingularBlock("The beta-beta block of the energy matrix is singular.")

    im_star = np.linalg.inv(e22)
    re_t = -np.linalg.solve(e22, e21)
    re_star = -e12 @ im_star
    im_t = e11 - e12 @ np.linalg.solve(e22, e21)
    pi_t = re_t + 1j * im_t
    pi_t_star = re_star + 1j * im_star
    return PeriodBundle(
        genus=g,
        energy=energy,
        pi_t=pi_t,
        pi_t_star=pi_t_star,
        pi_q=(pi_t + pi_t_star) / 2,
    )


def transform_energy_matrix(energy, change):
    """Energy matrix in the basis whose cycles are the rows of ``change`` times the old ones."""
    inverse = np.linalg.inv(np.asarray(change, dtype=float))
    return inverse.T @ energy @ inverse


class Check(NamedTuple):
    passed: bool
    defect: float


def _symmetric(matrix, tol):
    scale = max(1.0, frobenius(matrix))
    defect = frobenius(matrix - matrix.T)
    return Check(defect <= tol * scale, defect)


def _positive(matrix):
    smallest = float(np.linalg.eigvalsh((matrix + matrix.T) / 2).min())
    return Check(smallest > 0, smallest)


def validate_period_bundle(pb, tol=None):
    """
    Check the structure of a period bundle. ``complex_linear`` reports whether
    ``pi_t == pi_t_star``; it is informational and does not count as a failure.
    """
    tol = setting("PERIODS_IDENTITY_RTOL", tol)
    scale = max(1.0, frobenius(pb.pi_t))
    transpose_defect = frobenius(pb.pi_t_star.real - pb.pi_t.real.T)
    linearity_defect = frobenius(pb.pi_t - pb.pi_t_star)
    checks = {
        "energy_symmetric": _symmetric(pb.energy, tol),
        "energy_positive": _positive(pb.energy),
        "im_pi_t_symmetric": _symmetric(pb.pi_t.imag, tol),
        "im_pi_t_positive": _positive(pb.pi_t.imag),
        "im_pi_t_star_symmetric": _symmetric(pb.pi_t_star.imag, tol),
        "im_pi_t_star_positive": _positive(pb.pi_t_star.imag),
        "re_pi_t_star_is_transpose": Check(transpose_defect <= tol * scale, transpose_defect),
        "pi_q_symmetric": _symmetric(pb.pi_q, tol),
        "im_pi_q_positive": _positive(pb.pi_q.imag),
    }
    failed = [name for name, check in checks.items() if not check.passed]
    if failed:
        logger.warning(f"Period bundle failed checks: {', '.join(failed)}")
    checks["complex_linear"] = Check(linearity_defect <= tol * scale, linearity_defect)
    return checks


def bundle_is_valid(checks):
    return all(check.passed for name, check in checks.items() if name != "complex_linear")
