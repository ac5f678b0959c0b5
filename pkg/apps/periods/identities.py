from dataclasses import dataclass
from typing import Optional

import numpy as np

from apps.harmonic.fields import dirichlet_energy, edge_du, edge_dv


@dataclass(frozen=True)
class BilinearResidual:
    """
    Defects of the bilinear identity and its specializations. ``None`` marks a
    check that does not apply to the given pair.
    """

    bilinear: float
    lhs: float
    rhs: float
    energy_conservation: Optional[float] = None
    period_symmetry: Optional[float] = None

    def worst(self):
        values = [self.bilinear, self.energy_conservation, self.period_symmetry]
        return max(v for v in values if v is not None)


def bilinear_sides(f, f_prime, hd):
    """
    Both sides of ``sum_e Dv'(e) Du(e) = sum_k (A_k B'_k - B_k A'_k)`` with
    ``u = Re f`` and ``v' = Im f'``; the right-hand side reads the real periods
    of ``f`` and the imaginary periods of ``f'``.
    """
    g = hd.genus
    lhs = float(np.sum(edge_dv(f_prime, hd) * edge_du(f, hd)))
    a, b = f.p_re[:g], f.p_re[g:]
    a_prime, b_prime = f_prime.p_im[:g], f_prime.p_im[g:]
    rhs = float(a @ b_prime - b @ a_prime)
    return lhs, rhs


def riemann_bilinear_residual(f, f_prime, hd, w, first_kind=False):
    """
    Defect of the bilinear identity for any pair of multi-valued fields. With
    ``first_kind`` both fields are taken to be first-kind integrals and the
    energy conservation and period symmetry specializations are evaluated too.
    """
    lhs, rhs = bilinear_sides(f, f_prime, hd)
    scale = max(1.0, abs(lhs), abs(rhs))

    conservation = None
    symmetry = None
    if first_kind and f.has_imaginary_part:
        A, B = f.a_periods, f.b_periods
        energy = dirichlet_energy(f, hd, w)
        conservation = abs(energy + float(np.imag(np.sum(A * np.conj(B))))) / max(1.0, energy)
        if f_prime.has_imaginary_part:
            A2, B2 = f_prime.a_periods, f_prime.b_periods
            symmetry = abs(float(np.imag(np.sum(A * B2 - B * A2))))
    return BilinearResidual(
        bilinear=abs(lhs - rhs) / scale,
        lhs=lhs,
        rhs=rhs,
        energy_conservation=conservation,
        period_symmetry=symmetry,
    )
