"""
Integer linear algebra for intersection forms.
"""

import numpy as np

from .exceptions import IntersectionFormError


def standard_symplectic(g):
    """``J = [[0, I], [-I, 0]]`` of size ``2g``."""
    eye = np.eye(g, dtype=np.int64)
    zero = np.zeros((g, g), dtype=np.int64)
    return np.block([[zero, eye], [-eye, zero]])


def integer_inverse(matrix):
    """Inverse of a unimodular integer matrix, checked to be integral."""
    inverse = np.linalg.inv(np.asarray(matrix, dtype=float))
    rounded = np.rint(inverse)
    if not np.allclose(inverse, rounded, atol=1e-6):
        raise IntersectionFormError("Matrix is not unimodular over the integers.")
    return rounded.astype(np.int64)


def check_intersection_form(omega):
    """Raise unless ``omega`` is an antisymmetric unimodular integer matrix."""
    omega = np.asarray(omega)
    if omega.ndim != 2 or omega.shape[0] != omega.shape[1] or omega.shape[0] % 2:
        raise IntersectionFormError(f"Intersection form has shape {omega.shape}.")
    if np.any(omega != -omega.T):
        raise IntersectionFormError("Intersection form is not antisymmetric.")
    if round(abs(np.linalg.det(omega.astype(float)))) != 1:
        raise IntersectionFormError("Intersection form is not unimodular.")


def symplectic_reduction(omega):
    """
    Return an integer matrix ``P`` with ``P @ omega @ P.T == J``.

    Rows of ``P`` express the new basis in terms of the old one, first the
    ``g`` alpha cycles, then the ``g`` beta cycles. Works by a symplectic
    Gram-Schmidt over the integers: Euclid's algorithm on the current row
    produces a partner with intersection one, then the pair is split off.
    """
    omega = np.asarray(omega, dtype=np.int64)
    check_intersection_form(omega)
    n = len(omega)
    vectors = np.eye(n, dtype=np.int64)

    def form(x, y):
        return int(x @ omega @ y)

    for p in range(0, n, 2):
        while True:
            row = np.array([form(vectors[p], vectors[k]) for k in range(n)])
            candidates = [k for k in range(p + 1, n) if row[k] != 0]
            if not candidates:
                raise IntersectionFormError("Intersection form is degenerate.")
            pivot = min(candidates, key=lambda k: abs(row[k]))
            vectors[[p + 1, pivot]] = vectors[[pivot, p + 1]]
            row[[p + 1, pivot]] = row[[pivot, p + 1]]
            done = True
            for k in range(p + 2, n):
                quotient = row[k] // row[p + 1]
                if quotient:
                    vectors[k] -= quotient * vectors[p + 1]
                if row[k] - quotient * row[p + 1]:
                    done = False
            if done:
                break
        if form(vectors[p], vectors[p + 1]) < 0:
            vectors[p + 1] *= -1
        if form(vectors[p], vectors[p + 1]) != 1:
            raise IntersectionFormError("Intersection form is not unimodular.")
        for k in range(p + 2, n):
            a = form(vectors[k], vectors[p + 1])
            b = form(vectors[k], vectors[p])
            vectors[k] = vectors[k] - a * vectors[p] + b * vectors[p + 1]

    order = list(range(0, n, 2)) + list(range(1, n, 2))
    result = vectors[order]
    if np.any(result @ omega @ result.T != standard_symplectic(n // 2)):
        raise IntersectionFormError("Symplectic reduction failed.")
    return result
