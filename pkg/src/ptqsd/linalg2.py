"""
Complex 2-vectors and 2x2 matrices.

Vectors are numpy arrays of shape ``(2,)`` and matrices arrays of shape
``(2, 2)``, both with dtype ``complex128``. Nothing here is specific to
PT-symmetric systems; the module exists so that the closed-form matrix
exponential and its series oracle sit next to each other.
"""

import math

import numpy as np

ComplexVec2 = np.ndarray
ComplexMat2 = np.ndarray

IDENTITY = np.eye(2, dtype=complex)
SWAP = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)

# eigenvalue gap below which the Jordan-limit branch is used
DEGENERACY_GAP = 1e-12


def vec2(a, b):
    return np.array([a, b], dtype=complex)


def mat2(m11, m12, m21, m22):
    return np.array([[m11, m12], [m21, m22]], dtype=complex)


def inner_hermitian(u, v):
    """Hermitian scalar product, conjugate-linear in the first argument."""
    return complex(np.vdot(u, v))


def norm_hermitian(u):
    return math.sqrt(max(inner_hermitian(u, u).real, 0.0))


def mat_apply(m, v):
    return np.asarray(m, dtype=complex) @ np.asarray(v, dtype=complex)


def adjoint(m):
    return np.conj(np.asarray(m, dtype=complex)).T


def det2(m):
    return complex(m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0])


def trace2(m):
    return complex(m[0, 0] + m[1, 1])


def expm_2x2(m):
    """Matrix exponential of a 2x2 complex matrix in closed form.

    With ``mu = tr(M)/2`` and ``q = sqrt(mu**2 - det(M))`` the eigenvalues are
    ``mu +/- q`` and

        exp(M) = e**mu * (cosh(q) I + sinh(q)/q (M - mu I)).

    This is Sylvester's spectral formula rewritten so that it stays accurate
    when the two eigenvalues approach each other. If the gap ``2|q|`` is below
    ``DEGENERACY_GAP`` the Jordan limit ``e**mu (I + (M - mu I))`` is used.
    """
    m = np.asarray(m, dtype=complex)
    mu = trace2(m) / 2
    q = np.sqrt(mu * mu - det2(m))
    shifted = m - mu * IDENTITY
    if 2 * abs(q) < DEGENERACY_GAP:
        return np.exp(mu) * (IDENTITY + shifted)
    return np.exp(mu) * (np.cosh(q) * IDENTITY + (np.sinh(q) / q) * shifted)


def expm_series(m, terms=30):
    """Scaling-and-squaring Taylor series for exp(M).

    Independent of :func:`expm_2x2`; used as its oracle. The argument is
    halved until its max-abs entry is below 1/2, the truncated series is
    summed, then the result is squared back.
    """
    m = np.asarray(m, dtype=complex)
    scale = np.abs(m).max()
    halvings = 0
    while scale > 0.5:
        scale /= 2
        halvings += 1
    a = m / 2**halvings
    result = IDENTITY.copy()
    term = IDENTITY.copy()
    for n in range(1, terms + 1):
        term = term @ a / n
        result = result + term
    for _ in range(halvings):
        result = result @ result
    return result
