"""
PT-symmetric 2x2 Hamiltonians and the CPT inner product they induce.

Conventions: parity is the swap of the two components, time reversal is
componentwise complex conjugation, and the CPT product of ``u`` and ``v`` is
``(C P conj(u))^T v``. Units have hbar = 1.
"""

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import BrokenPTRegime, InvalidParameter, ZeroCPTNorm
from .linalg2 import IDENTITY, SWAP, adjoint, vec2

# threshold on |cpt_inner(u, u)| for building a projector
ZERO_NORM = 1e-10


@dataclass(frozen=True)
class PTHamiltonian:
    """H = [[r e^{i beta}, s], [s, r e^{-i beta}]] in its unbroken regime.

    ``alpha`` is the metric angle, ``sin(alpha) = r sin(beta) / s``, and
    ``omega = s cos(alpha)`` is half the gap between the two real
    eigenvalues ``r cos(beta) +/- omega``.
    """

    r: float
    s: float
    beta: float

    def __post_init__(self):
        for name in ("r", "s", "beta"):
            if not math.isfinite(getattr(self, name)):
                raise InvalidParameter(f"{name} must be finite, got {getattr(self, name)!r}")
        if self.s <= 0:
            raise InvalidParameter(f"s must be positive, got s={self.s!r}")
        if abs(self.r * math.sin(self.beta)) >= self.s:
            raise BrokenPTRegime(
                f"|r sin(beta)| = {abs(self.r * math.sin(self.beta)):.12g} >= s = {self.s:.12g}"
            )

    @property
    def sin_alpha(self):
        return self.r * math.sin(self.beta) / self.s

    @property
    def alpha(self):
        return math.asin(self.sin_alpha)

    @property
    def omega(self):
        return self.s * math.cos(self.alpha)

    @property
    def period(self):
        """Period pi/omega of the Gram evolution matrix."""
        return math.pi / self.omega

    def matrix(self):
        r, s, b = self.r, self.s, self.beta
        return np.array(
            [[r * np.exp(1j * b), s], [s, r * np.exp(-1j * b)]], dtype=complex
        )

    def eigenvalues(self):
        e0 = self.r * math.cos(self.beta)
        return np.array([e0 - self.omega, e0 + self.omega])


def pt_hamiltonian(r, s, beta):
    return PTHamiltonian(float(r), float(s), float(beta))


@dataclass(frozen=True)
class FamilyParams:
    epsilon: float
    gamma: float = 0.0
    delta: float = 0.0

    def __post_init__(self):
        if not 0 < self.epsilon <= math.pi / 2:
            raise InvalidParameter(f"epsilon must lie in (0, pi/2], got {self.epsilon!r}")
        if not (math.isfinite(self.gamma) and math.isfinite(self.delta)):
            raise InvalidParameter("gamma and delta must be finite")


class StateTriple(NamedTuple):
    psi1: np.ndarray
    psi2: np.ndarray
    psi3: np.ndarray


def rotated_state(theta, delta=0.0):
    """(cos(theta), -i e^{i delta} sin(theta))."""
    return vec2(math.cos(theta), -1j * np.exp(1j * delta) * math.sin(theta))


def state_family(p):
    """The three candidate states parametrized by (epsilon, gamma, delta)."""
    theta1 = (math.pi - 2 * p.epsilon) / 4
    theta2 = (math.pi + 2 * p.epsilon) / 4
    return StateTriple(
        rotated_state(theta1),
        rotated_state(theta2),
        rotated_state(theta1 + p.gamma, p.delta),
    )


def c_operator(h):
    sa = h.sin_alpha
    ca = math.cos(h.alpha)
    return np.array([[1j * sa, 1], [1, -1j * sa]], dtype=complex) / ca


def pt_conjugate(v):
    """Apply the antilinear PT map: swap components and conjugate."""
    return SWAP @ np.conj(np.asarray(v, dtype=complex))


def cpt_metric(h):
    """Hermitian positive-definite G with cpt_inner(u, v) = u^dagger G v."""
    return (c_operator(h) @ SWAP).T


def cpt_inner(h, u, v):
    return complex((c_operator(h) @ pt_conjugate(u)) @ np.asarray(v, dtype=complex))


def cpt_norm(h, u):
    return math.sqrt(max(cpt_inner(h, u, u).real, 0.0))


def cpt_projector(h, u):
    """Projector onto the line through ``u`` that is orthogonal in the CPT metric."""
    u = np.asarray(u, dtype=complex)
    self_overlap = cpt_inner(h, u, u)
    if abs(self_overlap) <= ZERO_NORM:
        raise ZeroCPTNorm(f"CPT self-overlap {abs(self_overlap):.3e} is below {ZERO_NORM:g}")
    return np.outer(u, c_operator(h) @ pt_conjugate(u)) / self_overlap


def propagator(h, t):
    """exp(-i H t) from its closed form."""
    if not math.isfinite(t):
        raise InvalidParameter(f"t must be finite, got {t!r}")
    a = h.alpha
    x = h.omega * t
    phase = np.exp(-1j * h.r * math.cos(h.beta) * t) / math.cos(a)
    return phase * np.array(
        [[math.cos(x - a), -1j * math.sin(x)], [-1j * math.sin(x), math.cos(x + a)]],
        dtype=complex,
    )


def _gram_entries(alpha, x):
    """Entries (g11, g12, g22) of the Gram matrix at phase x = omega t; x may be an array."""
    inv = 1.0 / math.cos(alpha) ** 2
    s2 = np.sin(x) ** 2
    g11 = (np.cos(x - alpha) ** 2 + s2) * inv
    g22 = (np.cos(x + alpha) ** 2 + s2) * inv
    g12 = -2j * s2 * math.sin(alpha) * inv
    return g11, g12, g22


def gram_evolution(h, t):
    """exp(i H^dagger t) exp(-i H t), the matrix of evolved Hermitian overlaps."""
    if not math.isfinite(t):
        raise InvalidParameter(f"t must be finite, got {t!r}")
    g11, g12, g22 = _gram_entries(h.alpha, h.omega * t)
    return np.array([[g11, g12], [np.conj(g12), g22]], dtype=complex)


def evolved_overlap(h, u, v, t):
    """Hermitian overlap <U(t)u | U(t)v> of two states evolved for time t.

    ``t`` may be a numpy array; the result then has the same shape.
    """
    u = np.conj(np.asarray(u, dtype=complex))
    v = np.asarray(v, dtype=complex)
    g11, g12, g22 = _gram_entries(h.alpha, h.omega * np.asarray(t, dtype=float))
    return (
        u[0] * g11 * v[0] + u[0] * g12 * v[1] + u[1] * np.conj(g12) * v[0] + u[1] * g22 * v[1]
    )


def unitary_defect(m):
    return float(np.abs(adjoint(m) @ m - IDENTITY).max())


def spread_family(n, epsilon, spacing=0.1, delta=0.0):
    """N real-rotated states alternating on either side of pi/4.

    Odd-numbered states sit at ``pi/4 - (epsilon/2 + q*spacing)`` and
    even-numbered ones at ``pi/4 + (epsilon/2 + q*spacing)`` with
    ``q = (m - 1) // 2``. The first two coincide with psi1 and psi2 of
    :func:`state_family`. Alternation matters: two such states can be made
    CPT-orthogonal only when they lie on opposite sides of pi/4 (mod pi/2).
    """
    if n < 1:
        raise InvalidParameter(f"n must be positive, got {n!r}")
    states = []
    for m in range(1, n + 1):
        offset = epsilon / 2 + ((m - 1) // 2) * spacing
        theta = math.pi / 4 + (offset if m % 2 == 0 else -offset)
        states.append(rotated_state(theta, delta if m > 2 else 0.0))
    return states
