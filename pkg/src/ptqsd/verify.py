"""Self-checks of the algebraic identities the protocol relies on.

Used by ``ptqsd verify``; each check returns ``(name, passed, worst_error)``.
"""

import math

import numpy as np

from .discriminate import design_cpt_orthogonal
from .linalg2 import IDENTITY, adjoint, det2, expm_2x2, expm_series, trace2
from .ptcore import (
    FamilyParams,
    PTHamiltonian,
    c_operator,
    cpt_inner,
    cpt_projector,
    gram_evolution,
    propagator,
    pt_conjugate,
    state_family,
)


def random_hamiltonians(rng, count):
    out = []
    while len(out) < count:
        s = rng.uniform(0.2, 3.0)
        beta = rng.uniform(-math.pi, math.pi)
        r = rng.uniform(-3.0, 3.0)
        if abs(r * math.sin(beta)) < 0.95 * s:
            out.append(PTHamiltonian(r, s, beta))
    return out


def random_unit_disc_matrix(rng):
    radius = np.sqrt(rng.uniform(0, 1, 4))
    phase = rng.uniform(0, 2 * math.pi, 4)
    return (radius * np.exp(1j * phase)).reshape(2, 2)


def check_expm(rng, count=100):
    worst = 0.0
    for _ in range(count):
        m = random_unit_disc_matrix(rng)
        e = expm_2x2(m)
        worst = max(
            worst,
            np.abs(e - expm_series(m)).max(),
            np.abs(e @ expm_2x2(-m) - IDENTITY).max(),
            abs(det2(e) - np.exp(trace2(m))),
        )
    return "expm_2x2 vs series, inverse, det", worst <= 1e-10, worst


def check_c_operator(rng, count=50):
    worst = 0.0
    for h in random_hamiltonians(rng, count):
        c = c_operator(h)
        hm = h.matrix()
        v = rng.normal(size=2) + 1j * rng.normal(size=2)
        worst = max(
            worst,
            np.abs(c @ c - IDENTITY).max(),
            np.abs(c @ hm - hm @ c).max() / h.s,
            np.abs(c @ pt_conjugate(v) - pt_conjugate(c @ v)).max(),
        )
    return "C^2 = I, [C, H] = 0, [C, PT] = 0", worst <= 1e-12, worst


def check_projectors(epsilons):
    worst = 0.0
    for eps in epsilons:
        psi1, psi2, _ = state_family(FamilyParams(eps))
        h = design_cpt_orthogonal(psi1, psi2)
        p1 = cpt_projector(h, psi1)
        p2 = cpt_projector(h, psi2)
        worst = max(
            worst,
            np.abs(p1 @ p1 - p1).max(),
            np.abs(p2 @ p2 - p2).max(),
            abs(trace2(p1) - 1),
            np.abs(p1 + p2 - IDENTITY).max(),
        )
    return "CPT projector algebra", worst <= 1e-10, worst


def check_gram(rng, count=20, points=50):
    worst = 0.0
    for h in random_hamiltonians(rng, count):
        for t in np.linspace(0, h.period, points):
            u = expm_series(-1j * h.matrix() * t)
            g = gram_evolution(h, t)
            worst = max(
                worst,
                np.abs(g - adjoint(u) @ u).max(),
                np.abs(propagator(h, t) - u).max(),
                np.abs(g - adjoint(g)).max(),
                abs(det2(g) - 1),
            )
    return "Gram evolution vs series oracle", worst <= 1e-10, worst


def check_persistence(epsilons, points=200):
    worst = 0.0
    for eps in epsilons:
        psi1, psi2, _ = state_family(FamilyParams(eps))
        h = design_cpt_orthogonal(psi1, psi2)
        for t in np.linspace(0, 2 * h.period, points):
            u = propagator(h, t)
            worst = max(worst, abs(cpt_inner(h, u @ psi1, u @ psi2)))
    return "CPT orthogonality persists in time", worst <= 1e-10, worst


def run_all(seed=0, epsilons=None):
    rng = np.random.default_rng(seed)
    if epsilons is None:
        epsilons = [round(0.1 * k, 1) for k in range(1, 16)]
    return [
        check_expm(rng),
        check_c_operator(rng),
        check_projectors(epsilons),
        check_gram(rng),
        check_persistence(epsilons),
    ]
