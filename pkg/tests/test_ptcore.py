import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import designed, family, theta1
from ptqsd.errors import BrokenPTRegime, InvalidParameter, ZeroCPTNorm
from ptqsd.linalg2 import IDENTITY, SWAP, adjoint, det2, expm_series, inner_hermitian, trace2, vec2
from ptqsd.ptcore import (
    FamilyParams,
    PTHamiltonian,
    c_operator,
    cpt_inner,
    cpt_metric,
    cpt_projector,
    gram_evolution,
    propagator,
    pt_conjugate,
    pt_hamiltonian,
    spread_family,
    state_family,
)


@st.composite
def unbroken(draw):
    s = draw(st.floats(0.1, 5.0))
    beta = draw(st.floats(-math.pi, math.pi))
    limit = 0.98 * s / max(abs(math.sin(beta)), 1e-3)
    r = draw(st.floats(-min(limit, 5.0), min(limit, 5.0)))
    return PTHamiltonian(r, s, beta)


complex_vecs = st.lists(
    st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False),
    min_size=2,
    max_size=2,
).map(lambda xs: np.array(xs, dtype=complex))


# -- Hamiltonian ---------------------------------------------------------------


def test_pt_hamiltonian_reference_point():
    h = pt_hamiltonian(1, 2, math.pi / 2)
    assert h.alpha == pytest.approx(math.pi / 6, abs=1e-15)
    # oracle: half the gap between the eigenvalues of the assembled matrix
    ev = np.linalg.eigvals(h.matrix())
    assert np.abs(ev.imag).max() < 1e-12
    assert h.omega == pytest.approx(abs(ev[0] - ev[1]) / 2, abs=1e-12)
    assert h.omega == pytest.approx(1.7320508, abs=1e-7)


def test_hermitian_when_beta_zero():
    h = pt_hamiltonian(1, 1, 0)
    assert h.alpha == 0 and h.omega == 1
    np.testing.assert_array_equal(h.matrix(), adjoint(h.matrix()))


def test_broken_and_invalid():
    with pytest.raises(BrokenPTRegime):
        pt_hamiltonian(2, 1, math.pi / 2)
    with pytest.raises(BrokenPTRegime):
        pt_hamiltonian(1, 1, math.pi / 2)  # exceptional point
    with pytest.raises(InvalidParameter):
        pt_hamiltonian(0.1, 0, 0)
    with pytest.raises(InvalidParameter):
        pt_hamiltonian(0.1, -1, 0)


def test_eigenvalues_real_for_random_unbroken(rng):
    for _ in range(1000):
        s = rng.uniform(0.05, 5)
        beta = rng.uniform(-math.pi, math.pi)
        r = rng.uniform(-1, 1) * s / max(abs(math.sin(beta)), 1e-9) * 0.999
        r = float(np.clip(r, -50, 50))
        h = PTHamiltonian(r, s, beta)
        ev = np.linalg.eigvals(h.matrix())
        assert np.abs(ev.imag).max() <= 1e-10 * s
        np.testing.assert_allclose(np.sort(ev.real), h.eigenvalues(), atol=1e-9 * max(s, abs(r)))


# -- C operator ------------------------------------------------------------------


def test_c_operator_reduces_to_parity():
    np.testing.assert_array_equal(c_operator(pt_hamiltonian(1, 1, 0)), SWAP)


@settings(max_examples=200, deadline=None)
@given(unbroken(), complex_vecs)
def test_c_operator_algebra(h, v):
    c = c_operator(h)
    hm = h.matrix()
    np.testing.assert_allclose(c @ c, IDENTITY, atol=1e-12 * max(1, np.abs(c).max() ** 2))
    assert np.abs(c @ hm - hm @ c).max() <= 1e-12 * h.s * max(1, np.abs(c).max() * np.abs(hm).max() / h.s)
    # [C, PT] = 0 with PT the antilinear swap-and-conjugate map
    np.testing.assert_allclose(c @ pt_conjugate(v), pt_conjugate(c @ v), atol=1e-12 * max(1, np.abs(c @ v).max()))


@settings(max_examples=200, deadline=None)
@given(unbroken(), complex_vecs)
def test_cpt_metric_positive(h, u):
    n2 = np.vdot(u, u).real
    if n2 < 1e-6:
        return
    val = cpt_inner(h, u, u)
    assert abs(val.imag) <= 1e-12 * max(1.0, abs(val))
    assert val.real > 0
    # metric matrix is Hermitian with eigenvalues (1 -/+ sin a)/cos a
    g = cpt_metric(h)
    np.testing.assert_allclose(g, adjoint(g), atol=1e-15)


@settings(max_examples=50, deadline=None)
@given(unbroken())
def test_evolution_preserves_cpt_product(h):
    u, v = vec2(0.3 + 0.1j, -0.7), vec2(0.2, 0.5 - 0.4j)
    for t in np.linspace(0, 3 * h.period, 7):
        p = propagator(h, t)
        assert abs(cpt_inner(h, p @ u, p @ v) - cpt_inner(h, u, v)) <= 1e-10 * max(1, abs(cpt_inner(h, u, v)))


# -- states ---------------------------------------------------------------------


def test_state_family_endpoints():
    psi1, psi2, psi3 = state_family(FamilyParams(math.pi / 2))
    np.testing.assert_allclose(psi1, [1, 0], atol=1e-16)
    np.testing.assert_allclose(psi2, [0, -1j], atol=1e-16)
    np.testing.assert_array_equal(psi3, psi1)


def test_state_family_norms():
    for psi in state_family(FamilyParams(math.pi / 6, 0.4, 0.2)):
        assert abs(np.vdot(psi, psi) - 1) <= 1e-12


def test_family_params_validation():
    for bad in (0.0, -0.1, 2.0):
        with pytest.raises(InvalidParameter):
            FamilyParams(bad)


def test_spread_family_starts_with_paper_pair():
    eps = 0.7
    states = spread_family(5, eps, 0.1)
    psi1, psi2, _ = family(eps)
    np.testing.assert_allclose(states[0], psi1)
    np.testing.assert_allclose(states[1], psi2)
    assert len(states) == 5


# -- CPT inner product and projectors ---------------------------------------------


def test_cpt_inner_is_hermitian_when_alpha_zero(rng):
    h = pt_hamiltonian(0.7, 1.3, 0.0)
    for _ in range(50):
        u = rng.normal(size=2) + 1j * rng.normal(size=2)
        v = rng.normal(size=2) + 1j * rng.normal(size=2)
        assert cpt_inner(h, u, v) == pytest.approx(inner_hermitian(u, v), abs=1e-12)


@pytest.mark.parametrize("eps", np.linspace(0.1, 1.5, 15))
def test_cpt_orthogonal_family_pair(eps):
    (psi1, psi2, _), h = designed(eps)
    assert h.sin_alpha == pytest.approx(math.cos(eps), abs=1e-14)
    assert abs(cpt_inner(h, psi1, psi2)) <= 1e-12


@pytest.mark.parametrize("eps", np.linspace(0.1, 1.5, 15))
def test_cpt_self_overlap(eps):
    (psi1, _, _), h = designed(eps)
    # independent expansion: (1 - sin(a) sin(2 theta1)) / cos(a) with sin(a) = cos(eps)
    sa = math.cos(eps)
    oracle = (1 - sa * math.sin(2 * theta1(eps))) / math.sqrt(1 - sa * sa)
    got = cpt_inner(h, psi1, psi1)
    assert got.real == pytest.approx(oracle, abs=1e-12)
    assert abs(got.imag) < 1e-14
    assert got.real == pytest.approx(math.sin(eps), abs=1e-12)


def closed_projectors(eps):
    se, ce = math.sin(eps), math.cos(eps)
    p1 = np.array([[1 + se, -1j * ce], [-1j * ce, -1 + se]]) / (2 * se)
    p2 = np.array([[-1 + se, 1j * ce], [1j * ce, 1 + se]]) / (2 * se)
    return p1, p2


@pytest.mark.parametrize("eps", np.linspace(0.1, 1.5, 15))
def test_projectors_match_closed_forms(eps):
    (psi1, psi2, _), h = designed(eps)
    p1, p2 = closed_projectors(eps)
    np.testing.assert_allclose(cpt_projector(h, psi1), p1, rtol=0, atol=1e-12)
    np.testing.assert_allclose(cpt_projector(h, psi2), p2, rtol=0, atol=1e-12)
    np.testing.assert_allclose(p1 + p2, IDENTITY, atol=1e-12)


def test_projector_at_quarter_turn():
    (psi1, _, _), h = designed(math.pi / 2)
    np.testing.assert_allclose(cpt_projector(h, psi1), [[1, 0], [0, 0]], atol=1e-15)


@settings(max_examples=100, deadline=None)
@given(unbroken(), complex_vecs)
def test_projector_algebra(h, u):
    if np.vdot(u, u).real < 1e-4:
        return
    p = cpt_projector(h, u)
    scale = max(1.0, np.abs(p).max())
    np.testing.assert_allclose(p @ p, p, atol=1e-10 * scale**2)
    assert abs(trace2(p) - 1) <= 1e-10 * scale
    np.testing.assert_allclose(p @ u, u, atol=1e-10 * scale * np.abs(u).max())


def test_projector_zero_norm():
    with pytest.raises(ZeroCPTNorm):
        cpt_projector(pt_hamiltonian(0.5, 1, 1), vec2(0, 0))


# -- propagator and Gram matrix ---------------------------------------------------


def test_propagator_identity_at_zero():
    np.testing.assert_allclose(propagator(pt_hamiltonian(1, 2, math.pi / 2), 0.0), IDENTITY, atol=1e-15)


def test_propagator_unitary_in_hermitian_limit():
    h = pt_hamiltonian(0.8, 1.1, 0.0)
    for t in np.linspace(0, 10, 21):
        p = propagator(h, t)
        np.testing.assert_allclose(adjoint(p) @ p, IDENTITY, atol=1e-12)


def test_propagator_reference_point():
    h = pt_hamiltonian(1, 2, math.pi / 2)
    oracle = expm_series(-1j * h.matrix() * 0.7)
    np.testing.assert_allclose(propagator(h, 0.7), oracle, rtol=0, atol=1e-10)


@settings(max_examples=40, deadline=None)
@given(unbroken(), st.floats(-20, 20))
def test_propagator_matches_series(h, t):
    oracle = expm_series(-1j * h.matrix() * t)
    scale = max(1.0, np.abs(oracle).max())
    np.testing.assert_allclose(propagator(h, t), oracle, rtol=0, atol=1e-10 * scale)


def test_gram_trivial_cases():
    h = pt_hamiltonian(1, 2, math.pi / 2)
    np.testing.assert_allclose(gram_evolution(h, 0.0), IDENTITY, atol=1e-15)
    hh = pt_hamiltonian(1.5, 1, 0)
    for t in (0.3, 1.7, 9.0):
        np.testing.assert_allclose(gram_evolution(hh, t), IDENTITY, atol=1e-15)


def test_gram_matches_brute_force_over_period():
    h = pt_hamiltonian(1, 2, math.pi / 2)
    for t in np.linspace(0, h.period, 41):
        u = expm_series(-1j * h.matrix() * t)
        np.testing.assert_allclose(gram_evolution(h, t), adjoint(u) @ u, rtol=0, atol=1e-10)


@settings(max_examples=60, deadline=None)
@given(unbroken(), st.floats(-10, 10))
def test_gram_properties(h, t):
    g = gram_evolution(h, t)
    np.testing.assert_allclose(g, adjoint(g), atol=1e-12)
    assert abs(det2(g) - 1) <= 1e-10 * max(1, np.abs(g).max() ** 2)
    assert np.all(np.linalg.eigvalsh(g) > 0)
    np.testing.assert_allclose(gram_evolution(h, t + h.period), g, atol=1e-9 * np.abs(g).max())


@pytest.mark.parametrize("eps", [0.2, 0.6, 1.0, 1.4])
def test_cpt_orthogonality_persists(eps):
    (psi1, psi2, _), h = designed(eps)
    for t in np.linspace(0, 2 * h.period, 101):
        p = propagator(h, t)
        assert abs(cpt_inner(h, p @ psi1, p @ psi2)) < 1e-10
