import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import family
from ptqsd.linalg2 import (
    IDENTITY,
    SWAP,
    det2,
    expm_2x2,
    expm_series,
    inner_hermitian,
    mat2,
    mat_apply,
    trace2,
    vec2,
)
from ptqsd.ptcore import cpt_projector, pt_hamiltonian
from ptqsd.discriminate import design_cpt_orthogonal

unit_disc = st.builds(
    lambda r, phi: math.sqrt(r) * complex(math.cos(phi), math.sin(phi)),
    st.floats(0, 1),
    st.floats(0, 2 * math.pi),
)
disc_matrices = st.lists(unit_disc, min_size=4, max_size=4).map(
    lambda xs: np.array(xs, dtype=complex).reshape(2, 2)
)


def test_inner_hermitian_basis():
    assert inner_hermitian(vec2(1, 0), vec2(0, 1)) == 0
    assert inner_hermitian(vec2(1, 0), vec2(1, 0)) == 1


def test_inner_hermitian_conjugates_first_argument():
    assert inner_hermitian(vec2(1j, 0), vec2(1, 0)) == -1j


@pytest.mark.parametrize("eps", np.linspace(0.05, math.pi / 2, 12))
def test_inner_hermitian_family_pair_is_cos_eps(eps):
    psi1, psi2, _ = family(eps)
    t1, t2 = (math.pi - 2 * eps) / 4, (math.pi + 2 * eps) / 4
    expected = math.cos(t1) * math.cos(t2) + math.sin(t1) * math.sin(t2)
    assert inner_hermitian(psi1, psi2) == pytest.approx(expected, abs=1e-14)
    assert expected == pytest.approx(math.cos(eps), abs=1e-14)


def test_mat_apply():
    v = vec2(2 - 1j, 0.5j)
    np.testing.assert_array_equal(mat_apply(IDENTITY, v), v)
    np.testing.assert_array_equal(mat_apply(SWAP, v), v[::-1])


def test_mat_apply_projector_kills_orthogonal_partner():
    psi1, psi2, _ = family(0.7)
    h = design_cpt_orthogonal(psi1, psi2)
    assert np.abs(mat_apply(cpt_projector(h, psi1), psi2)).max() < 1e-14


def test_expm_zero_and_diagonal():
    np.testing.assert_array_equal(expm_2x2(np.zeros((2, 2))), IDENTITY)
    got = expm_2x2(mat2(1j * math.pi, 0, 0, -1j * math.pi))
    np.testing.assert_allclose(got, -IDENTITY, atol=1e-15)


def test_expm_pt_propagator_matches_series():
    h = pt_hamiltonian(1, 2, math.pi / 2).matrix()
    m = -1j * h * 0.3
    np.testing.assert_allclose(expm_2x2(m), expm_series(m), rtol=0, atol=1e-12)


def test_expm_jordan_block():
    # degenerate eigenvalue, non-diagonalizable: exp([[a, 1], [0, a]]) = e^a [[1, 1], [0, 1]]
    a = 0.3 + 0.2j
    got = expm_2x2(mat2(a, 1, 0, a))
    np.testing.assert_allclose(got, np.exp(a) * mat2(1, 1, 0, 1), atol=1e-15)


def test_expm_near_degenerate_gap_stays_accurate():
    for gap in (1e-6, 1e-9, 1e-11, 1e-13):
        m = mat2(0.4 + gap, 1.0, 0.0, 0.4)
        np.testing.assert_allclose(expm_2x2(m), expm_series(m), atol=1e-13)


def test_series_oracle_against_scalar_exponentials():
    d = mat2(2.5, 0, 0, -1.5j)
    np.testing.assert_allclose(expm_series(d), np.diag([np.exp(2.5), np.exp(-1.5j)]), atol=1e-13)


@settings(max_examples=100, deadline=None)
@given(disc_matrices)
def test_expm_properties(m):
    e = expm_2x2(m)
    assert np.all(np.isfinite(e))
    np.testing.assert_allclose(e @ expm_2x2(-m), IDENTITY, atol=1e-10)
    assert abs(det2(e) - np.exp(trace2(m))) <= 1e-10
    np.testing.assert_allclose(e, expm_series(m), atol=1e-10)


def test_expm_large_entries_finite():
    m = mat2(1e6j, 0, 0, -1e6j)
    assert np.all(np.isfinite(expm_2x2(m)))
