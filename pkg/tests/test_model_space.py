import numpy as np
import pytest

import blaschkelab as bl

from helpers import cauchy_kernel


DEG = 120  # truncation high enough that |a|<=0.6 tails are ~1e-26


def test_dimension_equals_degree():
    for zeros in [(0j,), (0j, 0j), (0.5 + 0j,), (0.5 + 0j, 0.3j), (0.5 + 0j, 0.5 + 0j)]:
        basis = bl.tm_basis(bl.BlaschkeProduct(zeros), DEG)
        assert basis.dimension == len(zeros)


def test_orthonormal_in_h2():
    b = bl.BlaschkeProduct((0.5 + 0j, 0.3j, -0.2 + 0.1j))
    m = bl.tm_basis(b, DEG).matrix()
    gram = m.conj().T @ m
    np.testing.assert_allclose(gram, np.eye(3), atol=1e-12)


def test_monomial_model_space_is_low_degrees():
    # K_B for B = z^k is the polynomials of degree < k
    basis = bl.tm_basis(bl.BlaschkeProduct((0j, 0j, 0j)), 10)
    m = basis.matrix()
    assert np.allclose(m[3:, :], 0.0)
    assert np.linalg.matrix_rank(m[:3, :]) == 3


def test_orthogonal_to_multiples_of_b():
    b = bl.BlaschkeProduct((0.5 + 0j, 0.3j))
    basis = bl.tm_basis(b, DEG)
    bt = b.taylor(DEG).coeffs
    for j in range(basis.dimension):
        e = basis.matrix()[:, j]
        for m in range(6):
            shifted = np.zeros(DEG + 1, dtype=complex)
            shifted[m:] = bt[: DEG + 1 - m]
            # H2 pairing is the plain coefficient dot product
            assert abs(np.vdot(shifted, e)) < 1e-12


def test_cauchy_kernels_span_of_distinct_zeros():
    zeros = (0.5 + 0j, 0.3j)
    b = bl.BlaschkeProduct(zeros)
    basis = bl.tm_basis(b, DEG)
    for a in zeros:
        ker = bl.ComplexSeries(cauchy_kernel(a, DEG))
        p = bl.project(ker, basis)
        gap = np.linalg.norm(p.coeffs - ker.coeffs) / np.linalg.norm(ker.coeffs)
        assert gap < 1e-12


def test_projection_is_idempotent():
    b = bl.BlaschkeProduct((0.5 + 0j, 0.3j))
    basis = bl.tm_basis(b, DEG)
    rng = np.random.default_rng(2)
    f = bl.ComplexSeries(rng.normal(size=DEG + 1) + 1j * rng.normal(size=DEG + 1))
    p1 = bl.project(f, basis)
    p2 = bl.project(p1, basis)
    np.testing.assert_allclose(p1.coeffs, p2.coeffs, atol=1e-12)
    # projection never increases the H2 norm
    assert bl.h2_norm(p1) <= bl.h2_norm(f) + 1e-12


def test_projection_kills_b_multiples():
    b = bl.BlaschkeProduct((0.5 + 0j,))
    basis = bl.tm_basis(b, DEG)
    g = bl.ComplexSeries([0.3, 1.0, -0.2])
    bg = bl.mul(b.taylor(DEG), g, DEG)
    p = bl.project(bg, basis)
    assert bl.h2_norm(p) < 1e-10


def test_projection_fixes_model_space_elements():
    b = bl.BlaschkeProduct((0.5 + 0j, 0.3j))
    basis = bl.tm_basis(b, DEG)
    for e in basis.elements:
        p = bl.project(e, basis)
        np.testing.assert_allclose(p.coeffs, e.coeffs, atol=1e-12)


def test_repeated_zero_still_orthonormal():
    b = bl.BlaschkeProduct((0.4 + 0j, 0.4 + 0j))
    m = bl.tm_basis(b, DEG).matrix()
    np.testing.assert_allclose(m.conj().T @ m, np.eye(2), atol=1e-12)


def test_degree_too_small_rejected():
    b = bl.BlaschkeProduct((0.5 + 0j, 0.3j))
    with pytest.raises(ValueError):
        bl.tm_basis(b, 1)
