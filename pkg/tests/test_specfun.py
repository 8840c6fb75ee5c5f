"""Numeric-kernel tests.

Reference values come from independent oracles: an exact integer-factorial
evaluation of the Wigner d-function sum, scipy's Legendre/Bessel routines,
and numpy's Gauss-Legendre nodes.
"""

from math import cos, factorial, pi, sin, sqrt

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import lpmv, spherical_jn, spherical_yn

from rgsfcs import num_wigner, spherical_hankel1, wigner_D, wigner_d, wigner_index
from rgsfcs.errors import DomainError, IndexDomainError, ParameterError
from rgsfcs.specfun import (
    belt_quadrature,
    block_dims,
    gauss_legendre,
    index_table,
    spherical_jn_all,
    spherical_yn_all,
    wigner_d_column,
    wigner_d_sum,
)


def d_oracle(n, mu, m, beta):
    """Exact-factorial evaluation of the normalized Wigner d-function."""
    pref = (-1) ** (mu - m) * sqrt((2 * n + 1) / 2.0)
    num = factorial(n + m) * factorial(n - m) * factorial(n + mu) * factorial(n - mu)
    total = 0.0
    for sig in range(max(0, m - mu), min(n + m, n - mu) + 1):
        den = (
            factorial(sig)
            * factorial(n + m - sig)
            * factorial(n - mu - sig)
            * factorial(mu - m + sig)
        )
        total += (
            (-1) ** sig
            * sqrt(num)
            / den
            * cos(beta / 2) ** (2 * n - 2 * sig + m - mu)
            * sin(beta / 2) ** (2 * sig - m + mu)
        )
    return pref * total


# ---------------------------------------------------------------------------
# Indexing
# ---------------------------------------------------------------------------

def test_num_wigner_values():
    assert num_wigner(1) == 10
    assert num_wigner(2) == 35
    assert num_wigner(4) == 165
    assert num_wigner(8) == 969
    assert num_wigner(20) == 12341


@given(st.integers(min_value=0, max_value=8))
def test_flat_index_bijection(n_max):
    ns, ms, mus, _ = index_table(n_max)
    seen = set()
    for flat, (n, m, mu) in enumerate(zip(ns, ms, mus)):
        idx = wigner_index(int(n), int(m), int(mu), n_max)
        assert idx.flat == flat
        seen.add(flat)
    assert seen == set(range(num_wigner(n_max)))


def test_blocks_are_contiguous():
    _, _, _, slices = index_table(5)
    assert len(slices) == 11 * 11
    stops = sorted((sl.start, sl.stop) for sl in slices.values())
    pos = 0
    for start, stop in stops:
        assert start == pos
        pos = stop
    assert pos == num_wigner(5)


def test_block_dims_formula():
    dims = block_dims(4)
    assert dims[(0, 0)] == 5
    assert dims[(3, -1)] == 2
    assert sum(dims.values()) == num_wigner(4)


def test_invalid_index_rejected():
    with pytest.raises(IndexDomainError):
        wigner_d(2, 3, 0, 0.5)
    with pytest.raises(IndexDomainError):
        wigner_d(2, 0, -3, 0.5)
    with pytest.raises(IndexDomainError):
        wigner_index(5, 0, 0, 4)


# ---------------------------------------------------------------------------
# Wigner d
# ---------------------------------------------------------------------------

def test_wigner_d_constant():
    assert wigner_d(0, 0, 0, 1.234) == pytest.approx(sqrt(0.5), abs=1e-14)


def test_wigner_d_degree_one():
    assert wigner_d(1, 0, 0, pi / 3) == pytest.approx(
        sqrt(1.5) * cos(pi / 3), abs=1e-12
    )
    assert wigner_d(1, 0, 0, pi / 3) == pytest.approx(0.61237244, abs=1e-8)


def test_wigner_d_against_factorial_oracle():
    assert wigner_d(5, 3, -2, 0.7) == pytest.approx(
        d_oracle(5, 3, -2, 0.7), rel=1e-10
    )


def test_recursion_matches_direct_evaluation():
    rng = np.random.default_rng(0)
    betas = rng.uniform(0.0, pi, 50)
    for mu in range(-12, 13, 3):
        for m in range(-12, 13, 4):
            n0 = max(abs(mu), abs(m))
            col = wigner_d_column(mu, m, betas, 12)
            direct = np.array(
                [[d_oracle(n, mu, m, b) for b in betas] for n in range(n0, 13)]
            )
            scale = np.abs(direct).max()
            assert np.abs(col - direct).max() <= 1e-9 * scale


def test_log_space_sum_matches_exact_factorials():
    rng = np.random.default_rng(1)
    for _ in range(30):
        n = int(rng.integers(0, 16))
        mu = int(rng.integers(-n, n + 1)) if n else 0
        m = int(rng.integers(-n, n + 1)) if n else 0
        b = float(rng.uniform(0, pi))
        assert wigner_d_sum(n, mu, m, b) == pytest.approx(
            d_oracle(n, mu, m, b), rel=1e-11, abs=1e-13
        )


@given(
    st.integers(min_value=0, max_value=12),
    st.integers(min_value=-12, max_value=12),
    st.integers(min_value=-12, max_value=12),
    st.floats(min_value=0.01, max_value=3.13),
)
def test_order_swap_symmetry(n, mu, m, beta):
    if abs(mu) > n or abs(m) > n:
        return
    lhs = wigner_d(n, mu, m, beta)
    rhs = (-1) ** (mu - m) * wigner_d(n, m, mu, beta)
    assert lhs == pytest.approx(rhs, rel=1e-9, abs=1e-11)


def test_value_at_zero_is_kronecker():
    for n in range(13):
        for mu in range(-n, n + 1):
            for m in range(-n, n + 1):
                want = sqrt((2 * n + 1) / 2.0) if mu == m else 0.0
                assert wigner_d(n, mu, m, 0.0) == pytest.approx(want, abs=1e-10)


def test_m_zero_column_is_normalized_legendre():
    # d_n^{mu 0}(b) = sqrt((2n+1)/2) sqrt((n-mu)!/(n+mu)!) P_n^mu(cos b)
    for n in (0, 2, 5, 9):
        for mu in range(-n, n + 1):
            for b in (0.3, 1.1, 2.7):
                ratio = sqrt(factorial(n - mu) / factorial(n + mu))
                want = sqrt((2 * n + 1) / 2.0) * ratio * lpmv(mu, n, cos(b))
                assert wigner_d(n, mu, 0, b) == pytest.approx(
                    want, rel=1e-9, abs=1e-11
                )


def test_block_columns_orthonormal_full_sphere():
    # Eq.-(8) orthogonality: the beta integral of d d' sin(beta) is the
    # identity on every (mu, m) block; alpha/gamma integrals are analytic.
    n_max = 8
    beta_q, w_q = belt_quadrature(0.0, pi, 2 * n_max + 2)
    for mu in range(-n_max, n_max + 1):
        for m in range(-n_max, n_max + 1):
            d = wigner_d_column(mu, m, beta_q, n_max)
            gram = (d * w_q) @ d.T
            assert np.abs(gram - np.eye(d.shape[0])).max() < 1e-10


def test_uniform_bound_growth_rate():
    # sqrt(sin b) |d_n| should grow no faster than (2n+1)^{1/4}:
    # log-log regression slope <= 0.27
    betas = np.linspace(1e-3, pi - 1e-3, 2000)
    degrees = np.arange(1, 41)
    peaks = []
    for n in degrees:
        d = wigner_d_column(0, 0, betas, n)[-1]
        peaks.append(np.max(np.sqrt(np.sin(betas)) * np.abs(d)))
    slope = np.polyfit(np.log(2 * degrees + 1), np.log(peaks), 1)[0]
    assert slope <= 0.27


# ---------------------------------------------------------------------------
# Wigner D
# ---------------------------------------------------------------------------

def test_wigner_D_constant_function():
    idx = wigner_index(0, 0, 0, 4)
    val = wigner_D(idx, 1.0, 2.0, 3.0)
    assert val == pytest.approx(sqrt(0.5) / (2 * pi), abs=1e-12)
    assert val == pytest.approx(0.11253954, abs=1e-8)


def test_wigner_D_phase_factor():
    idx = wigner_index(1, 0, 1, 4)  # n=1, m=0, mu=1
    want = -1j * wigner_d(1, 1, 0, pi / 2) / (2 * pi)
    assert wigner_D(idx, pi / 2, pi / 2, 0.0) == pytest.approx(want, abs=1e-12)


def test_wigner_D_unit_norm_constant():
    # SO(3) integral of |D_0^{00}|^2: analytic (2 pi)^2 from alpha, gamma
    # times the quadrature beta integral
    beta_q, w_q = belt_quadrature(0.0, pi, 4)
    idx = wigner_index(0, 0, 0, 2)
    vals = np.array([wigner_D(idx, 0.0, b, 0.0) for b in beta_q])
    integral = (2 * pi) ** 2 * np.sum(np.abs(vals) ** 2 * w_q)
    assert integral == pytest.approx(1.0, rel=1e-12)


# ---------------------------------------------------------------------------
# Gauss-Legendre quadrature
# ---------------------------------------------------------------------------

def test_gauss_legendre_order_one_and_two():
    r1 = gauss_legendre(1)
    assert r1.nodes == pytest.approx([0.0], abs=1e-15)
    assert r1.weights == pytest.approx([2.0], abs=1e-15)
    r2 = gauss_legendre(2)
    assert sorted(r2.nodes) == pytest.approx(
        [-1 / sqrt(3), 1 / sqrt(3)], abs=1e-14
    )
    assert r2.weights == pytest.approx([1.0, 1.0], abs=1e-14)


def test_gauss_legendre_high_degree_monomial():
    rule = gauss_legendre(21)
    integral = np.sum(rule.weights * rule.nodes**40)
    assert integral == pytest.approx(2.0 / 41.0, rel=1e-12)


@given(st.integers(min_value=1, max_value=64))
@settings(deadline=None)
def test_gauss_legendre_matches_numpy(order):
    rule = gauss_legendre(order)
    x_ref, w_ref = np.polynomial.legendre.leggauss(order)
    assert rule.nodes == pytest.approx(x_ref, abs=1e-13)
    assert rule.weights == pytest.approx(w_ref, abs=1e-13)
    assert np.sum(rule.weights) == pytest.approx(2.0, abs=1e-12)


def test_gauss_legendre_exactness_up_to_degree():
    for order in (3, 8, 64):
        rule = gauss_legendre(order)
        for deg in range(0, 2 * order, 7):
            got = np.sum(rule.weights * rule.nodes**deg)
            want = 0.0 if deg % 2 else 2.0 / (deg + 1)
            assert got == pytest.approx(want, abs=2e-13)


def test_gauss_legendre_order_validation():
    with pytest.raises(ParameterError):
        gauss_legendre(0)
    with pytest.raises(ParameterError):
        gauss_legendre(257)


def test_belt_quadrature_integrates_sin():
    beta_q, w_q = belt_quadrature(0.0, pi / 2, 6)
    # int_0^{pi/2} sin(b) db = 1
    assert np.sum(w_q) == pytest.approx(1.0, rel=1e-13)
    # int_0^{pi/2} cos(b) sin(b) db = 1/2
    assert np.sum(np.cos(beta_q) * w_q) == pytest.approx(0.5, rel=1e-13)


# ---------------------------------------------------------------------------
# Spherical Bessel / Hankel
# ---------------------------------------------------------------------------

def test_hankel_monopole():
    val = spherical_hankel1(0, 1.0)
    assert val == pytest.approx(sin(1.0) - 1j * cos(1.0), abs=1e-14)
    assert val == pytest.approx(0.84147 - 0.54030j, abs=1e-5)


def test_hankel_dipole_closed_form():
    x = 1.0
    want = (sin(x) / x**2 - cos(x) / x) + 1j * (-cos(x) / x**2 - sin(x) / x)
    assert spherical_hankel1(1, x) == pytest.approx(want, abs=1e-14)


def test_bessel_wronskian():
    x = 5.0
    j = spherical_jn_all(21, x)
    y = spherical_yn_all(21, x)
    for n in range(21):
        # j_n y_n' - j_n' y_n = 1/x^2 with f' = f_{n-1} - (n+1)/x f_n
        jp = (j[n - 1] if n else -j[1]) - (n + 1) / x * j[n]
        yp = (y[n - 1] if n else -y[1]) - (n + 1) / x * y[n]
        assert j[n] * yp - jp * y[n] == pytest.approx(1.0 / x**2, rel=1e-10)


def test_bessel_against_scipy():
    for x in (0.5, 7.0, 14 * pi):
        n = np.arange(25)
        # abs floor: at x = 14 pi, j_0 = sin(x)/x ~ 1e-16 sits on a zero of
        # j_0, where relative error is meaningless
        assert spherical_jn_all(24, x) == pytest.approx(
            spherical_jn(n, x), rel=1e-10, abs=1e-13
        )
        assert spherical_yn_all(24, x) == pytest.approx(
            spherical_yn(n, x), rel=1e-10
        )


def test_bessel_domain_errors():
    with pytest.raises(DomainError):
        spherical_hankel1(0, 0.0)
    with pytest.raises(DomainError):
        spherical_hankel1(2, -1.0)
    with pytest.raises(ParameterError):
        spherical_hankel1(-1, 1.0)
