from math import factorial

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from indicial.errors import NonIntegrable
from indicial.extensions import build_quotient
from indicial.forms import local_pairing
from indicial.germs import LogCoefficients, germ_from_log_coeffs, log_coeffs_from_germ
from indicial.oracle import (
    CutoffSpec,
    QuasiPolynomial,
    _xdx,
    apply_operator,
    l2b_inner,
    mellin_numeric,
    pairing_direct,
    smoothstep,
)
from conftest import lin, strip_pair


def qp(s0, *e, cutoff=None):
    return QuasiPolynomial.from_log_coeffs(LogCoefficients(complex(s0), np.array([[x] for x in e], dtype=complex)), cutoff)


def test_smoothstep():
    for N in (1, 3, 5):
        S = smoothstep(N)
        assert S(0) == pytest.approx(0) and S(1) == pytest.approx(1)
        for k in range(1, N + 1):
            d = S.deriv(k)
            assert d(0) == pytest.approx(0, abs=1e-9) and d(1) == pytest.approx(0, abs=1e-9)


def test_cutoff_shape():
    c = CutoffSpec(0.5, 1.0, 3)
    assert c(0.2) == 1.0 and c(1.5) == 0.0 and 0 < c(0.75) < 1
    with pytest.raises(ValueError):
        CutoffSpec(1.0, 0.5)


def test_l2b_closed_forms():
    one = CutoffSpec.indicator(1.0)
    f = qp(-1j, 1, cutoff=one)
    assert l2b_inner(f, f) == pytest.approx(0.5, rel=1e-10)
    g = qp(-1j, 0, 1, cutoff=one)
    assert l2b_inner(g, f) == pytest.approx(-0.25, rel=1e-10)
    with pytest.raises(NonIntegrable):
        l2b_inner(qp(1j, 1, cutoff=one), f)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**31 - 1))
def test_l2b_against_closed_form_terms(seed):
    rng = np.random.default_rng(seed)
    s1, s2 = complex(rng.uniform(-1, 1), rng.uniform(-2, -0.3)), complex(rng.uniform(-1, 1), rng.uniform(-2, -0.3))
    a, b = rng.standard_normal(2) + 1j * rng.standard_normal(2)
    k1, k2 = rng.integers(0, 3, 2)
    one = CutoffSpec.indicator(1.0)
    f = QuasiPolynomial(((s1, int(k1), np.array([a])),), one)
    g = QuasiPolynomial(((s2, int(k2), np.array([b])),), one)
    # int_0^1 x^(d-1) log^k x dx = (-1)^k k! / d^(k+1)
    d = 1j * (s1 - np.conj(s2))
    k = int(k1 + k2)
    exact = a * np.conj(b) * (-1) ** k * factorial(k) / d ** (k + 1)
    assert l2b_inner(f, g) == pytest.approx(exact, rel=1e-8)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**31 - 1))
def test_l2b_hermitian(seed):
    rng = np.random.default_rng(seed)
    f = QuasiPolynomial(((complex(0.3, -1.2), 1, rng.standard_normal(2) + 0j),), CutoffSpec(0.4, 0.9, 3))
    g = QuasiPolynomial(((complex(-0.2, -0.8), 0, rng.standard_normal(2) + 1j),), CutoffSpec(0.5, 1.0, 3))
    assert l2b_inner(f, g) == pytest.approx(np.conj(l2b_inner(g, f)), rel=1e-9)


def test_xdx_finite_difference():
    # x log x has sigma0 = -i and one log power
    terms = {(-1j, 1): np.array([1.0 + 0j])}
    d = _xdx(terms)
    x, h = 0.3, 1e-6
    f = lambda y: y * np.log(y)
    fd = -1j * x * (f(x + h) - f(x - h)) / (2 * h)
    val = sum(v[0] * x ** (1j * s) * np.log(x) ** k for (s, k), v in d.items())
    assert val == pytest.approx(fd, rel=1e-6)


def test_operator_kills_flat_part():
    Au = apply_operator(lin(), qp(-1j, 1))
    assert all(abs(Au(x)[0]) < 1e-12 for x in (0.01, 0.2, 0.5))
    assert abs(Au(0.75)[0]) > 1e-3


def test_pairing_examples():
    assert pairing_direct(lin(), qp(-1j, 1j), qp(-1j, 1j)) == pytest.approx(1, rel=1e-8)
    p = strip_pair(-0.5j)
    u, v = qp(-0.5j, -1j), qp(-1.5j, -1j)
    assert pairing_direct(p, u, v) == pytest.approx(1j, rel=1e-8)
    assert pairing_direct(p, u, u) == pytest.approx(0, abs=1e-8)


def test_pairing_matches_residue(worked):
    Q = build_quotient(worked)
    cut = CutoffSpec.for_degree(worked.mu)
    for u in Q.basis:
        for v in Q.basis:
            U = QuasiPolynomial.from_log_coeffs(log_coeffs_from_germ(u), cut)
            V = QuasiPolynomial.from_log_coeffs(log_coeffs_from_germ(v), cut)
            ref = local_pairing(worked, u, v)
            assert abs(pairing_direct(worked, U, V) - ref) <= 1e-6 * max(1, abs(ref))


def test_mellin_dictionary():
    one = CutoffSpec.indicator(1.0)
    s0, s = -1j, 0.4 - 0.2j
    assert mellin_numeric(qp(s0, 1, cutoff=one), s)[0] == pytest.approx(1 / (1j * (s0 - s)), rel=1e-9)
    assert mellin_numeric(qp(s0, 0, 1, cutoff=one), s)[0] == pytest.approx(-1 / (1j * (s0 - s)) ** 2, rel=1e-9)
    with pytest.raises(NonIntegrable):
        mellin_numeric(qp(s0, 1, cutoff=one), s0 - 0.5j)
