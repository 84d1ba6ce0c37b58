import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

from indicial.errors import ValidationError, WindowTooSmall
from indicial.pencil import PencilSpec, evaluate
from indicial.roots import (
    boundary_spectrum,
    check_star_symmetry,
    det_roots,
    finite_eigenvalues,
    minimal_domain_flag,
    strip_roots,
    winding_number,
)
from conftest import diag_t_t3, lin, sq, strip_pair
from strategies import random_symmetric


def test_simple_critical_root():
    (r,) = boundary_spectrum(lin())
    assert r.sigma0 == pytest.approx(-1j)
    assert (r.alg_mult, r.band) == (1, "critical")
    assert r.star_partner == 0


def test_double_root_multiplicity():
    (r,) = boundary_spectrum(sq())
    assert r.alg_mult == 2 and r.band == "critical"


def test_strip_pair():
    roots = boundary_spectrum(strip_pair(0.3 - 0.5j))
    assert [r.band for r in roots] == ["strip_lower", "strip_upper"]
    assert roots[0].sigma0 == pytest.approx(0.3 - 1.5j)
    assert roots[0].star_partner == 1 and roots[1].star_partner == 0


def test_diag_t_t3():
    (r,) = boundary_spectrum(diag_t_t3())
    assert r.alg_mult == 4 and r.sigma0 == pytest.approx(-1j)


def test_lower_edge_root_clears_minimal_domain_flag():
    # sigma (sigma + 2i): roots 0 (upper edge) and -2i (lower edge) for m = 2
    p = PencilSpec.scalar([0, 2j, 1], 2)
    roots = boundary_spectrum(p)
    assert {r.band for r in roots} == {"upper_edge", "lower_edge"}
    assert not minimal_domain_flag(roots)
    assert strip_roots(roots) == []
    assert minimal_domain_flag(boundary_spectrum(lin()))


def test_singular_pencil_rejected():
    z = np.zeros((2, 2))
    p = PencilSpec([z, np.diag([1.0, 0.0])], 2)
    with pytest.raises(ValidationError):
        boundary_spectrum(p)


def test_window_too_small():
    p = PencilSpec.scalar([1j + 50, 1], 2)
    with pytest.raises(WindowTooSmall):
        boundary_spectrum(p, window=50.0)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**31 - 1), st.integers(1, 3), st.integers(1, 3), st.integers(1, 3))
def test_roots_are_singular_and_star_symmetric(seed, n, mu, m):
    rng = np.random.default_rng(seed)
    p = random_symmetric(rng, n, mu, m)
    roots = boundary_spectrum(p)
    in_window = [r for r in roots if -m - 1 < r.sigma0.imag < 1]
    eigs = finite_eigenvalues(p)
    for r in roots:
        # snapping onto a line moves a root by at most line_snap
        assert np.sum(np.abs(eigs - r.sigma0) <= 0.06) >= r.alg_mult
    full = [r for r in roots if -m + 0.2 < r.sigma0.imag < -0.2]
    assert check_star_symmetry(full, m)
    assert sum(r.alg_mult for r in in_window) <= n * mu


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**31 - 1), st.integers(1, 2), st.integers(1, 3))
def test_multiplicities_match_determinant(seed, n, mu):
    rng = np.random.default_rng(seed)
    p = random_symmetric(rng, n, mu, 2)
    try:
        roots = boundary_spectrum(p)
    except WindowTooSmall:
        assume(False)
    dr = det_roots(p)
    dr = dr[(dr.imag >= -p.m - 1) & (dr.imag <= 1)]
    if not roots:
        assert dr.size == 0
        return
    centers = np.array([r.sigma0 for r in roots])
    nearest = np.argmin(np.abs(dr[:, None] - centers[None, :]), axis=1)
    assert np.all(np.abs(dr - centers[nearest]) <= 0.06)
    for i, r in enumerate(roots):
        assert np.sum(nearest == i) == r.alg_mult


def test_snapped_roots_merge():
    # two roots 0.037 off the critical line snap onto the same point
    p = random_symmetric(np.random.default_rng(389), 2, 3, 2)
    crit = [r for r in boundary_spectrum(p) if r.band == "critical"]
    pts = [r.sigma0 for r in crit]
    assert all(abs(a - b) > 1e-2 for i, a in enumerate(pts) for b in pts[i + 1:])
    assert sum(r.alg_mult for r in crit) == 4


def test_winding_number_counts_roots():
    rng = np.random.default_rng(5)
    p = random_symmetric(rng, 2, 2, 2)
    roots = boundary_spectrum(p)
    r = roots[0]
    others = [abs(s.sigma0 - r.sigma0) for s in roots[1:]] + [1.0]
    assert winding_number(p, r.sigma0, 0.4 * min(others)) == r.alg_mult
    assert winding_number(sq(), -1j, 0.5) == 2
