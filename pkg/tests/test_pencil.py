import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from indicial.errors import NotSymmetric, ValidationError
from indicial.pencil import (
    PencilSpec,
    check_symmetry,
    congruence,
    direct_sum,
    dump_pencil,
    evaluate,
    load_pencil,
    pencil_from_dict,
    pencil_to_dict,
    star,
    symmetry_defect,
    taylor_at,
)
from strategies import random_symmetric

seeds = st.integers(0, 2**31 - 1)


def test_star_involution():
    s = 0.3 - 0.2j
    assert star(s, 2) == pytest.approx(0.3 - 1.8j)
    assert star(star(s, 3), 3) == pytest.approx(s)
    assert star(0.7 - 1j, 2) == pytest.approx(0.7 - 1j)


def test_constructor_rejects_bad_input():
    with pytest.raises(ValidationError):
        PencilSpec([np.eye(2), np.zeros((2, 2))], 2)
    with pytest.raises(ValidationError):
        PencilSpec([np.eye(2), np.eye(3)], 2)
    with pytest.raises(ValidationError):
        PencilSpec([np.eye(1)], 0)
    with pytest.raises(ValidationError):
        PencilSpec([np.array([[np.nan]])], 1)


def test_scalar_examples_symmetric():
    assert check_symmetry(PencilSpec.scalar([1j, 1], 2))
    assert not check_symmetry(PencilSpec.scalar([2j, 1], 2))
    with pytest.raises(NotSymmetric):
        PencilSpec.scalar([0, 1], 2).validated()


@settings(max_examples=40, deadline=None)
@given(seeds, st.integers(1, 4), st.integers(1, 4), st.integers(1, 3))
def test_hermitian_on_critical_line(seed, n, mu, m):
    rng = np.random.default_rng(seed)
    p = random_symmetric(rng, n, mu, m)
    assert symmetry_defect(p) <= 1e-10 * p.scale
    for t in rng.uniform(-3, 3, 5):
        A = evaluate(p, complex(t, -m / 2))
        assert np.allclose(A, A.conj().T, atol=1e-9 * p.scale)


@settings(max_examples=40, deadline=None)
@given(seeds, st.integers(1, 3), st.integers(1, 4), st.integers(1, 3))
def test_star_relation(seed, n, mu, m):
    rng = np.random.default_rng(seed)
    p = random_symmetric(rng, n, mu, m)
    s = complex(*rng.uniform(-2, 2, 2))
    assert np.allclose(evaluate(p, star(s, m)).conj().T, evaluate(p, s), atol=1e-9 * p.scale * (1 + abs(s)) ** mu)


@settings(max_examples=30, deadline=None)
@given(seeds, st.integers(1, 3), st.integers(1, 4))
def test_taylor_resummation(seed, n, mu):
    rng = np.random.default_rng(seed)
    p = random_symmetric(rng, n, mu, 2)
    s0, h = complex(*rng.uniform(-1, 1, 2)), complex(*rng.uniform(-0.5, 0.5, 2))
    t = taylor_at(p, s0, mu + 2)
    assert np.allclose(t(h), evaluate(p, s0 + h), atol=1e-10 * p.scale * 10**mu)
    assert np.allclose(t.coeffs[mu + 1], 0)


def test_taylor_first_derivative_finite_difference():
    rng = np.random.default_rng(3)
    p = random_symmetric(rng, 3, 3, 1)
    s0, h = 0.2 - 0.4j, 1e-6
    fd = (evaluate(p, s0 + h) - evaluate(p, s0 - h)) / (2 * h)
    assert np.allclose(taylor_at(p, s0, 1).coeffs[1], fd, atol=1e-6 * p.scale)


@settings(max_examples=30, deadline=None)
@given(seeds, st.integers(1, 3), st.integers(1, 3))
def test_congruence_and_direct_sum_preserve_symmetry(seed, n, m):
    rng = np.random.default_rng(seed)
    p = random_symmetric(rng, n, 2, m)
    u = [rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)) for _ in range(2)]
    assert check_symmetry(congruence(p, u))
    q = direct_sum(p, random_symmetric(rng, 1, 1, m))
    assert q.n == n + 1 and check_symmetry(q)


def test_json_roundtrip(tmp_path):
    rng = np.random.default_rng(1)
    p = random_symmetric(rng, 2, 2, 3)
    path = tmp_path / "p.json"
    dump_pencil(p, path)
    q = load_pencil(path)
    assert q.m == 3 and all(np.array_equal(a, b) for a, b in zip(p.coeffs, q.coeffs))
    assert pencil_from_dict(pencil_to_dict(p)).mu == 2


def test_json_errors(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"m": 2,')
    with pytest.raises(ValidationError):
        load_pencil(bad)
    with pytest.raises(ValidationError):
        pencil_from_dict({"m": 2, "mu": 1, "n": 1, "coeffs": [[[[0, 1]]]]})
