import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from msgpa.errors import DensityMatrixError, DimensionError
from msgpa.ops import (
    SIGMA_MINUS,
    SIGMA_PLUS,
    SIGMA_X,
    SIGMA_Z,
    HilbertSpec,
    boson_ops,
    eigh,
    embed,
    expm,
    kron,
    partial_trace,
    partial_transpose,
    validate_density,
)

from conftest import random_density, random_unitary

PAIR = HilbertSpec((2, 2))
BELL = np.array([1, 0, 0, 1]) / np.sqrt(2)


def test_kron_identity_and_sigma_z():
    assert np.array_equal(kron(np.eye(2), np.eye(2)), np.eye(4))
    assert np.array_equal(kron(SIGMA_Z, np.eye(2)), np.diag([1, 1, -1, -1]))


def test_kron_matches_index_formula():
    a, b = SIGMA_PLUS, SIGMA_MINUS
    k = kron(a, b)
    rb, cb = b.shape
    for i, j, r, c in itertools.product(range(2), repeat=4):
        assert k[i * rb + r, j * cb + c] == a[i, j] * b[r, c]


def test_kron_associative(rng):
    # integer entries keep every product exact
    a, b, c = (rng.integers(-5, 5, (2, 3)) + 1j * rng.integers(-5, 5, (2, 3)) for _ in range(3))
    assert np.array_equal(kron(kron(a, b), c), kron(a, kron(b, c)))


def test_boson_ops_small_cases():
    a, a_dag, n_op = boson_ops(2)
    assert np.array_equal(a, [[0, 1], [0, 0]])
    a4, _, _ = boson_ops(4)
    assert a4[2, 3] == pytest.approx(np.sqrt(3))
    assert np.allclose(n_op, a_dag @ a)


@pytest.mark.parametrize("n", [2, 3, 8, 16])
def test_boson_commutator_defect_at_top_level(n):
    a, a_dag, _ = boson_ops(n)
    expected = np.eye(n)
    expected[-1, -1] -= n
    assert np.allclose(a @ a_dag - a_dag @ a, expected, atol=1e-12)


def test_boson_ops_rejects_small_cutoff():
    with pytest.raises(DimensionError):
        boson_ops(1)


def test_embed_sites():
    assert np.array_equal(embed(SIGMA_Z, 0, PAIR), np.diag([1, 1, -1, -1]))
    assert np.array_equal(embed(SIGMA_Z, 1, PAIR), np.diag([1, -1, 1, -1]))
    spec = HilbertSpec((2, 2, 3))
    a, _, _ = boson_ops(3)
    A, X = embed(a, 2, spec), embed(SIGMA_X, 0, spec)
    assert np.array_equal(A @ X, X @ A)
    with pytest.raises(DimensionError):
        embed(a, 0, spec)


def test_embed_commutes_across_sites(rng):
    spec = HilbertSpec((2, 3, 2))
    a = rng.normal(size=(2, 2))
    b = rng.normal(size=(3, 3))
    A, B = embed(a, 0, spec), embed(b, 1, spec)
    assert np.array_equal(A @ B, B @ A)


def test_expm_known_values():
    assert np.allclose(expm(np.zeros((3, 3))), np.eye(3))
    assert np.allclose(expm(1j * np.pi / 2 * SIGMA_Z), np.diag([1j, -1j]), atol=1e-15)
    with pytest.raises(DimensionError):
        expm(np.zeros((2, 3)))


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), scale=st.floats(0.1, 10.0))
def test_expm_inverse_and_conjugation(seed, scale):
    rng = np.random.default_rng(seed)
    m = rng.normal(size=(6, 6)) + 1j * rng.normal(size=(6, 6))
    m *= scale / np.linalg.norm(m, 2)
    assert np.allclose(expm(m) @ expm(-m), np.eye(6), atol=1e-10)
    u = random_unitary(6, rng)
    lhs = expm(u @ m @ u.conj().T)
    rhs = u @ expm(m) @ u.conj().T
    assert np.linalg.norm(lhs - rhs) <= 1e-10 * max(1.0, np.linalg.norm(rhs))


def test_eigh_contract(rng):
    h = random_density(8, rng) - 0.3 * np.eye(8)
    vals, vecs = eigh(h)
    assert np.all(np.diff(vals) >= 0)
    assert np.allclose(vecs.conj().T @ vecs, np.eye(8), atol=1e-12)
    assert np.linalg.norm(h @ vecs - vecs * vals) <= 1e-10 * np.linalg.norm(h, 2)


def test_partial_trace_examples(rng):
    phi = np.outer(BELL, BELL)
    assert np.allclose(partial_trace(phi, [0], PAIR), np.eye(2) / 2)
    ra, rb = random_density(2, rng), random_density(2, rng)
    assert np.allclose(partial_trace(np.kron(ra, rb), [0], PAIR), ra)
    assert np.allclose(partial_trace(np.kron(ra, rb), [1], PAIR), rb)


def test_partial_trace_keeps_order(rng):
    spec = HilbertSpec((2, 3, 4))
    rs = [random_density(d, rng) for d in spec.dims]
    full = kron(*rs)
    assert np.allclose(partial_trace(full, [0, 2], spec), np.kron(rs[0], rs[2]))
    assert np.allclose(partial_trace(full, [1], spec), rs[1])


def test_partial_trace_errors():
    with pytest.raises(DimensionError):
        partial_trace(np.eye(4), [2], PAIR)
    with pytest.raises(DimensionError):
        partial_trace(np.eye(5), [0], PAIR)


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), keep=st.sets(st.integers(0, 2)))
def test_partial_trace_properties(seed, keep):
    rng = np.random.default_rng(seed)
    spec = HilbertSpec((2, 2, 3))
    rho = random_density(12, rng)
    red = partial_trace(rho, sorted(keep), spec)
    assert abs(np.trace(red) - np.trace(rho)) <= 1e-12
    assert np.linalg.norm(red - red.conj().T) <= 1e-12
    if not keep:
        assert red.shape == (1, 1)


def test_partial_transpose_examples(rng):
    ra, rb = random_density(2, rng), random_density(2, rng)
    assert np.allclose(partial_transpose(np.kron(ra, rb), 1, PAIR), np.kron(ra, rb.T))
    rho = random_density(4, rng)
    assert np.array_equal(partial_transpose(partial_transpose(rho, 0, PAIR), 0, PAIR), rho)
    ev = np.linalg.eigvalsh(partial_transpose(np.outer(BELL, BELL), 1, PAIR))
    assert np.allclose(ev, [-0.5, 0.5, 0.5, 0.5])
    with pytest.raises(DimensionError):
        partial_transpose(rho, 3, PAIR)


def test_partial_transpose_hermitian(rng):
    spec = HilbertSpec((2, 2, 3))
    rho = random_density(12, rng)
    for sub in range(3):
        pt = partial_transpose(rho, sub, spec)
        assert np.linalg.norm(pt - pt.conj().T) <= 1e-12


def test_validate_density(rng):
    validate_density(random_density(4, rng))
    with pytest.raises(DensityMatrixError):
        validate_density(np.diag([1.2, -0.2]))
    with pytest.raises(DensityMatrixError):
        validate_density(np.array([[0.5, 0.1], [0.0, 0.5]]))
    with pytest.raises(DensityMatrixError):
        validate_density(np.eye(2))


def test_hilbert_spec():
    spec = HilbertSpec.ms(4)
    assert spec.dims == (2, 2, 4) and spec.size == 16
    with pytest.raises(DimensionError):
        HilbertSpec.ms(1)
