import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cornerpump.errors import InputError, NumericalError
from cornerpump.numerics import (
    SparseHamiltonian,
    gauge_fix,
    norm_bound,
    rk4_propagate,
    sparse_apply,
    symmetric_eig,
    unit_state,
)


def dense_from_triplets(h):
    m = np.zeros((h.dim, h.dim))
    for r, c, v in zip(h.rows, h.cols, h.values):
        m[r, c] += v
        m[c, r] += v
    for a, d in enumerate(h.diagonal):
        m[a, a] += d
    return m


def random_sparse(rng, n=10, density=0.3):
    pairs = [(r, c) for r in range(n) for c in range(r + 1, n) if rng.random() < density]
    rows, cols = (np.array(x, dtype=int) for x in zip(*pairs))
    return SparseHamiltonian(n, rows, cols, rng.normal(size=len(pairs)), rng.normal(size=n))


class TestSymmetricEig:
    def test_identity(self):
        evals, evecs = symmetric_eig(np.eye(3))
        np.testing.assert_allclose(evals, [1, 1, 1])
        np.testing.assert_allclose(evecs.T @ evecs, np.eye(3), atol=1e-12)

    def test_diagonal(self):
        evals, _ = symmetric_eig(np.diag([2.0, -1.0, 0.0]))
        np.testing.assert_allclose(evals, [-1, 0, 2])

    def test_pauli_x_gauge(self):
        evals, evecs = symmetric_eig([[0.0, 1.0], [1.0, 0.0]])
        np.testing.assert_allclose(evals, [-1, 1])
        s = 1 / np.sqrt(2)
        # equal-magnitude tie goes to the lowest index, which is made positive
        np.testing.assert_allclose(evecs[:, 0], [s, -s], atol=1e-14)
        np.testing.assert_allclose(evecs[:, 1], [s, s], atol=1e-14)

    @pytest.mark.parametrize("bad", [[[np.nan, 0], [0, 1]], [[0, np.inf], [np.inf, 0]]])
    def test_rejects_non_finite(self, bad):
        with pytest.raises(InputError):
            symmetric_eig(bad)

    def test_rejects_asymmetric(self):
        with pytest.raises(InputError):
            symmetric_eig([[0, 1], [0, 0]])

    @settings(max_examples=30, deadline=None)
    @given(st.integers(min_value=1, max_value=12), st.integers(min_value=0, max_value=2**32 - 1))
    def test_reconstruction_and_residual(self, n, seed):
        rng = np.random.default_rng(seed)
        a = rng.normal(size=(n, n))
        m = a + a.T
        evals, v = symmetric_eig(m)
        scale = max(np.linalg.norm(m), 1.0)
        assert np.all(np.diff(evals) >= 0)
        np.testing.assert_allclose(v.T @ v, np.eye(n), atol=1e-10)
        assert np.linalg.norm(m @ v - v * evals) <= 1e-10 * scale
        assert np.linalg.norm(v @ np.diag(evals) @ v.T - m) <= 1e-10 * scale
        pivots = np.argmax(np.round(np.abs(v) / np.abs(v).max(axis=0), 12), axis=0)
        assert np.all(v[pivots, np.arange(n)] > 0)


def test_gauge_fix_vector():
    np.testing.assert_allclose(gauge_fix(np.array([0.1, -0.9, 0.2])), [-0.1, 0.9, -0.2])


class TestSparseHamiltonian:
    def test_zero_matrix(self):
        h = SparseHamiltonian(4, [], [], [], np.zeros(4))
        np.testing.assert_array_equal(sparse_apply(h, np.arange(4.0) + 1j), np.zeros(4))

    def test_diagonal_only(self):
        d = np.array([1.0, -2.0, 3.0])
        h = SparseHamiltonian(3, [], [], [], d)
        psi = np.array([1 + 1j, 2.0, -1j])
        np.testing.assert_allclose(sparse_apply(h, psi), d * psi)

    def test_random_against_dense_expansion(self):
        rng = np.random.default_rng(7)
        h = random_sparse(rng)
        psi = rng.normal(size=10) + 1j * rng.normal(size=10)
        m = dense_from_triplets(h)
        np.testing.assert_allclose(sparse_apply(h, psi), m @ psi, rtol=0, atol=1e-14)
        np.testing.assert_allclose(h.to_dense(), m, atol=0)
        np.testing.assert_allclose(h.to_csr().toarray(), m, atol=0)
        np.testing.assert_allclose(h @ psi, m @ psi, atol=1e-14)

    def test_norm_bound_dominates_spectrum(self):
        rng = np.random.default_rng(3)
        h = random_sparse(rng, n=15)
        radius = np.abs(np.linalg.eigvalsh(h.to_dense())).max()
        assert h.norm_bound() >= radius
        assert norm_bound(h.to_csr()) == pytest.approx(h.norm_bound())
        assert norm_bound(h.to_dense()) == pytest.approx(h.norm_bound())

    def test_dimension_mismatch(self):
        h = SparseHamiltonian(3, [0], [1], [1.0], np.zeros(3))
        with pytest.raises(InputError):
            sparse_apply(h, np.zeros(4))

    @pytest.mark.parametrize(
        "rows,cols",
        [([1], [0]), ([0, 0], [1, 1]), ([0], [5])],
        ids=["lower-triangle", "duplicate", "out-of-range"],
    )
    def test_invalid_bonds(self, rows, cols):
        with pytest.raises(InputError):
            SparseHamiltonian(3, rows, cols, np.ones(len(rows)), np.zeros(3))


class TestRK4:
    def test_zero_hamiltonian(self):
        psi0 = unit_state([1.0, 2.0, 3.0j])
        out = rk4_propagate(lambda t: np.zeros((3, 3)), psi0, 0.0, 1.0, 0.1)
        np.testing.assert_array_equal(out, psi0)

    def test_single_level_phase(self):
        E = 0.7
        out = rk4_propagate(lambda t: np.array([[E]]), np.array([1.0 + 0j]), 0.0, 3.0, 0.01)
        assert abs(out[0] - np.exp(-1j * E * 3.0)) < 1e-9

    def test_rabi_oscillation(self):
        w = 1.3
        h = np.array([[0.0, w], [w, 0.0]])
        dt = 1e-3 / w
        t1 = 0.37 * np.pi / w
        out = rk4_propagate(lambda t: h, np.array([1.0 + 0j, 0.0]), 0.0, t1, dt)
        assert abs(abs(out[1]) ** 2 - np.sin(w * t1) ** 2) < 1e-6
        full = rk4_propagate(lambda t: h, np.array([1.0 + 0j, 0.0]), 0.0, np.pi / w, dt)
        assert abs(abs(full[0]) ** 2 - 1) < 1e-6

    def test_final_partial_step_lands_on_t1(self):
        seen = []

        def ham(t):
            seen.append(t)
            return np.zeros((1, 1))

        rk4_propagate(ham, np.array([1.0 + 0j]), 0.0, 0.25, 0.1)
        assert max(seen) == 0.25
        assert 0.2 in [round(t, 12) for t in seen]

    def test_stability_guard(self):
        with pytest.raises(InputError):
            rk4_propagate(lambda t: np.array([[10.0]]), np.array([1.0 + 0j]), 0.0, 1.0, 0.1)

    def test_blowup_detected(self):
        def ham(t):
            return np.array([[np.nan]]) if t > 0.3 else np.zeros((1, 1))

        with pytest.raises(NumericalError):
            rk4_propagate(ham, np.array([1.0 + 0j]), 0.0, 1.0, 0.1)

    @pytest.mark.parametrize("t0,t1,dt", [(0, 1, 0), (0, 1, -0.1), (1, 1, 0.1)])
    def test_bad_arguments(self, t0, t1, dt):
        with pytest.raises(InputError):
            rk4_propagate(lambda t: np.zeros((1, 1)), np.array([1.0 + 0j]), t0, t1, dt)
