"""Small numerical kernel: dense symmetric eigensolver, sparse real-symmetric
Hamiltonians, and a fixed-step RK4 propagator for ``i dpsi/dt = H(t) psi``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
import scipy.sparse as sp

from .errors import InputError, NumericalError

# dt * ||H|| above this is refused by rk4_propagate
STABILITY_LIMIT = 0.5


def gauge_fix(vectors):
    """Flip each column so that its largest-magnitude entry is positive.

    Ties are broken by the lowest row index (``np.argmax`` semantics).
    """
    vectors = np.array(vectors, copy=True)
    if vectors.ndim == 1:
        k = np.argmax(np.abs(vectors))
        return vectors * np.sign(vectors[k].real or 1.0)
    mags = np.abs(vectors)
    # round so that numerically equal magnitudes tie towards the lowest index
    scale = mags.max(axis=0, keepdims=True)
    scale[scale == 0] = 1.0
    rounded = np.round(mags / scale, 12)
    pivots = np.argmax(rounded, axis=0)
    signs = np.sign(vectors[pivots, np.arange(vectors.shape[1])].real)
    signs[signs == 0] = 1.0
    return vectors * signs


def symmetric_eig(m):
    """Eigendecomposition of a real symmetric matrix.

    Parameters
    ----------
    m : (n, n) array_like
        Real symmetric matrix.

    Returns
    -------
    eigenvalues : (n,) ndarray
        Ascending eigenvalues.
    eigenvectors : (n, n) ndarray
        Orthonormal eigenvectors as columns, gauge-fixed with
        :func:`gauge_fix`.
    """
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise InputError(f"expected a square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise InputError("matrix has non-finite entries")
    if not np.allclose(m, m.T, rtol=0, atol=1e-12 * max(1.0, np.abs(m).max())):
        raise InputError("matrix is not symmetric")
    evals, evecs = np.linalg.eigh(m)
    return evals, gauge_fix(evecs)


def symmetric_eigvals(m):
    """Ascending eigenvalues only; cheaper than :func:`symmetric_eig`."""
    m = np.asarray(m, dtype=float)
    if not np.all(np.isfinite(m)):
        raise InputError("matrix has non-finite entries")
    return np.linalg.eigvalsh(m)


@dataclass(frozen=True)
class SparseHamiltonian:
    """Real symmetric matrix stored as upper-triangle bonds plus a diagonal.

    Each bond ``(rows[k], cols[k], values[k])`` with ``rows[k] < cols[k]`` stands
    for both ``H[r, c]`` and ``H[c, r]``.
    """

    dim: int
    rows: np.ndarray
    cols: np.ndarray
    values: np.ndarray
    diagonal: np.ndarray

    def __post_init__(self):
        rows = np.asarray(self.rows, dtype=np.int64)
        cols = np.asarray(self.cols, dtype=np.int64)
        values = np.asarray(self.values, dtype=float)
        diagonal = np.asarray(self.diagonal, dtype=float)
        if self.dim <= 0:
            raise InputError("dim must be positive")
        if not (rows.shape == cols.shape == values.shape):
            raise InputError("rows, cols and values must have equal length")
        if diagonal.shape != (self.dim,):
            raise InputError(f"diagonal must have length {self.dim}")
        if rows.size:
            if np.any(rows >= cols):
                raise InputError("bonds must satisfy row < col")
            if rows.min() < 0 or cols.max() >= self.dim:
                raise InputError("bond index out of range")
            keys = rows * self.dim + cols
            if np.unique(keys).size != keys.size:
                raise InputError("duplicate (row, col) bond")
        for name, arr in (("rows", rows), ("cols", cols), ("values", values), ("diagonal", diagonal)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def nbonds(self) -> int:
        return int(self.rows.size)

    def to_csr(self) -> sp.csr_matrix:
        r = np.concatenate([self.rows, self.cols, np.arange(self.dim)])
        c = np.concatenate([self.cols, self.rows, np.arange(self.dim)])
        v = np.concatenate([self.values, self.values, self.diagonal])
        return sp.csr_matrix((v, (r, c)), shape=(self.dim, self.dim))

    def to_dense(self) -> np.ndarray:
        h = np.diag(self.diagonal).astype(float)
        h[self.rows, self.cols] = self.values
        h[self.cols, self.rows] = self.values
        return h

    def norm_bound(self) -> float:
        """Maximum absolute row sum, an upper bound on the spectral norm."""
        s = np.abs(self.diagonal).copy()
        np.add.at(s, self.rows, np.abs(self.values))
        np.add.at(s, self.cols, np.abs(self.values))
        return float(s.max())

    def __matmul__(self, psi):
        return sparse_apply(self, psi)


def sparse_apply(h: SparseHamiltonian, psi) -> np.ndarray:
    """Return ``H @ psi`` from the symmetric expansion of bonds and diagonal."""
    psi = np.asarray(psi)
    if psi.shape != (h.dim,):
        raise InputError(f"state has shape {psi.shape}, expected ({h.dim},)")
    out = h.diagonal * psi
    out = out.astype(np.result_type(out, psi, complex if np.iscomplexobj(psi) else float))
    np.add.at(out, h.rows, h.values * psi[h.cols])
    np.add.at(out, h.cols, h.values * psi[h.rows])
    return out


@dataclass(frozen=True)
class RowOperator:
    """Minimal CSR matrix whose every row is non-empty.

    Cheaper to create than a scipy matrix, which matters when the
    Hamiltonian is rebuilt at every RK4 stage.
    """

    data: np.ndarray
    indices: np.ndarray
    indptr: np.ndarray

    def __matmul__(self, psi):
        return np.add.reduceat(self.data * psi[self.indices], self.indptr[:-1])

    def norm_bound(self) -> float:
        return float(np.add.reduceat(np.abs(self.data), self.indptr[:-1]).max())


def norm_bound(op) -> float:
    """Infinity-norm bound for a symmetric operator (dense, scipy sparse, or
    :class:`SparseHamiltonian`)."""
    if isinstance(op, (SparseHamiltonian, RowOperator)):
        return op.norm_bound()
    if sp.issparse(op):
        op = op.tocsr()
        sums = np.add.reduceat(np.abs(op.data), op.indptr[:-1]) if op.nnz else np.zeros(1)
        # reduceat misbehaves on empty rows; mask them out
        sums = np.where(np.diff(op.indptr) > 0, sums, 0.0)
        return float(sums.max()) if sums.size else 0.0
    op = np.asarray(op)
    return float(np.abs(op).sum(axis=1).max()) if op.size else 0.0


def unit_state(amplitudes) -> np.ndarray:
    """Complex copy of ``amplitudes`` scaled to unit norm."""
    psi = np.asarray(amplitudes, dtype=complex).copy()
    nrm = np.linalg.norm(psi)
    if nrm == 0 or not np.isfinite(nrm):
        raise InputError("cannot normalise a zero or non-finite state")
    return psi / nrm


def rk4_propagate(
    hamiltonian: Callable[[float], object],
    psi0,
    t0: float,
    t1: float,
    dt: float,
) -> np.ndarray:
    """Propagate ``psi0`` from ``t0`` to ``t1`` with classical RK4.

    ``hamiltonian(t)`` must return an operator supporting ``@`` on a complex
    vector. The last step is shortened to land exactly on ``t1``. The norm is
    not renormalised.

    Raises
    ------
    InputError
        If ``dt <= 0``, ``t1 <= t0`` or ``dt * ||H(t)||`` exceeds
        :data:`STABILITY_LIMIT` at any step.
    NumericalError
        If the state becomes non-finite.
    """
    if not dt > 0:
        raise InputError("dt must be positive")
    if not t1 > t0:
        raise InputError("t1 must exceed t0")
    psi = np.array(psi0, dtype=complex)

    span = t1 - t0
    nfull = int(np.floor(span / dt + 1e-9))
    edges = t0 + dt * np.arange(nfull + 1)
    if t1 - edges[-1] > 1e-9 * dt:
        edges = np.append(edges, t1)
    else:
        edges[-1] = t1

    h_end = hamiltonian(edges[0])
    for a, b in zip(edges[:-1], edges[1:]):
        h = b - a
        h_start = h_end
        if h * norm_bound(h_start) > STABILITY_LIMIT:
            raise InputError(
                f"dt={h:g} violates the stability guard at t={a:g} "
                f"(dt*||H|| > {STABILITY_LIMIT})"
            )
        h_mid = hamiltonian(a + 0.5 * h)
        h_end = hamiltonian(b)
        k1 = -1j * (h_start @ psi)
        k2 = -1j * (h_mid @ (psi + 0.5 * h * k1))
        k3 = -1j * (h_mid @ (psi + 0.5 * h * k2))
        k4 = -1j * (h_end @ (psi + h * k3))
        psi = psi + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if not np.all(np.isfinite(psi)):
            raise NumericalError(f"non-finite amplitudes at t={b:g}")
    return psi
