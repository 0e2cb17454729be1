"""Lattice Hamiltonians for the four-block 2D SSH superlattice and the
single-block 2D Rice-Mele lattice.

Sites are labelled ``(i, j)`` with 1-based column ``i`` and row ``j`` and
flattened row-major, ``index = (j - 1) * side + (i - 1)``. Vertical bonds
carry the pi-flux sign ``(-1)**i``.
"""

from __future__ import annotations

import enum
import warnings
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.sparse as sp

from .errors import InputError
from .numerics import RowOperator, SparseHamiltonian, symmetric_eigvals

COUPLING_FIELDS = ("v_x", "v_y", "vp_x", "vp_y", "w_x", "w_y", "delta_x", "delta_y")
_CLS = {name: k for k, name in enumerate(COUPLING_FIELDS)}


@dataclass(frozen=True)
class Couplings:
    """Hopping amplitudes and staggered potentials at one instant.

    ``vp_x``/``vp_y`` are the primed hoppings of the lower/right blocks.
    """

    v_x: float
    v_y: float
    vp_x: float
    vp_y: float
    w_x: float = 1.0
    w_y: float = 1.0
    delta_x: float = 0.0
    delta_y: float = 0.0

    def __post_init__(self):
        for name in COUPLING_FIELDS:
            val = float(getattr(self, name))
            if not np.isfinite(val):
                raise InputError(f"coupling {name} is not finite")
            object.__setattr__(self, name, val)

    @classmethod
    def isotropic(cls, v, vp, w=1.0, delta_x=0.0, delta_y=0.0):
        return cls(v, v, vp, vp, w, w, delta_x, delta_y)

    def as_vector(self) -> np.ndarray:
        return np.array(
            [self.v_x, self.v_y, self.vp_x, self.vp_y, self.w_x, self.w_y, self.delta_x, self.delta_y]
        )

    def in_topological_phase(self) -> bool:
        return (
            self.w_x > 0
            and self.w_y > 0
            and abs(self.v_x) < self.w_x
            and abs(self.vp_x) < self.w_x
            and abs(self.v_y) < self.w_y
            and abs(self.vp_y) < self.w_y
        )

    def max_hopping(self) -> float:
        return float(np.abs(self.as_vector()[:6]).max())


class Model(enum.Enum):
    CTAP_SUPERLATTICE = "ctap"
    RICE_MELE = "ricemele"


@dataclass(frozen=True)
class LatticeGeometry:
    model: Model
    L: int

    def __post_init__(self):
        if not isinstance(self.L, (int, np.integer)) or isinstance(self.L, bool):
            raise InputError("L must be an integer")
        if self.model is Model.CTAP_SUPERLATTICE and (self.L < 4 or self.L % 2):
            raise InputError(f"superlattice needs even L >= 4, got {self.L}")
        if self.model is Model.RICE_MELE and self.L < 1:
            raise InputError(f"Rice-Mele lattice needs L >= 1, got {self.L}")

    @property
    def side(self) -> int:
        return 2 * self.L - 1 if self.model is Model.CTAP_SUPERLATTICE else 2 * self.L

    @property
    def dim(self) -> int:
        return self.side**2

    def flatten(self, i: int, j: int) -> int:
        if not (1 <= i <= self.side and 1 <= j <= self.side):
            raise InputError(f"site ({i}, {j}) outside [1, {self.side}]^2")
        return (j - 1) * self.side + (i - 1)

    def unflatten(self, index: int) -> tuple[int, int]:
        if not 0 <= index < self.dim:
            raise InputError(f"index {index} outside [0, {self.dim})")
        j, i = divmod(int(index), self.side)
        return i + 1, j + 1

    def indicator(self, i: int, j: int) -> np.ndarray:
        """State fully localised on site ``(i, j)``."""
        psi = np.zeros(self.dim, dtype=complex)
        psi[self.flatten(i, j)] = 1.0
        return psi


def bond_class(direction: str, r: int, L: int) -> str:
    """Coupling name carried by a superlattice bond leaving coordinate ``r``.

    Left/top of the interface (``r < L``) the chain alternates ``v, w``
    starting from the boundary; from the interface on it alternates
    ``v', w`` so that the last bond at ``r = 2L - 2`` is ``v'``.
    """
    if direction not in ("x", "y"):
        raise InputError(f"direction must be 'x' or 'y', got {direction!r}")
    if not 1 <= r <= 2 * L - 2:
        raise InputError(f"bond coordinate {r} outside [1, {2 * L - 2}]")
    if r < L:
        name = "v" if r % 2 else "w"
    else:
        name = "w" if r % 2 else "vp"
    return f"{name}_{direction}"


def bond_amplitude(direction: str, r: int, c: Couplings, L: int) -> float:
    return getattr(c, bond_class(direction, r, L))


def _ricemele_class(direction: str, r: int) -> str:
    return f"{'v' if r % 2 else 'w'}_{direction}"


class BondPattern:
    """Fixed sparsity pattern with a coupling label per bond.

    Evaluating the Hamiltonian for new couplings only rescales stored
    coefficients, so time-dependent propagation costs O(nnz) per call.
    """

    def __init__(self, geometry: LatticeGeometry):
        self.geometry = geometry
        side, L = geometry.side, geometry.L
        rows, cols, cls, sign = [], [], [], []
        for j in range(1, side + 1):
            for i in range(1, side + 1):
                a = geometry.flatten(i, j)
                if i < side:
                    if geometry.model is Model.CTAP_SUPERLATTICE:
                        name = bond_class("x", i, L)
                    else:
                        name = _ricemele_class("x", i)
                    rows.append(a)
                    cols.append(geometry.flatten(i + 1, j))
                    cls.append(_CLS[name])
                    sign.append(1.0)
                if j < side:
                    if geometry.model is Model.CTAP_SUPERLATTICE:
                        name = bond_class("y", j, L)
                    else:
                        name = _ricemele_class("y", j)
                    rows.append(a)
                    cols.append(geometry.flatten(i, j + 1))
                    cls.append(_CLS[name])
                    sign.append(-1.0 if i % 2 else 1.0)
        self.rows = np.array(rows, dtype=np.int64)
        self.cols = np.array(cols, dtype=np.int64)
        self.cls = np.array(cls, dtype=np.int64)
        self.sign = np.array(sign)

        n = geometry.dim
        ii = np.tile(np.arange(1, side + 1), side)
        jj = np.repeat(np.arange(1, side + 1), side)
        # on-site (-1)^i delta_x + (-1)^j delta_y
        self.diag_x = np.where(ii % 2, -1.0, 1.0)
        self.diag_y = np.where(jj % 2, -1.0, 1.0)

        # full symmetric CSR layout, diagonal stored explicitly
        nb = self.rows.size
        r = np.concatenate([self.rows, self.cols, np.arange(n)])
        c = np.concatenate([self.cols, self.rows, np.arange(n)])
        order = np.lexsort((c, r))
        r, c = r[order], c[order]
        entry = np.concatenate([np.arange(nb), np.arange(nb), -1 - np.arange(n)])[order]
        w_rows, w_cols, w_vals = [], [], []
        bond = entry >= 0
        pos = np.nonzero(bond)[0]
        w_rows.append(pos)
        w_cols.append(self.cls[entry[bond]])
        w_vals.append(self.sign[entry[bond]])
        site = -1 - entry[~bond]
        pos = np.nonzero(~bond)[0]
        w_rows += [pos, pos]
        w_cols += [np.full(pos.size, _CLS["delta_x"]), np.full(pos.size, _CLS["delta_y"])]
        w_vals += [self.diag_x[site], self.diag_y[site]]
        self._weights = sp.csr_matrix(
            (np.concatenate(w_vals), (np.concatenate(w_rows), np.concatenate(w_cols))),
            shape=(r.size, len(COUPLING_FIELDS)),
        )
        self._indices = c.astype(np.int32)
        self._indptr = np.searchsorted(r, np.arange(n + 1)).astype(np.int32)

    @property
    def nbonds(self) -> int:
        return int(self.rows.size)

    def hamiltonian(self, c: Couplings) -> SparseHamiltonian:
        vec = c.as_vector()
        return SparseHamiltonian(
            dim=self.geometry.dim,
            rows=self.rows,
            cols=self.cols,
            values=self.sign * vec[self.cls],
            diagonal=self.diag_x * c.delta_x + self.diag_y * c.delta_y,
        )

    def operator(self, c: Couplings) -> RowOperator:
        """Fast matrix-vector form used during propagation."""
        return RowOperator(self._weights @ c.as_vector(), self._indices, self._indptr)

    def csr(self, c: Couplings) -> sp.csr_matrix:
        """Same matrix as :meth:`hamiltonian`, as a scipy CSR matrix."""
        data = self._weights @ c.as_vector()
        n = self.geometry.dim
        return sp.csr_matrix((data, self._indices, self._indptr), shape=(n, n))


@lru_cache(maxsize=32)
def bond_pattern(geometry: LatticeGeometry) -> BondPattern:
    return BondPattern(geometry)


def build_ctap_hamiltonian(c: Couplings, L: int) -> SparseHamiltonian:
    """Four-block superlattice Hamiltonian on a ``(2L-1) x (2L-1)`` grid."""
    if c.delta_x != 0 or c.delta_y != 0:
        raise InputError("the superlattice builder takes no staggered potential")
    if not c.in_topological_phase():
        warnings.warn("couplings outside the topological phase (v, v' < w)", stacklevel=2)
    return bond_pattern(LatticeGeometry(Model.CTAP_SUPERLATTICE, L)).hamiltonian(c)


def build_ricemele_hamiltonian(c: Couplings, L: int) -> SparseHamiltonian:
    """Uniformly dimerised ``2L x 2L`` lattice with staggered potential.

    Only ``v_x, v_y, w_x, w_y, delta_x, delta_y`` enter; primed hoppings are
    ignored.
    """
    return bond_pattern(LatticeGeometry(Model.RICE_MELE, L)).hamiltonian(c)


_S0 = np.eye(2)
_SX = np.array([[0, 1], [1, 0]], dtype=complex)
_SY = np.array([[0, -1j], [1j, 0]])
_SZ = np.diag([1.0, -1.0]).astype(complex)


def bloch_hamiltonian(kx: float, ky: float, c: Couplings) -> np.ndarray:
    """4x4 bulk Bloch matrix of one block, plus staggered-potential terms."""
    return (
        (c.v_x + c.w_x * np.cos(kx)) * np.kron(_S0, _SX)
        + c.w_x * np.sin(kx) * np.kron(_S0, _SY)
        - (c.v_y + c.w_y * np.cos(ky)) * np.kron(_SX, _SZ)
        + c.w_y * np.sin(ky) * np.kron(_SY, _SZ)
        + c.delta_x * np.kron(_S0, _SZ)
        + c.delta_y * np.kron(_SZ, _S0)
    )


def bulk_bands(kx: float, ky: float, c: Couplings) -> np.ndarray:
    """Four ascending bulk energies at ``(kx, ky)``.

    The Hermitian Bloch matrix ``A + iB`` is diagonalised through its real
    symmetric embedding ``[[A, -B], [B, A]]``, whose spectrum is that of the
    Bloch matrix with every level doubled.
    """
    hk = bloch_hamiltonian(kx, ky, c)
    a, b = hk.real, hk.imag
    embedded = np.block([[a, -b], [b, a]])
    evals = symmetric_eigvals(embedded)
    return evals[::2].copy()
