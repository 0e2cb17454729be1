"""Analytic corner, interface and centre zero modes of the superlattice.

Each state is an outer product of two one-dimensional profiles, one per
axis. Along an axis there are three profiles:

* ``corner_low`` -- sites ``1, 3, ..., L-1`` with amplitudes ``M**s``
* ``interface`` -- sites ``L, L-2, ..., 2`` with ``M**s`` and
  ``L+2, ..., 2L-2`` with ``N**(s+1)``
* ``corner_high`` -- sites ``2L-1, 2L-3, ..., L+1`` with ``N**s``

The sums are truncated at the lattice edge, so the normalisation constants
below are exact on the finite lattice.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InputError, SingularRatioError
from .lattice import Couplings, LatticeGeometry, Model

LABELS = ("TL", "T", "TR", "L", "C", "R", "BL", "B", "BR")

# (x profile, y profile) per label; ordinal n = 3 (j - 1) + i
_PROFILES = {
    "TL": ("low", "low"),
    "T": ("mid", "low"),
    "TR": ("high", "low"),
    "L": ("low", "mid"),
    "C": ("mid", "mid"),
    "R": ("high", "mid"),
    "BL": ("low", "high"),
    "B": ("mid", "high"),
    "BR": ("high", "high"),
}


def ordinal(label: str) -> int:
    """1-based index of ``label`` in the ordered topological basis."""
    try:
        return LABELS.index(label) + 1
    except ValueError:
        raise InputError(f"unknown state label {label!r}") from None


@dataclass(frozen=True)
class DecayRatios:
    M_x: float
    M_y: float
    N_x: float
    N_y: float

    @property
    def M(self) -> float:
        return self.M_x

    @property
    def N(self) -> float:
        return self.N_x

    def is_isotropic(self) -> bool:
        return self.M_x == self.M_y and self.N_x == self.N_y


@dataclass(frozen=True)
class NormalizationSet:
    tl: float
    t: float
    tr: float
    l: float
    c: float
    r: float
    bl: float
    b: float
    br: float

    def for_label(self, label: str) -> float:
        ordinal(label)
        return getattr(self, label.lower())


def decay_ratios(c: Couplings) -> DecayRatios:
    if c.w_x <= 0 or c.w_y <= 0:
        raise InputError("decay ratios need w_x, w_y > 0")
    return DecayRatios(
        M_x=-c.v_x / c.w_x,
        M_y=-c.v_y / c.w_y,
        N_x=-c.vp_x / c.w_x,
        N_y=-c.vp_y / c.w_y,
    )


def geometric_sum(ratio: float, L: int) -> float:
    """``sum_{s=0}^{L/2-1} ratio**(2s) = (1 - ratio**L) / (1 - ratio**2)``."""
    if abs(ratio) == 1:
        raise SingularRatioError(f"decay ratio {ratio} has unit modulus")
    if ratio == 0:
        return 1.0
    return (1 - ratio**L) / (1 - ratio**2)


def normalization_set(r: DecayRatios, L: int) -> NormalizationSet:
    """Normalisation constants of the nine states.

    With ``S(q) = (1 - q**L) / (1 - q**2)`` the squared norm of each axis
    profile is ``S(M)``, ``S(M) + S(N) - 1`` or ``S(N)``; the constant is the
    inverse root of the product of the two axis norms. For ``M_x = M_y`` and
    ``N_x = N_y`` this is e.g. ``N_tl = (1 - M**2) / (1 - M**L)``.
    """
    if L % 2:
        raise InputError("L must be even")
    sx = {"low": geometric_sum(r.M_x, L), "high": geometric_sum(r.N_x, L)}
    sy = {"low": geometric_sum(r.M_y, L), "high": geometric_sum(r.N_y, L)}
    sx["mid"] = sx["low"] + sx["high"] - 1
    sy["mid"] = sy["low"] + sy["high"] - 1
    consts = {
        label.lower(): 1.0 / np.sqrt(sx[px] * sy[py]) for label, (px, py) in _PROFILES.items()
    }
    return NormalizationSet(**consts)


def axis_profile(kind: str, M: float, N: float, L: int) -> np.ndarray:
    """Unnormalised 1D amplitude profile of length ``2L - 1``."""
    prof = np.zeros(2 * L - 1)
    s = np.arange(L // 2)
    if kind == "low":
        prof[2 * s] = M**s  # sites 2s + 1
    elif kind == "high":
        prof[2 * L - 2 - 2 * s] = N**s  # sites 2L - 1 - 2s
    elif kind == "mid":
        prof[L - 1 - 2 * s] = M**s  # sites L - 2s
        s = np.arange(L // 2 - 1)
        prof[L + 1 + 2 * s] = N ** (s + 1)  # sites L + 2(s + 1)
    else:
        raise InputError(f"unknown profile kind {kind!r}")
    return prof


def analytic_state(label: str, c: Couplings, L: int) -> np.ndarray:
    """Flattened complex amplitudes of one of the nine topological states."""
    ordinal(label)
    LatticeGeometry(Model.CTAP_SUPERLATTICE, L)
    r = decay_ratios(c)
    norm = normalization_set(r, L).for_label(label)
    px, py = _PROFILES[label]
    fx = axis_profile(px, r.M_x, r.N_x, L)
    fy = axis_profile(py, r.M_y, r.N_y, L)
    # row-major: index = (j-1)*side + (i-1), so y is the slow axis
    return (norm * np.outer(fy, fx)).ravel().astype(complex)


def analytic_basis(c: Couplings, L: int) -> np.ndarray:
    """(dim, 9) matrix whose columns are the states in ``LABELS`` order."""
    return np.stack([analytic_state(lab, c, L) for lab in LABELS], axis=1)


def overlap(a, b) -> complex:
    """``<a|b>``."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise InputError(f"dimension mismatch {a.shape} vs {b.shape}")
    return complex(np.vdot(a, b))
