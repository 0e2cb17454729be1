"""Nine-level effective model on the basis (TL, T, TR, L, C, R, BL, B, BR)."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import simpson

from .errors import InputError
from .lattice import Couplings
from .topo_states import decay_ratios, geometric_sum, normalization_set

# (n, m, sign) for the two coupling families, 1-based basis ordinals
OMEGA12_BONDS = ((1, 2, 1), (2, 5, 1), (4, 5, 1), (7, 8, 1), (1, 4, -1), (3, 6, -1))
OMEGA23_BONDS = ((2, 3, 1), (5, 6, 1), (5, 8, 1), (8, 9, 1), (4, 7, -1), (6, 9, -1))


@dataclass(frozen=True)
class EffectiveCouplings:
    omega12: float
    omega23: float

    def matrix_elements(self) -> dict[tuple[int, int], float]:
        """All twelve upper-triangle couplings keyed by ``(n, m)``."""
        out = {(n, m): s * self.omega12 for n, m, s in OMEGA12_BONDS}
        out.update({(n, m): s * self.omega23 for n, m, s in OMEGA23_BONDS})
        return out

    @property
    def rms(self) -> float:
        return float(np.hypot(self.omega12, self.omega23))


def effective_couplings(c: Couplings, L: int) -> EffectiveCouplings:
    """Overlap couplings ``<T|H|TL>`` and ``<TR|H|T>`` in closed form.

    Requires the isotropic setting ``v_x = v_y``, ``v'_x = v'_y``,
    ``w_x = w_y``.
    """
    if not (c.v_x == c.v_y and c.vp_x == c.vp_y and c.w_x == c.w_y):
        raise InputError("effective model needs isotropic couplings")
    if c.delta_x or c.delta_y:
        raise InputError("effective model takes no staggered potential")
    if L % 2:
        raise InputError("L must be even")
    r = decay_ratios(c)
    norms = normalization_set(r, L)
    M, N = r.M, r.N
    s_m = geometric_sum(M, L)
    omega12 = c.v_x * M ** (L // 2 - 1) * s_m * norms.tl * norms.t
    # T and TR share the top-row y profile, so the y overlap is S(M)
    omega23 = c.vp_x * N ** (L // 2 - 1) * s_m * norms.t * norms.tr
    return EffectiveCouplings(float(omega12), float(omega23))


def build_heff(e: EffectiveCouplings) -> np.ndarray:
    h = np.zeros((9, 9))
    for (n, m), val in e.matrix_elements().items():
        h[n - 1, m - 1] = h[m - 1, n - 1] = val
    return h


def heff_spectrum_closed_form(e: EffectiveCouplings) -> np.ndarray:
    """``{0, +-E x2, +-sqrt(2) E x2}`` with ``E = sqrt(Omega12^2 + Omega23^2)``."""
    E = e.rms
    r2 = np.sqrt(2.0) * E
    return np.array([-r2, -r2, -E, -E, 0.0, E, E, r2, r2])


def dark_state(e: EffectiveCouplings) -> np.ndarray:
    """Zero-energy eigenvector with no weight on interface or centre states."""
    a, b = e.omega12, e.omega23
    s = a * a + b * b
    if s == 0:
        raise InputError("dark state undefined when both couplings vanish")
    d = np.zeros(9)
    d[0] = b * b / s
    d[2] = d[6] = -a * b / s
    d[8] = a * a / s
    return d


def adiabaticity_integral(schedule, L: int, t0: float, t1: float, nodes: int = 2001) -> float:
    """Composite-Simpson estimate of ``int sqrt(Omega12^2 + Omega23^2) dt``.

    ``schedule`` is anything with a ``couplings(t)`` method.
    """
    if not t1 > t0:
        raise InputError("t1 must exceed t0")
    if nodes < 3 or nodes % 2 == 0:
        raise InputError("Simpson quadrature needs an odd node count >= 3")
    ts = np.linspace(t0, t1, nodes)
    vals = np.array([effective_couplings(schedule.couplings(t), L).rms for t in ts])
    return float(simpson(vals, x=ts))
