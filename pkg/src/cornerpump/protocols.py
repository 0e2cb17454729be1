"""Time-dependent coupling schedules."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InputError
from .lattice import Couplings, Model


@dataclass(frozen=True)
class CtapSchedule:
    """Counter-intuitively ordered Gaussian pulse pair on ``[-T/2, T/2]``.

    The primed hopping (next to the target corner) peaks first, at
    ``t = -delta/2``; the unprimed one peaks at ``t = +delta/2``.
    """

    omega_m: float = 0.9
    lam: float = 150.0
    delta: float = 50.0
    T: float = 600.0
    w: float = 1.0

    model = Model.CTAP_SUPERLATTICE

    def __post_init__(self):
        if not 0 <= self.omega_m < self.w:
            raise InputError("omega_m must lie in [0, w) to stay topological")
        if self.lam <= 0 or self.delta <= 0 or self.T <= 0:
            raise InputError("lambda, delta and T must be positive")

    @classmethod
    def from_total_time(cls, T, omega_m=0.9, lambda_ratio=0.3, delta_ratio=1 / 3):
        """Sweep convention: ``lambda = lambda_ratio * T``, ``delta = delta_ratio * lambda``."""
        lam = lambda_ratio * T
        return cls(omega_m=omega_m, lam=lam, delta=delta_ratio * lam, T=T)

    @property
    def t_start(self) -> float:
        return -0.5 * self.T

    @property
    def t_end(self) -> float:
        return 0.5 * self.T

    def pulses(self, t):
        """``(v(t), v'(t))``; vectorised over ``t``."""
        t = np.asarray(t, dtype=float)
        v = self.omega_m * np.exp(-((t - 0.5 * self.delta) ** 2) / self.lam**2)
        vp = self.omega_m * np.exp(-((t + 0.5 * self.delta) ** 2) / self.lam**2)
        return v, vp

    def couplings(self, t: float) -> Couplings:
        v, vp = self.pulses(t)
        return Couplings.isotropic(float(v), float(vp), self.w)

    def max_hopping(self) -> float:
        return max(self.w, self.omega_m)

    def max_potential(self) -> float:
        return 0.0


def ctap_couplings(s: CtapSchedule, t: float) -> Couplings:
    return s.couplings(t)


@dataclass(frozen=True)
class RiceMeleSchedule:
    """Two-stage Rice-Mele cycle on ``[0, T]`` with ``omega = 4 pi / T``.

    Stage one (``t <= T/2``) pumps along x with ``delta_x``; stage two along y
    with ``delta_y``.
    """

    delta0: float = 0.4
    T: float = 1000.0
    t0: float = 1.0

    model = Model.RICE_MELE

    def __post_init__(self):
        if self.delta0 <= 0 or self.T <= 0 or self.t0 <= 0:
            raise InputError("delta0, T and t0 must be positive")

    @property
    def omega(self) -> float:
        return 4 * np.pi / self.T

    @property
    def t_start(self) -> float:
        return 0.0

    @property
    def t_end(self) -> float:
        return self.T

    def couplings(self, t: float) -> Couplings:
        if not 0 <= t <= self.T:
            raise InputError(f"t={t} outside [0, {self.T}]")
        phase = self.omega * t
        v = self.t0 * (1 - np.cos(phase))
        w = self.t0 * (1 + np.cos(phase))
        # Heaviside taken as 1 at t = T/2 in the stage-one branch
        stage_one = t <= 0.5 * self.T
        pot = self.delta0 * np.sin(phase)
        dx, dy = (pot, 0.0) if stage_one else (0.0, pot)
        return Couplings(v, v, 0.0, 0.0, w, w, dx, dy)

    def max_hopping(self) -> float:
        return 2 * self.t0

    def max_potential(self) -> float:
        return self.delta0


def ricemele_couplings(s: RiceMeleSchedule, t: float) -> Couplings:
    return s.couplings(t)


@dataclass(frozen=True)
class FrozenSchedule:
    """Time-independent couplings over a window; handy for checks."""

    fixed: Couplings
    t_start: float
    t_end: float
    model: Model = Model.CTAP_SUPERLATTICE

    def couplings(self, t: float) -> Couplings:
        return self.fixed

    def max_hopping(self) -> float:
        return self.fixed.max_hopping()

    def max_potential(self) -> float:
        return abs(self.fixed.delta_x) + abs(self.fixed.delta_y)


def default_dt(schedule) -> float:
    """``min(0.02, 0.1 / bound)`` with ``bound = |dx| + |dy| + 8 * max hopping``."""
    bound = schedule.max_potential() + 2 * schedule.max_hopping() * 4
    return min(0.02, 0.1 / bound) if bound > 0 else 0.02
