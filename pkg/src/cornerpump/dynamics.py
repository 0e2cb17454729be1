"""Real-time evolution, instantaneous spectra and projections."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InputError, NumericalError
from .lattice import Couplings, LatticeGeometry, Model, bond_pattern
from .numerics import rk4_propagate, symmetric_eig, symmetric_eigvals
from .protocols import default_dt
from .topo_states import LABELS, analytic_basis

NORM_DRIFT_LIMIT = 1e-3

# default snapshot instants
CTAP_SNAPSHOT_TIMES = (-100.0, -25.0, 0.0, 25.0, 100.0)
RICEMELE_SNAPSHOT_PHASES = (0.1 * np.pi, 0.45 * np.pi, 2.35 * np.pi, 3.9 * np.pi)


@dataclass
class Trajectory:
    times: np.ndarray
    sites: list[tuple[int, int]]
    occupations: np.ndarray  # (ntimes, nsites)
    norms: np.ndarray
    final_state: np.ndarray
    snapshots: dict[float, np.ndarray] = field(default_factory=dict)
    dt: float = 0.0

    def occupation_of(self, i: int, j: int) -> np.ndarray:
        return self.occupations[:, self.sites.index((i, j))]


@dataclass
class SpectralFlow:
    times: np.ndarray
    eigenvalues: list[np.ndarray]
    band_edges: np.ndarray | None = None  # (ntimes, 2): highest bulk E<0, lowest bulk E>0
    tracked: np.ndarray | None = None


def _check_geometry(schedule, geometry: LatticeGeometry):
    if schedule.model is not geometry.model:
        raise InputError(f"schedule is for {schedule.model}, lattice is {geometry.model}")


def hamiltonian_at(schedule, geometry: LatticeGeometry):
    """Callable ``t -> H(t)`` (as a :class:`RowOperator`) on a cached bond pattern."""
    _check_geometry(schedule, geometry)
    pattern = bond_pattern(geometry)
    return lambda t: pattern.operator(schedule.couplings(t))


def occupation(psi, geometry: LatticeGeometry, i: int, j: int) -> float:
    return float(abs(psi[geometry.flatten(i, j)]) ** 2)


def evolve(
    schedule,
    geometry: LatticeGeometry,
    psi0,
    dt: float | None = None,
    sample_stride: int = 100,
    snapshot_times=(),
    sites=(),
) -> Trajectory:
    """Propagate ``psi0`` over the schedule window with RK4.

    Occupations are recorded every ``sample_stride`` steps and at the end,
    always at ``(1, 1)`` and ``(side, side)`` plus any extra ``sites``.
    Full states are kept at ``snapshot_times``.

    Raises
    ------
    NumericalError
        On blow-up or if the norm drifts by more than ``NORM_DRIFT_LIMIT``.
    """
    psi = np.array(psi0, dtype=complex)
    if psi.shape != (geometry.dim,):
        raise InputError(f"initial state has shape {psi.shape}, expected ({geometry.dim},)")
    if abs(np.linalg.norm(psi) - 1) > 1e-10:
        raise InputError("initial state must have unit norm")
    if sample_stride < 1:
        raise InputError("sample_stride must be >= 1")
    dt = default_dt(schedule) if dt is None else float(dt)
    ham = hamiltonian_at(schedule, geometry)
    t0, t1 = schedule.t_start, schedule.t_end

    side = geometry.side
    tracked = [(1, 1), (side, side)]
    tracked += [tuple(s) for s in sites if tuple(s) not in tracked]
    idx = np.array([geometry.flatten(i, j) for i, j in tracked])

    snaps = sorted({float(s) for s in snapshot_times})
    for s in snaps:
        if not t0 <= s <= t1:
            raise InputError(f"snapshot time {s} outside [{t0}, {t1}]")
    nsteps = int(np.floor((t1 - t0) / dt + 1e-9))
    grid = [t0 + k * dt for k in range(0, nsteps + 1, sample_stride)]
    stops = sorted(set(grid) | set(snaps) | {t1})

    times, occ, norms, snapshots = [], [], [], {}

    def record(t, state):
        nrm = float(np.linalg.norm(state))
        if abs(nrm - 1) > NORM_DRIFT_LIMIT:
            raise NumericalError(f"norm drift {abs(nrm - 1):.3e} at t={t:g}")
        times.append(t)
        occ.append(np.abs(state[idx]) ** 2)
        norms.append(nrm)

    record(stops[0], psi)
    if stops[0] in snaps:
        snapshots[stops[0]] = psi.copy()
    for a, b in zip(stops[:-1], stops[1:]):
        if b - a <= 1e-12 * max(1.0, abs(b)):
            continue
        psi = rk4_propagate(ham, psi, a, b, dt)
        record(b, psi)
        if b in snaps:
            snapshots[b] = psi.copy()

    return Trajectory(
        times=np.array(times),
        sites=tracked,
        occupations=np.array(occ),
        norms=np.array(norms),
        final_state=psi,
        snapshots=snapshots,
        dt=dt,
    )


def instantaneous_eigensystem(schedule, geometry: LatticeGeometry, t: float):
    c = schedule.couplings(t)
    h = bond_pattern(geometry).hamiltonian(c).to_dense()
    return symmetric_eig(h)


def spectral_flow(
    schedule,
    geometry: LatticeGeometry,
    times,
    mode: str = "full",
    track_from=None,
) -> SpectralFlow:
    """Dense spectra of ``H(t)`` on a time grid.

    ``mode="full"`` keeps every eigenvalue. ``mode="ingap"`` keeps, for the
    superlattice, the nine levels of smallest ``|E|`` together with the two
    bulk edges; for the Rice-Mele lattice it follows one level by maximum
    eigenvector overlap with the previous instant, starting from the
    projection of ``track_from`` (default: site ``(1, 1)``) onto the
    zero-energy manifold at the first instant.
    """
    _check_geometry(schedule, geometry)
    times = np.asarray(times, dtype=float)
    if times.size == 0:
        raise InputError("time grid is empty")
    if mode not in ("full", "ingap"):
        raise InputError(f"unknown spectral-flow mode {mode!r}")
    pattern = bond_pattern(geometry)

    if mode == "full":
        evs = [symmetric_eigvals(pattern.hamiltonian(schedule.couplings(t)).to_dense()) for t in times]
        return SpectralFlow(times=times, eigenvalues=evs)

    if geometry.model is Model.CTAP_SUPERLATTICE:
        evs, edges = [], []
        for t in times:
            e = symmetric_eigvals(pattern.hamiltonian(schedule.couplings(t)).to_dense())
            order = np.argsort(np.abs(e), kind="stable")
            ingap = np.sort(e[order[:9]])
            rest = e[order[9:]]
            edges.append((rest[rest < 0].max(), rest[rest > 0].min()))
            evs.append(ingap)
        return SpectralFlow(times=times, eigenvalues=evs, band_edges=np.array(edges))

    ref = geometry.indicator(1, 1) if track_from is None else np.asarray(track_from, dtype=complex)
    evs, tracked = [], []
    prev = None
    for k, t in enumerate(times):
        e, v = instantaneous_eigensystem(schedule, geometry, t)
        if prev is None:
            # resolve the degenerate level by projecting the reference onto it
            weights = np.abs(v.T @ ref) ** 2
            e_ref = e[np.argmax(weights)]
            block = np.abs(e - e_ref) < 1e-8
            vec = v[:, block] @ (v[:, block].T @ ref)
            vec = vec / np.linalg.norm(vec)
            n = int(np.argmax(np.abs(v.T @ vec)))
            prev = vec
        else:
            n = int(np.argmax(np.abs(v.T @ prev)))
            prev = v[:, n].astype(complex)
        tracked.append(e[n])
        evs.append(np.array([e[n]]))
    return SpectralFlow(times=times, eigenvalues=evs, tracked=np.array(tracked))


def project_topo(psi, c: Couplings, L: int) -> np.ndarray:
    """Amplitudes ``a_n = <n|psi>`` on the nine analytic states."""
    basis = analytic_basis(c, L)
    psi = np.asarray(psi)
    if psi.shape != (basis.shape[0],):
        raise InputError("state dimension does not match the superlattice")
    return basis.conj().T @ psi


__all__ = [
    "CTAP_SNAPSHOT_TIMES",
    "LABELS",
    "RICEMELE_SNAPSHOT_PHASES",
    "SpectralFlow",
    "Trajectory",
    "evolve",
    "hamiltonian_at",
    "instantaneous_eigensystem",
    "occupation",
    "project_topo",
    "spectral_flow",
]
