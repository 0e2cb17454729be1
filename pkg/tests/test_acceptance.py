"""Acceptance gate: one test per criterion at its stated tolerance.

Each test prints a single ``PASS``/``FAIL`` line (also collected into the
pytest terminal summary). Run standalone with ``python tests/test_acceptance.py``.
"""

from __future__ import annotations

import itertools
import sys
import time
from functools import lru_cache
from pathlib import Path

import numpy as np
import pytest

from cornerpump.dynamics import evolve, spectral_flow
from cornerpump.effective_model import (
    EffectiveCouplings,
    build_heff,
    dark_state,
    effective_couplings,
    heff_spectrum_closed_form,
)
from cornerpump.experiments import parse_config, run_experiment, run_sweep_parallel
from cornerpump.lattice import Couplings, LatticeGeometry, Model, build_ctap_hamiltonian
from cornerpump.protocols import CtapSchedule, RiceMeleSchedule
from cornerpump.topo_states import LABELS, analytic_state, overlap

try:
    from conftest import ACCEPTANCE_LINES
except ImportError:  # standalone run
    ACCEPTANCE_LINES = []


def report(number, passed, detail):
    line = f"{'PASS' if passed else 'FAIL'} criterion {number}: {detail}"
    print(line, flush=True)
    ACCEPTANCE_LINES.append(line)
    assert passed, line


@lru_cache(maxsize=None)
def ctap_final(L, lam, delta, T):
    """``(P_side_side(T), max |norm - 1|)`` for a corner-to-corner CTAP run."""
    g = LatticeGeometry(Model.CTAP_SUPERLATTICE, L)
    traj = evolve(CtapSchedule(omega_m=0.9, lam=lam, delta=delta, T=T), g, g.indicator(1, 1), sample_stride=500)
    return float(traj.occupation_of(g.side, g.side)[-1]), float(np.abs(traj.norms - 1).max())


@lru_cache(maxsize=None)
def ricemele_final(delta0, T):
    g = LatticeGeometry(Model.RICE_MELE, 13)
    traj = evolve(RiceMeleSchedule(delta0=delta0, T=T), g, g.indicator(1, 1), sample_stride=5000)
    return float(traj.occupation_of(26, 26)[-1]), float(np.abs(traj.norms - 1).max())


def test_criterion_1_ctap_headline():
    p, drift = ctap_final(14, 150.0, 50.0, 600.0)
    ok = abs(p - 0.9998) <= 0.002 and drift < 1e-6
    report(1, ok, f"P_27,27(T) = {p:.6f} (target 0.9998 +- 0.002), norm drift {drift:.1e}")


def test_criterion_2_adiabatic_threshold():
    ps = {T: ctap_final(14, 0.3 * T, 0.1 * T, T)[0] for T in (200.0, 400.0, 500.0, 600.0)}
    ok = all(ps[T] > 0.90 for T in (400.0, 500.0, 600.0)) and ps[200.0] < 0.90
    detail = ", ".join(f"P({T:g}) = {p:.4f}" for T, p in ps.items())
    report(2, ok, f"{detail} (need P(200) < 0.90 < P(400..600))")


def test_criterion_3_size_collapse():
    ps = [ctap_final(L, 180.0, 60.0, 600.0)[0] for L in (10, 14, 18, 22)]
    ok = all(a > b for a, b in zip(ps, ps[1:]))
    detail = ", ".join(f"P(L={L}) = {p:.4f}" for L, p in zip((10, 14, 18, 22), ps))
    report(3, ok, f"{detail} (need strictly decreasing)")


@pytest.mark.parametrize("delta0,T,target", [(0.4, 1000.0, 0.962), (0.5, 1050.0, 0.964)])
def test_criterion_4_thouless(delta0, T, target):
    p, drift = ricemele_final(delta0, T)
    ok = abs(p - target) <= 0.01
    report(4, ok, f"(delta0, T) = ({delta0}, {T:g}): P_26,26 = {p:.6f} (target {target} +- 0.01)")


def test_criterion_5_effective_exactness():
    rng = np.random.default_rng(2024)
    worst_e = worst_d = 0.0
    for a, b in rng.normal(size=(100, 2)):
        e = EffectiveCouplings(float(a), float(b))
        h = build_heff(e)
        worst_e = max(worst_e, np.abs(np.linalg.eigvalsh(h) - heff_spectrum_closed_form(e)).max())
        worst_d = max(worst_d, np.abs(h @ dark_state(e)).max())
    ok = worst_e <= 1e-12 and worst_d <= 1e-13
    report(5, ok, f"max eigenvalue mismatch {worst_e:.1e} (<= 1e-12), max |H D| {worst_d:.1e} (<= 1e-13)")


def test_criterion_6_coupling_oracle():
    worst = 0.0
    for (v, vp), L in itertools.product(itertools.product((0.25, 0.5, 0.9), repeat=2), (8, 14)):
        c = Couplings.isotropic(v, vp)
        h = build_ctap_hamiltonian(c, L)
        st = {lab: analytic_state(lab, c, L) for lab in ("TL", "T", "TR")}
        o12 = overlap(st["T"], h @ st["TL"]).real
        o23 = overlap(st["TR"], h @ st["T"]).real
        e = effective_couplings(c, L)
        worst = max(worst, abs(e.omega12 / o12 - 1), abs(e.omega23 / o23 - 1))
    report(6, worst <= 1e-8, f"max relative mismatch {worst:.1e} over 18 cases (<= 1e-8)")


def test_criterion_7_analytic_states():
    grid = (0.0, 0.25, 0.5, 0.75, 0.9)
    worst_norm = 0.0
    for v, vp in itertools.product(grid, grid):
        c = Couplings.isotropic(v, vp)
        for L in (6, 10, 14):
            for lab in LABELS:
                worst_norm = max(worst_norm, abs(np.linalg.norm(analytic_state(lab, c, L)) - 1))

    # slope of log ||H psi|| against L, compared with log of the largest
    # decay ratio present in each state's profiles
    Ls = np.array([6, 8, 10, 12, 14])
    worst_slope, where = 0.0, None
    for v, vp in itertools.product(grid[1:], grid[1:]):
        c = Couplings.isotropic(v, vp)
        for lab in LABELS:
            q = {"TL": v, "BR": vp}.get(lab, max(v, vp))
            res = [np.linalg.norm(build_ctap_hamiltonian(c, L) @ analytic_state(lab, c, L)) for L in Ls]
            slope = np.polyfit(Ls, np.log(res), 1)[0]
            dev = abs(slope / (0.5 * np.log(q)) - 1)
            if dev > worst_slope:
                worst_slope, where = dev, (v, vp, lab)
    ok = worst_norm <= 1e-12 and worst_slope <= 0.2
    report(
        7,
        ok,
        f"max |norm - 1| {worst_norm:.1e} (<= 1e-12); worst slope deviation "
        f"{worst_slope:.1%} at (v, v', label) = {where} (<= 20%)",
    )


def test_criterion_8_spectral_structure():
    s = CtapSchedule()
    times = np.linspace(s.t_start, s.t_end, 121)
    flow = spectral_flow(s, LatticeGeometry(Model.CTAP_SUPERLATTICE, 14), times, mode="ingap")
    margins = [
        min(edges[1] - e.max(), e.min() - edges[0]) for e, edges in zip(flow.eigenvalues, flow.band_edges)
    ]
    e0 = spectral_flow(s, LatticeGeometry(Model.CTAP_SUPERLATTICE, 14), [0.0], mode="ingap").eigenvalues[0]
    pos = np.sort(e0[e0 > 1e-9])
    pattern = (
        abs(e0[4]) < 1e-9
        and np.allclose(e0[:4], -e0[5:][::-1], atol=1e-9)
        and abs(pos[0] - pos[1]) < 1e-9
        and abs(pos[2] - pos[3]) < 1e-9
    )
    ratio = pos[2] / pos[0]
    ok = min(margins) > 0 and pattern and abs(ratio - np.sqrt(2)) <= 0.05
    report(
        8,
        ok,
        f"min separation from bulk {min(margins):.4f} over 121 instants; "
        f"t=0 levels {np.round(e0, 4).tolist()}, e2/e1 = {ratio:.4f} (sqrt2 +- 0.05)",
    )


def test_criterion_9_determinism(tmp_path):
    base = "experiment = sweep-T\nL = 6\nlambda_ratio = 0.3\nsweep = 40, 60, 80\n"
    csvs = []
    for k, workers in enumerate((1, 1, 2, 3)):
        cfg = parse_config(base + f"workers = {workers}\noutput_dir = {tmp_path / str(k)}\n")
        run_experiment(cfg)
        csvs.append((tmp_path / str(k) / "sweep-T.csv").read_bytes())
    ev = []
    for k in range(2):
        cfg = parse_config(f"experiment = evolve\nL = 6\nT = 60\nlambda = 15\ndelta = 5\noutput_dir = {tmp_path / ('e' + str(k))}\n")
        run_experiment(cfg)
        ev.append((tmp_path / f"e{k}" / "evolve.csv").read_bytes())
    ok = len(set(csvs)) == 1 and ev[0] == ev[1]
    report(9, ok, "repeated runs and workers in {1, 2, 3} give byte-identical CSVs" if ok else "CSV bytes differ")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-s", "-p", "no:cacheprovider"]))
