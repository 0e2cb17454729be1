"""Named experiments, config parsing, parallel sweeps and CSV output.

Config files are line-oriented ``key = value`` text with ``#`` comments.
Lists are comma separated; ``start:stop:step`` expands to an inclusive
range.
"""

from __future__ import annotations

import hashlib
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .dynamics import (
    CTAP_SNAPSHOT_TIMES,
    RICEMELE_SNAPSHOT_PHASES,
    evolve,
    project_topo,
    spectral_flow,
)
from .effective_model import (
    adiabaticity_integral,
    dark_state,
    effective_couplings,
    heff_spectrum_closed_form,
)
from .errors import ConfigError, InputError, NumericalError
from .lattice import Couplings, LatticeGeometry, Model
from .protocols import CtapSchedule, RiceMeleSchedule
from .svg import emit_svg
from .topo_states import LABELS, analytic_state

EXPERIMENTS = (
    "states",
    "spectrum-flow",
    "evolve",
    "effective",
    "sweep-T",
    "sweep-L",
    "thouless",
    "thouless-sweep",
)
SWEEPS = ("sweep-T", "sweep-L", "thouless-sweep")
CTAP_EXPERIMENTS = ("states", "spectrum-flow", "evolve", "effective", "sweep-T", "sweep-L")

# key -> (kind, default); a default of None means "depends on experiment"
SCHEMA = {
    "experiment": ("str", None),
    "L": ("int", None),
    "omega_m": ("float", 0.9),
    "lambda": ("float", 150.0),
    "delta": ("float", 50.0),
    "T": ("float", None),
    "dt": ("float", None),
    "t0": ("float", 1.0),
    "delta0": ("float", 0.4),
    "v": ("float", 0.5),
    "v_prime": ("float", 0.3),
    "lambda_ratio": ("float", 0.3),
    "delta_ratio": ("float", 1 / 3),
    "sweep": ("list", None),
    "n_times": ("int", 121),
    "mode": ("str", "ingap"),
    "snapshots": ("list", None),
    "sites": ("sites", ()),
    "sample_stride": ("int", 100),
    "quadrature_nodes": ("int", 2001),
    "workers": ("int", 1),
    "output_dir": ("str", None),
}

# keys excluded from the config hash
_RUNTIME_KEYS = ("output_dir", "workers")


@dataclass
class ExperimentConfig:
    experiment: str
    params: dict
    lines: dict = field(default_factory=dict)

    def __getitem__(self, key):
        return self.params[key]

    def echo(self) -> str:
        """Resolved configuration as re-parseable ``key = value`` text."""
        out = [f"# cornerpump {__version__}"]
        for key in SCHEMA:
            val = self.params.get(key)
            if val is None:
                continue
            out.append(f"{key} = {_format_value(val)}")
        return "\n".join(out) + "\n"

    def digest(self) -> str:
        text = "\n".join(
            f"{k} = {_format_value(v)}"
            for k, v in self.params.items()
            if k not in _RUNTIME_KEYS and v is not None
        )
        return hashlib.sha256(text.encode()).hexdigest()[:10]


def _format_value(val) -> str:
    if isinstance(val, str):
        return val
    if isinstance(val, (tuple, list)):
        if val and isinstance(val[0], tuple):
            return "; ".join(f"{i}:{j}" for i, j in val)
        return ", ".join(_format_value(v) for v in val)
    if isinstance(val, (int, np.integer)):
        return str(int(val))
    return repr(float(val))


def _parse_number(text: str, line: int | None) -> float:
    try:
        return float(text)
    except ValueError:
        raise ConfigError(f"malformed number {text!r}", line) from None


def _parse_int(text: str, line: int | None) -> int:
    x = _parse_number(text, line)
    if x != int(x):
        raise ConfigError(f"expected an integer, got {text!r}", line)
    return int(x)


def _parse_list(text: str, line: int | None) -> tuple[float, ...]:
    text = text.strip()
    if not text:
        return ()
    if ":" in text and "," not in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ConfigError(f"range must be start:stop:step, got {text!r}", line)
        start, stop, step = (_parse_number(p.strip(), line) for p in parts)
        if step <= 0:
            raise ConfigError("range step must be positive", line)
        n = int(np.floor((stop - start) / step + 1e-9))
        return tuple(float(start + k * step) for k in range(n + 1))
    return tuple(_parse_number(p.strip(), line) for p in text.split(",") if p.strip())


def _parse_sites(text: str, line: int | None) -> tuple[tuple[int, int], ...]:
    sites = []
    for part in text.split(";"):
        part = part.strip()
        if not part:
            continue
        bits = part.split(":")
        if len(bits) != 2:
            raise ConfigError(f"site must be i:j, got {part!r}", line)
        sites.append((_parse_int(bits[0], line), _parse_int(bits[1], line)))
    return tuple(sites)


def _convert(key: str, raw: str, line: int | None):
    kind = SCHEMA[key][0]
    if kind == "str":
        return raw
    if kind == "int":
        return _parse_int(raw, line)
    if kind == "float":
        return _parse_number(raw, line)
    if kind == "list":
        return _parse_list(raw, line)
    return _parse_sites(raw, line)


def _split(entry: str, line: int | None) -> tuple[str, str]:
    if "=" not in entry:
        raise ConfigError(f"expected 'key = value', got {entry.strip()!r}", line)
    key, raw = entry.split("=", 1)
    key, raw = key.strip(), raw.strip()
    if key not in SCHEMA:
        raise ConfigError(f"unknown key {key!r}", line)
    return key, raw


def parse_config(text: str, overrides=()) -> ExperimentConfig:
    """Parse config text; ``overrides`` are ``key=value`` strings applied last."""
    raw: dict[str, tuple[str, int | None]] = {}
    for n, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        key, val = _split(body, n)
        if key in raw:
            raise ConfigError(f"duplicate key {key!r}", n)
        raw[key] = (val, n)
    for item in overrides:
        key, val = _split(item, None)
        raw[key] = (val, None)

    if "experiment" not in raw:
        raise ConfigError("missing required key 'experiment'")
    name, exp_line = raw["experiment"]
    if name not in EXPERIMENTS:
        raise ConfigError(f"unknown experiment {name!r}", exp_line)

    params = {key: _convert(key, val, line) for key, (val, line) in raw.items()}
    lines = {key: line for key, (_, line) in raw.items()}
    _apply_defaults(name, params)
    _validate(name, params, lines)
    return ExperimentConfig(experiment=name, params=params, lines=lines)


def _apply_defaults(name: str, p: dict):
    ctap = name in CTAP_EXPERIMENTS
    for key, (_, default) in SCHEMA.items():
        if default is not None:
            p.setdefault(key, default)
    p.setdefault("L", 14 if ctap else 13)
    p.setdefault("T", 600.0 if ctap else 1000.0)
    if "snapshots" not in p:
        if name == "evolve":
            half = 0.5 * p["T"]
            p["snapshots"] = tuple(t for t in CTAP_SNAPSHOT_TIMES if -half <= t <= half)
        elif name == "thouless":
            # snapshot instants given as omega * t / pi
            p["snapshots"] = tuple(round(ph / np.pi, 12) for ph in RICEMELE_SNAPSHOT_PHASES)
        else:
            p["snapshots"] = ()
    if p.get("output_dir") is None:
        cfg = ExperimentConfig(name, p)
        p["output_dir"] = os.path.join("out", f"{name}-{cfg.digest()}")


def _validate(name: str, p: dict, lines: dict):
    def fail(msg, key):
        raise ConfigError(msg, lines.get(key))

    if name in CTAP_EXPERIMENTS and name != "sweep-L":
        if p["L"] % 2 or p["L"] < 4:
            fail("L must be even and >= 4", "L")
    if name in ("thouless", "thouless-sweep") and p["L"] < 1:
        fail("L must be >= 1", "L")
    for key in ("T", "lambda", "delta", "t0", "delta0", "lambda_ratio", "delta_ratio"):
        if p[key] <= 0:
            fail(f"{key} must be positive", key)
    if not 0 <= p["omega_m"] < 1:
        fail("omega_m must lie in [0, 1)", "omega_m")
    if p.get("dt") is not None and p["dt"] <= 0:
        fail("dt must be positive", "dt")
    for key in ("workers", "n_times", "sample_stride"):
        if p[key] < 1:
            fail(f"{key} must be >= 1", key)
    if p["quadrature_nodes"] < 3 or p["quadrature_nodes"] % 2 == 0:
        fail("quadrature_nodes must be odd and >= 3", "quadrature_nodes")
    if p["mode"] not in ("full", "ingap"):
        fail("mode must be 'full' or 'ingap'", "mode")
    if name in SWEEPS:
        if "sweep" not in p or not p["sweep"]:
            fail("sweep list must be non-empty", "sweep")
        if any(x <= 0 for x in p["sweep"]):
            fail("sweep values must be positive", "sweep")
        if name == "sweep-L":
            if any(x != int(x) or int(x) % 2 or x < 4 for x in p["sweep"]):
                fail("sweep-L values must be even integers >= 4", "sweep")
            p["sweep"] = tuple(int(x) for x in p["sweep"])


@dataclass
class ResultTable:
    header: list[str]
    rows: list[tuple]
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        width = len(self.header)
        for row in self.rows:
            if len(row) != width:
                raise InputError("ragged result table")

    def column(self, name) -> np.ndarray:
        k = self.header.index(name)
        return np.array([row[k] for row in self.rows])

    def to_csv(self) -> str:
        lines = [",".join(self.header)]
        lines += [",".join(_cell(x) for x in row) for row in self.rows]
        return "\n".join(lines) + "\n"


def _cell(x) -> str:
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    return f"{float(x):.17g}"


def _ctap_schedule(p, T=None) -> CtapSchedule:
    return CtapSchedule(omega_m=p["omega_m"], lam=p["lambda"], delta=p["delta"], T=p["T"] if T is None else T)


def _ctap_geometry(L) -> LatticeGeometry:
    return LatticeGeometry(Model.CTAP_SUPERLATTICE, int(L))


def _site_label(i, j):
    return f"P_{i}_{j}"


# --- single experiments -------------------------------------------------------


def _run_states(cfg, amplitudes=False):
    p = cfg.params
    L = p["L"]
    geom = _ctap_geometry(L)
    c = Couplings.isotropic(p["v"], p["v_prime"])
    states = [analytic_state(lab, c, L) for lab in LABELS]
    header = ["i", "j"] + [f"P_{lab}" for lab in LABELS]
    if amplitudes:
        header += [f"A_{lab}" for lab in LABELS]
    rows = []
    for idx in range(geom.dim):
        i, j = geom.unflatten(idx)
        row = [i, j] + [abs(s[idx]) ** 2 for s in states]
        if amplitudes:
            row += [s[idx].real for s in states]
        rows.append(tuple(row))
    table = ResultTable(header, rows)
    total = ResultTable(["i", "j", "P_total"], [(r[0], r[1], sum(r[2:11])) for r in rows])
    return {"states": table}, {"states": (total, "heatmap")}


def _ctap_times(p):
    return np.linspace(-p["T"] / 2, p["T"] / 2, p["n_times"])


def _run_spectrum_flow(cfg, amplitudes=False):
    p = cfg.params
    sched = _ctap_schedule(p)
    times = _ctap_times(p)
    flow = spectral_flow(sched, _ctap_geometry(p["L"]), times, mode=p["mode"])
    v, vp = sched.pulses(times)
    nlev = len(flow.eigenvalues[0])
    width = len(str(nlev))
    header = ["t", "v", "v_prime"] + [f"E_{k + 1:0{width}d}" for k in range(nlev)]
    if flow.band_edges is not None:
        header += ["bulk_lo", "bulk_hi"]
    rows = []
    for k, t in enumerate(times):
        row = [t, v[k], vp[k], *flow.eigenvalues[k]]
        if flow.band_edges is not None:
            row += list(flow.band_edges[k])
        rows.append(tuple(row))
    table = ResultTable(header, rows)
    levels = [h for h in header if h.startswith("E_") or h.startswith("bulk")]
    return {"spectrum-flow": table}, {"spectrum-flow": (table, "line", {"x": "t", "y": levels})}


def _run_evolve(cfg, amplitudes=False):
    p = cfg.params
    L = p["L"]
    geom = _ctap_geometry(L)
    sched = _ctap_schedule(p)
    traj = evolve(
        sched,
        geom,
        geom.indicator(1, 1),
        dt=p.get("dt"),
        sample_stride=p["sample_stride"],
        snapshot_times=p["snapshots"],
        sites=p["sites"],
    )
    header = ["t"] + [_site_label(i, j) for i, j in traj.sites] + ["norm"]
    rows = [(t, *occ, n) for t, occ, n in zip(traj.times, traj.occupations, traj.norms)]
    table = ResultTable(header, rows)
    tables = {"evolve": table}
    snap_rows, topo_rows = [], []
    for t in sorted(traj.snapshots):
        psi = traj.snapshots[t]
        for idx in range(geom.dim):
            i, j = geom.unflatten(idx)
            row = [t, i, j, abs(psi[idx]) ** 2]
            if amplitudes:
                row.append(psi[idx].real)
            snap_rows.append(tuple(row))
        a = project_topo(psi, sched.couplings(t), L)
        topo_rows.append((t, *(np.abs(a) ** 2)))
    if snap_rows:
        header_s = ["t", "i", "j", "P"] + (["A_re"] if amplitudes else [])
        tables["evolve_snapshots"] = ResultTable(header_s, snap_rows)
        tables["evolve_topo"] = ResultTable(["t"] + [f"W_{lab}" for lab in LABELS], topo_rows)
    plots = {"evolve": (table, "line", {"x": "t", "y": header[1:3]})}
    return tables, plots


def _run_effective(cfg, amplitudes=False):
    p = cfg.params
    L = p["L"]
    sched = _ctap_schedule(p)
    times = _ctap_times(p)
    rows = []
    for t in times:
        c = sched.couplings(t)
        e = effective_couplings(c, L)
        levels = heff_spectrum_closed_form(e)
        d = dark_state(e) if e.rms > 0 else np.full(9, np.nan)
        rows.append((t, c.v_x, c.vp_x, e.omega12, e.omega23, *levels, *d))
    header = (
        ["t", "v", "v_prime", "omega12", "omega23"]
        + [f"E_{k + 1}" for k in range(9)]
        + [f"D_{k + 1}" for k in range(9)]
    )
    table = ResultTable(header, rows)
    area = adiabaticity_integral(sched, L, sched.t_start, sched.t_end, nodes=p["quadrature_nodes"])
    table.metadata["adiabaticity_integral"] = area
    return {"effective": table}, {"effective": (table, "line", {"x": "t", "y": ["omega12", "omega23"]})}


def _run_thouless(cfg, amplitudes=False):
    p = cfg.params
    L = p["L"]
    geom = LatticeGeometry(Model.RICE_MELE, int(L))
    sched = RiceMeleSchedule(delta0=p["delta0"], T=p["T"], t0=p["t0"])
    snap_t = [ph * np.pi / sched.omega for ph in p["snapshots"]]
    side = geom.side
    sites = ((side, 1),) + tuple(p["sites"])
    traj = evolve(
        sched,
        geom,
        geom.indicator(1, 1),
        dt=p.get("dt"),
        sample_stride=p["sample_stride"],
        snapshot_times=snap_t,
        sites=sites,
    )
    header = ["t", "omega_t"] + [_site_label(i, j) for i, j in traj.sites] + ["norm"]
    rows = [
        (t, sched.omega * t, *occ, n) for t, occ, n in zip(traj.times, traj.occupations, traj.norms)
    ]
    table = ResultTable(header, rows)
    tables = {"thouless": table}
    snap_rows = []
    for t in sorted(traj.snapshots):
        psi = traj.snapshots[t]
        for idx in range(geom.dim):
            i, j = geom.unflatten(idx)
            row = [sched.omega * t, i, j, abs(psi[idx]) ** 2]
            if amplitudes:
                row.append(psi[idx].real)
            snap_rows.append(tuple(row))
    if snap_rows:
        header_s = ["omega_t", "i", "j", "P"] + (["A_re"] if amplitudes else [])
        tables["thouless_snapshots"] = ResultTable(header_s, snap_rows)
    plots = {"thouless": (table, "line", {"x": "omega_t", "y": header[2:5]})}
    return tables, plots


# --- sweeps -------------------------------------------------------------------


def sweep_point(experiment: str, params: dict, value) -> tuple:
    """One independent sweep run; returns a CSV row."""
    if experiment == "sweep-T":
        sched = CtapSchedule.from_total_time(
            value, omega_m=params["omega_m"], lambda_ratio=params["lambda_ratio"], delta_ratio=params["delta_ratio"]
        )
        geom = _ctap_geometry(params["L"])
        traj = evolve(sched, geom, geom.indicator(1, 1), dt=params.get("dt"), sample_stride=10**9)
        return (float(value), sched.lam, sched.delta, traj.occupations[-1, 1], traj.norms[-1])
    if experiment == "sweep-L":
        sched = CtapSchedule.from_total_time(
            params["T"], omega_m=params["omega_m"], lambda_ratio=params["lambda_ratio"], delta_ratio=params["delta_ratio"]
        )
        geom = _ctap_geometry(value)
        traj = evolve(sched, geom, geom.indicator(1, 1), dt=params.get("dt"), sample_stride=10**9)
        return (int(value), traj.occupations[-1, 1], traj.norms[-1])
    if experiment == "thouless-sweep":
        sched = RiceMeleSchedule(delta0=params["delta0"], T=value, t0=params["t0"])
        geom = LatticeGeometry(Model.RICE_MELE, int(params["L"]))
        traj = evolve(sched, geom, geom.indicator(1, 1), dt=params.get("dt"), sample_stride=10**9)
        return (float(value), params["delta0"], traj.occupations[-1, 1], traj.norms[-1])
    raise InputError(f"{experiment!r} is not a sweep")


_SWEEP_HEADERS = {
    "sweep-T": ["T", "lambda", "delta", "P_final", "norm_final"],
    "sweep-L": ["L", "P_final", "norm_final"],
    "thouless-sweep": ["T", "delta0", "P_final", "norm_final"],
}


def _guarded_point(experiment, params, value):
    try:
        return sweep_point(experiment, params, value)
    except NumericalError as exc:
        raise NumericalError(f"sweep point {value!r} failed: {exc}") from exc
    except InputError as exc:
        raise ConfigError(f"sweep point {value!r}: {exc}") from exc


def run_sweep_parallel(cfg: ExperimentConfig) -> ResultTable:
    """Run every sweep point independently and merge rows sorted by the sweep key.

    The output does not depend on ``workers``.
    """
    name = cfg.experiment
    if name not in SWEEPS:
        raise ConfigError(f"{name!r} is not a sweep experiment")
    values = list(cfg["sweep"])
    if not values:
        raise ConfigError("sweep list must be non-empty", cfg.lines.get("sweep"))
    params = dict(cfg.params)
    workers = min(cfg["workers"], len(values))
    if workers == 1:
        rows = [_guarded_point(name, params, v) for v in values]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(_guarded_point, name, params, v) for v in values]
            rows = [f.result() for f in futures]
    rows.sort(key=lambda r: r[0])
    return ResultTable(_SWEEP_HEADERS[name], rows)


def _run_sweep(cfg, amplitudes=False):
    table = run_sweep_parallel(cfg)
    key = table.header[0]
    return {cfg.experiment: table}, {cfg.experiment: (table, "line", {"x": key, "y": ["P_final"]})}


_RUNNERS = {
    "states": _run_states,
    "spectrum-flow": _run_spectrum_flow,
    "evolve": _run_evolve,
    "effective": _run_effective,
    "sweep-T": _run_sweep,
    "sweep-L": _run_sweep,
    "thouless": _run_thouless,
    "thouless-sweep": _run_sweep,
}


def compute_tables(cfg: ExperimentConfig, amplitudes: bool = False):
    """Run an experiment in memory; returns ``(tables, plots)`` dicts."""
    try:
        return _RUNNERS[cfg.experiment](cfg, amplitudes=amplitudes)
    except InputError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(str(exc)) from exc


def run_experiment(cfg: ExperimentConfig, svg: bool = False, amplitudes: bool = False) -> list[Path]:
    """Run ``cfg`` and write ``<name>.csv``, ``<name>.meta`` and optional SVGs.

    On failure any files already written are removed before re-raising.
    """
    outdir = Path(cfg["output_dir"])
    written: list[Path] = []
    try:
        tables, plots = compute_tables(cfg, amplitudes=amplitudes)
        outdir.mkdir(parents=True, exist_ok=True)
        for name, table in tables.items():
            path = outdir / f"{name}.csv"
            path.write_text(table.to_csv())
            written.append(path)
        meta = cfg.echo()
        results = {k: v for t in tables.values() for k, v in t.metadata.items()}
        for k in sorted(results):
            meta += f"# result {k} = {results[k]!r}\n"
        path = outdir / f"{cfg.experiment}.meta"
        path.write_text(meta)
        written.append(path)
        if svg:
            for name, entry in plots.items():
                table, kind = entry[0], entry[1]
                kwargs = entry[2] if len(entry) > 2 else {}
                path = outdir / f"{name}.svg"
                path.write_text(emit_svg(table, kind, title=name, **kwargs))
                written.append(path)
    except BaseException:
        for path in written:
            path.unlink(missing_ok=True)
        raise
    return written
