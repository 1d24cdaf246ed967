"""Experiment configs, figure presets and result files."""
from __future__ import annotations

import dataclasses
import json
import subprocess
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import _serial, evaluation
from .algorithms import AlgorithmSpec, KnowledgeSpec
from .clutter import ClutterScenario, patch_azimuths
from .errors import ConfigError, InvalidArgumentError
from .geometry import PriorDeviation, clutter_patch_frequencies

SWEEPS = ("doppler", "snapshots", "pd", "icm-grid", "velocity-grid", "yaw-grid", "ridge")


@dataclass(frozen=True)
class DopplerGrid:
    start: float = -150.0
    stop: float = 150.0
    step: float = 5.0

    def values(self) -> np.ndarray:
        n = int(round((self.stop - self.start) / self.step)) + 1
        return self.start + self.step * np.arange(n)


@dataclass(frozen=True)
class ExperimentSpec:
    sweep: str
    algorithms: list[AlgorithmSpec] = field(default_factory=list)
    scenario: ClutterScenario = field(default_factory=ClutterScenario)
    knowledge: KnowledgeSpec = field(default_factory=KnowledgeSpec)
    name: str = "experiment"
    description: str = ""
    master_seed: int = 0
    trials: int = 100
    doppler: DopplerGrid = field(default_factory=DopplerGrid)
    target_doppler_hz: float = 100.0
    snapshot_grid: list[int] = field(default_factory=list)
    snr_db: list[float] = field(default_factory=list)
    pfa: float = 1e-3
    threshold_samples: int = 10000
    h1_samples: int = 10000
    grid: list[float] = field(default_factory=list)
    output_dir: str = "results"

    def replace(self, **changes) -> "ExperimentSpec":
        return dataclasses.replace(self, **changes)


def check_spec(spec: ExperimentSpec, lines=None, source=None) -> ExperimentSpec:
    """Sweep-specific validation; raises :class:`ConfigError` pointing at the offending key."""
    lines = lines or {}

    def fail(msg, *path):
        raise ConfigError(msg, _serial._line(lines, tuple(path)), source)

    if spec.sweep not in SWEEPS:
        fail(f"sweep must be one of {', '.join(SWEEPS)}, got {spec.sweep!r}", "sweep")
    if spec.sweep != "ridge" and not spec.algorithms:
        fail("at least one algorithm is required", "algorithms")
    names = [a.name for a in spec.algorithms]
    if len(set(names)) != len(names):
        fail(f"algorithm names must be unique: {names}", "algorithms")
    if spec.trials < 1:
        fail("trials must be >= 1", "trials")
    if spec.sweep == "doppler" and (spec.doppler.step <= 0 or spec.doppler.stop < spec.doppler.start):
        fail("doppler grid needs step > 0 and stop >= start", "doppler")
    if spec.sweep == "snapshots" and (not spec.snapshot_grid or min(spec.snapshot_grid) < 1):
        fail("snapshots sweep needs a nonempty snapshot_grid of positive integers", "snapshot_grid")
    if spec.sweep == "pd":
        if not spec.snr_db:
            fail("pd sweep needs a nonempty snr_db list", "snr_db")
        if not 0 < spec.pfa < 1:
            fail("pfa must lie in (0, 1)", "pfa")
        if spec.threshold_samples < 1 or spec.h1_samples < 1:
            fail("threshold_samples and h1_samples must be >= 1", "threshold_samples")
    if spec.sweep.endswith("-grid") and not spec.grid:
        fail(f"{spec.sweep} sweep needs a nonempty grid", "grid")
    return spec


def spec_from_dict(data, lines=None, source=None) -> ExperimentSpec:
    if isinstance(data, dict) and "experiment" in data and "version" in data:
        # result sidecar: rerun the resolved experiment it records
        inner_lines = {k[1:]: v for k, v in (lines or {}).items() if k[:1] == ("experiment",)}
        return spec_from_dict(data["experiment"], inner_lines, source)
    if isinstance(data, dict) and "sweep" not in data:
        raise ConfigError("missing required key 'sweep'", _serial._line(lines or {}, ()), source)
    spec = _serial.from_dict(ExperimentSpec, data, (), lines, source)
    return check_spec(spec, lines, source)


def load_spec(path) -> ExperimentSpec:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc.strerror}", source=str(path)) from None
    data, lines = _serial.load_text(text, source=str(path))
    return spec_from_dict(data, lines, str(path))


def spec_to_dict(spec: ExperimentSpec) -> dict:
    return _serial.to_dict(spec)


# ----------------------------------------------------------------- presets

def _lrgp(name, sigma_v=0.0, L=4, kind="LRGP-EIG", **kw):
    return AlgorithmSpec(name=name, kind=kind, snapshots=L, taper_sigma_v=sigma_v, **kw)


def _preset_table():
    base = ClutterScenario()
    out = {}

    def add(pid, summary, **kw):
        out[pid] = (summary, ExperimentSpec(name=pid, description=summary, **kw))

    add("fig2a", "clutter ridge with velocity_error=2 m/s",
        sweep="ridge", scenario=base.replace(true_deviation=PriorDeviation(velocity_error=2.0)))
    add("fig2b", "clutter ridge with yaw_error=1 deg",
        sweep="ridge", scenario=base.replace(true_deviation=PriorDeviation(yaw_error=float(np.deg2rad(1.0)))))
    cmt = [_lrgp("lrgp_nocmt"), _lrgp("lrgp_cmt", 0.5)]
    for tag, sv in zip("abcd", (0.0, 0.05, 0.1, 0.5)):
        add(f"fig3{tag}", f"sigma_v={sv:g}, SINR vs Doppler, L=4, CMT sigma_v=0.5",
            sweep="doppler", scenario=base.replace(icm_sigma_v=sv), algorithms=cmt)
    mis = [_lrgp("lrgp_nocmt"), _lrgp("lrgp_cmt", 0.5), _lrgp("lrgp_cmt_wide", 1.0)]
    for tag, dv in zip("abc", (0.5, 1.0, 2.0)):
        add(f"fig4{tag}", f"velocity_error={dv:g} m/s, SINR vs Doppler, L=4, CMT sigma_v=0.5/1",
            sweep="doppler", scenario=base.replace(true_deviation=PriorDeviation(velocity_error=dv)), algorithms=mis)
    for tag, yaw in zip("abc", (0.2, 0.5, 1.0)):
        add(f"fig5{tag}", f"yaw_error={yaw:g} deg, SINR vs Doppler, L=4, CMT sigma_v=0.5/1",
            sweep="doppler", scenario=base.replace(true_deviation=PriorDeviation(yaw_error=float(np.deg2rad(yaw)))),
            algorithms=mis)
    icm = base.replace(icm_sigma_v=0.5)
    compare = [
        _lrgp("lrgp", 1.0),
        _lrgp("lrgp_mne", 1.0, kind="LRGP-MNE"),
        _lrgp("lrgp_rd", 1.0, kind="LRGP-RD"),
        AlgorithmSpec("lsmi", "LSMI", snapshots=48),
        AlgorithmSpec("efa", "EFA", snapshots=48),
        AlgorithmSpec("jdl", "JDL", snapshots=48),
        AlgorithmSpec("ka_combo", "KA-COMBO", snapshots=48),
        AlgorithmSpec("lse", "LSE", snapshots=48),
    ]
    add("fig6", "sigma_v=0.5, SINR vs snapshots at 100 Hz, CMT sigma_v=1, loading=noise power",
        sweep="snapshots", scenario=icm, algorithms=compare,
        snapshot_grid=[2, 3, 4, 5, 6, 8, 10, 12, 16, 20, 24, 32, 40, 48, 64, 96, 128])
    add("fig7", "pfa=1e-3, Pd vs SNR, boresight target at 100 Hz, 10000 threshold samples",
        sweep="pd", scenario=icm, algorithms=compare, trials=20,
        snr_db=[float(x) for x in range(-20, 11)])
    add("cmp-doppler", "sigma_v=0.5, SINR vs Doppler, proposed L=4, baselines L=48",
        sweep="doppler", scenario=icm, algorithms=compare)
    grid_algs = [_lrgp("lrgp_nocmt"), _lrgp("lrgp_cmt", 0.5), _lrgp("lrgp_cmt_wide", 1.0)]
    add("grid-icm", "true sigma_v grid 0..1 m/s, SINR at 100 Hz",
        sweep="icm-grid", algorithms=grid_algs, grid=[0.0, 0.05, 0.1, 0.2, 0.3, 0.5, 0.75, 1.0])
    add("grid-velocity", "velocity_error grid 0..3 m/s, SINR at 100 Hz",
        sweep="velocity-grid", algorithms=grid_algs, grid=[0.0, 0.25, 0.5, 1.0, 1.5, 2.0, 3.0])
    add("grid-yaw", "yaw_error grid 0..1.5 deg, SINR at 100 Hz",
        sweep="yaw-grid", algorithms=grid_algs, grid=[0.0, 0.1, 0.2, 0.5, 0.75, 1.0, 1.5])
    return out


PRESETS = _preset_table()


def list_presets() -> str:
    return "\n".join(f"{pid}: {summary}" for pid, (summary, _) in PRESETS.items())


def get_preset(pid: str) -> ExperimentSpec:
    try:
        return PRESETS[pid][1]
    except KeyError:
        raise ConfigError(f"unknown preset {pid!r}") from None


# ----------------------------------------------------------------- running

def _fmt(v) -> str:
    return f"{float(v):.9g}"


def _table(spec: ExperimentSpec):
    """Run the sweep; return ``(header, rows, extra)``."""
    sc = spec.scenario
    common = dict(trials=spec.trials, master_seed=spec.master_seed, knowledge=spec.knowledge)
    if spec.sweep == "ridge":
        az = patch_azimuths(sc.num_patches)
        f_s, f_assumed = clutter_patch_frequencies(az, 0.0, sc.radar)
        _, f_true = clutter_patch_frequencies(az, 0.0, sc.radar, sc.true_deviation)
        header = ["azimuth_deg", "spatial_freq", "doppler_assumed_hz", "doppler_true_hz"]
        rows = np.column_stack([np.rad2deg(az), f_s, f_assumed * sc.radar.prf, f_true * sc.radar.prf])
        return header, rows, {}
    if spec.sweep == "pd":
        curve = evaluation.pd_vs_snr(sc, spec.algorithms, spec.snr_db, spec.pfa, spec.threshold_samples,
                                     spec.h1_samples, target_doppler=spec.target_doppler_hz, **common)
        header = ["snr_db", "optimum_pd"] + [f"{a}_pd" for a in curve.algorithms]
        rows = np.column_stack([curve.snr_axis_db, curve.optimum_pd, curve.pd.T])
        return header, rows, {}
    if spec.sweep == "doppler":
        curve = evaluation.sinr_vs_doppler(sc, spec.algorithms, spec.doppler.values(), **common)
    elif spec.sweep == "snapshots":
        curve = evaluation.sinr_vs_snapshots(sc, spec.algorithms, spec.snapshot_grid,
                                             spec.target_doppler_hz, **common)
    else:
        curve = evaluation.sinr_vs_parameter(sc, spec.algorithms, spec.sweep[:-len("-grid")], spec.grid,
                                             spec.target_doppler_hz, **common)
    header = [curve.axis_name, "optimum_db"] + [f"{a}_db" for a in curve.algorithms]
    rows = np.column_stack([curve.axis, curve.optimum_db, curve.sinr_db.T])
    extra = {"sinr_db_of_mean": {a: [float(x) for x in curve.sinr_db_of_mean[i]]
                                 for i, a in enumerate(curve.algorithms)}}
    return header, rows, extra


def _version() -> str:
    from . import __version__

    try:
        out = subprocess.run(["git", "describe", "--always", "--dirty", "--tags"], capture_output=True,
                             text=True, cwd=Path(__file__).parent, timeout=5)
        if out.returncode == 0 and out.stdout.strip():
            return f"{__version__}+{out.stdout.strip()}"
    except (OSError, subprocess.SubprocessError):
        pass
    return __version__


def write_csv(path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def run_experiment(spec: ExperimentSpec, out_dir=None) -> tuple[Path, Path]:
    """Run ``spec`` and write ``<name>.csv`` plus a ``<name>.json`` sidecar."""
    check_spec(spec)
    out = Path(spec.output_dir if out_dir is None else out_dir)
    out.mkdir(parents=True, exist_ok=True)
    t0 = time.perf_counter()
    try:
        header, rows, extra = _table(spec)
    except InvalidArgumentError as exc:
        raise ConfigError(str(exc)) from None
    runtime = time.perf_counter() - t0
    csv_path = out / f"{spec.name}.csv"
    json_path = out / f"{spec.name}.json"
    write_csv(csv_path, header, rows)
    meta = {
        "experiment": spec_to_dict(spec),
        "version": _version(),
        "master_seed": spec.master_seed,
        "scenario_hash": spec.scenario.digest,
        "runtime_s": round(runtime, 3),
        "columns": header,
    }
    meta.update(extra)
    json_path.write_text(json.dumps(meta, indent=2) + "\n")
    return csv_path, json_path
