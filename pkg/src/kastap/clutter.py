"""Clutter-plus-noise scene model: covariance ground truth and snapshots.

The true scene is a ring of equal-power patches at a single unambiguous
range with zero elevation (far field). Internal clutter motion enters as
a unit-modulus temporal taper, channel mismatch as a per-element complex
gain that is fixed for a CPI.
"""
from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field

import numpy as np

from . import _serial
from .errors import InvalidArgumentError
from .geometry import NO_DEVIATION, PriorDeviation, RadarConfig, clutter_patch_frequencies, steering_matrix
from .seeding import stream

DEFAULT_PATCHES = 361


@dataclass(frozen=True)
class ChannelMismatchSpec:
    enabled: bool = False
    amp_std_db: float = 0.5
    phase_std_deg: float = 2.0

    def __post_init__(self):
        if self.amp_std_db < 0 or self.phase_std_deg < 0:
            raise InvalidArgumentError("channel mismatch standard deviations must be >= 0")


@dataclass(frozen=True)
class TaperSpec:
    """Assumed clutter spectral spread (m/s) used to build a covariance taper."""

    sigma_v: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.sigma_v) and self.sigma_v >= 0):
            raise InvalidArgumentError(f"sigma_v must be >= 0, got {self.sigma_v!r}")


@dataclass(frozen=True)
class ClutterScenario:
    radar: RadarConfig = field(default_factory=RadarConfig.nominal)
    num_patches: int = DEFAULT_PATCHES
    cnr_db: float = 50.0
    icm_sigma_v: float = 0.0
    channel_mismatch: ChannelMismatchSpec = field(default_factory=ChannelMismatchSpec)
    true_deviation: PriorDeviation = NO_DEVIATION
    seed: int = 0

    def __post_init__(self):
        if int(self.num_patches) != self.num_patches or self.num_patches < 1:
            raise InvalidArgumentError("num_patches must be a positive integer")
        if not math.isfinite(self.cnr_db):
            raise InvalidArgumentError("cnr_db must be finite")
        if not (math.isfinite(self.icm_sigma_v) and self.icm_sigma_v >= 0):
            raise InvalidArgumentError("icm_sigma_v must be >= 0")

    @property
    def clutter_power(self) -> float:
        """Total clutter power per element and pulse."""
        return self.radar.noise_power * 10.0 ** (self.cnr_db / 10.0)

    @property
    def patch_powers(self) -> np.ndarray:
        return np.full(self.num_patches, self.clutter_power / self.num_patches)

    @property
    def spatial_taper(self) -> np.ndarray:
        return channel_taper(self.channel_mismatch, self.radar.num_elements, self.seed)

    @property
    def digest(self) -> str:
        return _serial.digest(self)

    def replace(self, **changes) -> "ClutterScenario":
        import dataclasses

        return dataclasses.replace(self, **changes)


def patch_azimuths(num_patches: int) -> np.ndarray:
    """Bin centres of an even split of the forward half-plane (-90, 90] deg."""
    return -np.pi / 2 + np.pi * (np.arange(num_patches) + 0.5) / num_patches


def build_clutter_matrix(cfg: RadarConfig, num_patches: int = DEFAULT_PATCHES,
                         deviation: PriorDeviation = NO_DEVIATION) -> np.ndarray:
    """Space-time steering matrix of the discretized iso-range ring (NM x N_c)."""
    if num_patches < 1:
        raise InvalidArgumentError("num_patches must be >= 1")
    return _clutter_matrix(cfg, int(num_patches), deviation).copy()


@functools.lru_cache(maxsize=64)
def _clutter_matrix(cfg, num_patches, deviation):
    f_s, f_d = clutter_patch_frequencies(patch_azimuths(num_patches), 0.0, cfg, deviation)
    V = steering_matrix(f_s, f_d, cfg.num_elements, cfg.num_pulses)
    V.flags.writeable = False
    return V


def channel_taper(spec: ChannelMismatchSpec, num_elements: int, seed: int) -> np.ndarray:
    """Per-element complex gain ``(1 + g) exp(j phi)``; all ones when disabled."""
    if not spec.enabled:
        return np.ones(num_elements, dtype=complex)
    rng = np.random.default_rng(stream(seed, "channel-mismatch"))
    amp_std = 10.0 ** (spec.amp_std_db / 20.0) - 1.0
    g = amp_std * rng.standard_normal(num_elements)
    phi = np.deg2rad(spec.phase_std_deg) * rng.standard_normal(num_elements)
    return (1.0 + g) * np.exp(1j * phi)


def apply_spatial_taper(V: np.ndarray, alpha_s: np.ndarray, num_pulses: int) -> np.ndarray:
    """``V (.) Xi_s`` where every column of ``Xi_s`` is ``1_N (x) alpha_s``."""
    return V * np.tile(alpha_s, num_pulses)[:, None]


def icm_autocorrelation(sigma_v: float, pri: float, wavelength: float, lag) -> np.ndarray | float:
    """Gaussian pulse-to-pulse correlation of wind-blown clutter."""
    if sigma_v < 0:
        raise InvalidArgumentError("sigma_v must be >= 0")
    lag = np.asarray(lag, dtype=float)
    out = np.exp(-8.0 * np.pi**2 * sigma_v**2 * pri**2 * lag**2 / wavelength**2)
    return float(out) if out.ndim == 0 else out


def temporal_correlation(sigma_v: float, cfg: RadarConfig) -> np.ndarray:
    """N x N Toeplitz matrix of ICM correlations."""
    n = np.arange(cfg.num_pulses)
    return icm_autocorrelation(sigma_v, cfg.pri, cfg.wavelength, np.abs(n[:, None] - n[None, :]))


def build_cmt(spec: TaperSpec, cfg: RadarConfig) -> np.ndarray:
    """Space-time covariance matrix taper ``Z (x) 1_{MxM}``."""
    Z = temporal_correlation(spec.sigma_v, cfg)
    return np.kron(Z, np.ones((cfg.num_elements, cfg.num_elements)))


@dataclass(frozen=True)
class GroundTruth:
    """Exact covariance of a scenario; ``clutter`` excludes the noise term."""

    R: np.ndarray
    clutter: np.ndarray
    noise_power: float


def ground_truth_covariance(scenario: ClutterScenario) -> GroundTruth:
    return _ground_truth(scenario)


@functools.lru_cache(maxsize=32)
def _ground_truth(scenario):
    cfg = scenario.radar
    Vs = true_steering(scenario)
    Rs = (Vs * scenario.patch_powers) @ Vs.conj().T
    Rc = Rs * build_cmt(TaperSpec(scenario.icm_sigma_v), cfg)
    Rc = 0.5 * (Rc + Rc.conj().T)
    R = Rc + cfg.noise_power * np.eye(cfg.dof)
    for arr in (R, Rc):
        arr.flags.writeable = False
    return GroundTruth(R=R, clutter=Rc, noise_power=cfg.noise_power)


def true_steering(scenario: ClutterScenario) -> np.ndarray:
    """Clutter steering matrix of the true scene, channel mismatch included."""
    cfg = scenario.radar
    V = _clutter_matrix(cfg, scenario.num_patches, scenario.true_deviation)
    if not scenario.channel_mismatch.enabled:
        return V
    return apply_spatial_taper(V, scenario.spatial_taper, cfg.num_pulses)


@dataclass(frozen=True)
class SnapshotSet:
    data: np.ndarray
    seed: object
    scenario_hash: str

    def __post_init__(self):
        if self.data.ndim != 2 or self.data.shape[1] < 1:
            raise InvalidArgumentError("snapshot data must be a 2-D array with at least one column")

    @property
    def num_snapshots(self) -> int:
        return self.data.shape[1]

    def head(self, num: int) -> "SnapshotSet":
        return SnapshotSet(self.data[:, :num], self.seed, self.scenario_hash)


def icm_taper(sigma_v: float, cfg: RadarConfig, num: int, rng: np.random.Generator) -> np.ndarray:
    """Unit-modulus temporal tapers, one column per snapshot (N x num).

    Each realization is a random Doppler offset ``2 v / lambda`` with
    ``v ~ N(0, sigma_v^2)``; its phase variogram grows as lag^2, so the
    expected outer product is exactly the Gaussian correlation matrix.
    """
    offset = rng.standard_normal(num) * (2.0 * sigma_v * cfg.pri / cfg.wavelength)
    return np.exp(2j * np.pi * np.outer(np.arange(cfg.num_pulses), offset))


def clutter_returns(scenario: ClutterScenario, num: int, rng: np.random.Generator) -> np.ndarray:
    cfg = scenario.radar
    Vs = true_steering(scenario)
    amp = np.sqrt(scenario.patch_powers / 2.0)[:, None]
    sigma = amp * (rng.standard_normal((scenario.num_patches, num))
                   + 1j * rng.standard_normal((scenario.num_patches, num)))
    c = Vs @ sigma
    if scenario.icm_sigma_v > 0:
        c *= np.repeat(icm_taper(scenario.icm_sigma_v, cfg, num, rng), cfg.num_elements, axis=0)
    return c


def thermal_noise(cfg: RadarConfig, num: int, rng: np.random.Generator) -> np.ndarray:
    scale = math.sqrt(cfg.noise_power / 2.0)
    return scale * (rng.standard_normal((cfg.dof, num)) + 1j * rng.standard_normal((cfg.dof, num)))


def draw(scenario: ClutterScenario, num: int, rng: np.random.Generator) -> np.ndarray:
    """Clutter-plus-noise snapshots (NM x num) from an existing generator."""
    return clutter_returns(scenario, num, rng) + thermal_noise(scenario.radar, num, rng)


def generate_snapshots(scenario: ClutterScenario, num_snapshots: int, rng_seed=0) -> SnapshotSet:
    """``num_snapshots`` independent clutter-plus-noise vectors; deterministic in the seed."""
    if int(num_snapshots) != num_snapshots or num_snapshots < 1:
        raise InvalidArgumentError(f"num_snapshots must be >= 1, got {num_snapshots!r}")
    rng = np.random.default_rng(rng_seed)
    return SnapshotSet(draw(scenario, int(num_snapshots), rng), rng_seed, scenario.digest)


def scenario_to_dict(scenario: ClutterScenario) -> dict:
    return _serial.to_dict(scenario)


def scenario_from_dict(data: dict, lines=None, source=None) -> ClutterScenario:
    return _serial.from_dict(ClutterScenario, data, (), lines, source)


def save_scenario(scenario: ClutterScenario, path) -> None:
    import yaml

    with open(path, "w") as fh:
        yaml.safe_dump(scenario_to_dict(scenario), fh, sort_keys=False)


def load_scenario(path) -> ClutterScenario:
    with open(path) as fh:
        text = fh.read()
    data, lines = _serial.load_text(text, source=str(path))
    return scenario_from_dict(data, lines, str(path))
