"""Named STAP algorithms and the prior knowledge they are allowed to use."""
from __future__ import annotations

import functools
from dataclasses import dataclass

import numpy as np

from . import filters
from .clutter import ClutterScenario, TaperSpec, _clutter_matrix, apply_spatial_taper
from .errors import InvalidArgumentError
from .geometry import NO_DEVIATION
from .filters import ALGORITHM_IDS, FilterWeights
from .subspace import gram_schmidt, select_lrgp_steering


@dataclass(frozen=True)
class AlgorithmSpec:
    """One filter configuration; ``name`` labels its output column.

    ``loading=None`` means diagonal loading at the assumed noise power.
    ``reduction`` applies to LRGP-RD only (``"efa"`` or ``"jdl"``).
    """

    name: str
    kind: str
    snapshots: int = 4
    taper_sigma_v: float = 0.0
    weights: str = "eig"
    variant: str = "exact"
    reduction: str = "efa"
    num_bins: int = 3
    loading: float | None = None
    combo_alpha: float = 0.6
    assumed_patches: int = 48
    rank_floor: float = 1.0
    energy_frac: float | None = None
    taper_route: str = "lift"

    def __post_init__(self):
        if self.kind not in ALGORITHM_IDS:
            raise InvalidArgumentError(f"unknown algorithm kind {self.kind!r}; expected one of {', '.join(ALGORITHM_IDS)}")
        if not self.name or not self.name.replace("_", "").replace("-", "").isalnum():
            raise InvalidArgumentError(f"algorithm name {self.name!r} must be a non-empty identifier")
        if self.snapshots < 1:
            raise InvalidArgumentError("snapshots must be >= 1")
        if self.weights not in ("eig", "mne"):
            raise InvalidArgumentError(f"weights must be 'eig' or 'mne', got {self.weights!r}")
        if self.variant not in ("exact", "span"):
            raise InvalidArgumentError(f"variant must be 'exact' or 'span', got {self.variant!r}")
        if self.reduction not in ("efa", "jdl"):
            raise InvalidArgumentError(f"reduction must be 'efa' or 'jdl', got {self.reduction!r}")
        if self.taper_route not in ("lift", "congruence", "block-lag"):
            raise InvalidArgumentError(
                f"taper_route must be 'lift', 'congruence' or 'block-lag', got {self.taper_route!r}")
        TaperSpec(self.taper_sigma_v)


@dataclass(frozen=True)
class KnowledgeSpec:
    """What the processor assumes about the scene.

    ``noise_power=None`` takes the true receiver noise level. With
    ``calibrated`` the true channel taper is used as the calibration
    estimate, otherwise the array is assumed ideal.
    """

    noise_power: float | None = None
    calibrated: bool = True


class Knowledge:
    """Prior knowledge derived from a scenario's nominal geometry.

    The platform deviation of the true scene is, by construction, unknown
    here; only the radar parameters and the channel calibration are used.
    """

    def __init__(self, scenario: ClutterScenario, spec: KnowledgeSpec = KnowledgeSpec()):
        self.scenario = scenario
        self.spec = spec
        self.cfg = scenario.radar
        self.noise_power = self.cfg.noise_power if spec.noise_power is None else spec.noise_power
        if spec.calibrated:
            self.alpha_s = scenario.spatial_taper
        else:
            self.alpha_s = np.ones(self.cfg.num_elements, dtype=complex)

    def _taper(self, V):
        return apply_spatial_taper(V, self.alpha_s, self.cfg.num_pulses)

    @functools.cached_property
    def lrgp_steering(self) -> np.ndarray:
        cfg = self.cfg
        return self._taper(select_lrgp_steering(cfg.num_elements, cfg.num_pulses, cfg.beta))

    @functools.cached_property
    def lrgp_basis(self):
        return gram_schmidt(self.lrgp_steering)

    @functools.lru_cache(maxsize=8)
    def patch_steering(self, num_patches: int) -> np.ndarray:
        """Assumed iso-range patch grid at nominal geometry."""
        return self._taper(np.asarray(_clutter_matrix(self.cfg, num_patches, NO_DEVIATION)))

    def transform(self, spec: AlgorithmSpec, kind: str, target_doppler: float, target_azimuth: float):
        if kind == "efa":
            return filters.efa_transform(self.cfg, target_doppler, spec.num_bins)
        return filters.jdl_transform(self.cfg, target_doppler, target_azimuth)


LSE_RCOND = 1e-10


def _lse(spec, knowledge, X):
    V = knowledge.patch_steering(spec.assumed_patches)
    return filters.lse_covariance(X, V, knowledge.noise_power, rcond=LSE_RCOND)


def compute_weights(spec: AlgorithmSpec, knowledge: Knowledge, X: np.ndarray, target_doppler: float,
                    target_azimuth: float = 0.0) -> FilterWeights:
    """Train ``spec`` on the first ``spec.snapshots`` columns of ``X``; target Doppler in Hz."""
    if X.shape[1] < spec.snapshots:
        raise InvalidArgumentError(f"{spec.name} needs {spec.snapshots} snapshots, got {X.shape[1]}")
    X = X[:, :spec.snapshots]
    cfg = knowledge.cfg
    s = filters.target_steering(cfg, target_doppler, target_azimuth)
    sigma2 = knowledge.noise_power
    loading = sigma2 if spec.loading is None else spec.loading
    kind = spec.kind
    if kind in ("LRGP-MNE", "LRGP-EIG", "LRGP-RD"):
        weights = {"LRGP-MNE": "mne", "LRGP-EIG": "eig"}.get(kind, spec.weights)
        transform = None
        basis = knowledge.lrgp_basis
        if kind == "LRGP-RD":
            transform = knowledge.transform(spec, spec.reduction, target_doppler, target_azimuth)
        return filters.ka_stap_weights(
            knowledge.lrgp_steering, X, s, cfg, TaperSpec(spec.taper_sigma_v), sigma2,
            weights=weights, variant=spec.variant, transform=transform, rank_floor=spec.rank_floor,
            energy_frac=spec.energy_frac, taper_route=spec.taper_route, algorithm_id=kind, basis=basis)
    if kind == "LSMI":
        return filters.lsmi_weights(X, s, loading)
    if kind in ("EFA", "JDL"):
        transform = knowledge.transform(spec, kind.lower(), target_doppler, target_azimuth)
        return filters.reduced_lsmi_weights(X, s, transform, loading, kind)
    if kind == "LSE":
        return filters.covariance_weights(_lse(spec, knowledge, X), s, kind, training_snapshots=X.shape[1])
    if kind == "KA-COMBO":
        prior = _lse(spec, knowledge, X)
        sample = filters.sample_covariance(X) + loading * np.eye(cfg.dof)
        R = filters.ka_combo_covariance(prior, sample, spec.combo_alpha)
        return filters.covariance_weights(R, s, kind, training_snapshots=X.shape[1])
    raise InvalidArgumentError(f"unhandled algorithm kind {kind!r}")
