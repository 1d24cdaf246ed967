"""Output SINR, Monte Carlo sweeps and detection-probability curves.

Every Monte Carlo work item draws from its own stream keyed by
``(master_seed, sweep, point, trial)`` and results are reduced in index
order, so curves do not depend on how many worker threads are used
(``KASTAP_THREADS``).
"""
from __future__ import annotations

import hashlib
import os
import threading
from collections import OrderedDict
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import seeding
from .algorithms import AlgorithmSpec, Knowledge, KnowledgeSpec, compute_weights
from .clutter import ClutterScenario, draw, ground_truth_covariance
from .errors import InvalidArgumentError
from .filters import FilterWeights, target_steering
from .geometry import PriorDeviation


_EIG_CACHE: OrderedDict = OrderedDict()
_EIG_LOCK = threading.Lock()


def _eig(R):
    """Cached Hermitian eigendecomposition of a covariance, keyed on its bytes."""
    R = np.ascontiguousarray(R)
    key = (R.shape, hashlib.blake2b(R.tobytes(), digest_size=16).digest())
    with _EIG_LOCK:
        hit = _EIG_CACHE.get(key)
        if hit is not None:
            _EIG_CACHE.move_to_end(key)
            return hit
    lam, Q = np.linalg.eigh(0.5 * (R + R.conj().T))
    with _EIG_LOCK:
        _EIG_CACHE[key] = (lam, Q)
        while len(_EIG_CACHE) > 128:
            _EIG_CACHE.popitem(last=False)
    return lam, Q


def output_sinr(w, s, R) -> float:
    """``10 log10(|w^H s|^2 / w^H R w)`` in dB.

    Reduced-dimension weights are scored against ``S^H s`` and ``S^H R S``.
    The quadratic form is summed in the eigenbasis of ``R``, which avoids
    the cancellation a direct product suffers at high clutter power.
    """
    if isinstance(w, FilterWeights):
        if w.transform is not None:
            s = w.transform.reduce_vector(s)
            R = w.transform.reduce_matrix(R)
        w = w.w
    w = np.asarray(w)
    # fix norm and phase first so the score does not depend on the scaling of w
    g = np.vdot(w, s)
    if abs(g) > 0:
        w = w * (g / abs(g)) / np.linalg.norm(w)
    lam, Q = _eig(R)
    if not lam[0] > 0:
        raise InvalidArgumentError("w^H R w must be positive (R must be positive definite)")
    den = float(np.sum(lam * np.abs(Q.conj().T @ w) ** 2))
    return float(10.0 * np.log10(abs(np.vdot(w, s)) ** 2 / den))


def optimum_sinr(s, R) -> float:
    """SINR of the clairvoyant filter ``R^-1 s``."""
    lam, Q = _eig(R)
    if not lam[0] > 0:
        raise InvalidArgumentError("R must be positive definite")
    return float(10.0 * np.log10(np.sum(np.abs(Q.conj().T @ s) ** 2 / lam)))


@dataclass
class SinrCurve:
    axis_name: str
    axis: np.ndarray
    algorithms: list[str]
    sinr_db: np.ndarray          # mean over trials of SINR in dB (algorithms x points)
    sinr_db_of_mean: np.ndarray  # dB of the mean linear SINR
    optimum_db: np.ndarray
    max_excess_db: np.ndarray    # worst per-trial SINR minus optimum
    trials: int
    master_seed: int

    def column(self, name: str) -> np.ndarray:
        return self.sinr_db[self.algorithms.index(name)]


@dataclass
class DetectionCurve:
    snr_axis_db: np.ndarray
    algorithms: list[str]
    pd: np.ndarray               # algorithms x points
    pfa: float
    threshold_samples: int
    h1_samples: int
    trials: int
    optimum_pd: np.ndarray = field(default_factory=lambda: np.zeros(0))

    def column(self, name: str) -> np.ndarray:
        return self.pd[self.algorithms.index(name)]


def default_workers() -> int:
    try:
        return max(1, int(os.environ.get("KASTAP_THREADS", "1")))
    except ValueError:
        return 1


def _map(fn, items, workers):
    items = list(items)
    if workers <= 1 or len(items) < 2:
        return [fn(i) for i in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def _check_algorithms(algorithms):
    if not algorithms:
        raise InvalidArgumentError("at least one algorithm is required")
    names = [a.name for a in algorithms]
    if len(set(names)) != len(names):
        raise InvalidArgumentError(f"algorithm names must be unique: {names}")


def _sinr_point(scenario, knowledge, algorithms, doppler_hz, num_snapshots, trials, key, master_seed, workers):
    """SINR of every algorithm at one target Doppler, over ``trials`` draws."""
    R = ground_truth_covariance(scenario).R
    s = target_steering(scenario.radar, doppler_hz)
    opt = optimum_sinr(s, R)

    def trial(t):
        rng = seeding.rng(master_seed, *key, t)
        need = max(num_snapshots(a) for a in algorithms)
        X = draw(scenario, need, rng)
        out = np.empty(len(algorithms))
        for i, alg in enumerate(algorithms):
            L = num_snapshots(alg)
            w = compute_weights(alg if L == alg.snapshots else _with_snapshots(alg, L), knowledge, X, doppler_hz)
            out[i] = output_sinr(w, s, R)
        return out

    per_trial = np.array(_map(trial, range(trials), workers))  # trials x algorithms
    return opt, per_trial


def _with_snapshots(alg, L):
    import dataclasses

    return dataclasses.replace(alg, snapshots=L)


def _reduce(per_point, optimum, axis_name, axis, algorithms, trials, master_seed):
    data = np.stack(per_point, axis=2)  # trials x algorithms x points
    mean_db = data.mean(axis=0)
    db_mean = 10.0 * np.log10(np.mean(10.0 ** (data / 10.0), axis=0))
    excess = (data - np.asarray(optimum)[None, None, :]).max(axis=0)
    return SinrCurve(axis_name, np.asarray(axis, dtype=float), [a.name for a in algorithms], mean_db, db_mean,
                     np.asarray(optimum), excess, trials, master_seed)


def sinr_vs_doppler(scenario: ClutterScenario, algorithms: list[AlgorithmSpec], doppler_grid=None,
                    trials: int = 100, master_seed: int = 0, knowledge: KnowledgeSpec = KnowledgeSpec(),
                    workers: int | None = None) -> SinrCurve:
    """Mean SINR against target Doppler (Hz); fresh training data per bin."""
    _check_algorithms(algorithms)
    grid = np.arange(-150.0, 151.0, 5.0) if doppler_grid is None else np.asarray(doppler_grid, dtype=float)
    if grid.size == 0:
        raise InvalidArgumentError("empty Doppler grid")
    workers = default_workers() if workers is None else workers
    know = Knowledge(scenario, knowledge)
    opts, points = [], []
    for p, fd in enumerate(grid):
        opt, per = _sinr_point(scenario, know, algorithms, fd, lambda a: a.snapshots, trials,
                               ("doppler", p), master_seed, workers)
        opts.append(opt)
        points.append(per)
    return _reduce(points, opts, "doppler_hz", grid, algorithms, trials, master_seed)


def sinr_vs_snapshots(scenario: ClutterScenario, algorithms: list[AlgorithmSpec], snapshot_grid,
                      target_doppler: float = 100.0, trials: int = 100, master_seed: int = 0,
                      knowledge: KnowledgeSpec = KnowledgeSpec(), workers: int | None = None) -> SinrCurve:
    """Mean SINR at ``target_doppler`` against the training-set size."""
    _check_algorithms(algorithms)
    grid = [int(L) for L in snapshot_grid]
    if not grid or min(grid) < 1:
        raise InvalidArgumentError("snapshot grid must be nonempty with entries >= 1")
    workers = default_workers() if workers is None else workers
    know = Knowledge(scenario, knowledge)
    opts, points = [], []
    for p, L in enumerate(grid):
        opt, per = _sinr_point(scenario, know, algorithms, target_doppler, lambda a, L=L: L, trials,
                               ("snapshots", p), master_seed, workers)
        opts.append(opt)
        points.append(per)
    return _reduce(points, opts, "snapshots", grid, algorithms, trials, master_seed)


PARAMETER_SWEEPS = {"icm": "sigma_v_mps", "velocity": "velocity_error_mps", "yaw": "yaw_error_deg"}


def scenario_variant(scenario: ClutterScenario, parameter: str, value: float) -> ClutterScenario:
    if parameter == "icm":
        return scenario.replace(icm_sigma_v=float(value))
    dev = scenario.true_deviation
    if parameter == "velocity":
        return scenario.replace(true_deviation=PriorDeviation(float(value), dev.yaw_error))
    if parameter == "yaw":
        return scenario.replace(true_deviation=PriorDeviation(dev.velocity_error, float(np.deg2rad(value))))
    raise InvalidArgumentError(f"unknown sweep parameter {parameter!r}")


def sinr_vs_parameter(scenario: ClutterScenario, algorithms: list[AlgorithmSpec], parameter: str, values,
                      target_doppler: float = 100.0, trials: int = 100, master_seed: int = 0,
                      knowledge: KnowledgeSpec = KnowledgeSpec(), workers: int | None = None) -> SinrCurve:
    """Mean SINR at ``target_doppler`` while one property of the true scene varies.

    ``parameter`` is ``"icm"`` (sigma_v, m/s), ``"velocity"`` (m/s) or
    ``"yaw"`` (degrees). The processor's knowledge stays nominal.
    """
    _check_algorithms(algorithms)
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        raise InvalidArgumentError("empty parameter grid")
    workers = default_workers() if workers is None else workers
    opts, points = [], []
    for p, v in enumerate(values):
        variant = scenario_variant(scenario, parameter, v)
        know = Knowledge(variant, knowledge)
        opt, per = _sinr_point(variant, know, algorithms, target_doppler, lambda a: a.snapshots, trials,
                               (parameter, p), master_seed, workers)
        opts.append(opt)
        points.append(per)
    return _reduce(points, opts, PARAMETER_SWEEPS[parameter], values, algorithms, trials, master_seed)


def detection_threshold(stat_h0: np.ndarray, pfa: float) -> float:
    """Empirical ``1 - pfa`` quantile of the target-free statistic."""
    return float(np.quantile(stat_h0, 1.0 - pfa))


def filter_statistic(w_full: np.ndarray, X: np.ndarray) -> np.ndarray:
    """Detector statistic ``|w^H x|^2`` per column of ``X``."""
    return np.abs(w_full.conj() @ X) ** 2


def pd_vs_snr(scenario: ClutterScenario, algorithms: list[AlgorithmSpec], snr_grid_db, pfa: float = 1e-3,
              threshold_samples: int = 10000, h1_samples: int | None = None, trials: int = 1,
              target_doppler: float = 100.0, master_seed: int = 0,
              knowledge: KnowledgeSpec = KnowledgeSpec(), workers: int | None = None) -> DetectionCurve:
    """Probability of detection against per-element target SNR.

    Each trial trains every filter on fresh target-free snapshots, sets
    its threshold from ``threshold_samples`` clutter-plus-noise draws and
    counts exceedances over ``h1_samples`` draws with a boresight target of
    random phase added. Pd is averaged over trials. A clairvoyant
    ``R^-1 s`` filter is evaluated alongside as the optimum.
    """
    _check_algorithms(algorithms)
    if not 0 < pfa < 1:
        raise InvalidArgumentError("pfa must lie in (0, 1)")
    snr = np.asarray(snr_grid_db, dtype=float)
    if snr.size == 0:
        raise InvalidArgumentError("empty SNR grid")
    h1_samples = threshold_samples if h1_samples is None else h1_samples
    workers = default_workers() if workers is None else workers
    cfg = scenario.radar
    know = Knowledge(scenario, knowledge)
    R = ground_truth_covariance(scenario).R
    s = target_steering(cfg, target_doppler)
    w_opt = np.linalg.solve(R, s)
    amp = np.sqrt(cfg.noise_power * 10.0 ** (snr / 10.0))

    def trial(t):
        X = draw(scenario, max(a.snapshots for a in algorithms), seeding.rng(master_seed, "pd-train", t))
        W = [compute_weights(a, know, X, target_doppler).full() for a in algorithms] + [w_opt]
        W = np.stack(W)  # filters x NM
        H0 = draw(scenario, threshold_samples, seeding.rng(master_seed, "pd-h0", t))
        thr = np.array([detection_threshold(filter_statistic(w, H0), pfa) for w in W])
        rng = seeding.rng(master_seed, "pd-h1", t)
        H1 = draw(scenario, h1_samples, rng)
        phase = np.exp(2j * np.pi * rng.random(h1_samples))
        y0 = W.conj() @ H1
        g = W.conj() @ s
        pd = np.empty((len(W), snr.size))
        for j, a in enumerate(amp):
            stat = np.abs(y0 + a * g[:, None] * phase[None, :]) ** 2
            pd[:, j] = np.mean(stat > thr[:, None], axis=1)
        return pd

    results = _map(trial, range(trials), workers)
    pd = np.mean(results, axis=0)
    return DetectionCurve(snr, [a.name for a in algorithms], pd[:-1], pfa, threshold_samples, h1_samples, trials,
                          optimum_pd=pd[-1])
