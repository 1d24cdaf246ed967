"""STAP weight computation: the knowledge-aided low-rank filters and the
classical baselines they are compared against."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import linalg

from .clutter import TaperSpec, build_cmt, icm_autocorrelation
from .errors import DegenerateTargetError, IllConditionedError, InvalidArgumentError
from .geometry import RadarConfig, space_time_steering, steering_matrix
from .subspace import (CovarianceEstimate, SubspaceBasis, assemble_tapered_ccm, estimate_powers,
                       gram_schmidt, low_rank_eig)

ALGORITHM_IDS = ("LRGP-MNE", "LRGP-EIG", "LRGP-RD", "LSE", "LSMI", "EFA", "JDL", "KA-COMBO")


@dataclass(frozen=True)
class ReductionTransform:
    """Orthonormal NM x D map into a reduced-dimension space."""

    S: np.ndarray
    kind: str
    target_doppler: float = 0.0
    blocks: np.ndarray | None = None  # source pulse-domain block index per column (EFA)

    @property
    def dim(self) -> int:
        return self.S.shape[1]

    def reduce_vector(self, v):
        return self.S.conj().T @ v

    def reduce_matrix(self, R):
        return self.S.conj().T @ R @ self.S


@dataclass(frozen=True)
class FilterWeights:
    w: np.ndarray
    algorithm_id: str
    training_snapshots: int = 0
    config_hash: str = ""
    transform: ReductionTransform | None = None

    def __post_init__(self):
        if not np.all(np.isfinite(self.w)) or not np.linalg.norm(self.w) > 0:
            raise InvalidArgumentError(f"{self.algorithm_id}: weights must be finite and nonzero")

    def full(self) -> np.ndarray:
        """Weights expressed in the full NM-dimensional space."""
        return self.w if self.transform is None else self.transform.S @ self.w


def _data(X):
    from .clutter import SnapshotSet

    return X.data if isinstance(X, SnapshotSet) else np.asarray(X)


def _phase_align(w, s):
    g = np.vdot(w, s)
    return w * (g / abs(g)) if abs(g) > 0 else w


def mne_weights(basis: SubspaceBasis, s, algorithm_id="LRGP-MNE", **meta) -> FilterWeights:
    """Minimum-norm weights orthogonal to the clutter subspace with ``w^H s = 1``."""
    s = np.asarray(s, dtype=complex)
    if s.shape != (basis.dim,):
        raise InvalidArgumentError(f"steering length {s.shape} does not match basis dimension {basis.dim}")
    U = basis.U
    p = s - U @ (U.conj().T @ s)
    denom = np.real(np.vdot(s, p))
    if denom < 1e-12 * np.real(np.vdot(s, s)):
        raise DegenerateTargetError("target steering vector lies inside the clutter subspace")
    return FilterWeights(p / denom, algorithm_id, **meta)


def eigen_weights(basis: SubspaceBasis, powers, noise_power: float, s, variant: str = "exact",
                  algorithm_id="LRGP-EIG", **meta) -> FilterWeights:
    """Weights from the low-rank model ``R = U diag(powers) U^H + noise_power I``.

    ``variant="exact"`` applies the true inverse (matrix inversion lemma);
    ``variant="span"`` uses ``U (diag(powers)^-1 + I / noise_power) U^H s``,
    which is confined to span(U) and is kept for comparison only.
    """
    powers = np.asarray(powers, dtype=float)
    s = np.asarray(s, dtype=complex)
    if powers.shape != (basis.rank,) or s.shape != (basis.dim,):
        raise InvalidArgumentError("shape mismatch between basis, powers and steering vector")
    if np.any(powers <= 0) or not noise_power > 0:
        raise InvalidArgumentError("powers and noise_power must be > 0")
    U = basis.U
    c = U.conj().T @ s
    if variant == "exact":
        w = (s - U @ (powers / (powers + noise_power) * c)) / noise_power
    elif variant == "span":
        w = U @ ((1.0 / powers + 1.0 / noise_power) * c)
    else:
        raise InvalidArgumentError(f"unknown variant {variant!r}")
    return FilterWeights(_phase_align(w, s), algorithm_id, **meta)


def covariance_weights(R, s, algorithm_id, **meta) -> FilterWeights:
    """``R^-1 s`` through a Hermitian solve."""
    R = R.matrix if isinstance(R, CovarianceEstimate) else R
    w = linalg.solve(R, s, assume_a="her")
    return FilterWeights(w, algorithm_id, **meta)


def sample_covariance(X) -> np.ndarray:
    X = _data(X)
    return X @ X.conj().T / X.shape[1]


def lsmi_weights(X, s, loading: float, algorithm_id="LSMI", **meta) -> FilterWeights:
    """Diagonally loaded sample-matrix-inversion weights."""
    X = _data(X)
    if X.shape[1] < 1:
        raise InvalidArgumentError("need at least one snapshot")
    R = sample_covariance(X) + loading * np.eye(X.shape[0])
    meta.setdefault("training_snapshots", X.shape[1])
    return covariance_weights(R, s, algorithm_id, **meta)


def lse_covariance(X, V, noise_power: float, rcond: float | None = None,
                   max_cond: float = 1e12) -> CovarianceEstimate:
    """Least-squares patch-amplitude fit of the snapshots onto ``V``.

    ``rcond=None`` requires ``V`` of full column rank (condition number of
    ``V^H V`` at most ``max_cond``). With ``rcond`` set, a truncated-SVD
    pseudo-inverse is used instead, which handles the rank-deficient
    matrices produced by dense patch grids.
    """
    X = _data(X)
    V = np.asarray(V, dtype=complex)
    if V.shape[0] != X.shape[0]:
        raise InvalidArgumentError("V and snapshots have different lengths")
    if rcond is None:
        if V.shape[1] > V.shape[0]:
            raise IllConditionedError(f"{V.shape[1]} patches exceed {V.shape[0]} degrees of freedom")
        sv = np.linalg.svd(V, compute_uv=False)
        cond = np.inf if sv[-1] == 0 else (sv[0] / sv[-1]) ** 2
        if cond > max_cond:
            raise IllConditionedError(f"V^H V condition number {cond:.3g} exceeds {max_cond:.3g}")
        gram = V.conj().T @ V
        amps = linalg.solve(gram, V.conj().T @ X, assume_a="her")
    else:
        amps = np.linalg.pinv(V, rcond=rcond) @ X
    a = np.mean(np.abs(amps) ** 2, axis=1)
    R = (V * a) @ V.conj().T
    R = 0.5 * (R + R.conj().T) + noise_power * np.eye(V.shape[0])
    return CovarianceEstimate(R, "LSE", SubspaceBasis.empty(V.shape[0]), noise_power)


def ka_combo_covariance(R_prior, R_sample, alpha: float) -> CovarianceEstimate:
    """Convex combination ``alpha R_prior + (1 - alpha) R_sample``."""
    if not 0.0 <= alpha <= 1.0:
        raise InvalidArgumentError("alpha must be in [0, 1]")
    Rp = R_prior.matrix if isinstance(R_prior, CovarianceEstimate) else np.asarray(R_prior)
    Rs = R_sample.matrix if isinstance(R_sample, CovarianceEstimate) else np.asarray(R_sample)
    if Rp.shape != Rs.shape:
        raise InvalidArgumentError("covariances differ in shape")
    return CovarianceEstimate(alpha * Rp + (1.0 - alpha) * Rs, "KA-COMBO")


def _doppler_bin(cfg: RadarConfig, doppler_hz: float) -> int:
    """Nearest DFT bin; exact halves go to the lower index."""
    x = doppler_hz / cfg.prf * cfg.num_pulses
    k = int(np.ceil(x - 0.5))
    return k % cfg.num_pulses


def efa_transform(cfg: RadarConfig, target_doppler: float, num_bins: int = 3) -> ReductionTransform:
    """Multibin element-space post-Doppler transform ``F_K (x) I_M``.

    ``target_doppler`` is in Hz; the ``num_bins`` adjacent DFT bins are
    centred on the one nearest to it, wrapping around.
    """
    N, M = cfg.num_pulses, cfg.num_elements
    if not 1 <= num_bins <= N:
        raise InvalidArgumentError(f"num_bins must be in [1, {N}]")
    k0 = _doppler_bin(cfg, target_doppler)
    bins = (k0 + np.arange(num_bins) - (num_bins - 1) // 2) % N
    F = np.exp(2j * np.pi * np.outer(np.arange(N), bins) / N) / np.sqrt(N)
    S = np.kron(F, np.eye(M))
    return ReductionTransform(S, "EFA", target_doppler, np.repeat(np.arange(num_bins), M))


def jdl_transform(cfg: RadarConfig, target_doppler: float, target_azimuth: float = 0.0,
                  bins: tuple[int, int] = (3, 3)) -> ReductionTransform:
    """Joint-domain-localized transform on an angle-Doppler grid around the target.

    Grid spacing is one DFT bin in each domain (1/M spatial, 1/N Doppler).
    """
    M, N = cfg.num_elements, cfg.num_pulses
    n_s, n_d = bins
    if not (1 <= n_s <= M and 1 <= n_d <= N):
        raise InvalidArgumentError("grid larger than the array or CPI")
    f_s0 = cfg.spacing / cfg.wavelength * np.sin(target_azimuth)
    f_d0 = target_doppler / cfg.prf
    ds = (np.arange(n_s) - (n_s - 1) // 2) / M
    dd = (np.arange(n_d) - (n_d - 1) // 2) / N
    fd, fs = np.meshgrid(f_d0 + dd, f_s0 + ds, indexing="ij")
    A = steering_matrix(fs.ravel(), fd.ravel(), M, N)
    Q, _ = np.linalg.qr(A)
    return ReductionTransform(Q, "JDL", target_doppler)


def identity_transform(cfg: RadarConfig) -> ReductionTransform:
    return ReductionTransform(np.eye(cfg.dof, dtype=complex), "IDENTITY", 0.0,
                              np.repeat(np.arange(cfg.num_pulses), cfg.num_elements))


def reduced_taper(Rs_reduced, transform: ReductionTransform, taper_full, cfg, sigma_v, route="congruence"):
    """Apply a covariance taper to a reduced-dimension clutter covariance.

    ``"congruence"`` lifts the reduced matrix back to the full space, tapers
    and reduces again, which is exact whenever the transform is square.
    ``"block-lag"`` tapers in place with ``zeta(|block_i - block_j|)``,
    using the EFA Doppler-bin blocks as the lag index.
    """
    if route == "congruence":
        S = transform.S
        lifted = S @ Rs_reduced @ S.conj().T
        return S.conj().T @ (lifted * taper_full) @ S
    if route == "block-lag":
        if transform.blocks is None:
            raise InvalidArgumentError(f"{transform.kind} transform has no block structure")
        b = transform.blocks
        T = icm_autocorrelation(sigma_v, cfg.pri, cfg.wavelength, np.abs(b[:, None] - b[None, :]))
        return Rs_reduced * T
    raise InvalidArgumentError(f"unknown reduced taper route {route!r}")


def _lifted_taper(Vs, Xr, transform: ReductionTransform, taper_full, basis=None,
                  rcond: float = 1e-10) -> np.ndarray:
    """Reduced tapered clutter covariance built through the full space.

    Full-space direction powers come from a least-squares inversion of the
    reduced basis image ``S^H U``, so the taper acts on the whole clutter
    spectrum before the reduction. A square unitary ``S`` gives back the
    full-space estimate.
    """
    if basis is None:
        basis = gram_schmidt(Vs)
    U, S = basis.U, transform.S
    coeffs = np.linalg.pinv(S.conj().T @ U, rcond=rcond) @ Xr
    powers = np.mean(np.abs(coeffs) ** 2, axis=1)
    Rf = ((U * powers) @ U.conj().T) * taper_full
    Rc = S.conj().T @ Rf @ S
    return 0.5 * (Rc + Rc.conj().T)


def ka_stap_weights(Vs, X, s, cfg: RadarConfig, taper: TaperSpec = TaperSpec(), noise_power: float = 1.0,
                    weights: str = "eig", variant: str = "exact", transform: ReductionTransform | None = None,
                    rank_floor: float = 1.0, energy_frac: float | None = None,
                    taper_route: str = "lift", algorithm_id: str | None = None,
                    basis: SubspaceBasis | None = None, config_hash: str = "") -> FilterWeights:
    """Knowledge-aided low-rank STAP weights.

    ``Vs`` holds the (calibrated) knowledge steering vectors spanning the
    clutter subspace. Steps: orthonormalize, estimate per-direction powers
    from the raw snapshots, optionally taper the resulting covariance and
    re-extract its dominant eigenvectors, then form MNE (``weights="mne"``)
    or covariance-inverse (``weights="eig"``) weights. When ``transform`` is
    given, the weights live in the reduced space and carry the transform.

    After tapering the rank keeps eigenvalues above ``rank_floor *
    noise_power``; set ``energy_frac`` to use a trace-fraction rule instead.
    ``basis`` may pass a precomputed full-space orthonormalization of ``Vs``.
    ``taper_route`` selects how a reduced run tapers (see :func:`reduced_taper`;
    ``"lift"`` uses :func:`_lifted_taper`).
    """
    X = _data(X)
    s = np.asarray(s, dtype=complex)
    lift = transform is not None and taper.sigma_v > 0 and taper_route == "lift"
    if transform is not None:
        Xr = transform.reduce_vector(X)
        s = transform.reduce_vector(s)
        if lift:
            Rc = _lifted_taper(Vs, Xr, transform, build_cmt(taper, cfg), basis)
        else:
            Vs = transform.reduce_vector(Vs)
            basis = None
        X = Xr
    if not lift:
        if basis is None:
            basis = gram_schmidt(Vs)
        powers = estimate_powers(basis, X)
    if taper.sigma_v > 0:
        if transform is None:
            Rc = assemble_tapered_ccm(basis, powers, build_cmt(taper, cfg)).matrix
        elif not lift:
            Rs = assemble_tapered_ccm(basis, powers, None).matrix
            Rc = reduced_taper(Rs, transform, build_cmt(taper, cfg), cfg, taper.sigma_v, taper_route)
            Rc = 0.5 * (Rc + Rc.conj().T)
        if energy_frac is None:
            basis = low_rank_eig(Rc, floor=rank_floor * noise_power)
        else:
            basis = low_rank_eig(Rc, energy_frac=energy_frac)
        powers = basis.powers
    else:
        basis = basis.with_powers(powers)
    if algorithm_id is None:
        algorithm_id = "LRGP-RD" if transform is not None else ("LRGP-MNE" if weights == "mne" else "LRGP-EIG")
    meta = dict(training_snapshots=X.shape[1], config_hash=config_hash, transform=transform)
    if weights == "mne":
        return mne_weights(basis, s, algorithm_id, **meta)
    if weights == "eig":
        keep = powers > 0
        if not np.all(keep):
            basis = SubspaceBasis(basis.U[:, keep], powers[keep])
            powers = basis.powers
        return eigen_weights(basis, powers, noise_power, s, variant, algorithm_id, **meta)
    raise InvalidArgumentError(f"unknown weight path {weights!r}")


def rd_ka_stap_weights(Vs, X, transform: ReductionTransform, taper: TaperSpec, s, cfg: RadarConfig,
                       **kwargs) -> FilterWeights:
    """Reduced-dimension knowledge-aided STAP (see :func:`ka_stap_weights`)."""
    return ka_stap_weights(Vs, X, s, cfg, taper, transform=transform, **kwargs)


def reduced_lsmi_weights(X, s, transform: ReductionTransform, loading: float, algorithm_id: str,
                         **meta) -> FilterWeights:
    """Loaded SMI in a reduced space (EFA and JDL baselines)."""
    X = _data(X)
    Xr = transform.reduce_vector(X)
    sr = transform.reduce_vector(s)
    R = sample_covariance(Xr) + loading * np.eye(transform.dim)
    w = linalg.solve(R, sr, assume_a="her")
    meta.setdefault("training_snapshots", X.shape[1])
    return FilterWeights(w, algorithm_id, transform=transform, **meta)


def target_steering(cfg: RadarConfig, doppler_hz: float, azimuth: float = 0.0) -> np.ndarray:
    """Target space-time steering vector at nominal geometry."""
    f_s = cfg.spacing / cfg.wavelength * np.sin(azimuth)
    return space_time_steering(f_s, doppler_hz / cfg.prf, cfg.num_elements, cfg.num_pulses)
