"""Knowledge-aided clutter subspace: steering selection, orthogonalization,
power estimation, covariance tapering and low-rank re-extraction."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import EmptyBasisError, InvalidArgumentError
from .geometry import brennan_rank

DENSE_EIG_LIMIT = 256
ORTHO_TOL = 1e-8


@dataclass(frozen=True)
class SubspaceBasis:
    """Orthonormal columns ``U`` (d x r) with optional per-column powers."""

    U: np.ndarray
    powers: np.ndarray | None = None

    def __post_init__(self):
        if self.U.ndim != 2 or self.U.shape[1] > self.U.shape[0]:
            raise InvalidArgumentError(f"basis must be d x r with r <= d, got {self.U.shape}")
        if self.U.shape[1] and np.linalg.norm(self.U.conj().T @ self.U - np.eye(self.U.shape[1])) > ORTHO_TOL:
            raise InvalidArgumentError("basis columns are not orthonormal")
        if self.powers is not None and (len(self.powers) != self.rank or np.any(self.powers < 0)):
            raise InvalidArgumentError("powers must be a nonnegative vector of length r")

    @property
    def rank(self) -> int:
        return self.U.shape[1]

    @property
    def dim(self) -> int:
        return self.U.shape[0]

    @property
    def projector(self) -> np.ndarray:
        return self.U @ self.U.conj().T

    def with_powers(self, powers) -> "SubspaceBasis":
        return SubspaceBasis(self.U, np.asarray(powers, dtype=float))

    @classmethod
    def empty(cls, dim: int) -> "SubspaceBasis":
        return cls(np.zeros((dim, 0), dtype=complex), np.zeros(0))


@dataclass(frozen=True)
class CovarianceEstimate:
    """Estimated covariance and, when available, the pieces it was built from.

    The reconstruction is ``(U diag(powers) U^H) (.) taper + noise_power I``.
    """

    matrix: np.ndarray
    algorithm_id: str = ""
    basis: SubspaceBasis | None = None
    noise_power: float = 0.0
    taper: np.ndarray | None = None

    def reconstruct(self) -> np.ndarray:
        if self.basis is None or self.basis.powers is None:
            raise InvalidArgumentError("estimate carries no components")
        U = self.basis.U
        R = (U * self.basis.powers) @ U.conj().T
        if self.taper is not None:
            R = R * self.taper
        return R + self.noise_power * np.eye(U.shape[0])


def select_lrgp_steering(num_elements: int, num_pulses: int, beta: float) -> np.ndarray:
    """Steering vectors whose span contains the side-looking ULA clutter ridge.

    Column p samples ``exp(j 2 pi (p / N_r) (beta n + m))`` for pulse n and
    element m, ``N_r`` being the Brennan rank.
    """
    if not beta > 0:
        raise InvalidArgumentError(f"beta must be > 0, got {beta!r}")
    nr = brennan_rank(num_elements, num_pulses, beta)
    n, m = np.divmod(np.arange(num_elements * num_pulses), num_elements)
    return np.exp(2j * np.pi * np.outer(beta * n + m, np.arange(nr) / nr))


def gram_schmidt(V: np.ndarray, drop_tol: float = 1e-8) -> SubspaceBasis:
    """Orthonormalize the columns of ``V`` in order.

    Modified Gram-Schmidt with one re-orthogonalization pass. A column whose
    residual falls below ``drop_tol`` times the largest input column norm is
    taken as dependent and skipped. Scaling by the largest norm keeps columns
    that are themselves tiny from promoting round-off to a basis direction.
    """
    V = np.asarray(V, dtype=complex)
    if V.ndim != 2 or V.shape[1] < 1:
        raise InvalidArgumentError("V must be a d x k matrix with k >= 1")
    if not drop_tol > 0:
        raise InvalidArgumentError("drop_tol must be > 0")
    if not np.any(V):
        raise EmptyBasisError("all-zero input has no basis")
    d, k = V.shape
    scale = float(np.max(np.linalg.norm(V, axis=0)))
    Q = np.zeros((d, min(d, k)), dtype=complex)
    r = 0
    for j in range(k):
        v = V[:, j].copy()
        norm0 = np.linalg.norm(v)
        if norm0 == 0.0 or r == d:
            continue
        for _ in range(2):
            for i in range(r):
                v -= (Q[:, i].conj() @ v) * Q[:, i]
        nv = np.linalg.norm(v)
        if nv <= drop_tol * scale:
            continue
        Q[:, r] = v / nv
        r += 1
    return SubspaceBasis(Q[:, :r].copy())


def _data(X):
    from .clutter import SnapshotSet

    return X.data if isinstance(X, SnapshotSet) else np.asarray(X)


def estimate_powers(basis: SubspaceBasis, X) -> np.ndarray:
    """Mean power of the snapshots projected on each basis vector.

    The raw data is used; the temporal taper has unit modulus, so it is
    not removed first.
    """
    X = _data(X)
    if X.ndim == 1:
        X = X[:, None]
    if X.shape[0] != basis.dim:
        raise InvalidArgumentError(f"snapshot length {X.shape[0]} does not match basis dimension {basis.dim}")
    return np.mean(np.abs(basis.U.conj().T @ X) ** 2, axis=1)


def assemble_tapered_ccm(basis: SubspaceBasis, powers, taper: np.ndarray | None) -> CovarianceEstimate:
    """``(U diag(powers) U^H) (.) taper``; ``taper=None`` means no taper."""
    powers = np.asarray(powers, dtype=float)
    U = basis.U
    if powers.shape != (basis.rank,):
        raise InvalidArgumentError("powers length must equal the basis rank")
    Rs = (U * powers) @ U.conj().T
    if taper is not None:
        if taper.shape != Rs.shape:
            raise InvalidArgumentError(f"taper shape {taper.shape} does not match {Rs.shape}")
        Rs = Rs * taper
    Rs = 0.5 * (Rs + Rs.conj().T)
    return CovarianceEstimate(Rs, "tapered-ccm", basis.with_powers(powers), 0.0, taper)


def _select_rank(eigvals, energy_frac, floor):
    if floor is not None:
        return int(np.count_nonzero(eigvals > floor))
    total = eigvals.sum()
    if total <= 0:
        return 0
    cum = np.cumsum(eigvals)
    return int(min(len(eigvals), np.searchsorted(cum, energy_frac * total * (1 - 1e-12)) + 1))


def low_rank_eig(R, energy_frac: float = 0.9999, floor: float | None = None,
                 method: str = "auto") -> SubspaceBasis:
    """Leading eigenpairs of a Hermitian matrix.

    By default the rank is the smallest one capturing ``energy_frac`` of the
    trace. Passing ``floor`` keeps instead every eigenvalue above it, which
    is what the filters use (floor tied to the noise level). Noise-only
    input has a flat spectrum and yields ``ceil(frac d)`` vectors; callers
    should not pass it.

    ``method`` is ``"dense"``, ``"lanczos"`` or ``"auto"`` (dense up to
    d = 256).
    """
    R = R.matrix if isinstance(R, CovarianceEstimate) else np.asarray(R)
    if R.ndim != 2 or R.shape[0] != R.shape[1]:
        raise InvalidArgumentError("input must be square")
    scale = max(np.linalg.norm(R), 1e-300)
    if np.linalg.norm(R - R.conj().T) > 1e-10 * scale:
        raise InvalidArgumentError("input is not Hermitian")
    if not 0 < energy_frac <= 1:
        raise InvalidArgumentError("energy_frac must be in (0, 1]")
    if method == "auto":
        method = "dense" if R.shape[0] <= DENSE_EIG_LIMIT else "lanczos"
    if method == "dense":
        w, Q = np.linalg.eigh(0.5 * (R + R.conj().T))
        w, Q = np.clip(w[::-1], 0.0, None), Q[:, ::-1]
        r = _select_rank(w, energy_frac, floor)
        return SubspaceBasis(Q[:, :r].copy(), w[:r].copy())
    if method == "lanczos":
        return _lanczos_eig(R, energy_frac, floor)
    raise InvalidArgumentError(f"unknown method {method!r}")


def _lanczos_eig(R, energy_frac, floor):
    from scipy.sparse.linalg import eigsh

    d = R.shape[0]
    R = 0.5 * (R + R.conj().T)
    total = float(np.real(np.trace(R)))
    v0 = np.ones(d, dtype=complex) / np.sqrt(d)
    k = min(16, d - 1)
    while True:
        w, Q = eigsh(R, k=k, which="LA", v0=v0)
        order = np.argsort(w)[::-1]
        w, Q = np.clip(w[order], 0.0, None), Q[:, order]
        if floor is not None:
            done = w[-1] <= floor
        else:
            done = w.sum() >= energy_frac * total * (1 - 1e-12)
        if done or k >= d - 1:
            break
        k = min(2 * k, d - 1)
    if not done:
        return low_rank_eig(R, energy_frac, floor, method="dense")
    r = _select_rank(w, energy_frac, floor) if floor is not None else min(
        len(w), int(np.searchsorted(np.cumsum(w), energy_frac * total * (1 - 1e-12)) + 1))
    return SubspaceBasis(Q[:, :r].copy(), w[:r].copy())
