"""Side-looking ULA geometry, steering vectors and clutter-rank rule.

Frequencies are normalized throughout: spatial frequency in cycles per
element, Doppler in cycles per pulse (Hz divided by the PRF). Space-time
vectors are pulse-major, i.e. ``v = v_t (x) v_s`` with the element index
varying fastest.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgumentError

SPEED_OF_LIGHT = 299792458.0
# Rounded value that makes d_a = lambda/2 give beta = 1 exactly at 450 MHz.
NOMINAL_PROPAGATION_SPEED = 3.0e8

_INTEGER_SLACK = 1e-9


@dataclass(frozen=True)
class RadarConfig:
    """Platform, array and waveform parameters.

    ``element_spacing=None`` means half a wavelength.
    """

    num_elements: int = 8
    num_pulses: int = 8
    carrier_freq: float = 450e6
    prf: float = 300.0
    platform_speed: float = 50.0
    element_spacing: float | None = None
    platform_altitude: float = 9000.0
    noise_power: float = 1.0
    propagation_speed: float = SPEED_OF_LIGHT

    def __post_init__(self):
        if int(self.num_elements) != self.num_elements or self.num_elements < 1:
            raise InvalidArgumentError(f"num_elements must be a positive integer, got {self.num_elements!r}")
        if int(self.num_pulses) != self.num_pulses or self.num_pulses < 1:
            raise InvalidArgumentError(f"num_pulses must be a positive integer, got {self.num_pulses!r}")
        for name in ("carrier_freq", "prf", "propagation_speed", "noise_power"):
            val = getattr(self, name)
            if not (math.isfinite(val) and val > 0):
                raise InvalidArgumentError(f"{name} must be finite and > 0, got {val!r}")
        if not (math.isfinite(self.platform_speed) and self.platform_speed >= 0):
            raise InvalidArgumentError(f"platform_speed must be >= 0, got {self.platform_speed!r}")
        if self.element_spacing is not None and not (
            math.isfinite(self.element_spacing) and self.element_spacing > 0
        ):
            raise InvalidArgumentError(f"element_spacing must be > 0, got {self.element_spacing!r}")

    @classmethod
    def nominal(cls, **overrides) -> "RadarConfig":
        """Nominal airborne scenario with c = 3e8 m/s, giving beta = 1 exactly."""
        kw = dict(propagation_speed=NOMINAL_PROPAGATION_SPEED)
        kw.update(overrides)
        return cls(**kw)

    @property
    def wavelength(self) -> float:
        return self.propagation_speed / self.carrier_freq

    @property
    def spacing(self) -> float:
        return self.wavelength / 2 if self.element_spacing is None else self.element_spacing

    @property
    def pri(self) -> float:
        return 1.0 / self.prf

    @property
    def beta(self) -> float:
        return 2.0 * self.platform_speed * self.pri / self.spacing

    @property
    def dof(self) -> int:
        return self.num_elements * self.num_pulses

    @property
    def clutter_rank(self) -> int:
        return brennan_rank(self.num_elements, self.num_pulses, self.beta)


@dataclass(frozen=True)
class PriorDeviation:
    """Mismatch between the true platform motion and the assumed one.

    ``velocity_error`` in m/s, ``yaw_error`` in radians.
    """

    velocity_error: float = 0.0
    yaw_error: float = 0.0


NO_DEVIATION = PriorDeviation()


def _check_freq(f):
    if not np.all(np.isfinite(f)):
        raise InvalidArgumentError(f"frequency must be finite, got {f!r}")


def spatial_steering(f_s: float, num_elements: int) -> np.ndarray:
    _check_freq(f_s)
    if num_elements < 1:
        raise InvalidArgumentError("num_elements must be >= 1")
    return np.exp(2j * np.pi * f_s * np.arange(num_elements))


def temporal_steering(f_d: float, num_pulses: int) -> np.ndarray:
    _check_freq(f_d)
    if num_pulses < 1:
        raise InvalidArgumentError("num_pulses must be >= 1")
    return np.exp(2j * np.pi * f_d * np.arange(num_pulses))


def space_time_steering(f_s: float, f_d: float, num_elements: int, num_pulses: int) -> np.ndarray:
    """Kronecker product ``v_t(f_d) (x) v_s(f_s)`` of length N*M."""
    return np.kron(temporal_steering(f_d, num_pulses), spatial_steering(f_s, num_elements))


def steering_matrix(f_s, f_d, num_elements: int, num_pulses: int) -> np.ndarray:
    """Columns are space-time steering vectors for paired frequency arrays."""
    f_s = np.atleast_1d(np.asarray(f_s, dtype=float))
    f_d = np.atleast_1d(np.asarray(f_d, dtype=float))
    _check_freq(f_s)
    _check_freq(f_d)
    m = np.arange(num_elements)
    n = np.arange(num_pulses)
    # phase[n, m, k] = f_d[k] n + f_s[k] m, flattened pulse-major
    phase = n[:, None, None] * f_d[None, None, :] + m[None, :, None] * f_s[None, None, :]
    return np.exp(2j * np.pi * phase).reshape(num_elements * num_pulses, -1)


def clutter_patch_frequencies(azimuth, elevation, cfg: RadarConfig, deviation: PriorDeviation = NO_DEVIATION):
    """Normalized (spatial, Doppler) frequencies of a ground patch.

    The deviation perturbs only the Doppler term: the antenna axis is
    known, the platform speed and heading are not.
    """
    azimuth = np.asarray(azimuth, dtype=float)
    elevation = np.asarray(elevation, dtype=float)
    if np.any(np.abs(azimuth) > np.pi + 1e-12) or np.any(np.abs(elevation) > np.pi / 2 + 1e-12):
        raise InvalidArgumentError("azimuth must lie in [-pi, pi] and elevation in [-pi/2, pi/2]")
    lam = cfg.wavelength
    cos_el = np.cos(elevation)
    f_s = cfg.spacing / lam * cos_el * np.sin(azimuth)
    speed = cfg.platform_speed + deviation.velocity_error
    f_d = 2.0 * speed * cfg.pri / lam * cos_el * np.sin(azimuth + deviation.yaw_error)
    return f_s, f_d


def brennan_rank(num_elements: int, num_pulses: int, beta: float) -> int:
    """Clutter rank estimate ``ceil(M + beta (N - 1))``.

    Values within 1e-9 of an integer are treated as that integer so that
    round-off in beta does not bump the rank.
    """
    if num_elements < 1 or num_pulses < 1:
        raise InvalidArgumentError("M and N must be >= 1")
    if not beta > 0:
        raise InvalidArgumentError(f"beta must be > 0, got {beta!r}")
    x = num_elements + beta * (num_pulses - 1)
    nearest = round(x)
    if abs(x - nearest) < _INTEGER_SLACK:
        return int(nearest)
    return int(math.ceil(x))
