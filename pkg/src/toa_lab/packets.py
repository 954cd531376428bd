"""Natural units and the free Gaussian wave packet.

Everything is expressed with hbar = m = omega = 1, so lengths are in units
of l0 = sqrt(hbar / (m omega)), momenta in hbar / l0 and times in 1 / omega.
The packet is the ground state of the trap (sigma0 = l0 by default), boosted
to momentum p0 and released at t = 0; evolution afterwards is free.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import simpson
from scipy.special import ndtr

from .errors import InvalidParameterError


@dataclass(frozen=True)
class UnitSystem:
    hbar: float = 1.0
    mass: float = 1.0
    omega: float = 1.0

    @property
    def l0(self) -> float:
        return math.sqrt(self.hbar / (self.mass * self.omega))


NATURAL_UNITS = UnitSystem()


@dataclass(frozen=True)
class WavePacketSpec:
    """Gaussian initial state: center ``x0``, mean momentum ``p0``, spread ``sigma0``."""

    x0: float = -10.0
    p0: float = 7.0
    sigma0: float = 1.0

    def __post_init__(self):
        if not (self.sigma0 > 0 and math.isfinite(self.sigma0)):
            raise InvalidParameterError(f"sigma0 must be positive, got {self.sigma0}")
        if not (math.isfinite(self.x0) and math.isfinite(self.p0)):
            raise InvalidParameterError("x0 and p0 must be finite")

    def center(self, t):
        return self.x0 + self.p0 * np.asarray(t, dtype=float)

    def width(self, t):
        """Position standard deviation sigma_t at time ``t``."""
        t = np.asarray(t, dtype=float)
        return self.sigma0 * np.sqrt(1.0 + (t / (2.0 * self.sigma0**2)) ** 2)


@dataclass(frozen=True)
class DetectorSpec:
    position: float = 0.0
    width: float = 0.0

    def __post_init__(self):
        if not math.isfinite(self.position):
            raise InvalidParameterError("detector position must be finite")
        if not (self.width >= 0 and math.isfinite(self.width)):
            raise InvalidParameterError(f"detector width must be >= 0, got {self.width}")


@dataclass(frozen=True)
class ObservationWindow:
    """Stop time ``t_stop`` (T) and the longer QC normalization period ``normalization_stop`` (T')."""

    t_stop: float = 5.0
    normalization_stop: float = 50.0
    t_start: float = 0.0

    def __post_init__(self):
        if self.t_start != 0.0:
            raise InvalidParameterError("observation always starts at t = 0")
        if not (0 < self.t_stop <= self.normalization_stop):
            raise InvalidParameterError(
                f"need 0 < t_stop <= normalization_stop, got {self.t_stop}, {self.normalization_stop}"
            )


@dataclass(frozen=True)
class InitialState:
    """psi(x, 0) for a Gaussian packet; callable on arrays."""

    spec: WavePacketSpec

    def __call__(self, x):
        return psi_position(self.spec, x, 0.0)

    def norm(self, n_points: int = 4097) -> float:
        return norm_at(self.spec, 0.0, n_points)


def make_gaussian(spec: WavePacketSpec) -> InitialState:
    if not spec.sigma0 > 0:
        raise InvalidParameterError("sigma0 must be positive")
    return InitialState(spec)


def _check_time(t):
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise InvalidParameterError("negative times are not supported (free evolution runs forward)")
    return t


def psi_position(spec: WavePacketSpec, x, t):
    """Closed-form free evolution psi(x, t); broadcasts over ``x`` and ``t``."""
    t = _check_time(t)
    x = np.asarray(x, dtype=float)
    s2 = spec.sigma0**2
    a = 1.0 + 1j * t / (2.0 * s2)
    u = x - spec.x0 - spec.p0 * t
    return (
        (2.0 * np.pi * s2) ** -0.25
        / np.sqrt(a)
        * np.exp(-(u**2) / (4.0 * s2 * a) + 1j * spec.p0 * (x - spec.x0) - 0.5j * spec.p0**2 * t)
    )


def dpsi_dx(spec: WavePacketSpec, x, t):
    """Analytic spatial derivative of :func:`psi_position`."""
    t = _check_time(t)
    x = np.asarray(x, dtype=float)
    s2 = spec.sigma0**2
    a = 1.0 + 1j * t / (2.0 * s2)
    u = x - spec.x0 - spec.p0 * t
    return psi_position(spec, x, t) * (-u / (2.0 * s2 * a) + 1j * spec.p0)


def density(spec: WavePacketSpec, x, t):
    """|psi(x, t)|^2, written directly as the spreading Gaussian."""
    t = _check_time(t)
    sig = spec.width(t)
    u = np.asarray(x, dtype=float) - spec.center(t)
    return np.exp(-0.5 * (u / sig) ** 2) / (math.sqrt(2.0 * np.pi) * sig)


def probability_in(spec: WavePacketSpec, lo: float, hi: float, t):
    """Probability of finding the particle in ``[lo, hi]`` at time ``t``."""
    t = _check_time(t)
    c = spec.center(t)
    sig = spec.width(t)
    zlo = (lo - c) / sig
    zhi = (hi - c) / sig
    # difference of upper tails keeps precision when the window sits right of the packet
    right = ndtr(-zlo) - ndtr(-zhi)
    left = ndtr(zhi) - ndtr(zlo)
    return np.where(zlo > 0, right, left)


def psi_momentum(spec: WavePacketSpec, p):
    """Momentum amplitude, normalized so that psi(x) = (2 pi)^-1/2 int psi~(p) e^{ipx} dp."""
    p = np.asarray(p, dtype=float)
    s2 = spec.sigma0**2
    return (2.0 * s2 / np.pi) ** 0.25 * np.exp(-s2 * (p - spec.p0) ** 2 - 1j * p * spec.x0)


def momentum_density(spec: WavePacketSpec, p):
    p = np.asarray(p, dtype=float)
    s2 = spec.sigma0**2
    return math.sqrt(2.0 * s2 / np.pi) * np.exp(-2.0 * s2 * (p - spec.p0) ** 2)


def right_mover_mass(spec: WavePacketSpec) -> float:
    """Closed form of int_0^inf |psi~(p)|^2 dp."""
    return float(ndtr(2.0 * spec.sigma0 * spec.p0))


def _moving_grid(spec: WavePacketSpec, t: float, n_points: int, half_width: float = 10.0):
    c = float(spec.center(t))
    sig = float(spec.width(t))
    return np.linspace(c - half_width * sig, c + half_width * sig, n_points)


def norm_at(spec: WavePacketSpec, t: float, n_points: int = 4097) -> float:
    """Simpson estimate of int |psi(x, t)|^2 dx over center +- 10 sigma_t."""
    x = _moving_grid(spec, t, n_points)
    return float(simpson(np.abs(psi_position(spec, x, t)) ** 2, x=x))


def mean_position(spec: WavePacketSpec, t: float, n_points: int = 4097) -> float:
    x = _moving_grid(spec, t, n_points)
    rho = np.abs(psi_position(spec, x, t)) ** 2
    return float(simpson(x * rho, x=x) / simpson(rho, x=x))
