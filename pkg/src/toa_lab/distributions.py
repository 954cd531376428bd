"""Time-of-arrival densities for a point (or narrow) detector.

Four proposals are sampled on a common node grid t_k = k * dt, k = 0..n:

* ``QC``  quantum clock: the detector-region position density, normalized over
  a period T' that may be much longer than the sampled range.
* ``F``   probability current through the detector.
* ``K``   Kijowski: built from the positive-momentum amplitudes only.
* ``SC``  semi-classical: classical free flights of the initial phase-space
  ensemble (position and momentum marginals), counted when they hit D.

All integrals in time use composite Simpson weights.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import simpson
from scipy.special import erf

from .errors import DegenerateNormalizationError, InvalidParameterError, UndefinedMapError
from .packets import (
    DetectorSpec,
    ObservationWindow,
    WavePacketSpec,
    dpsi_dx,
    density,
    momentum_density,
    probability_in,
    psi_momentum,
    psi_position,
)

# Normalizations below this are treated as "the packet never reached the detector".
DEGENERATE_FLOOR = 1e-100
KIJOWSKI_NODES = 4097
_NEGLIGIBLE_AT_ZERO = 1e-20


class DistributionKind(str, enum.Enum):
    QC = "QC"
    K = "K"
    F = "F"
    SC = "SC"

    @property
    def column(self) -> str:
        return self.value.lower()


@dataclass(frozen=True)
class TimeGrid:
    t_max: float = 5.0
    n_samples: int = 2000

    def __post_init__(self):
        if not (self.t_max > 0 and math.isfinite(self.t_max)):
            raise InvalidParameterError(f"t_max must be positive, got {self.t_max}")
        if int(self.n_samples) != self.n_samples or self.n_samples < 2:
            raise InvalidParameterError(f"n_samples must be an integer >= 2, got {self.n_samples}")

    @property
    def dt(self) -> float:
        return self.t_max / self.n_samples

    @property
    def times(self) -> np.ndarray:
        return np.linspace(0.0, self.t_max, self.n_samples + 1)

    def refined(self, factor: int = 2) -> "TimeGrid":
        return TimeGrid(self.t_max, self.n_samples * factor)


@dataclass(frozen=True)
class SampledDistribution:
    kind: DistributionKind
    grid: TimeGrid
    density: np.ndarray
    normalization_constant: float
    normalization_window: float
    raw: np.ndarray = field(repr=False, default=None)

    def __post_init__(self):
        if not np.all(np.isfinite(self.density)):
            raise InvalidParameterError(f"{self.kind.value} density has non-finite samples")

    @property
    def times(self) -> np.ndarray:
        return self.grid.times

    def mass(self) -> float:
        """Normalized mass on the sampled range [0, t_max]."""
        return float(simpson(self.density, x=self.times))

    def argmax(self) -> float:
        return float(self.times[int(np.argmax(self.density))])


# ---------------------------------------------------------------- raw densities


def qc_raw(packet: WavePacketSpec, det: DetectorSpec, t):
    """|psi(D, t)|^2, or the probability inside [D - w/2, D + w/2] for a finite width."""
    if det.width == 0:
        return density(packet, det.position, t)
    half = 0.5 * det.width
    return probability_in(packet, det.position - half, det.position + half, t)


def flux_raw(packet: WavePacketSpec, det: DetectorSpec, t):
    """Probability current Im(psi* d_x psi) at the detector (hbar = m = 1)."""
    psi = psi_position(packet, det.position, t)
    return np.imag(np.conj(psi) * dpsi_dx(packet, det.position, t))


def _kijowski_nodes(packet: WavePacketSpec, n_nodes: int):
    """Quadrature nodes/weights for int_0^P sqrt(p) f(p) dp.

    Returns (p, w) with the sqrt(p) factor folded into ``w``. A uniform mesh is
    used when the amplitude already vanishes at p = 0; otherwise p = u^2 grades
    the mesh toward the square-root endpoint.
    """
    p_top = max(packet.p0, 0.0) + 10.0 / packet.sigma0
    if n_nodes % 2 == 0:
        n_nodes += 1
    if momentum_density(packet, 0.0) < _NEGLIGIBLE_AT_ZERO:
        p = np.linspace(0.0, p_top, n_nodes)
        w = simpson_weights(p) * np.sqrt(p)
    else:
        u = np.linspace(0.0, math.sqrt(p_top), n_nodes)
        p = u**2
        w = simpson_weights(u) * 2.0 * u**2
    return p, w


def simpson_weights(x: np.ndarray) -> np.ndarray:
    """Composite Simpson weights on a uniform odd-length grid."""
    n = len(x)
    if n < 3 or n % 2 == 0:
        raise InvalidParameterError("Simpson weights need an odd number (>= 3) of nodes")
    h = (x[-1] - x[0]) / (n - 1)
    w = np.ones(n)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    return w * h / 3.0


def kijowski_raw(packet: WavePacketSpec, det: DetectorSpec, t, n_nodes: int = KIJOWSKI_NODES,
                 chunk: int = 256):
    """(1/2pi) |int_0^inf sqrt(p) psi~(p) exp(ipD - ip^2 t/2) dp|^2."""
    t = np.atleast_1d(np.asarray(t, dtype=float))
    if np.any(t < 0):
        raise InvalidParameterError("negative times are not supported")
    p, w = _kijowski_nodes(packet, n_nodes)
    base = w * psi_momentum(packet, p) * np.exp(1j * p * det.position)
    out = np.empty(t.shape)
    flat_t = t.ravel()
    flat_out = out.ravel()
    for i in range(0, flat_t.size, chunk):
        tt = flat_t[i:i + chunk, None]
        amp = np.exp(-0.5j * p[None, :] ** 2 * tt) @ base
        flat_out[i:i + chunk] = np.abs(amp) ** 2 / (2.0 * np.pi)
    return flat_out.reshape(t.shape)


def semiclassical_raw(packet: WavePacketSpec, det: DetectorSpec, t, model: str = "phase_space"):
    """Semi-classical arrival density.

    ``phase_space`` (default): free classical flights from the initial ensemble
    |psi(x, 0)|^2 |psi~(p)|^2, i.e. int |p| |psi~(p)|^2 |psi(D - p t, 0)|^2 dp,
    evaluated in closed form (the integrand is |p| times a Gaussian in p).

    ``momentum_map``: every trajectory starts at x0, so t = (D - x0) / p and
    Pi(t) = |D - x0| / t^2 |psi~((D - x0) / t)|^2.
    """
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise InvalidParameterError("negative times are not supported")
    d = det.position - packet.x0
    if model == "momentum_map":
        if d == 0:
            raise UndefinedMapError("detector sits at the packet center; t = (D - x0)/p is undefined")
        safe = np.where(t > 0, t, 1.0)
        val = abs(d) / safe**2 * momentum_density(packet, d / safe)
        return np.where(t > 0, val, 0.0)
    if model != "phase_space":
        raise InvalidParameterError(f"unknown semi-classical model {model!r}")

    s2 = packet.sigma0**2
    a = 2.0 * s2                       # momentum Gaussian: exp(-a (p - p0)^2)
    b = t**2 / (2.0 * s2)              # position Gaussian mapped to p: exp(-b (p - d/t)^2)
    ab = a + b
    mu = (a * packet.p0 + t * d / (2.0 * s2)) / ab
    shift = a / ab * (packet.p0 * t - d) ** 2 / (2.0 * s2)
    s = np.sqrt(0.5 / ab)
    # int |p| exp(-(p - mu)^2 / (2 s^2)) dp
    abs_moment = 2.0 * s**2 * np.exp(-0.5 * (mu / s) ** 2) + s * math.sqrt(2 * np.pi) * mu * erf(
        mu / (math.sqrt(2.0) * s)
    )
    return np.exp(-shift) * abs_moment / np.pi


# ------------------------------------------------------------- normalization


def _qc_intervals(packet: WavePacketSpec, t_prime: float) -> int:
    # resolve the shorter of the spreading time and the transit time of one width
    s = packet.sigma0
    scale = min(s**2, s / max(abs(packet.p0), 1.0 / s)) / 40.0
    n = max(2048, int(math.ceil(t_prime / scale)))
    return n + (n % 2)


def qc_normalization_constant(packet: WavePacketSpec, det: DetectorSpec, t_prime: float,
                              n_intervals: int | None = None) -> float:
    """N(T') = int_0^T' of the raw QC density, by composite Simpson."""
    if not t_prime > 0:
        raise InvalidParameterError(f"t_prime must be positive, got {t_prime}")
    n = n_intervals or _qc_intervals(packet, t_prime)
    t = np.linspace(0.0, t_prime, n + 1)
    return float(simpson(qc_raw(packet, det, t), x=t))


def _normalize(kind: DistributionKind, raw: np.ndarray, grid: TimeGrid) -> SampledDistribution:
    total = float(simpson(raw, x=grid.times))
    if not total > DEGENERATE_FLOOR:
        raise DegenerateNormalizationError(
            kind.value, f"normalization integral {total:.3g} over [0, {grid.t_max}] is not positive"
        )
    return SampledDistribution(kind, grid, raw / total, total, grid.t_max, raw)


def sample_qc(packet: WavePacketSpec, det: DetectorSpec, window: ObservationWindow,
              grid: TimeGrid) -> SampledDistribution:
    t_prime = window.normalization_stop
    if grid.t_max > t_prime * (1 + 1e-12):
        raise InvalidParameterError("time grid extends past the QC normalization window")
    norm = qc_normalization_constant(packet, det, t_prime)
    if not norm > DEGENERATE_FLOOR:
        raise DegenerateNormalizationError(
            DistributionKind.QC.value,
            f"N(T'={t_prime}) = {norm:.3g}; the packet never comes near D = {det.position}",
        )
    raw = qc_raw(packet, det, grid.times)
    return SampledDistribution(DistributionKind.QC, grid, raw / norm, norm, t_prime, raw)


def sample_flux(packet: WavePacketSpec, det: DetectorSpec, grid: TimeGrid) -> SampledDistribution:
    return _normalize(DistributionKind.F, flux_raw(packet, det, grid.times), grid)


def sample_kijowski(packet: WavePacketSpec, det: DetectorSpec, grid: TimeGrid,
                    n_nodes: int = KIJOWSKI_NODES) -> SampledDistribution:
    return _normalize(DistributionKind.K, kijowski_raw(packet, det, grid.times, n_nodes), grid)


def sample_semiclassical(packet: WavePacketSpec, det: DetectorSpec, grid: TimeGrid,
                         model: str = "phase_space") -> SampledDistribution:
    return _normalize(DistributionKind.SC, semiclassical_raw(packet, det, grid.times, model), grid)


def sample(kind: DistributionKind | str, packet: WavePacketSpec, det: DetectorSpec,
           window: ObservationWindow, grid: TimeGrid) -> SampledDistribution:
    kind = DistributionKind(kind)
    if kind is DistributionKind.QC:
        return sample_qc(packet, det, window, grid)
    if kind is DistributionKind.F:
        return sample_flux(packet, det, grid)
    if kind is DistributionKind.K:
        return sample_kijowski(packet, det, grid)
    return sample_semiclassical(packet, det, grid)
