"""Brute-force spectral propagator used to cross-check the closed-form packet.

Free evolution is diagonal in momentum space, so a single FFT round trip with
the multiplier exp(-i k^2 t / 2) reaches any time exactly; the only errors are
sampling and wrap-around on the periodic grid.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .errors import DomainTooSmallError, InvalidParameterError
from .packets import WavePacketSpec, psi_position

EDGE_TOLERANCE = 1e-12
GUARD_WIDTHS = 6.0


@dataclass(frozen=True)
class GridState:
    """Wavefunction samples on the periodic grid x_k = x_min + k dx, k < n_points."""

    x_min: float
    x_max: float
    n_points: int
    amplitudes: np.ndarray
    time: float = 0.0

    def __post_init__(self):
        n = self.n_points
        if n < 2 or n & (n - 1):
            raise InvalidParameterError(f"n_points must be a power of two, got {n}")
        if not self.x_max > self.x_min:
            raise InvalidParameterError("x_max must exceed x_min")
        if self.amplitudes.shape != (n,):
            raise InvalidParameterError("amplitudes length does not match n_points")

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / self.n_points

    @property
    def x(self) -> np.ndarray:
        return self.x_min + self.dx * np.arange(self.n_points)

    @property
    def wavenumbers(self) -> np.ndarray:
        return 2.0 * np.pi * np.fft.fftfreq(self.n_points, d=self.dx)

    def norm(self) -> float:
        return float(np.sum(np.abs(self.amplitudes) ** 2) * self.dx)

    def moments(self) -> tuple[float, float]:
        """Mean and standard deviation of the position density."""
        rho = np.abs(self.amplitudes) ** 2
        w = rho / rho.sum()
        x = self.x
        mean = float(np.dot(w, x))
        var = float(np.dot(w, (x - mean) ** 2))
        return mean, var**0.5


def discretize(spec: WavePacketSpec, x_min: float = -40.0, x_max: float = 40.0,
               n_points: int = 8192) -> GridState:
    dx = (x_max - x_min) / n_points
    x = x_min + dx * np.arange(n_points)
    edges = psi_position(spec, np.array([x_min, x_max]), 0.0)
    if np.max(np.abs(edges)) >= EDGE_TOLERANCE:
        raise DomainTooSmallError(
            f"|psi| = {np.max(np.abs(edges)):.3g} at the grid edges of [{x_min}, {x_max}]"
        )
    amp = psi_position(spec, x, 0.0)
    amp = amp / np.sqrt(np.sum(np.abs(amp) ** 2) * dx)
    return GridState(x_min, x_max, n_points, amp, 0.0)


def _check_guard(state: GridState) -> None:
    mean, std = state.moments()
    lo, hi = mean - GUARD_WIDTHS * std, mean + GUARD_WIDTHS * std
    if lo < state.x_min or hi > state.x_max:
        raise DomainTooSmallError(
            f"packet [{lo:.3g}, {hi:.3g}] at t={state.time:.6g} leaves the grid "
            f"[{state.x_min}, {state.x_max}]"
        )


def spectral_propagate(state: GridState, t_target: float) -> GridState:
    if t_target < state.time:
        raise InvalidParameterError("spectral_propagate only runs forward in time")
    dt = t_target - state.time
    _check_guard(state)
    if dt == 0:
        return replace(state, amplitudes=state.amplitudes.copy())
    k = state.wavenumbers
    phi = np.fft.fft(state.amplitudes)
    out = np.fft.ifft(phi * np.exp(-0.5j * k**2 * dt))
    result = GridState(state.x_min, state.x_max, state.n_points, out, float(t_target))
    _check_guard(result)
    return result


def to_momentum(state: GridState) -> tuple[np.ndarray, np.ndarray]:
    """Continuum-normalized momentum amplitudes, sorted by momentum.

    Approximates (2 pi)^-1/2 int psi(x) exp(-ipx) dx by the DFT.
    """
    k = state.wavenumbers
    phase = np.exp(-1j * k * state.x_min)
    phi = np.fft.fft(state.amplitudes) * phase * state.dx / np.sqrt(2.0 * np.pi)
    order = np.argsort(k)
    return k[order], phi[order]


def max_deviation(state: GridState, spec: WavePacketSpec) -> float:
    """Largest pointwise |psi_grid - psi_analytic| at the state's time."""
    ref = psi_position(spec, state.x, state.time)
    return float(np.max(np.abs(state.amplitudes - ref)))


def dump_csv(state: GridState, path) -> Path:
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["x", "re_psi", "im_psi"])
        for x, a in zip(state.x, state.amplitudes):
            w.writerow([f"{x:.17g}", f"{a.real:.17g}", f"{a.imag:.17g}"])
    return path


ORACLE_PACKETS = (
    WavePacketSpec(-10.0, 7.0, 1.0),
    WavePacketSpec(0.0, 0.0, 1.0),
    WavePacketSpec(-5.0, 2.0, 0.5),
)
ORACLE_TIMES = (0.0, 0.5, 1.0, 10.0 / 7.0, 3.0)


def oracle_matrix(packets=ORACLE_PACKETS, times=ORACLE_TIMES):
    """Run the analytic-vs-spectral comparison; yields (spec, t, max_dev, norm_drift)."""
    for spec in packets:
        start = discretize(spec)
        for t in times:
            state = spectral_propagate(start, t)
            yield spec, t, max_deviation(state, spec), abs(state.norm() - start.norm())
