"""Tail integrals, cross-proposal comparison, and the classical dwell-time model.

Two QC quantities are kept strictly apart here:

* the tail ``int_T^t_max Pi_QC(t) dt`` with Pi_QC normalized over T' >> T,
  a joint probability of being found at the detector after T;
* the probability of *not* finding the particle at the detector during the
  observation [0, T], which for a uniformly read clock is
  ``1 - (1/T) int_0^T P(x in detector | t) dt``. For a point detector the
  found-probability vanishes, exactly as a classical particle that sits at D
  for a finite time has vanishing chance of being caught there as T grows.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational

import numpy as np
from scipy.integrate import cumulative_simpson, simpson
from scipy.interpolate import CubicHermiteSpline

from .distributions import DistributionKind, SampledDistribution, qc_raw
from .errors import InvalidParameterError, UnsupportedScenarioError
from .packets import DetectorSpec, WavePacketSpec

DEFAULT_TOLERANCE = 0.02


@dataclass(frozen=True)
class TailCurve:
    kind: DistributionKind
    thresholds: np.ndarray
    values: np.ndarray


def tail_curve(dist: SampledDistribution, thresholds) -> TailCurve:
    """int_T^t_max of the normalized density for every threshold T.

    Node values come from a cumulative Simpson pass; thresholds between
    nodes use cubic Hermite interpolation of the running integral, whose
    slope is the density itself.
    """
    thr = np.asarray(thresholds, dtype=float)
    t = dist.times
    if thr.ndim != 1:
        raise InvalidParameterError("thresholds must be one-dimensional")
    if thr.size and (thr[0] < 0 or thr[-1] > t[-1] * (1 + 1e-12)):
        raise InvalidParameterError(f"thresholds must lie in [0, {t[-1]}]")
    if np.any(np.diff(thr) < 0):
        raise InvalidParameterError("thresholds must be sorted ascending")
    running = cumulative_simpson(dist.density, x=t, initial=0.0)
    cdf = CubicHermiteSpline(t, running, dist.density)
    values = running[-1] - cdf(np.minimum(thr, t[-1]))
    values[thr >= t[-1]] = 0.0
    return TailCurve(dist.kind, thr, values)


def default_thresholds(t_max: float, n: int = 200) -> np.ndarray:
    return np.linspace(0.0, t_max, n)


@dataclass
class ComparisonReport:
    """Pairwise tail deviations.

    ``per_threshold_deviation`` is the largest |tail_A - tail_B| over all pairs
    at each threshold; ``pair`` names the pair attaining ``global_max``.
    """

    pair: tuple[str, str]
    thresholds: list[float]
    per_threshold_deviation: list[float]
    global_max: float
    agreement_flag: bool
    tolerance: float
    pairwise_max: dict[str, float] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "pair": list(self.pair),
            "per_threshold_deviation": self.per_threshold_deviation,
            "global_max": self.global_max,
            "agreement_flag": self.agreement_flag,
            "tolerance": self.tolerance,
            "thresholds": self.thresholds,
            "pairwise_max": self.pairwise_max,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"


def compare_tails(curves, tolerance: float = DEFAULT_TOLERANCE) -> ComparisonReport:
    curves = list(curves)
    if not curves:
        raise InvalidParameterError("need at least one curve")
    thr = curves[0].thresholds
    for c in curves[1:]:
        if c.thresholds.shape != thr.shape or not np.array_equal(c.thresholds, thr):
            raise InvalidParameterError("all curves must share the same thresholds")
    per = np.zeros(thr.shape)
    best, best_pair = 0.0, (curves[0].kind.value, curves[0].kind.value)
    pairwise = {}
    for a, b in itertools.combinations(curves, 2):
        dev = np.abs(a.values - b.values)
        per = np.maximum(per, dev)
        m = float(dev.max()) if dev.size else 0.0
        pairwise[f"{a.kind.value}-{b.kind.value}"] = m
        if m > best:
            best, best_pair = m, (a.kind.value, b.kind.value)
    return ComparisonReport(
        pair=best_pair,
        thresholds=[float(x) for x in thr],
        per_threshold_deviation=[float(x) for x in per],
        global_max=best,
        agreement_flag=bool(best < tolerance),
        tolerance=float(tolerance),
        pairwise_max=pairwise,
    )


def qc_found_probability(packet: WavePacketSpec, det: DetectorSpec, t_stop: float,
                         n_intervals: int = 4000) -> float:
    """Chance that a clock read uniformly on [0, T] finds the particle inside the detector."""
    if not t_stop > 0:
        raise InvalidParameterError("t_stop must be positive")
    if det.width == 0:
        return 0.0
    t = np.linspace(0.0, t_stop, n_intervals + 1)
    return float(simpson(qc_raw(packet, det, t), x=t) / t_stop)


def qc_not_found_probability(packet: WavePacketSpec, det: DetectorSpec, t_stop: float,
                             n_intervals: int = 4000) -> float:
    return 1.0 - qc_found_probability(packet, det, t_stop, n_intervals)


# ------------------------------------------------------------------ classical


def _exact(x) -> Fraction:
    if isinstance(x, Rational):
        return Fraction(x)
    if isinstance(x, float):
        if not math.isfinite(x):
            raise InvalidParameterError(f"non-finite duration {x}")
        return Fraction(repr(x))
    if isinstance(x, str):
        return Fraction(x)
    raise InvalidParameterError(f"cannot interpret {x!r} as a duration")


@dataclass(frozen=True)
class ClassicalScenario:
    """A particle sitting at the detector for ``dwell`` inside an observation of ``duration``."""

    dwell: Fraction
    duration: Fraction
    contains_dwell: bool = True

    def __init__(self, dwell, duration, contains_dwell: bool = True):
        d, T = _exact(dwell), _exact(duration)
        if d <= 0 or T <= 0:
            raise InvalidParameterError("dwell and duration must be positive")
        object.__setattr__(self, "dwell", d)
        object.__setattr__(self, "duration", T)
        object.__setattr__(self, "contains_dwell", bool(contains_dwell))


def classical_found_probability(s: ClassicalScenario) -> Fraction:
    if not s.contains_dwell:
        raise UnsupportedScenarioError("only windows that contain the whole dwell period are modeled")
    return min(s.dwell / s.duration, Fraction(1))


def classical_not_found_probability(s: ClassicalScenario) -> Fraction:
    return 1 - classical_found_probability(s)
