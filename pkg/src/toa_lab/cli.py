"""``toa-lab`` command line front end."""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import oracle
from .distributions import DistributionKind, TimeGrid, sample
from .errors import ConfigError, DegenerateNormalizationError, InvalidParameterError, ToaLabError
from .output import render_svg, write_csv
from .packets import DetectorSpec, ObservationWindow, WavePacketSpec
from .tails import (
    DEFAULT_TOLERANCE,
    ClassicalScenario,
    classical_found_probability,
    classical_not_found_probability,
    compare_tails,
    default_thresholds,
    tail_curve,
)

ALL_KINDS = (DistributionKind.QC, DistributionKind.K, DistributionKind.F, DistributionKind.SC)
QC_WINDOW_DRIFT_LIMIT = 1e-3
N_THRESHOLDS = 200

# name -> (type, default); None means "derived"
FIELDS = {
    "x0": (float, -10.0),
    "p0": (float, 7.0),
    "sigma0": (float, 1.0),
    "detector": (float, 0.0),
    "det_width": (float, 0.0),
    "t_max": (float, 5.0),
    "t_prime": (float, None),
    "samples": (int, 2000),
    "tolerance": (float, DEFAULT_TOLERANCE),
    "kinds": (list, ["QC", "K", "F", "SC"]),
    "out": (str, "toa_out"),
}


@dataclass
class ScenarioConfig:
    packet: WavePacketSpec = field(default_factory=WavePacketSpec)
    detector: DetectorSpec = field(default_factory=DetectorSpec)
    window: ObservationWindow = field(default_factory=ObservationWindow)
    grid: TimeGrid = field(default_factory=TimeGrid)
    kinds: tuple[DistributionKind, ...] = ALL_KINDS
    tolerance: float = DEFAULT_TOLERANCE
    output_dir: Path = Path("toa_out")


def _coerce(name: str, value):
    typ = FIELDS[name][0]
    if typ is list:
        if isinstance(value, str):
            value = [v for v in value.replace(",", " ").split() if v]
        if not isinstance(value, (list, tuple)):
            raise ConfigError("expected a list of distribution kinds", field=name)
        try:
            kinds = tuple(DistributionKind(str(v).upper()) for v in value)
        except ValueError as exc:
            raise ConfigError(str(exc), field=name) from None
        if not kinds:
            raise ConfigError("at least one kind is required", field=name)
        # canonical order, no duplicates
        return tuple(k for k in ALL_KINDS if k in kinds)
    if typ is int:
        if isinstance(value, bool) or (isinstance(value, float) and not value.is_integer()):
            raise ConfigError(f"expected an integer, got {value!r}", field=name)
        try:
            return int(value)
        except (TypeError, ValueError):
            raise ConfigError(f"expected an integer, got {value!r}", field=name) from None
    if typ is float:
        if isinstance(value, bool):
            raise ConfigError(f"expected a number, got {value!r}", field=name)
        try:
            v = float(value)
        except (TypeError, ValueError):
            raise ConfigError(f"expected a number, got {value!r}", field=name) from None
        if not math.isfinite(v):
            raise ConfigError(f"expected a finite number, got {value!r}", field=name)
        return v
    return str(value)


def _load_file(path) -> dict:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc.strerror or exc}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"malformed JSON in {path}: {exc.msg} (column {exc.colno})", line=exc.lineno) from None
    if not isinstance(data, dict):
        raise ConfigError(f"{path} must hold a flat JSON object")
    for key, value in data.items():
        if key not in FIELDS:
            raise ConfigError(f"unknown key in {path}", field=key)
        if isinstance(value, dict):
            raise ConfigError("nested objects are not allowed; use a flat object", field=key)
    return data


def parse_config(file=None, overrides: dict | None = None, env=None) -> ScenarioConfig:
    """Merge defaults < config file < flag overrides < TOA_LAB_OUT, then validate."""
    values = {name: spec[1] for name, spec in FIELDS.items()}
    if file is not None:
        values.update(_load_file(file))
    for k, v in (overrides or {}).items():
        if v is not None:
            if k not in FIELDS:
                raise ConfigError("unknown option", field=k)
            values[k] = v
    env = os.environ if env is None else env
    if env.get("TOA_LAB_OUT"):
        values["out"] = env["TOA_LAB_OUT"]

    v = {k: (_coerce(k, val) if val is not None else None) for k, val in values.items()}
    if v["t_prime"] is None:
        v["t_prime"] = 10.0 * v["t_max"]

    def build(name, fn):
        try:
            return fn()
        except InvalidParameterError as exc:
            raise ConfigError(str(exc), field=name) from None

    packet = build("sigma0" if v["sigma0"] <= 0 else "x0",
                   lambda: WavePacketSpec(v["x0"], v["p0"], v["sigma0"]))
    detector = build("det_width", lambda: DetectorSpec(v["detector"], v["det_width"]))
    grid = build("t_max" if v["t_max"] <= 0 else "samples", lambda: TimeGrid(v["t_max"], v["samples"]))
    window = build("t_prime", lambda: ObservationWindow(v["t_max"], v["t_prime"]))
    if not v["tolerance"] > 0:
        raise ConfigError("tolerance must be positive", field="tolerance")
    return ScenarioConfig(packet, detector, window, grid, v["kinds"], v["tolerance"], Path(v["out"]))


# ------------------------------------------------------------------ runners


def compute_densities(cfg: ScenarioConfig, grid: TimeGrid | None = None, window: ObservationWindow | None = None):
    grid = grid or cfg.grid
    window = window or cfg.window
    return {k: sample(k, cfg.packet, cfg.detector, window, grid) for k in cfg.kinds}


def _density_rows(dists, grid):
    cols = [d.density for d in dists.values()]
    return [[t, *(c[i] for c in cols)] for i, t in enumerate(grid.times)]


def _tails(dists, t_max):
    thr = default_thresholds(t_max, N_THRESHOLDS)
    return thr, {k: tail_curve(d, thr) for k, d in dists.items()}


def run_fig1(cfg: ScenarioConfig, *, write_densities=True, write_tails=True, log=print) -> int:
    """Compute the four densities and their tails, write artifacts, return the exit status."""
    out = cfg.output_dir
    dists = compute_densities(cfg)
    thr, tails = _tails(dists, cfg.grid.t_max)
    report = compare_tails(tails.values(), cfg.tolerance)

    checks = {}
    if DistributionKind.QC in dists:
        # doubling T' must not move the QC tail: the window is "long enough"
        wide = ObservationWindow(cfg.window.t_stop, 2.0 * cfg.window.normalization_stop)
        qc_wide = sample(DistributionKind.QC, cfg.packet, cfg.detector, wide, cfg.grid)
        drift = float(np.max(np.abs(tail_curve(qc_wide, thr).values - tails[DistributionKind.QC].values)))
        checks["qc_window_drift"] = drift
        checks["qc_window_ok"] = drift < QC_WINDOW_DRIFT_LIMIT

    if write_densities:
        header = ["t"] + [f"pi_{k.column}" for k in dists]
        write_csv(out / "densities.csv", header, _density_rows(dists, cfg.grid))
    if write_tails:
        header = ["T"] + [f"tail_{k.column}" for k in tails]
        rows = [[T, *(c.values[i] for c in tails.values())] for i, T in enumerate(thr)]
        write_csv(out / "tails.csv", header, rows)
        payload = report.to_dict()
        payload["checks"] = checks
        (out / "report.json").write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")
        render_svg(
            out / "fig1.svg",
            {f"tail {k.value}": (thr, c.values) for k, c in tails.items()},
            title="Probability of arrival after T",
            xlabel="T  [1/omega]",
            ylabel="tail probability",
        )

    ok = report.agreement_flag and all(v for k, v in checks.items() if k.endswith("_ok"))
    log(f"max pairwise tail deviation {report.global_max:.3e} ({report.pair[0]} vs {report.pair[1]}), "
        f"tolerance {report.tolerance:g}: {'agree' if report.agreement_flag else 'DISAGREE'}")
    for k, v in checks.items():
        log(f"{k}: {v}")
    return 0 if ok else 1


def run_densities(cfg: ScenarioConfig) -> int:
    dists = compute_densities(cfg)
    header = ["t"] + [f"pi_{k.column}" for k in dists]
    write_csv(cfg.output_dir / "densities.csv", header, _density_rows(dists, cfg.grid))
    return 0


def run_classical(tau, durations, output_dir) -> Path:
    rows = []
    for T in durations:
        s = ClassicalScenario(tau, T)
        rows.append([float(s.duration), classical_found_probability(s), classical_not_found_probability(s)])
    return write_csv(Path(output_dir) / "classical.csv", ["T", "p_found", "p_not_found"], rows)


def run_oracle_check(log=print, tol: float = 1e-8, unitary_tol: float = 1e-10) -> int:
    ok = True
    for spec, t, dev, drift in oracle.oracle_matrix():
        good = dev < tol and drift < unitary_tol
        ok &= good
        log(f"{'PASS' if good else 'FAIL'} x0={spec.x0:g} p0={spec.p0:g} sigma0={spec.sigma0:g} "
            f"t={t:.6g}: max|dpsi|={dev:.2e} norm drift={drift:.1e}")
    return 0 if ok else 1


# --------------------------------------------------------------------- main


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="toa-lab", description="Quantum time-of-arrival distributions for a free Gaussian packet.")
    sub = p.add_subparsers(dest="cmd", required=True)

    def scenario(name, help_):
        s = sub.add_parser(name, help=help_)
        s.add_argument("--config", type=str, default=None, help="flat JSON file with scenario fields")
        s.add_argument("--x0", type=float)
        s.add_argument("--p0", type=float)
        s.add_argument("--sigma0", type=float)
        s.add_argument("--detector", type=float, help="detector position D")
        s.add_argument("--det_width", type=float, help="detector width (0 = point detector)")
        s.add_argument("--t_max", type=float, help="sampled time range and stop time T")
        s.add_argument("--t_prime", type=float, help="QC normalization period T' (default 10 * t_max)")
        s.add_argument("--samples", type=int, help="number of time intervals")
        s.add_argument("--tolerance", type=float, help="agreement tolerance on tail deviations")
        s.add_argument("--kinds", type=str, help="comma separated subset of QC,K,F,SC")
        s.add_argument("--out", type=str, help="output directory (TOA_LAB_OUT overrides)")
        return s

    scenario("fig1", "densities, tails, comparison report and SVG chart")
    scenario("densities", "write densities.csv only")
    scenario("tails", "write tails.csv and report.json")

    c = sub.add_parser("classical", help="classical dwell-time probabilities")
    c.add_argument("--tau", type=str, default="1", help="dwell time at the detector")
    c.add_argument("--durations", type=str, nargs="+", default=["1", "10", "30"])
    c.add_argument("--out", type=str, default="toa_out")

    sub.add_parser("oracle-check", help="analytic vs spectral propagation cross-check")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.cmd == "oracle-check":
            return run_oracle_check()
        if args.cmd == "classical":
            out = os.environ.get("TOA_LAB_OUT") or args.out
            path = run_classical(args.tau, args.durations, out)
            print(f"wrote {path}")
            return 0
        overrides = {k: getattr(args, k) for k in FIELDS if hasattr(args, k)}
        cfg = parse_config(args.config, overrides)
        if args.cmd == "densities":
            return run_densities(cfg)
        if args.cmd == "tails":
            return run_fig1(cfg, write_densities=False)
        return run_fig1(cfg)
    except ConfigError as exc:
        print(f"toa-lab: config error: {exc}", file=sys.stderr)
        return 2
    except DegenerateNormalizationError as exc:
        print(f"toa-lab: degenerate normalization for {exc.kind}: {exc}", file=sys.stderr)
        return 3
    except (ToaLabError, OSError, ValueError) as exc:
        print(f"toa-lab: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
