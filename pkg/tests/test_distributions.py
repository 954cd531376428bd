import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad, simpson

from toa_lab import (
    DegenerateNormalizationError,
    DetectorSpec,
    DistributionKind,
    InvalidParameterError,
    ObservationWindow,
    TimeGrid,
    UndefinedMapError,
    WavePacketSpec,
    qc_normalization_constant,
    sample_flux,
    sample_kijowski,
    sample_qc,
    sample_semiclassical,
)
from toa_lab.distributions import flux_raw, kijowski_raw, qc_raw, semiclassical_raw, simpson_weights
from toa_lab.packets import momentum_density, psi_momentum, psi_position

FLIGHT = 10 / 7


def right_movers_by_quadrature(spec):
    # brute-force momentum quadrature, independent of the closed-form ndtr
    p = np.linspace(0.0, max(spec.p0, 0) + 12 / spec.sigma0, 20001)
    return simpson(momentum_density(spec, p), x=p)


@pytest.fixture(scope="module")
def fig1_all():
    pk, det = WavePacketSpec(-10, 7, 1), DetectorSpec(0, 0)
    grid = TimeGrid(5.0, 2000)
    return {
        "QC": sample_qc(pk, det, ObservationWindow(5.0, 50.0), grid),
        "K": sample_kijowski(pk, det, grid),
        "F": sample_flux(pk, det, grid),
        "SC": sample_semiclassical(pk, det, grid),
    }


def test_exactly_four_kinds():
    assert [k.value for k in DistributionKind] == ["QC", "K", "F", "SC"]


def test_time_grid_nodes():
    g = TimeGrid(5.0, 2000)
    assert g.dt == 0.0025
    assert g.times[0] == 0.0 and g.times[-1] == 5.0 and len(g.times) == 2001
    with pytest.raises(InvalidParameterError):
        TimeGrid(5.0, 1)
    with pytest.raises(InvalidParameterError):
        TimeGrid(-1.0, 10)


def test_simpson_weights_integrate_cubic():
    x = np.linspace(0, 2, 11)
    assert simpson_weights(x) @ x**3 == pytest.approx(4.0, rel=1e-14)


# ------------------------------------------------------------------ QC


def test_qc_peaks_at_flight_time(fig1_all):
    qc = fig1_all["QC"]
    assert abs(qc.argmax() - FLIGHT) < 0.1
    assert qc.normalization_window == 50.0


def test_qc_self_normalized_when_window_is_grid(fig1_packet, point_detector):
    grid = TimeGrid(5.0, 2000)
    qc = sample_qc(fig1_packet, point_detector, ObservationWindow(5.0, 5.0), grid)
    assert qc.mass() == pytest.approx(1.0, abs=1e-6)


def test_qc_unreachable_detector(fig1_packet, fig1_window, fig1_grid):
    with pytest.raises(DegenerateNormalizationError) as err:
        sample_qc(fig1_packet, DetectorSpec(1000.0), fig1_window, fig1_grid)
    assert err.value.kind == "QC"


def test_qc_grid_past_window(fig1_packet, point_detector):
    with pytest.raises(InvalidParameterError):
        sample_qc(fig1_packet, point_detector, ObservationWindow(5.0, 5.0), TimeGrid(6.0, 100))


def test_qc_positive(fig1_all):
    assert np.all(fig1_all["QC"].raw >= 0)


def test_normalization_constant_grows_for_resting_packet():
    pk, det = WavePacketSpec(0, 0, 1), DetectorSpec(0, 0)
    n10, n100, n1000 = (qc_normalization_constant(pk, det, T) for T in (10, 100, 1000))
    assert n10 < n100 < n1000


@pytest.mark.parametrize("t_prime", [1.0, 3.0, 10.0, 50.0])
def test_normalization_constant_halving(fig1_packet, point_detector, t_prime):
    full = qc_normalization_constant(fig1_packet, point_detector, t_prime)
    half = qc_normalization_constant(fig1_packet, point_detector, t_prime / 2)
    assert full - half >= 0


def test_normalization_constant_refinement(fig1_packet, point_detector):
    from toa_lab.distributions import _qc_intervals

    n = _qc_intervals(fig1_packet, 50.0)
    base = qc_normalization_constant(fig1_packet, point_detector, 50.0)
    fine = qc_normalization_constant(fig1_packet, point_detector, 50.0, n_intervals=2 * n)
    assert base == pytest.approx(fine, abs=1e-8)
    # and against adaptive quadrature
    ref, _ = quad(lambda t: float(qc_raw(fig1_packet, point_detector, t)), 0, 50, points=[FLIGHT], limit=200)
    assert base == pytest.approx(ref, abs=1e-8)


def test_qc_finite_width_detector(fig1_packet, fig1_window, fig1_grid):
    qc = sample_qc(fig1_packet, DetectorSpec(0.0, 0.5), fig1_window, fig1_grid)
    assert abs(qc.argmax() - FLIGHT) < 0.1
    assert np.all(np.isfinite(qc.density))


# ------------------------------------------------------------------ flux


def test_flux_no_backflow(fig1_packet, point_detector):
    t = np.linspace(0, 5, 5001)
    assert flux_raw(fig1_packet, point_detector, t).min() > -1e-8


def test_flux_zero_at_symmetric_center():
    pk = WavePacketSpec(3.0, 0.0, 1.0)
    det = DetectorSpec(3.0)
    assert np.all(flux_raw(pk, det, np.linspace(0, 5, 51)) == 0)
    with pytest.raises(DegenerateNormalizationError) as err:
        sample_flux(pk, det, TimeGrid(5.0, 100))
    assert err.value.kind == "F"


def test_flux_matches_finite_difference(fig1_packet, point_detector):
    t = np.linspace(0, 5, 501)
    h = 1e-5
    psi = psi_position(fig1_packet, 0.0, t)
    d = (psi_position(fig1_packet, h, t) - psi_position(fig1_packet, -h, t)) / (2 * h)
    fd = np.imag(np.conj(psi) * d)
    assert np.max(np.abs(fd - flux_raw(fig1_packet, point_detector, t))) < 1e-6


# -------------------------------------------------------------- Kijowski


def test_kijowski_mass_identity(fig1_packet, point_detector):
    t = np.linspace(0, 8, 8001)
    raw = kijowski_raw(fig1_packet, point_detector, t)
    assert raw[-1] < 1e-12
    assert simpson(raw, x=t) == pytest.approx(right_movers_by_quadrature(fig1_packet), abs=1e-6)


def test_kijowski_peak_near_flux_peak(fig1_all):
    assert abs(fig1_all["K"].argmax() - fig1_all["F"].argmax()) < 0.1


def test_kijowski_left_mover_vanishes(point_detector):
    pk = WavePacketSpec(-10, -7, 1)
    raw = kijowski_raw(pk, point_detector, np.linspace(0, 5, 201))
    assert raw.max() <= 1e-30


def test_kijowski_graded_mesh_for_slow_packet():
    # substantial amplitude at p = 0 triggers the graded mesh; compare with adaptive quadrature
    pk, det = WavePacketSpec(-3, 1.0, 1), DetectorSpec(0.5)

    def amp(t):
        f = lambda p: np.sqrt(p) * psi_momentum(pk, p) * np.exp(1j * p * det.position - 0.5j * p * p * t)
        re, _ = quad(lambda p: f(p).real, 0, 11, limit=400)
        im, _ = quad(lambda p: f(p).imag, 0, 11, limit=400)
        return (re * re + im * im) / (2 * np.pi)

    t = np.array([0.0, 1.0, 3.5, 10.0, 40.0])
    got = kijowski_raw(pk, det, t)
    ref = np.array([amp(x) for x in t])
    assert np.allclose(got, ref, rtol=1e-7, atol=1e-12)


# ---------------------------------------------------------- semi-classical


def test_semiclassical_mass_identity(fig1_packet, point_detector):
    t = np.linspace(0, 12, 24001)
    ref = right_movers_by_quadrature(fig1_packet)
    for model in ("phase_space", "momentum_map"):
        raw = semiclassical_raw(fig1_packet, point_detector, t, model)
        assert simpson(raw, x=t) == pytest.approx(ref, abs=1e-6)


def test_semiclassical_phase_space_matches_direct_quadrature():
    pk, det = WavePacketSpec(-4, 1.5, 0.7), DetectorSpec(0.5)
    p = np.linspace(-15, 20, 70001)
    for t in (0.0, 0.7, 2.0, 6.0):
        integrand = np.abs(p) * momentum_density(pk, p) * np.abs(psi_position(pk, det.position - p * t, 0.0)) ** 2
        ref = simpson(integrand, x=p)
        assert float(semiclassical_raw(pk, det, t)) == pytest.approx(ref, rel=1e-9, abs=1e-15)


def test_momentum_map_mode(fig1_packet, point_detector):
    grid = TimeGrid(5.0, 2000)
    sc = sample_semiclassical(fig1_packet, point_detector, grid, model="momentum_map")
    # direct argmax oracle over p of p^2 |psi~(p)|^2 on a fine mesh
    p = np.linspace(5, 9, 400001)
    p_star = p[np.argmax(p**2 * momentum_density(fig1_packet, p))]
    assert sc.argmax() == pytest.approx(10 / p_star, abs=grid.dt)
    assert abs(sc.argmax() - FLIGHT) < 0.1


def test_phase_space_mode(fig1_all):
    assert abs(fig1_all["SC"].argmax() - FLIGHT) < 0.1


def test_momentum_map_undefined_at_center():
    pk = WavePacketSpec(0, 1, 1)
    with pytest.raises(UndefinedMapError):
        sample_semiclassical(pk, DetectorSpec(0.0), TimeGrid(5.0, 10), model="momentum_map")


def test_momentum_map_left_detector():
    # detector on the left is reached by negative momenta
    pk, det = WavePacketSpec(10, -7, 1), DetectorSpec(0)
    t = np.linspace(0, 12, 24001)
    raw = semiclassical_raw(pk, det, t, "momentum_map")
    assert simpson(raw, x=t) == pytest.approx(1.0, abs=1e-6)


def test_unknown_model(fig1_packet, point_detector):
    with pytest.raises(InvalidParameterError):
        semiclassical_raw(fig1_packet, point_detector, 1.0, "bohmian")


# ----------------------------------------------------------- invariants


def test_every_distribution_is_normalized(fig1_all):
    for name, d in fig1_all.items():
        assert np.all(np.isfinite(d.density))
        if name == "QC":
            # all of the QC mass inside [0, T'] lies within the sampled range here
            assert d.mass() == pytest.approx(1.0, abs=1e-6)
        else:
            assert d.mass() == pytest.approx(1.0, abs=1e-6)
            assert d.normalization_window == 5.0


@pytest.mark.parametrize("kind", ["QC", "K", "F", "SC"])
def test_grid_refinement_stability(fig1_packet, point_detector, fig1_window, kind):
    from toa_lab import sample

    coarse = sample(kind, fig1_packet, point_detector, fig1_window, TimeGrid(5.0, 2000))
    fine = sample(kind, fig1_packet, point_detector, fig1_window, TimeGrid(5.0, 4000))
    assert np.max(np.abs(fine.density[::2] - coarse.density)) < 1e-4


def test_kfsc_pairwise_l1_close(fig1_all):
    t = fig1_all["K"].times
    for a, b in (("K", "F"), ("K", "SC"), ("F", "SC")):
        l1 = simpson(np.abs(fig1_all[a].density - fig1_all[b].density), x=t)
        assert l1 < 0.05


@settings(max_examples=12, deadline=None)
@given(
    x0=st.floats(-15, -3),
    p0=st.floats(2, 10),
    sigma0=st.floats(0.5, 2),
)
def test_normalization_property(x0, p0, sigma0):
    pk, det = WavePacketSpec(x0, p0, sigma0), DetectorSpec(0.0)
    grid = TimeGrid(20.0, 4000)
    for d in (sample_flux(pk, det, grid), sample_semiclassical(pk, det, grid), sample_kijowski(pk, det, grid)):
        assert d.mass() == pytest.approx(1.0, abs=1e-6)
    qc = sample_qc(pk, det, ObservationWindow(20.0, 20.0), grid)
    assert qc.mass() == pytest.approx(1.0, abs=1e-6)
    assert np.all(qc.raw >= 0)
