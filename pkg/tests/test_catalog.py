import math

import numpy as np
import pytest

from semitoric.catalog import (CoupledAngularMomenta, CoupledSpinOscillator,
                               TwoFocusFamily, cam_transition_times,
                               cam_upper_time_at_boundary,
                               hirzebruch_toric_polygon,
                               hirzebruch_transition_times, make_system)
from semitoric.errors import ManifoldMismatchError, NearDegenerateError
from semitoric.phasespace import PhasePoint


def test_evaluate_at_poles():
    cam = CoupledAngularMomenta(1.0, 1.5, 0.37)
    p = PhasePoint(cam.manifold, [0, 0, 1, 0, 0, -1])
    L, H = cam.evaluate(p)
    assert L == 0.0
    assert abs(H) < 1e-15  # (1-t) - t + 2t - 1 = 0
    cso = CoupledSpinOscillator(1.0, 1.0)
    p = PhasePoint(cso.manifold, [0, 0, 1, 0, 0])
    assert cso.evaluate(p) == (0.0, 0.0)


def test_manifold_mismatch():
    cam = CoupledAngularMomenta(1.0, 1.5, 0.37)
    cso = CoupledSpinOscillator(1.0, 1.0)
    p = PhasePoint(cso.manifold, [0, 0, 1, 0, 0])
    with pytest.raises(ManifoldMismatchError):
        cam.evaluate(p)


def test_gradients_match_finite_differences():
    rng = np.random.default_rng(0)
    for system in (CoupledSpinOscillator(1.0, 1.3),
                   CoupledAngularMomenta(1.0, 1.5, 0.4),
                   TwoFocusFamily(1.0, 2.0, 0.3, 0.6)):
        for obs in (system.L, system.H):
            for _ in range(10):
                p = system.manifold.random_point(rng)
                g = obs.gradient(p)
                h = 1e-6
                for i in range(system.manifold.dim):
                    cp, cm = p.coords.copy(), p.coords.copy()
                    cp[i] += h
                    cm[i] -= h
                    cp2, cm2 = p.coords.copy(), p.coords.copy()
                    cp2[i] += 2 * h
                    cm2[i] -= 2 * h
                    fd = (-obs._value(cp2) + 8 * obs._value(cp)
                          - 8 * obs._value(cm) + obs._value(cm2)) / (12 * h)
                    assert abs(fd - g[i]) < 1e-7


def test_hessians_match_finite_differences():
    rng = np.random.default_rng(1)
    for system in (CoupledSpinOscillator(1.0, 1.3),
                   CoupledAngularMomenta(1.0, 1.5, 0.4)):
        for obs in (system.L, system.H):
            p = system.manifold.random_point(rng)
            H = obs.hessian(p)
            h = 1e-5
            for i in range(system.manifold.dim):
                cp, cm = p.coords.copy(), p.coords.copy()
                cp[i] += h
                cm[i] -= h
                fd_row = (obs._gradient(cp) - obs._gradient(cm)) / (2 * h)
                assert np.abs(fd_row - H[i]).max() < 1e-8


def test_two_focus_reduces_to_cam():
    # at s1 = t, s2 = 0: H - CAM H = -(2t-1), L - CAM L = R1 - R2, to machine precision
    rng = np.random.default_rng(2)
    R1, R2, t = 1.0, 2.0, 0.41
    tf = TwoFocusFamily(R1, R2, s1=t, s2=0.0)
    cam = CoupledAngularMomenta(R1, R2, t)
    for _ in range(50):
        p = tf.manifold.random_point(rng)
        q = PhasePoint(cam.manifold, p.coords)
        Ltf, Htf = tf.evaluate(p)
        Lc, Hc = cam.evaluate(q)
        assert abs(Htf - (Hc - (2 * t - 1))) < 1e-14
        assert abs(Ltf - (Lc + (R1 - R2))) < 1e-14


def test_cam_transition_times_frozen_values():
    # substituted by hand into t_pm = R2/(2 R2 + R1 -/+ 2 sqrt(R1 R2))
    tm, tp = cam_transition_times(1.0, 1.0)
    assert abs(tm - 0.2) < 1e-14
    assert abs(tp - 1.0) < 1e-14
    tm, tp = cam_transition_times(1.0, 1.5)
    assert abs(tm - 0.2325765385825233) < 1e-13
    assert abs(tp - 0.9674234614174766) < 1e-13


def test_cam_transition_times_ordering_and_bounds():
    rng = np.random.default_rng(3)
    for _ in range(200):
        R1, R2 = rng.uniform(0.1, 10.0, size=2)
        tm, tp = cam_transition_times(R1, R2)
        assert 0.0 < tm < tp
        assert tp <= 1.0 + 1e-12 or abs(R1 - R2) < 1e-12
        assert cam_upper_time_at_boundary(R1, R2) == (tp >= 1.0)
    with pytest.raises(ValueError):
        cam_transition_times(-1.0, 1.0)


def test_rd_squared_two_expressions_agree():
    # r_D^2 = -R2^2 (1-2t)^2 + 2 R1 R2 t - R1^2 t^2 = (R1^2+4R2^2)(t-t-)(t+-t)
    rng = np.random.default_rng(4)
    for _ in range(100):
        R1, R2 = rng.uniform(0.2, 4.0, size=2)
        tm, tp = cam_transition_times(R1, R2)
        t = rng.uniform(tm, tp)
        direct = -R2 ** 2 * (1 - 2 * t) ** 2 + 2 * R1 * R2 * t - R1 ** 2 * t ** 2
        factored = (R1 ** 2 + 4 * R2 ** 2) * (t - tm) * (tp - t)
        assert abs(direct - factored) < 1e-10 * max(1.0, abs(direct))
    # frozen spot value
    tm, tp = cam_transition_times(1.0, 2.0)
    rd2 = (1.0 + 16.0) * (0.5 - tm) * (tp - 0.5)
    assert abs(rd2 - 1.75) < 1e-12


def test_near_degenerate_guard():
    tm, tp = cam_transition_times(1.0, 1.5)
    CoupledAngularMomenta(1.0, 1.5, tm + 1e-3).check_not_near_degenerate()
    with pytest.raises(NearDegenerateError):
        CoupledAngularMomenta(1.0, 1.5, tm + 1e-7).check_not_near_degenerate()
    with pytest.raises(NearDegenerateError):
        CoupledAngularMomenta(1.0, 1.5, tp).check_not_near_degenerate()


def test_hirzebruch_transition_times():
    # W1 with gamma*sqrt(2 beta) = 1/4, substituted by hand
    tm, tp = hirzebruch_transition_times("W1", 1.0, 0.5, 0.25)
    assert abs(tm - 0.4) < 1e-14
    assert abs(tp - 2.0 / 3.0) < 1e-14
    # W2 with nu = 1, c = 1/2
    tm, tp = hirzebruch_transition_times("W2", 1.0, 1.0, 0.25)
    assert abs(tm - 2.0 / 3.0) < 1e-14
    assert abs(tp - 6.0 / 7.0) < 1e-14
    # gamma -> 0+: both limits are 1/2
    tm, tp = hirzebruch_transition_times("W1", 1.0, 0.5, 1e-9)
    assert abs(tm - 0.5) < 1e-8
    assert abs(tp - 0.5) < 1e-8
    for kind in ("W1", "W2"):
        a, b = (1.0, 0.5) if kind == "W1" else (1.0, 1.0)
        lo_g = 1e-6
        tm, tp = hirzebruch_transition_times(kind, a, b, lo_g)
        assert 0.0 < tm < tp < 1.0
    with pytest.raises(ValueError):
        hirzebruch_transition_times("W1", 1.0, 0.5, 2.0)
    with pytest.raises(ValueError):
        hirzebruch_transition_times("W3", 1.0, 0.5, 0.1)


def test_hirzebruch_toric_polygon():
    assert hirzebruch_toric_polygon(0, 2.0, 1.0) == [
        (0.0, 0.0), (2.0, 0.0), (2.0, 1.0), (0.0, 1.0)]
    assert hirzebruch_toric_polygon(1, 1.0, 1.0) == [
        (0.0, 0.0), (2.0, 0.0), (1.0, 1.0), (0.0, 1.0)]
    assert hirzebruch_toric_polygon(2, 1.0, 0.5) == [
        (0.0, 0.0), (2.0, 0.0), (1.0, 0.5), (0.0, 0.5)]
    with pytest.raises(ValueError):
        hirzebruch_toric_polygon(-1, 1.0, 1.0)


def test_make_system_factory():
    s = make_system("cam", R1=1.0, R2=2.0, t=0.3)
    assert isinstance(s, CoupledAngularMomenta)
    with pytest.raises(ValueError):
        make_system("cam", R1=1.0, bogus=2.0)
    with pytest.raises(ValueError):
        make_system("unknown")
    with pytest.raises(ValueError):
        make_system("twoff", R1=2.0, R2=1.0)  # needs R1 < R2


def test_parameter_validation():
    with pytest.raises(ValueError):
        CoupledSpinOscillator(0.0, 1.0)
    with pytest.raises(ValueError):
        CoupledAngularMomenta(1.0, -1.0, 0.5)
    with pytest.raises(ValueError):
        TwoFocusFamily(1.0, 2.0, 1.2, 0.0)
    # degenerate couplings are legal inputs; classification happens downstream
    TwoFocusFamily(1.0, 2.0, 0.0, 0.0)
    CoupledAngularMomenta(1.0, 1.0, 0.2)  # t- exactly; construction must not raise
