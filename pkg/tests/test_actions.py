import numpy as np
import pytest

from semitoric.catalog import CoupledAngularMomenta, CoupledSpinOscillator
from semitoric.errors import FiberRangeError
from semitoric.invariants import action_sample, reconstruct_action_flow
from semitoric.normalform import focus_focus_normal_form
from semitoric.reduced import (area_action, area_action_derivatives,
                               reduced_level, return_times)
from semitoric.singularities import FOCUS_FOCUS, count_focus_focus


def ff_record(system):
    _n, records = count_focus_focus(system, pole_only=True)
    return [r for r in records if r.kind == FOCUS_FOCUS][0]


@pytest.fixture(scope="module")
def cam():
    return CoupledAngularMomenta(1.0, 1.5, 0.5)


@pytest.fixture(scope="module")
def cso():
    return CoupledSpinOscillator(1.0, 1.0)


@pytest.fixture(scope="module")
def cam_nf(cam):
    rec = ff_record(cam)
    *_, emap = focus_focus_normal_form(cam, rec, 6)
    return rec, emap


def test_return_time_matches_area_period(cam, cso):
    # the flow-based period equals 2 pi dI/dh from the sublevel area
    for system, (l, h) in [(cam, (-0.5, 0.3)), (cam, (0.4, 0.35)),
                           (cso, (-0.4, 0.2))]:
        _tau1, tau2 = return_times(system, l, h)
        _Il, Ih = area_action_derivatives(system, l, h)
        assert abs(tau2 - 2 * np.pi * Ih) < 1e-5 * max(1.0, tau2)


def test_tau1_branches_differ_by_multiples_of_two_pi(cam):
    for (l, h) in [(-0.5, 0.3), (-0.8, -0.1), (0.4, 0.35)]:
        tau1, _ = return_times(cam, l, h)
        Il, _ = area_action_derivatives(cam, l, h)
        frac = (2 * np.pi * Il - tau1) / (2 * np.pi)
        assert abs(frac - round(frac)) < 1e-5


def test_oracle_equivalence_two_methods(cam, cso):
    # area-method and return-time-method actions agree at random regular values
    rng = np.random.default_rng(42)
    cases = [
        (cam, (-0.45, 0.05), (-0.8, -0.1), (-0.3, 0.25), 25),
        (cso, (-0.75, 0.15), (-1.2, 0.05), (-0.3, 0.3), 25),
    ]
    for system, ref, lo, hi, n in cases:
        targets = [(rng.uniform(lo[0], hi[0]), rng.uniform(lo[1], hi[1]))
                   for _ in range(n)]
        flow_I = reconstruct_action_flow(system, ref, targets)
        for (l, h), If in zip(targets, flow_I):
            assert abs(If - area_action(system, l, h)) < 1e-6


def test_action_sample_both_methods(cam, cam_nf):
    rec, emap = cam_nf
    s_area = action_sample(cam, -0.5, 0.3, "area", emap=emap, record=rec)
    s_flow = action_sample(cam, -0.5, 0.3, "return-time", emap=emap, record=rec)
    assert s_area.I is not None and s_flow.I is None
    assert abs(s_area.tau2 - s_flow.tau2) < 1e-5
    assert s_area.j == s_flow.j
    with pytest.raises(ValueError):
        action_sample(cam, -0.5, 0.3, "bogus")


def test_action_sample_j_round_trip(cam, cam_nf):
    # j and h consistent under the Eliasson round trip, inside the normal
    # form's accuracy radius
    rec, emap = cam_nf
    lam, eta = rec.critical_value
    for (dl, dh) in [(0.04, 0.02), (-0.03, 0.015), (0.0, 0.03)]:
        s = action_sample(cam, lam + dl, eta + dh, "area", emap=emap, record=rec)
        h_back = float(emap.h_of(dl, s.j)) + eta
        assert abs(h_back - (eta + dh)) < 1e-6


def test_action_monotone_in_h(cam):
    # dI/dh > 0 on a grid of regular values (orientation convention)
    for l in (-0.8, -0.3, 0.5):
        lev = reduced_level(cam, l)
        lo, hi = lev.h_range()
        for h in np.linspace(lo + 0.1 * (hi - lo), hi - 0.1 * (hi - lo), 7):
            _Il, Ih = area_action_derivatives(cam, l, float(h))
            assert Ih > 0


def test_area_vanishes_at_elliptic_end(cam):
    lev = reduced_level(cam, -0.5)
    lo, hi = lev.h_range()
    areas = [lev.area_below(lo + f * (hi - lo)) for f in (1e-3, 1e-4, 1e-5)]
    assert areas[0] > areas[1] > areas[2]
    assert areas[2] < 2e-4 * lev.total_area()


def test_tau2_log_divergence(cam, cam_nf):
    # tau2 ~ (1/beta) * (-ln |j|) approaching the focus-focus value along l = lam
    rec, emap = cam_nf
    lam, eta = rec.critical_value
    beta = emap.beta
    js = np.geomspace(2e-3, 3e-2, 10)
    taus, lnj = [], []
    for j in js:
        h = eta + float(emap.h_of(0.0, float(j)))
        dh = 1e-7
        tau2 = (2 * np.pi * (area_action(cam, lam, h + dh)
                             - area_action(cam, lam, h - dh)) / (2 * dh))
        taus.append(tau2)
        lnj.append(-np.log(j))
    A = np.vstack([lnj, np.ones(len(lnj))]).T
    coef, *_ = np.linalg.lstsq(A, np.array(taus), rcond=None)
    assert abs(coef[0] * beta - 1.0) < 0.05


def test_fiber_errors(cam):
    lev = reduced_level(cam, -0.5)
    lo, hi = lev.h_range()
    with pytest.raises(FiberRangeError):
        lev.fiber_point(hi + 0.5)
    with pytest.raises(FiberRangeError):
        reduced_level(cam, -5.0)


def test_fiber_point_lies_on_fiber(cam, cso):
    rng = np.random.default_rng(7)
    for system in (cam, cso):
        for _ in range(10):
            l = rng.uniform(-0.8, 0.3)
            lev = reduced_level(system, l)
            lo, hi = lev.h_range()
            h = rng.uniform(lo + 0.15 * (hi - lo), hi - 0.15 * (hi - lo))
            p = lev.fiber_point(h)
            L, H = system.evaluate(p)
            assert abs(L - l) < 1e-10
            assert abs(H - h) < 1e-10
