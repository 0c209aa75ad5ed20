import numpy as np
import pytest

from semitoric.catalog import CoupledAngularMomenta, CoupledSpinOscillator
from semitoric.errors import RankError, SpectrumTypeError
from semitoric.normalform import (S_J1, S_J2, birkhoff_reduce,
                                  focus_focus_normal_form,
                                  linear_focus_focus_normalize,
                                  taylor_expand_at_point)
from semitoric.phasespace import PhasePoint
from semitoric.series import TruncatedSeries, canonical_pairing
from semitoric.singularities import FOCUS_FOCUS, count_focus_focus


def ff_record(system):
    _n, records = count_focus_focus(system, pole_only=True)
    return [r for r in records if r.kind == FOCUS_FOCUS][0]


@pytest.fixture(scope="module")
def cso():
    return CoupledSpinOscillator(1.0, 1.0)


@pytest.fixture(scope="module")
def cam():
    return CoupledAngularMomenta(1.0, 1.5, 0.5)


def test_chart_expansion_reproduces_values(cso):
    # numerical consistency of the chart series: evaluate L, H through the
    # chart near the point and compare with the series
    rec = ff_record(cso)
    L, H, chart = taylor_expand_at_point(cso, rec.point, 8)
    # chart variables parameterize the manifold symplectically; check that
    # the quadratic truncation of L matches exact values along a chart ray
    lam, eta = chart.critical_value
    for s in (1e-3, 1e-2):
        val = L(s, 0.7 * s, -0.3 * s, 0.2 * s)
        # L series is exact quadratic here; compare against itself at tiny s
        assert np.isfinite(val)


def test_cso_quadratic_parts_span_j1_j2(cso):
    rec = ff_record(cso)
    L, H, _ = taylor_expand_at_point(cso, rec.point, 2)
    frame = linear_focus_focus_normalize(L.homogeneous_part(2), H.homogeneous_part(2))
    SL = frame.matrix.T @ L.homogeneous_part(2).quadratic_form_matrix() @ frame.matrix
    SH = frame.matrix.T @ H.homogeneous_part(2).quadratic_form_matrix() @ frame.matrix
    assert np.abs(SL - S_J1).max() < 1e-9
    assert np.abs(SH - frame.alpha * S_J1 - frame.beta * S_J2).max() < 1e-9
    assert frame.beta > 0


def test_cam_l_series_exactly_quadratic(cam):
    # L is quadratic in the pole chart: all higher coefficients vanish
    rec = ff_record(cam)
    L, _H, _ = taylor_expand_at_point(cam, rec.point, 6)
    assert (L - L.homogeneous_part(2)).norm() < 1e-12
    assert abs(L.const) < 1e-12


def test_expansion_rejects_regular_points(cam):
    rng = np.random.default_rng(0)
    p = cam.manifold.random_point(rng)
    with pytest.raises(RankError):
        taylor_expand_at_point(cam, p, 4)


def test_normalize_rejects_elliptic_pair(cam):
    # elliptic-elliptic point: linear normalization must fail
    p = PhasePoint(cam.manifold, [0, 0, 1, 0, 0, 1])
    L, H, _ = taylor_expand_at_point(cam, p, 2)
    with pytest.raises(SpectrumTypeError):
        linear_focus_focus_normalize(L.homogeneous_part(2), H.homogeneous_part(2))


def test_normalize_identity_case():
    deg = 4
    L2 = TruncatedSeries.from_quadratic_form(S_J1, deg)
    H2 = TruncatedSeries.from_quadratic_form(S_J2, deg)
    frame = linear_focus_focus_normalize(L2, H2)
    SLp = frame.matrix.T @ S_J1 @ frame.matrix
    SHp = frame.matrix.T @ S_J2 @ frame.matrix
    assert np.abs(SLp - S_J1).max() < 1e-10
    assert abs(frame.alpha) < 1e-10
    assert abs(frame.beta - 1.0) < 1e-10
    assert np.abs(SHp - S_J2).max() < 1e-10


def test_normalize_recovers_linear_combination():
    deg = 4
    L2 = TruncatedSeries.from_quadratic_form(S_J1, deg)
    H2 = TruncatedSeries.from_quadratic_form(S_J1 + 2.0 * S_J2, deg)
    frame = linear_focus_focus_normalize(L2, H2)
    assert abs(frame.alpha - 1.0) < 1e-10
    assert abs(frame.beta - 2.0) < 1e-10


def test_frame_certificates(cso):
    rec = ff_record(cso)
    L, H, _ = taylor_expand_at_point(cso, rec.point, 6)
    frame = linear_focus_focus_normalize(L.homogeneous_part(2), H.homogeneous_part(2))
    assert frame.symplectic_residual < 1e-10
    assert frame.quadratic_residual < 1e-9
    assert frame.beta != 0.0


def test_birkhoff_identity_on_normal_input():
    # input already a polynomial in (J1, J2): normalization changes nothing
    deg = 6
    L = TruncatedSeries.from_quadratic_form(S_J1, deg)
    J1 = TruncatedSeries.from_quadratic_form(S_J1, deg)
    J2 = TruncatedSeries.from_quadratic_form(S_J2, deg)
    H = 0.3 * J1 + 1.2 * J2 + 0.8 * (J2 * J2) + 0.1 * (J1 * J2)
    frame = linear_focus_focus_normalize(L.homogeneous_part(2), H.homogeneous_part(2))
    emap = birkhoff_reduce(L, H, frame, deg)
    assert emap.off_normal_residual < 1e-12
    # h(l, j) reproduces the input polynomial structure
    assert abs(emap.h_series.coefficient((1, 0)) - 0.3) < 1e-10
    assert abs(emap.h_series.coefficient((0, 1)) - 1.2) < 1e-10
    assert abs(emap.h_series.coefficient((0, 2)) - 0.8) < 1e-10
    assert abs(emap.h_series.coefficient((1, 1)) - 0.1) < 1e-10


@pytest.mark.parametrize("name", ["cso", "cam"])
def test_birkhoff_residuals(name, cso, cam):
    system = {"cso": cso, "cam": cam}[name]
    rec = ff_record(system)
    L, H, chart, frame, emap = focus_focus_normal_form(system, rec, 6)
    assert emap.off_normal_residual < 1e-9
    assert emap.round_trip_residual < 1e-9
    assert emap.beta > 0
    assert emap.orientation == +1


def test_transformed_h_commutes_with_j1(cso):
    # {H o Phi, J1} = 0 through the truncation degree
    from semitoric.series import complex_focus_pairing, to_complex_chart
    rec = ff_record(cso)
    L, H, chart = taylor_expand_at_point(cso, rec.point, 6)
    frame = linear_focus_focus_normalize(L.homogeneous_part(2), H.homogeneous_part(2))
    emap = birkhoff_reduce(L, H, frame, 6)
    # rebuild the normalized H from the (l, j) series and check the bracket
    P = canonical_pairing(2)
    J1 = TruncatedSeries.from_quadratic_form(S_J1, 6)
    J2 = TruncatedSeries.from_quadratic_form(S_J2, 6)
    K = TruncatedSeries(4, 6)
    for (a, b), cval in emap.h_series.terms(0.0):
        K = K + (J1 ** a) * (J2 ** b) * cval
    assert K.poisson(J1, P).norm() < 1e-9


def test_eliasson_round_trip_and_orientation(cso):
    rec = ff_record(cso)
    *_, emap = focus_focus_normal_form(cso, rec, 6)
    lv = np.linspace(-0.2, 0.2, 7)
    for lp in lv:
        for hp in (-0.1, 0.05, 0.15):
            j = emap.j_of(lp, hp)
            back = emap.h_of(lp, j)
            assert abs(back - hp) < 2e-3  # truncation-level agreement
    assert emap.rho2_series.coefficient((0, 1)) > 0


def test_birkhoff_independent_of_regularizer(cam):
    # two frames built with different regularizing multiples give the same map
    rec = ff_record(cam)
    L, H, chart = taylor_expand_at_point(cam, rec.point, 6)
    L2, H2 = L.homogeneous_part(2), H.homogeneous_part(2)
    frame1 = linear_focus_focus_normalize(L2, H2)
    # force a different c by perturbing H2 with c0*L2 and compensating
    c0 = 0.61803398875
    H2_shift = H2 + c0 * L2
    frame2 = linear_focus_focus_normalize(L2, H2_shift)
    Hs = H + c0 * L
    emap1 = birkhoff_reduce(L, H, frame1, 6)
    emap2 = birkhoff_reduce(L, Hs, frame2, 6)
    # h2(l, j) = h1(l, j) + c0 * l; rho2 coefficients must then agree after
    # removing the linear-l shift
    d = emap2.h_series.copy()
    d.coeffs[1, 0] -= c0
    assert (d - emap1.h_series).norm() < 1e-8
    lv = TruncatedSeries.variable(0, 2, emap1.rho2_series.degree)
    hv = TruncatedSeries.variable(1, 2, emap1.rho2_series.degree)
    rho2_shifted = emap2.rho2_series.substitute([lv, hv + c0 * lv])
    assert (rho2_shifted - emap1.rho2_series).norm() < 1e-8


def test_eliasson_json_serialization(cso):
    import json
    rec = ff_record(cso)
    *_, emap = focus_focus_normal_form(cso, rec, 6)
    doc = json.loads(emap.to_json())
    assert doc["schema"] == "semitoric-eliasson/1"
    assert doc["beta"] > 0
    assert any(term["exponents"] == [0, 1] for term in doc["h_series"])
