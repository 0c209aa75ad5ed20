import numpy as np
import pytest

from semitoric.catalog import (CoupledAngularMomenta, CoupledSpinOscillator,
                               TwoFocusFamily, cam_transition_times)
from semitoric.errors import RankError
from semitoric.phasespace import PhasePoint
from semitoric.singularities import (DEGENERATE, ELLIPTIC_ELLIPTIC, FOCUS_FOCUS,
                                     classify, count_focus_focus,
                                     darboux_frame, eigenvalue_pairing_residual,
                                     find_rank_zero_points, linearization,
                                     region_map, transition_scan, OMEGA4)


def test_darboux_frame_is_symplectic():
    rng = np.random.default_rng(0)
    for system in (CoupledAngularMomenta(1.0, 1.5, 0.4), CoupledSpinOscillator(1.0, 1.3)):
        for _ in range(10):
            p = system.manifold.random_point(rng)
            B = darboux_frame(system.manifold, p)
            sigma = system.manifold.global_sign
            # Gram matrix of the tangent symplectic form must be OMEGA4
            G = np.zeros((4, 4))
            for i in range(4):
                for k in range(4):
                    a, b = B[:, i], B[:, k]
                    val = 0.0
                    for fac, w, sl in zip(system.manifold.factors,
                                          system.manifold.weights,
                                          system.manifold.block_slices):
                        if fac == "sphere":
                            n = p.coords[sl]
                            val += -sigma * w * float(n @ np.cross(a[sl], b[sl]))
                        else:
                            val += sigma * w * float(a[sl][0] * b[sl][1] - a[sl][1] * b[sl][0])
                    G[i, k] = val
            assert np.abs(G - OMEGA4).max() < 1e-12


def test_cso_census():
    cso = CoupledSpinOscillator(1.0, 1.0)
    pts = find_rank_zero_points(cso)
    assert len(pts) == 2
    coords = sorted(tuple(np.round(p.coords, 8)) for p in pts)
    assert coords == [(0.0, 0.0, -1.0, 0.0, 0.0), (0.0, 0.0, 1.0, 0.0, 0.0)]
    n_ff, records = count_focus_focus(cso)
    assert n_ff == 1
    kinds = {tuple(np.round(r.point.coords, 6)): r.kind for r in records}
    assert kinds[(0.0, 0.0, 1.0, 0.0, 0.0)] == FOCUS_FOCUS
    assert kinds[(0.0, 0.0, -1.0, 0.0, 0.0)] == ELLIPTIC_ELLIPTIC


def test_cam_census_all_four_poles():
    for t in (0.1, 0.5, 0.99):
        cam = CoupledAngularMomenta(1.0, 1.5, t)
        pts = find_rank_zero_points(cam)
        assert len(pts) == 4
        zs = sorted((round(p.coords[2], 6), round(p.coords[5], 6)) for p in pts)
        assert zs == [(-1.0, -1.0), (-1.0, 1.0), (1.0, -1.0), (1.0, 1.0)]


def test_cam_focus_focus_window():
    tm, tp = cam_transition_times(1.0, 1.5)
    for t, expected in [(tm - 1e-6, ELLIPTIC_ELLIPTIC), (tm + 1e-6, FOCUS_FOCUS),
                        (0.5, FOCUS_FOCUS), (tp - 1e-6, FOCUS_FOCUS),
                        (tp + 1e-6, ELLIPTIC_ELLIPTIC)]:
        cam = CoupledAngularMomenta(1.0, 1.5, t)
        p = PhasePoint(cam.manifold, [0, 0, 1, 0, 0, -1])
        assert classify(cam, p).kind == expected
    # exactly at the closed-form transition values the pencil is degenerate
    for t in (tm, tp):
        cam = CoupledAngularMomenta(1.0, 1.5, t)
        p = PhasePoint(cam.manifold, [0, 0, 1, 0, 0, -1])
        assert classify(cam, p).kind == DEGENERATE
    # the other three poles stay elliptic-elliptic throughout
    cam = CoupledAngularMomenta(1.0, 1.5, 0.5)
    for (z1, z2) in [(-1, -1), (-1, 1), (1, 1)]:
        p = PhasePoint(cam.manifold, [0, 0, z1, 0, 0, z2])
        assert classify(cam, p).kind == ELLIPTIC_ELLIPTIC


def test_two_focus_decoupled_census():
    tf = TwoFocusFamily(1.0, 2.0, 0.0, 0.0)  # decoupled: H = z1
    pts = find_rank_zero_points(tf)
    assert len(pts) == 4
    n_ff, _ = count_focus_focus(tf)
    assert n_ff == 0


def test_classify_requires_rank_zero():
    cam = CoupledAngularMomenta(1.0, 1.5, 0.5)
    rng = np.random.default_rng(1)
    p = cam.manifold.random_point(rng)
    with pytest.raises(RankError):
        classify(cam, p)


def test_classification_invariant_under_regularizer():
    # 10 generic c values all give the same verdict
    cam = CoupledAngularMomenta(1.0, 1.5, 0.5)
    rng = np.random.default_rng(2)
    for (z1, z2, expected) in [(1, -1, FOCUS_FOCUS), (1, 1, ELLIPTIC_ELLIPTIC)]:
        p = PhasePoint(cam.manifold, [0, 0, z1, 0, 0, z2])
        for _ in range(10):
            c = rng.uniform(0.3, 2.0)
            A = linearization(cam, p, c)
            eigs = np.linalg.eigvals(A)
            rho = np.abs(eigs).max()
            if expected == FOCUS_FOCUS:
                assert np.all(np.abs(eigs.real) > 1e-7 * rho)
                assert np.all(np.abs(eigs.imag) > 1e-7 * rho)
            else:
                assert np.all(np.abs(eigs.real) < 1e-9 * rho)


def test_eigenvalue_quadruple_symmetry():
    # Hamiltonian spectra close under negation and conjugation
    rng = np.random.default_rng(3)
    for system in (CoupledAngularMomenta(1.0, 1.5, 0.5), CoupledSpinOscillator(1.0, 1.0)):
        for p in find_rank_zero_points(system):
            A = linearization(system, p, rng.uniform(0.4, 1.5))
            eigs = np.linalg.eigvals(A)
            assert eigenvalue_pairing_residual(eigs) < 1e-9 * np.abs(eigs).max()


def test_classification_flips_only_near_transition():
    tm, tp = cam_transition_times(1.0, 1.5)
    ts = np.linspace(0.01, 0.999, 200)
    kinds = []
    for t in ts:
        cam = CoupledAngularMomenta(1.0, 1.5, t)
        p = PhasePoint(cam.manifold, [0, 0, 1, 0, 0, -1])
        kinds.append(classify(cam, p).kind == FOCUS_FOCUS)
    flips = [0.5 * (ts[i] + ts[i + 1]) for i in range(199) if kinds[i] != kinds[i + 1]]
    assert len(flips) == 2
    dt = ts[1] - ts[0]
    assert abs(flips[0] - tm) < dt
    assert abs(flips[1] - tp) < dt


def test_transition_scan_matches_closed_form():
    tm, tp = cam_transition_times(1.0, 1.5)
    found = transition_scan("cam", {"R1": 1.0, "R2": 1.5}, "t", 0.0, 1.0,
                            resolution=64)
    assert len(found) == 2
    assert abs(found[0] - tm) < 1e-6
    assert abs(found[1] - tp) < 1e-6


def test_transition_scan_kepler_boundary():
    # (1, 1): transitions at 1/5 and at the boundary t = 1
    found = transition_scan("cam", {"R1": 1.0, "R2": 1.0}, "t", 0.0, 1.0001,
                            resolution=64)
    assert any(abs(f - 0.2) < 1e-6 for f in found)
    assert any(abs(f - 1.0) < 1e-6 for f in found)


def test_transition_scan_two_focus_row_matches_cam():
    tm, tp = cam_transition_times(1.0, 2.0)
    found = transition_scan("twoff", {"R1": 1.0, "R2": 2.0, "s2": 0.0}, "s1",
                            0.0, 1.0, resolution=64)
    assert len(found) == 2
    assert abs(found[0] - tm) < 1e-6
    assert abs(found[1] - tp) < 1e-6


def test_transition_scan_requires_resolution():
    with pytest.raises(ValueError):
        transition_scan("cam", {"R1": 1.0, "R2": 1.5}, "t", 0.0, 1.0, resolution=8)


@pytest.fixture(scope="module")
def rmap_1_2():
    return region_map(1.0, 2.0, resolution=32)


def test_region_map_contains_all_counts(rmap_1_2):
    values = set(np.unique(rmap_1_2.counts))
    assert values == {0, 1, 2}


def test_region_map_s2_zero_row(rmap_1_2):
    tm, tp = cam_transition_times(1.0, 2.0)
    row = rmap_1_2.counts[0]
    s1 = rmap_1_2.s1
    inside = (s1 > tm) & (s1 < tp)
    cell = s1[1] - s1[0]
    for i, v in enumerate(row):
        expected = 1 if inside[i] else 0
        if min(abs(s1[i] - tm), abs(s1[i] - tp)) > 2 * cell:
            assert v == expected


def test_region_map_corner_decoupled(rmap_1_2):
    assert rmap_1_2.counts[0, 0] == 0


def test_region_map_csv(rmap_1_2):
    text = rmap_1_2.to_csv()
    lines = text.strip().split("\n")
    assert lines[0] == "s1,s2,n_ff"
    assert len(lines) == 1 + 32 * 32


def test_region_map_grid_minimum():
    with pytest.raises(ValueError):
        region_map(1.0, 2.0, resolution=16)


def test_region_map_refinement_stability():
    # interior cells keep their count when the grid refines 32 -> 64
    coarse = region_map(1.0, 2.0, resolution=32)
    fine = region_map(1.0, 2.0, resolution=64)
    # compare on the shared nodes away from boundary cells
    changed = []
    for j in range(32):
        for i in range(32):
            a = coarse.counts[j, i]
            b = fine.counts[2 * j, 2 * i]
            if a != b:
                changed.append((i, j))
    # changes happen only next to detected region boundaries
    for (i, j) in changed:
        s1, s2 = coarse.s1[i], coarse.s2[j]
        d = min(abs(s1 - bx) + abs(s2 - by) for bx, by in coarse.boundary)
        assert d < 2.5 / 31.0
