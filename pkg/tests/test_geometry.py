import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from radiostripe import geometry
from radiostripe.geometry import InfeasiblePlacementError, InvalidParameterError


@pytest.mark.parametrize("n, expected", [(2, 0.3), (4, 1.2), (1, 0.07495)])
def test_fraunhofer_distance(n, expected):
    # c / f = 0.1499 m at 2 GHz; tabulated values are rounded
    assert geometry.fraunhofer_distance(n, 2e9) == pytest.approx(expected, rel=1e-3)
    assert geometry.fraunhofer_distance(n, 2e9) == pytest.approx(n**2 * 2.998e8 / 2e9 / 2, rel=1e-12)


@pytest.mark.parametrize("f", [0.0, -1.0])
def test_fraunhofer_rejects_bad_frequency(f):
    with pytest.raises(InvalidParameterError):
        geometry.fraunhofer_distance(2, f)


@pytest.mark.parametrize("L, arcs", [(4, [0, 20, 40, 60]), (8, list(range(0, 80, 10))), (1, [0])])
def test_ap_arc_lengths(L, arcs):
    pos, _ = geometry.place_aps(L, 20.0, 6.0)
    np.testing.assert_allclose(geometry.arc_lengths(pos, 20.0), arcs, atol=1e-12)
    assert np.all(pos[:, 2] == 6.0)


def test_single_ap_sits_at_origin_corner():
    pos, _ = geometry.place_aps(1, 20.0, 6.0)
    np.testing.assert_array_equal(pos, [[0.0, 0.0, 6.0]])


@given(L=st.integers(1, 40), side=st.floats(1.0, 100.0))
@settings(max_examples=50, deadline=None)
def test_aps_on_perimeter_and_ordered(L, side):
    pos, axes = geometry.place_aps(L, side, 6.0)
    x, y = pos[:, 0], pos[:, 1]
    on_edge = np.isclose(x, 0) | np.isclose(x, side) | np.isclose(y, 0) | np.isclose(y, side)
    assert on_edge.all()
    arcs = geometry.arc_lengths(pos, side)
    np.testing.assert_allclose(np.diff(arcs), 4 * side / L, rtol=1e-9)
    np.testing.assert_allclose(np.linalg.norm(axes, axis=1), 1.0)


def test_place_ues_empty(rng):
    aps, _ = geometry.place_aps(4, 20.0, 6.0)
    assert geometry.place_ues(0, 20.0, 1.0, aps, 1.2, rng).shape == (0, 3)


def test_place_ues_deterministic():
    aps, _ = geometry.place_aps(8, 20.0, 6.0)
    a = geometry.place_ues(5, 20.0, 1.0, aps, 0.3, np.random.default_rng(7))
    b = geometry.place_ues(5, 20.0, 1.0, aps, 0.3, np.random.default_rng(7))
    np.testing.assert_array_equal(a, b)


def test_far_field_exhaustive():
    dep = geometry.make_deployment(12, 10, 4, 20.0, 6.0, 1.0, 2e9, np.random.default_rng(3))
    for k in range(dep.n_ues):
        for l in range(dep.n_aps):
            assert np.linalg.norm(dep.ue_positions[k] - dep.ap_positions[l]) >= 1.2
    assert np.all((dep.ue_positions[:, :2] >= 0) & (dep.ue_positions[:, :2] <= 20.0))
    assert np.all(dep.ue_positions[:, 2] == 1.0)


def test_infeasible_placement(monkeypatch, rng):
    monkeypatch.setattr(geometry, "MAX_REJECTIONS", 50)
    aps, _ = geometry.place_aps(4, 1.0, 0.0)
    with pytest.raises(InfeasiblePlacementError):
        geometry.place_ues(1, 1.0, 0.0, aps, 100.0, rng)


def test_distances_use_height_offset():
    d = geometry.distances(np.array([[0.0, 0.0, 1.0]]), np.array([[0.0, 0.0, 6.0], [3.0, 4.0, 6.0]]))
    np.testing.assert_allclose(d, [[5.0, np.sqrt(50.0)]])


def test_nominal_angle_broadside_and_endfire():
    # AP at (10, 0) on the bottom edge with its array along +x
    ap = np.array([[10.0, 0.0, 6.0]])
    axis = np.array([[1.0, 0.0]])
    ues = np.array([[10.0, 5.0, 1.0], [15.0, 0.0, 1.0]])
    ang = geometry.nominal_angles(ues, ap, axis)
    np.testing.assert_allclose(ang[:, 0], [0.0, np.pi / 2], atol=1e-12)
