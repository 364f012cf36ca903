"""Physical layout of a single radio stripe around a square service area.

APs sit at uniform arc-length spacing along the perimeter of a ``D x D``
square, starting at the origin corner; their index along the perimeter is
the stripe's processing order. UEs are dropped uniformly inside the square
and rejected while any of them is closer than the Fraunhofer distance to an
AP.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

SPEED_OF_LIGHT = 2.998e8  # m/s

MAX_REJECTIONS = 1_000_000


class InvalidParameterError(ValueError):
    """A physical parameter is outside its admissible range."""


class InfeasiblePlacementError(RuntimeError):
    """Rejection sampling could not satisfy the far-field constraint."""


def wavelength(carrier_hz: float) -> float:
    if carrier_hz <= 0:
        raise InvalidParameterError(f"carrier frequency must be positive, got {carrier_hz}")
    return SPEED_OF_LIGHT / carrier_hz


def fraunhofer_distance(n_antennas: int, carrier_hz: float) -> float:
    """Far-field boundary ``N**2 * lambda / 2`` of an N-element half-wave ULA."""
    if n_antennas < 1:
        raise InvalidParameterError(f"n_antennas must be >= 1, got {n_antennas}")
    return n_antennas**2 * wavelength(carrier_hz) / 2.0


def _perimeter_point(arc: float, side: float) -> tuple[np.ndarray, np.ndarray]:
    """Point at arc length ``arc`` on the square perimeter and the edge direction there."""
    edge = int(arc // side) % 4
    s = arc - edge * side
    if edge == 0:
        return np.array([s, 0.0]), np.array([1.0, 0.0])
    if edge == 1:
        return np.array([side, s]), np.array([0.0, 1.0])
    if edge == 2:
        return np.array([side - s, side]), np.array([-1.0, 0.0])
    return np.array([0.0, side - s]), np.array([0.0, -1.0])


def place_aps(n_aps: int, side_m: float, height_m: float) -> tuple[np.ndarray, np.ndarray]:
    """Uniformly spaced stripe APs along the perimeter.

    Returns
    -------
    positions : (L, 3) array
        AP reference points, ordered by arc length from the origin corner.
    axes : (L, 2) array
        Horizontal unit vectors along each AP's array (tangent to the stripe).
    """
    if n_aps < 1:
        raise InvalidParameterError(f"need at least one AP, got {n_aps}")
    if side_m <= 0:
        raise InvalidParameterError(f"side length must be positive, got {side_m}")
    spacing = 4.0 * side_m / n_aps
    positions = np.empty((n_aps, 3))
    axes = np.empty((n_aps, 2))
    for l in range(n_aps):
        xy, axis = _perimeter_point(l * spacing, side_m)
        positions[l, :2] = xy
        positions[l, 2] = height_m
        axes[l] = axis
    return positions, axes


def arc_lengths(positions: np.ndarray, side_m: float) -> np.ndarray:
    """Inverse of the perimeter parametrisation, for points on the boundary."""
    out = np.empty(len(positions))
    for i, (x, y) in enumerate(positions[:, :2]):
        if np.isclose(y, 0.0) and x < side_m:
            out[i] = x
        elif np.isclose(x, side_m) and y < side_m:
            out[i] = side_m + y
        elif np.isclose(y, side_m) and x > 0:
            out[i] = 2 * side_m + (side_m - x)
        else:
            out[i] = 3 * side_m + (side_m - y)
    return out


def distances(ue_positions: np.ndarray, ap_positions: np.ndarray) -> np.ndarray:
    """(K, L) matrix of 3-D UE-AP distances."""
    diff = ue_positions[:, None, :] - ap_positions[None, :, :]
    return np.linalg.norm(diff, axis=-1)


def place_ues(
    n_ues: int,
    side_m: float,
    height_m: float,
    ap_positions: np.ndarray,
    min_distance_m: float,
    rng: np.random.Generator,
) -> np.ndarray:
    """Draw ``n_ues`` UE positions uniformly over the square, far-field constrained."""
    out = np.empty((n_ues, 3))
    for k in range(n_ues):
        out[k] = draw_far_field_position(side_m, height_m, ap_positions, min_distance_m, rng)
    return out


def draw_far_field_position(
    side_m: float,
    height_m: float,
    ap_positions: np.ndarray,
    min_distance_m: float,
    rng: np.random.Generator,
) -> np.ndarray:
    for _ in range(MAX_REJECTIONS):
        candidate = np.array([*rng.uniform(0.0, side_m, size=2), height_m])
        if np.all(np.linalg.norm(ap_positions - candidate, axis=1) >= min_distance_m):
            return candidate
    raise InfeasiblePlacementError(
        f"no far-field position found after {MAX_REJECTIONS} draws "
        f"(D_fd={min_distance_m} m, side={side_m} m)"
    )


def nominal_angles(ue_positions: np.ndarray, ap_positions: np.ndarray, ap_axes: np.ndarray) -> np.ndarray:
    """(K, L) azimuth of each UE seen from each AP array's broadside.

    The angle is measured in the horizontal plane; ``sin`` of it is the
    projection of the arrival direction on the array axis.
    """
    diff = ue_positions[:, None, :2] - ap_positions[None, :, :2]
    along = np.einsum("kld,ld->kl", diff, ap_axes)
    normals = np.stack([-ap_axes[:, 1], ap_axes[:, 0]], axis=1)  # inward for a CCW stripe
    across = np.einsum("kld,ld->kl", diff, normals)
    return np.arctan2(along, across)


@dataclass
class Deployment:
    side_length_m: float
    ap_positions: np.ndarray
    ap_axes: np.ndarray
    ue_positions: np.ndarray
    ap_height_m: float
    ue_height_m: float
    fraunhofer_m: float
    _dist: np.ndarray | None = field(default=None, repr=False, compare=False)

    @property
    def n_aps(self) -> int:
        return len(self.ap_positions)

    @property
    def n_ues(self) -> int:
        return len(self.ue_positions)

    @property
    def ue_ap_distances(self) -> np.ndarray:
        if self._dist is None:
            self._dist = distances(self.ue_positions, self.ap_positions)
        return self._dist

    def angles(self) -> np.ndarray:
        return nominal_angles(self.ue_positions, self.ap_positions, self.ap_axes)

    def with_ues(self, ue_positions: np.ndarray) -> Deployment:
        return Deployment(
            self.side_length_m,
            self.ap_positions,
            self.ap_axes,
            np.asarray(ue_positions, dtype=float).reshape(-1, 3),
            self.ap_height_m,
            self.ue_height_m,
            self.fraunhofer_m,
        )


def make_deployment(
    n_aps: int,
    n_ues: int,
    n_antennas: int,
    side_m: float,
    ap_height_m: float,
    ue_height_m: float,
    carrier_hz: float,
    rng: np.random.Generator,
) -> Deployment:
    d_fd = fraunhofer_distance(n_antennas, carrier_hz)
    aps, axes = place_aps(n_aps, side_m, ap_height_m)
    ues = place_ues(n_ues, side_m, ue_height_m, aps, d_fd, rng)
    return Deployment(side_m, aps, axes, ues, ap_height_m, ue_height_m, d_fd)
