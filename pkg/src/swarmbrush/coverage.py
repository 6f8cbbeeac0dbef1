"""Heterogeneous coverage control over a discretized canvas.

Per color channel, the canvas grid is partitioned among the robots
equipped with that color (nearest-neighbor Voronoi over cell centers).
Midpoint quadrature of a Gaussian importance field over each robot's
cells gives the mass and centroid that drive the control law

    u_i = sum_{j in P(i)} M_i^j (C_i^j - x_i)

and the pigment mix alpha_i^j = M_i^j / sum_k M_i^k. Everything is pure
over immutable snapshots, so per-color work can run in any order.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

import numpy as np


@lru_cache(maxsize=8)
def _cell_centers_cached(width: float, height: float,
                         nx: int, ny: int) -> tuple[np.ndarray, np.ndarray]:
    xs = (np.arange(nx) + 0.5) * (width / nx)
    ys = (np.arange(ny) + 0.5) * (height / ny)
    qx, qy = np.meshgrid(xs, ys)
    qx.setflags(write=False)
    qy.setflags(write=False)
    return qx.ravel(), qy.ravel()

CYAN, MAGENTA, YELLOW = 0, 1, 2
PIGMENT_NAMES = ("C", "M", "Y")
PIGMENT_INDEX = {"C": CYAN, "M": MAGENTA, "Y": YELLOW}


class CoverageError(ValueError):
    pass


@dataclass(frozen=True)
class GaussianDensity:
    """One color channel's importance field: bivariate axis-aligned
    Gaussian scaled so the (untruncated) integral equals K."""
    color: int
    mu: tuple[float, float]
    sigma: tuple[float, float]
    intensity: float = 1.0

    def __post_init__(self):
        if self.sigma[0] <= 0 or self.sigma[1] <= 0:
            raise CoverageError(f"sigma must be positive, got {self.sigma}")
        if self.intensity <= 0:
            raise CoverageError(f"intensity must be positive, got {self.intensity}")
        if not (np.isfinite(self.mu[0]) and np.isfinite(self.mu[1])):
            raise CoverageError(f"center must be finite, got {self.mu}")


@dataclass(frozen=True)
class GridDomain:
    """Midpoint-quadrature grid tiling a width x height canvas exactly."""
    width: float
    height: float
    nx: int
    ny: int

    def __post_init__(self):
        if self.nx < 2 or self.ny < 2:
            raise CoverageError("grid resolution must be at least 2 per axis")
        if self.width <= 0 or self.height <= 0:
            raise CoverageError("canvas dimensions must be positive")

    @property
    def cell_area(self) -> float:
        return (self.width / self.nx) * (self.height / self.ny)

    def cell_centers(self) -> tuple[np.ndarray, np.ndarray]:
        """Flat arrays (ncells,) of cell-center x and y, row-major in y."""
        return _cell_centers_cached(self.width, self.height, self.nx, self.ny)


@dataclass
class RobotState:
    index: int
    position: np.ndarray  # shape (2,), canvas units
    heading: float = 0.0
    equipment: frozenset[int] = frozenset({CYAN, MAGENTA, YELLOW})
    control: np.ndarray = field(default_factory=lambda: np.zeros(2))

    def __post_init__(self):
        self.position = np.asarray(self.position, dtype=float)
        if not self.equipment:
            raise CoverageError(f"robot {self.index} carries no pigment")
        self.heading = wrap_angle(self.heading)


@dataclass(frozen=True)
class VoronoiPartition:
    color: int
    owner: np.ndarray        # flat (ncells,) robot indices
    equipped: tuple[int, ...]
    grid: GridDomain


@dataclass(frozen=True)
class MassCentroid:
    mass: float
    centroid: tuple[float, float] | None  # None when mass is zero


def wrap_angle(theta: float) -> float:
    """Normalize to (-pi, pi]."""
    wrapped = float(np.arctan2(np.sin(theta), np.cos(theta)))
    return np.pi if wrapped == -np.pi else wrapped


def eval_density(d: GaussianDensity, q: Sequence[float]) -> float:
    """Field value at a single point."""
    sx, sy = d.sigma
    norm = d.intensity / (2.0 * np.pi * sx * sy)
    zx = (q[0] - d.mu[0]) / sx
    zy = (q[1] - d.mu[1]) / sy
    return float(norm * np.exp(-0.5 * (zx * zx + zy * zy)))


def density_field(d: GaussianDensity, grid: GridDomain) -> np.ndarray:
    """Field sampled at every cell center, flat (ncells,)."""
    qx, qy = grid.cell_centers()
    sx, sy = d.sigma
    norm = d.intensity / (2.0 * np.pi * sx * sy)
    zx = (qx - d.mu[0]) / sx
    zy = (qy - d.mu[1]) / sy
    return norm * np.exp(-0.5 * (zx * zx + zy * zy))


def equipped_robots(robots: Sequence[RobotState], color: int) -> list[RobotState]:
    return [r for r in robots if color in r.equipment]


def compute_partition(robots: Sequence[RobotState], color: int,
                      grid: GridDomain) -> VoronoiPartition:
    """Assign every cell center to its nearest robot carrying the color.

    Equidistant cells go to the lowest robot index, which makes the
    partition deterministic.
    """
    equipped = sorted(equipped_robots(robots, color), key=lambda r: r.index)
    if not equipped:
        raise CoverageError(f"color {color} unassigned: no equipped robot")
    qx, qy = grid.cell_centers()
    positions = np.array([r.position for r in equipped])
    d2 = ((qx[None, :] - positions[:, 0, None]) ** 2
          + (qy[None, :] - positions[:, 1, None]) ** 2)
    nearest = np.argmin(d2, axis=0)  # first minimum = lowest index
    indices = np.array([r.index for r in equipped])
    return VoronoiPartition(color, indices[nearest],
                            tuple(int(i) for i in indices), grid)


def mass_centroid(partition: VoronoiPartition, robot_index: int,
                  d: GaussianDensity, grid: GridDomain) -> MassCentroid:
    """Quadrature mass and density-weighted centroid of one robot's cells."""
    if d.color != partition.color:
        raise CoverageError(
            f"density color {d.color} does not match partition color {partition.color}")
    phi = density_field(d, grid)
    qx, qy = grid.cell_centers()
    mask = partition.owner == robot_index
    weights = phi[mask] * grid.cell_area
    mass = float(weights.sum())
    if mass <= 0.0:
        return MassCentroid(0.0, None)
    cx = float((qx[mask] * weights).sum() / mass)
    cy = float((qy[mask] * weights).sum() / mass)
    return MassCentroid(mass, (cx, cy))


def color_coverage(robots: Sequence[RobotState], d: GaussianDensity,
                   grid: GridDomain) -> dict[int, MassCentroid]:
    """Masses and centroids for every equipped robot in one pass."""
    partition = compute_partition(robots, d.color, grid)
    phi = density_field(d, grid)
    qx, qy = grid.cell_centers()
    weights = phi * grid.cell_area

    lookup = np.full(max(partition.equipped) + 1, -1, dtype=int)
    for k, idx in enumerate(partition.equipped):
        lookup[idx] = k
    owner_compact = lookup[partition.owner]
    n = len(partition.equipped)
    masses = np.bincount(owner_compact, weights=weights, minlength=n)
    mx = np.bincount(owner_compact, weights=weights * qx, minlength=n)
    my = np.bincount(owner_compact, weights=weights * qy, minlength=n)

    out = {}
    for k, idx in enumerate(partition.equipped):
        if masses[k] > 0.0:
            out[idx] = MassCentroid(float(masses[k]),
                                    (float(mx[k] / masses[k]), float(my[k] / masses[k])))
        else:
            out[idx] = MassCentroid(0.0, None)
    return out


def control_input(robot: RobotState,
                  per_color: Mapping[int, Mapping[int, MassCentroid]],
                  ) -> np.ndarray:
    """Mass-weighted pull toward each color centroid; zero-mass colors
    contribute nothing. No saturation here: callers clamp if they
    integrate with a fixed step."""
    u = np.zeros(2)
    for color in sorted(robot.equipment):
        entry = per_color.get(color, {}).get(robot.index)
        if entry is None or entry.mass <= 0.0 or entry.centroid is None:
            continue
        u += entry.mass * (np.asarray(entry.centroid) - robot.position)
    return u


def saturate(u: np.ndarray, u_max: float) -> np.ndarray:
    norm = float(np.linalg.norm(u))
    if u_max > 0 and norm > u_max:
        return u * (u_max / norm)
    return u


def pigment_proportions(robot: RobotState,
                        masses: Mapping[int, float]) -> dict[int, float]:
    """alpha_j = M_j / sum_k M_k over the robot's pigments; an all-zero
    mass vector degenerates to a uniform mix."""
    colors = sorted(robot.equipment)
    values = [max(0.0, float(masses.get(c, 0.0))) for c in colors]
    total = sum(values)
    if total <= 0.0:
        return {c: 1.0 / len(colors) for c in colors}
    return {c: v / total for c, v in zip(colors, values)}


def locational_cost(robots: Sequence[RobotState],
                    densities: Iterable[GaussianDensity],
                    grid: GridDomain) -> float:
    """Coverage cost: per color, the density-weighted squared distance
    from each cell to its owning robot, summed by quadrature."""
    qx, qy = grid.cell_centers()
    total = 0.0
    for d in densities:
        equipped = sorted(equipped_robots(robots, d.color), key=lambda r: r.index)
        if not equipped:
            raise CoverageError(f"color {d.color} unassigned: no equipped robot")
        positions = np.array([r.position for r in equipped])
        d2 = ((qx[None, :] - positions[:, 0, None]) ** 2
              + (qy[None, :] - positions[:, 1, None]) ** 2)
        min_d2 = d2.min(axis=0)
        total += float((min_d2 * density_field(d, grid)).sum() * grid.cell_area)
    return total
