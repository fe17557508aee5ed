"""Deployment geometry and per-realization placement sampling.

Base stations sit on a ring (an equilateral triangle for the default K=3),
each with a sectorized antenna aimed at the deployment centroid.  The
intersection of the K sectors is the network's sensing coverage region; each
BS additionally owns a circular communication coverage area in which its
served UE is dropped uniformly at random.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from shapely.geometry import Point, Polygon

_WEDGE_ARC_POINTS = 256


@dataclass(frozen=True)
class Position3D:
    """A point in meters; z is height above ground."""

    x: float
    y: float
    z: float

    def __post_init__(self) -> None:
        for v in (self.x, self.y, self.z):
            if not math.isfinite(v):
                raise ValueError(f"non-finite coordinate in {self!r}")
        if self.z < 0:
            raise ValueError(f"negative height z={self.z}")

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z], dtype=float)


@dataclass(frozen=True)
class DeploymentConfig:
    """Static deployment parameters (counts, heights, spacings, sectors)."""

    num_bs: int = 3
    bs_height: float = 10.0
    ue_height: float = 1.0
    target_height: float = 1.0
    inter_bs_distance: float = 150.0
    comm_coverage_radius: float = 75.0
    sector_width_deg: float = 120.0
    # One boresight azimuth (degrees) per BS; None = aim each BS at the centroid.
    sector_boresights_deg: tuple[float, ...] | None = None

    def __post_init__(self) -> None:
        if self.num_bs < 2:
            raise ValueError("num_bs must be >= 2")
        if self.inter_bs_distance <= 0 or self.comm_coverage_radius <= 0:
            raise ValueError("distances must be > 0")
        if min(self.bs_height, self.ue_height, self.target_height) < 0:
            raise ValueError("heights must be >= 0")
        if not 0 < self.sector_width_deg <= 360:
            raise ValueError("sector_width_deg must be in (0, 360]")
        if self.sector_boresights_deg is not None and len(self.sector_boresights_deg) != self.num_bs:
            raise ValueError("need exactly one boresight per BS")


@dataclass(frozen=True)
class DeploymentTemplate:
    """Deterministic part of a scenario: BS ring, sensing polygon, comm disks."""

    config: DeploymentConfig
    bs_positions: np.ndarray          # (K, 3)
    boresights_deg: np.ndarray        # (K,)
    sensing_region: Polygon           # horizontal plane
    comm_centers: np.ndarray          # (K, 2), horizontal BS projections
    comm_radius: float

    @property
    def num_bs(self) -> int:
        return self.bs_positions.shape[0]


@dataclass(frozen=True)
class NetworkScenario:
    """One fully-placed realization: template plus UE and target positions."""

    template: DeploymentTemplate
    ue_positions: np.ndarray          # (K, 3); UE m is served by BS m
    target_position: np.ndarray       # (3,)

    @property
    def num_bs(self) -> int:
        return self.template.num_bs

    @property
    def bs_positions(self) -> np.ndarray:
        return self.template.bs_positions

    def validate(self) -> None:
        """Assert the membership invariants (UE in own disk, target in region)."""
        tpl = self.template
        for m in range(self.num_bs):
            d = np.hypot(*(self.ue_positions[m, :2] - tpl.comm_centers[m]))
            if d > tpl.comm_radius * (1 + 1e-12):
                raise AssertionError(f"UE {m} outside its communication disk")
        if not tpl.sensing_region.buffer(1e-9).contains(Point(*self.target_position[:2])):
            raise AssertionError("target outside the sensing region")


def _sector_wedge(apex_xy: np.ndarray, boresight_deg: float, width_deg: float,
                  radius: float) -> Polygon:
    """Bounded polygon for one antenna sector (apex + discretized arc)."""
    b = math.radians(boresight_deg)
    w = math.radians(width_deg)
    if width_deg >= 360.0:
        return Point(*apex_xy).buffer(radius, quad_segs=_WEDGE_ARC_POINTS // 4)
    theta = np.linspace(b - w / 2, b + w / 2, _WEDGE_ARC_POINTS)
    pts = [tuple(apex_xy)]
    pts += [(apex_xy[0] + radius * math.cos(t), apex_xy[1] + radius * math.sin(t))
            for t in theta]
    return Polygon(pts)


def point_in_sector(point_xy: np.ndarray, apex_xy: np.ndarray,
                    boresight_deg: float, width_deg: float) -> bool:
    """Whether a horizontal point falls inside an (unbounded) antenna sector."""
    if width_deg >= 360.0:
        return True
    v = np.asarray(point_xy, dtype=float) - np.asarray(apex_xy, dtype=float)
    if np.hypot(*v) == 0.0:
        return True
    ang = math.degrees(math.atan2(v[1], v[0]))
    diff = (ang - boresight_deg + 180.0) % 360.0 - 180.0
    return abs(diff) <= width_deg / 2 + 1e-12


def build_deployment(cfg: DeploymentConfig) -> DeploymentTemplate:
    """Place the BS ring and construct coverage regions.

    BSs sit on a circle of circumradius inter_bs_distance / (2 sin(pi/K))
    centered at the origin, so adjacent BSs are inter_bs_distance apart.
    The sensing region is the intersection of the K sector wedges; it must
    have nonempty interior.
    """
    K = cfg.num_bs
    circumradius = cfg.inter_bs_distance / (2 * math.sin(math.pi / K))
    angles = math.pi / 2 + 2 * math.pi * np.arange(K) / K
    bs_xy = np.column_stack([circumradius * np.cos(angles),
                             circumradius * np.sin(angles)])
    bs_positions = np.column_stack([bs_xy, np.full(K, cfg.bs_height)])

    if cfg.sector_boresights_deg is not None:
        boresights = np.asarray(cfg.sector_boresights_deg, dtype=float)
    else:
        # aim at the centroid (origin)
        boresights = np.degrees(np.arctan2(-bs_xy[:, 1], -bs_xy[:, 0]))

    clip_radius = 4.0 * cfg.inter_bs_distance + cfg.comm_coverage_radius
    region: Polygon | None = None
    for k in range(K):
        wedge = _sector_wedge(bs_xy[k], boresights[k], cfg.sector_width_deg, clip_radius)
        region = wedge if region is None else region.intersection(wedge)
    if region is None or region.is_empty or region.area <= 0:
        raise ValueError(
            "sector boresights do not jointly cover a region with nonempty "
            "interior (empty sensing region)")
    if region.geom_type != "Polygon":
        # keep the largest piece if the intersection splinters
        region = max(region.geoms, key=lambda g: g.area)

    return DeploymentTemplate(
        config=cfg,
        bs_positions=bs_positions,
        boresights_deg=boresights,
        sensing_region=region,
        comm_centers=bs_xy,
        comm_radius=cfg.comm_coverage_radius,
    )


def sample_point_in_disk(center_xy: np.ndarray, radius: float,
                         rng: np.random.Generator) -> np.ndarray:
    """Uniform draw on a disk (polar inversion, no rejection)."""
    r = radius * math.sqrt(rng.uniform())
    phi = rng.uniform(0.0, 2.0 * math.pi)
    return np.array([center_xy[0] + r * math.cos(phi),
                     center_xy[1] + r * math.sin(phi)])


def sample_point_in_polygon(poly: Polygon, rng: np.random.Generator,
                            max_tries: int = 100_000) -> tuple[np.ndarray, int]:
    """Uniform draw on a polygon by bounding-box rejection.

    Returns (point, number_of_rejected_draws).
    """
    minx, miny, maxx, maxy = poly.bounds
    rejected = 0
    for _ in range(max_tries):
        x = rng.uniform(minx, maxx)
        y = rng.uniform(miny, maxy)
        if poly.contains(Point(x, y)):
            return np.array([x, y]), rejected
        rejected += 1
    raise RuntimeError("polygon rejection sampling failed to terminate")


def sample_realization(template: DeploymentTemplate,
                       rng: np.random.Generator) -> NetworkScenario:
    """Draw UE positions (uniform per comm disk) and a target (uniform on the
    sensing region).  Deterministic for a given rng state."""
    cfg = template.config
    K = template.num_bs
    ue = np.empty((K, 3))
    for m in range(K):
        xy = sample_point_in_disk(template.comm_centers[m], template.comm_radius, rng)
        ue[m] = (xy[0], xy[1], cfg.ue_height)
    txy, _ = sample_point_in_polygon(template.sensing_region, rng)
    target = np.array([txy[0], txy[1], cfg.target_height])
    return NetworkScenario(template=template, ue_positions=ue, target_position=target)
