"""Synthetic scenes with analytic ground truth for the end-to-end harness.

Scenes are built from parametric primitives (infinite planes, spheres,
axis-aligned boxes) with flat or checkered albedo and optional linear
velocity. Rendering is a vectorized nearest-hit ray cast per camera pixel;
because every surface is analytic, ground-truth depth, sample-to-surface
distances and occlusion relationships are exact.

World frame: +x right, +y down, +z forward; a camera with identity
extrinsics looks along +z. LiDAR units are modeled as pinhole samplers
displaced laterally from their viewpoint's camera, which reproduces both
artifact classes the preprocessing stage targets: afterimages of moving
objects across staggered frames, and camera-occluded surfaces seen by the
offset sensors.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .geometry import CameraModel, ConfigurationError, TimedPointCloud, look_at_camera

_EPS = 1e-9


@dataclass(frozen=True)
class Checker:
    """Two-tone square texture in the primitive's local frame."""

    color2: tuple[float, float, float]
    scale: float  # edge length of one square, meters

    def __post_init__(self):
        if self.scale <= 0:
            raise ConfigurationError("checker scale must be > 0")


@dataclass(frozen=True)
class Primitive:
    color: tuple[float, float, float] = (128.0, 128.0, 128.0)
    velocity: tuple[float, float, float] = (0.0, 0.0, 0.0)
    checker: Checker | None = None

    @property
    def is_mover(self) -> bool:
        return any(v != 0.0 for v in self.velocity)

    def _shift(self, t: float) -> np.ndarray:
        return np.asarray(self.velocity, dtype=np.float64) * t

    def albedo(self, points: np.ndarray, t: float) -> np.ndarray:
        """Surface color at world points (texture rides with the primitive)."""
        base = np.asarray(self.color, dtype=np.float32)
        out = np.broadcast_to(base, points.shape[:-1] + (3,)).copy()
        if self.checker is not None:
            local = (points - self._shift(t)) / self.checker.scale
            parity = np.floor(local).astype(np.int64).sum(axis=-1) % 2 == 1
            out[parity] = np.asarray(self.checker.color2, dtype=np.float32)
        return out

    def intersect(self, origin: np.ndarray, dirs: np.ndarray, t: float) -> np.ndarray:
        raise NotImplementedError

    def surface_distance(self, points: np.ndarray, t: float) -> np.ndarray:
        raise NotImplementedError


@dataclass(frozen=True)
class Plane(Primitive):
    """Infinite plane through ``point`` with unit ``normal``."""

    point: tuple[float, float, float] = (0.0, 0.0, 0.0)
    normal: tuple[float, float, float] = (0.0, 0.0, -1.0)

    def __post_init__(self):
        norm = np.linalg.norm(self.normal)
        if norm < 1e-12:
            raise ConfigurationError("plane normal must be nonzero")
        if abs(norm - 1.0) > 1e-6:
            object.__setattr__(self, "normal", tuple(np.asarray(self.normal) / norm))

    def intersect(self, origin, dirs, t):
        n = np.asarray(self.normal, dtype=np.float64)
        p0 = np.asarray(self.point, dtype=np.float64) + self._shift(t)
        denom = dirs @ n
        with np.errstate(divide="ignore", invalid="ignore"):
            tt = ((p0 - origin) @ n) / denom
        tt = np.where((np.abs(denom) > _EPS) & (tt > _EPS), tt, np.inf)
        return tt

    def surface_distance(self, points, t):
        n = np.asarray(self.normal, dtype=np.float64)
        p0 = np.asarray(self.point, dtype=np.float64) + self._shift(t)
        return np.abs((points - p0) @ n)


@dataclass(frozen=True)
class Sphere(Primitive):
    center: tuple[float, float, float] = (0.0, 0.0, 0.0)
    radius: float = 0.5

    def __post_init__(self):
        if self.radius <= 0:
            raise ConfigurationError("sphere radius must be > 0")

    def intersect(self, origin, dirs, t):
        c = np.asarray(self.center, dtype=np.float64) + self._shift(t)
        oc = origin - c
        a = np.einsum("...k,...k->...", dirs, dirs)
        b = dirs @ oc
        disc = b * b - a * (oc @ oc - self.radius**2)
        with np.errstate(invalid="ignore"):
            root = np.sqrt(np.where(disc >= 0, disc, np.nan))
            near = (-b - root) / a
            far = (-b + root) / a
        tt = np.where(near > _EPS, near, far)
        return np.where(np.isfinite(tt) & (tt > _EPS), tt, np.inf)

    def surface_distance(self, points, t):
        c = np.asarray(self.center, dtype=np.float64) + self._shift(t)
        return np.abs(np.linalg.norm(points - c, axis=-1) - self.radius)


@dataclass(frozen=True)
class Box(Primitive):
    """Axis-aligned box given by center and half extents."""

    center: tuple[float, float, float] = (0.0, 0.0, 0.0)
    half: tuple[float, float, float] = (0.5, 0.5, 0.5)

    def __post_init__(self):
        if min(self.half) <= 0:
            raise ConfigurationError("box half extents must be > 0")

    def intersect(self, origin, dirs, t):
        c = np.asarray(self.center, dtype=np.float64) + self._shift(t)
        e = np.asarray(self.half, dtype=np.float64)
        with np.errstate(divide="ignore", invalid="ignore"):
            inv = 1.0 / dirs
            t1 = (c - e - origin) * inv
            t2 = (c + e - origin) * inv
        lo = np.minimum(t1, t2)
        hi = np.maximum(t1, t2)
        # Parallel rays (dirs ~ 0): inside the slab iff origin between faces.
        par = np.abs(dirs) <= _EPS
        inside = (origin >= c - e) & (origin <= c + e)
        lo = np.where(par, np.where(inside, -np.inf, np.inf), lo)
        hi = np.where(par, np.where(inside, np.inf, -np.inf), hi)
        tn = lo.max(axis=-1)
        tf = hi.min(axis=-1)
        tt = np.where(tn > _EPS, tn, tf)
        return np.where((tf >= tn) & (tt > _EPS), tt, np.inf)

    def surface_distance(self, points, t):
        c = np.asarray(self.center, dtype=np.float64) + self._shift(t)
        q = np.abs(points - c) - np.asarray(self.half, dtype=np.float64)
        outside = np.linalg.norm(np.maximum(q, 0.0), axis=-1)
        inside = np.minimum(q.max(axis=-1), 0.0)
        return np.abs(outside + inside)


@dataclass
class SceneSpec:
    """Scene content plus the sensor rig configuration."""

    static: list[Primitive] = field(default_factory=list)
    movers: list[Primitive] = field(default_factory=list)
    cameras: list[CameraModel] = field(default_factory=list)
    lidar_rate_hz: float = 10.0
    camera_rate_hz: float = 30.0
    points_per_lidar_frame: int = 5000
    rng_seed: int = 0
    lidar_offset: float = 0.25  # lateral displacement of each LiDAR from its camera

    def __post_init__(self):
        if not self.cameras:
            raise ConfigurationError("scene needs at least one camera")
        if self.points_per_lidar_frame < 1:
            raise ConfigurationError("points_per_lidar_frame must be >= 1")
        for prim in self.static:
            if prim.is_mover:
                raise ConfigurationError("static primitive has nonzero velocity")

    @property
    def primitives(self) -> list[Primitive]:
        return list(self.static) + list(self.movers)

    @property
    def lidars_per_viewpoint(self) -> int:
        return int(round(self.camera_rate_hz / self.lidar_rate_hz))

    def surface_distance(self, points: np.ndarray, t: float) -> np.ndarray:
        """Distance from each point to the nearest primitive surface at time t."""
        if len(points) == 0:
            return np.zeros(0)
        dist = np.full(len(points), np.inf)
        for prim in self.primitives:
            dist = np.minimum(dist, prim.surface_distance(points, t))
        return dist


@dataclass
class FrameBundle:
    """Everything one 30 fps tick provides: renders plus staggered LiDAR."""

    t: float
    frame_index: int
    cameras: list[CameraModel]
    rgb: list[np.ndarray]  # per camera, (H, W, 3) float32
    gt_depth: list[np.ndarray]  # per camera, (H, W) float32, 0 = no hit
    lidar_frames: list[list[TimedPointCloud]]  # per viewpoint, 3 staggered clouds


def render_view(spec: SceneSpec, cam: CameraModel, t: float):
    """Ray-cast all primitives for one camera pose; returns (rgb, depth)."""
    h, w = cam.height, cam.width
    us, vs = np.meshgrid(np.arange(w, dtype=np.float64), np.arange(h, dtype=np.float64))
    dirs_cam = np.stack([(us - cam.cx) / cam.fx, (vs - cam.cy) / cam.fy, np.ones_like(us)], axis=-1)
    dirs = dirs_cam @ cam.rotation  # rows of R are camera axes; this is R^T applied
    origin = cam.center

    prims = spec.primitives
    best = np.full((h, w), np.inf)
    owner = np.full((h, w), -1, dtype=np.int32)
    for i, prim in enumerate(prims):
        tt = prim.intersect(origin, dirs, t)
        closer = tt < best
        best = np.where(closer, tt, best)
        owner[closer] = i

    rgb = np.zeros((h, w, 3), dtype=np.float32)
    for i, prim in enumerate(prims):
        hit = owner == i
        if hit.any():
            pts = origin + best[hit, None] * dirs[hit]
            rgb[hit] = np.clip(prim.albedo(pts, t), 0.0, 255.0)
    depth = np.where(np.isfinite(best), best, 0.0).astype(np.float32)
    return rgb, depth


def lidar_camera(spec: SceneSpec, viewpoint: int, sensor: int) -> CameraModel:
    """Pose of one LiDAR unit: the viewpoint camera shifted along its x axis."""
    cam = spec.cameras[viewpoint]
    k = spec.lidars_per_viewpoint
    side = (sensor - (k - 1) / 2.0) * spec.lidar_offset
    offset_world = cam.rotation.T @ np.array([side, 0.0, 0.0])
    return replace(cam, translation=cam.translation - cam.rotation @ offset_world)


def _sample_view(
    spec: SceneSpec, pose: CameraModel, t: float, n: int, seed_key: tuple, frame_index: int, sensor_id: int
) -> TimedPointCloud:
    """Uniformly sample visible surface points from one pose at time t."""
    _, depth = render_view(spec, pose, t)
    vs, us = np.nonzero(depth > 0)
    if len(vs) == 0:
        return TimedPointCloud.empty()
    rng = np.random.default_rng(np.random.SeedSequence(seed_key))
    take = min(n, len(vs))
    pick = rng.choice(len(vs), size=take, replace=False)
    vs, us = vs[pick], us[pick]
    d = depth[vs, us].astype(np.float64)
    p_cam = np.stack([(us - pose.cx) * d / pose.fx, (vs - pose.cy) * d / pose.fy, d], axis=1)
    return TimedPointCloud(
        points=pose.camera_to_world(p_cam),
        colors=None,
        frame_index=np.full(take, frame_index, dtype=np.int32),
        sensor_id=np.full(take, sensor_id, dtype=np.int32),
    )


def render_scene(spec: SceneSpec, t: float) -> FrameBundle:
    """Render one tick: per-camera RGB + ground truth, plus the three most
    recent staggered LiDAR frames per viewpoint.

    Sensor j of a viewpoint fires on ticks congruent to j modulo the sensor
    count, so a bundle's LiDAR frames carry strictly increasing frame
    indices spaced one camera period apart. Clouds are reproducible: the
    same (viewpoint, sensor, tick) always yields the same samples.
    """
    rate = spec.camera_rate_hz
    tick = int(round(t * rate))
    rgb, gt = [], []
    for cam in spec.cameras:
        r, d = render_view(spec, cam, t)
        rgb.append(r)
        gt.append(d)

    k = spec.lidars_per_viewpoint
    lidar_frames: list[list[TimedPointCloud]] = []
    for v in range(len(spec.cameras)):
        frames = []
        for age in range(k - 1, -1, -1):
            fire_tick = tick - age
            sensor = fire_tick % k
            cloud = _sample_view(
                spec,
                lidar_camera(spec, v, sensor),
                fire_tick / rate,
                spec.points_per_lidar_frame,
                (spec.rng_seed, v, sensor, fire_tick + k),  # ticks >= -(k-1)
                frame_index=fire_tick,
                sensor_id=v * k + sensor,
            )
            frames.append(cloud)
        lidar_frames.append(frames)
    return FrameBundle(t=t, frame_index=tick, cameras=list(spec.cameras), rgb=rgb, gt_depth=gt, lidar_frames=lidar_frames)


def sample_lidar(bundle: FrameBundle, n: int, seed: int, camera_index: int = 0) -> TimedPointCloud:
    """Draw n random valid ground-truth pixels of one camera as world points.

    Deterministic for a given seed; returns fewer points only when the view
    has fewer valid pixels than requested.
    """
    if n < 1:
        raise ConfigurationError("sample count must be >= 1")
    cam = bundle.cameras[camera_index]
    depth = bundle.gt_depth[camera_index]
    vs, us = np.nonzero(depth > 0)
    if len(vs) == 0:
        return TimedPointCloud.empty()
    rng = np.random.default_rng(seed)
    take = min(n, len(vs))
    pick = rng.choice(len(vs), size=take, replace=False)
    vs, us = vs[pick], us[pick]
    d = depth[vs, us].astype(np.float64)
    p_cam = np.stack([(us - cam.cx) * d / cam.fx, (vs - cam.cy) * d / cam.fy, d], axis=1)
    return TimedPointCloud(
        points=cam.camera_to_world(p_cam),
        colors=None,
        frame_index=np.full(take, bundle.frame_index, dtype=np.int32),
        sensor_id=np.full(take, camera_index, dtype=np.int32),
    )
