"""Pinhole camera model, point-cloud/raster conversion and LiDAR frame merging.

Conventions used throughout the package:

* World frame is the fusion frame. Extrinsics map world to camera:
  ``p_cam = R @ p_world + t``.
* Camera frame: +x right, +y down, +z forward (optical axis). A camera with
  identity extrinsics looks along world +z.
* Rasters are numpy arrays indexed ``[row, col]`` = ``[y, x]``; pixel
  ``(u, v)`` of the spec maps to ``array[v, u]``.
* Depth is camera-space z in meters; 0.0 is the invalid sentinel.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

# Points with camera-space z at or below this are dropped before projection.
Z_NEAR = 0.01


class ConfigurationError(ValueError):
    """Raised for inconsistent inputs the caller must fix (bad dims, tags)."""


@dataclass(frozen=True)
class CameraModel:
    """Calibrated pinhole camera with world-to-camera extrinsics."""

    fx: float
    fy: float
    cx: float
    cy: float
    rotation: np.ndarray  # (3, 3) world-to-camera
    translation: np.ndarray  # (3,) meters
    width: int
    height: int

    def __post_init__(self):
        object.__setattr__(self, "rotation", np.asarray(self.rotation, dtype=np.float64))
        object.__setattr__(self, "translation", np.asarray(self.translation, dtype=np.float64))
        if self.fx <= 0 or self.fy <= 0:
            raise ConfigurationError("focal lengths must be positive")
        if not (0 < self.cx < self.width and 0 < self.cy < self.height):
            raise ConfigurationError("principal point must lie inside the raster")
        if self.rotation.shape != (3, 3) or self.translation.shape != (3,):
            raise ConfigurationError("rotation must be 3x3 and translation a 3-vector")
        err = np.abs(self.rotation.T @ self.rotation - np.eye(3)).max()
        if err >= 1e-6 or np.linalg.det(self.rotation) < 0:
            raise ConfigurationError("rotation must be orthonormal with determinant +1")

    def world_to_camera(self, points: np.ndarray) -> np.ndarray:
        return points @ self.rotation.T + self.translation

    def camera_to_world(self, points: np.ndarray) -> np.ndarray:
        return (points - self.translation) @ self.rotation

    @property
    def center(self) -> np.ndarray:
        """Camera optical center in world coordinates."""
        return -self.rotation.T @ self.translation


def look_at_camera(
    eye,
    target,
    fx: float,
    fy: float,
    width: int,
    height: int,
    up=(0.0, -1.0, 0.0),
    cx: float | None = None,
    cy: float | None = None,
) -> CameraModel:
    """Build a CameraModel at ``eye`` looking toward ``target``.

    ``up`` is the world direction that should point toward the top of the
    image; the default matches the y-down world used by the scene harness.
    """
    eye = np.asarray(eye, dtype=np.float64)
    z = np.asarray(target, dtype=np.float64) - eye
    nz = np.linalg.norm(z)
    if nz < 1e-12:
        raise ConfigurationError("eye and target coincide")
    z = z / nz
    x = np.cross(z, np.asarray(up, dtype=np.float64))
    nx = np.linalg.norm(x)
    if nx < 1e-12:
        raise ConfigurationError("view direction is parallel to up")
    x = x / nx
    y = np.cross(z, x)
    rotation = np.stack([x, y, z])
    return CameraModel(
        fx=fx,
        fy=fy,
        cx=width / 2.0 if cx is None else cx,
        cy=height / 2.0 if cy is None else cy,
        rotation=rotation,
        translation=-rotation @ eye,
        width=width,
        height=height,
    )


@dataclass
class TimedPointCloud:
    """World-frame points tagged with optional color, frame index and sensor id."""

    points: np.ndarray  # (N, 3) float64
    colors: np.ndarray | None = None  # (N, 3) uint8
    frame_index: np.ndarray = field(default=None)  # (N,) int32
    sensor_id: np.ndarray = field(default=None)  # (N,) int32

    def __post_init__(self):
        self.points = np.asarray(self.points, dtype=np.float64).reshape(-1, 3)
        n = len(self.points)
        if self.colors is not None:
            self.colors = np.asarray(self.colors, dtype=np.uint8).reshape(-1, 3)
        if self.frame_index is None:
            self.frame_index = np.zeros(n, dtype=np.int32)
        else:
            self.frame_index = np.asarray(self.frame_index, dtype=np.int32).reshape(-1)
        if self.sensor_id is None:
            self.sensor_id = np.zeros(n, dtype=np.int32)
        else:
            self.sensor_id = np.asarray(self.sensor_id, dtype=np.int32).reshape(-1)
        lengths = {n, len(self.frame_index), len(self.sensor_id)}
        if self.colors is not None:
            lengths.add(len(self.colors))
        if len(lengths) != 1:
            raise ConfigurationError("point cloud field lengths disagree")
        if n and not np.isfinite(self.points).all():
            raise ConfigurationError("point coordinates must be finite")

    def __len__(self) -> int:
        return len(self.points)

    @classmethod
    def empty(cls) -> "TimedPointCloud":
        return cls(points=np.zeros((0, 3)), colors=np.zeros((0, 3), dtype=np.uint8))


@dataclass
class SparseDepthMap:
    """Camera-aligned sparse depth raster with validity mask and frame tags."""

    depth: np.ndarray  # (H, W) float32, 0.0 where invalid
    mask: np.ndarray  # (H, W) uint8 in {0, 1}
    frame_index: np.ndarray = field(default=None)  # (H, W) int32, valid where mask=1

    def __post_init__(self):
        self.depth = np.asarray(self.depth, dtype=np.float32)
        self.mask = np.asarray(self.mask, dtype=np.uint8)
        if self.frame_index is None:
            self.frame_index = np.zeros(self.depth.shape, dtype=np.int32)
        else:
            self.frame_index = np.asarray(self.frame_index, dtype=np.int32)
        if not (self.depth.shape == self.mask.shape == self.frame_index.shape):
            raise ConfigurationError("depth, mask and frame_index shapes disagree")

    @property
    def shape(self) -> tuple[int, int]:
        return self.depth.shape

    @property
    def valid_count(self) -> int:
        return int(self.mask.sum())

    def copy(self) -> "SparseDepthMap":
        return SparseDepthMap(self.depth.copy(), self.mask.copy(), self.frame_index.copy())


def project_points(cloud: TimedPointCloud, cam: CameraModel) -> SparseDepthMap:
    """Z-buffer a point cloud into a sparse depth raster.

    Points behind the near plane or outside the raster are dropped. When
    several points land on the same pixel the smallest depth wins and its
    frame_index is kept (ties go to the earliest point in the array).
    """
    h, w = cam.height, cam.width
    depth = np.zeros((h, w), dtype=np.float32)
    mask = np.zeros((h, w), dtype=np.uint8)
    fidx = np.zeros((h, w), dtype=np.int32)
    if len(cloud) == 0:
        return SparseDepthMap(depth, mask, fidx)

    p_cam = cam.world_to_camera(cloud.points)
    z = p_cam[:, 2]
    keep = z > Z_NEAR
    if not keep.any():
        return SparseDepthMap(depth, mask, fidx)
    p_cam = p_cam[keep]
    z = z[keep]
    frames = cloud.frame_index[keep]

    u = np.rint(cam.fx * p_cam[:, 0] / z + cam.cx).astype(np.int64)
    v = np.rint(cam.fy * p_cam[:, 1] / z + cam.cy).astype(np.int64)
    inside = (u >= 0) & (u < w) & (v >= 0) & (v < h)
    if not inside.any():
        return SparseDepthMap(depth, mask, fidx)
    u, v, z, frames = u[inside], v[inside], z[inside], frames[inside]

    # Stable sort by (pixel, depth): the first entry per pixel is the winner.
    flat = v * w + u
    order = np.lexsort((z, flat))
    flat, z, frames = flat[order], z[order], frames[order]
    first = np.ones(len(flat), dtype=bool)
    first[1:] = flat[1:] != flat[:-1]

    win = flat[first]
    depth.ravel()[win] = z[first].astype(np.float32)
    mask.ravel()[win] = 1
    fidx.ravel()[win] = frames[first]
    return SparseDepthMap(depth, mask, fidx)


def merge_frames(frames: list[TimedPointCloud]) -> TimedPointCloud:
    """Concatenate up to three LiDAR frames, preserving all per-point tags.

    Frames must carry pairwise-disjoint frame_index tags; more than three
    frames or overlapping tags is a configuration error.
    """
    if not 1 <= len(frames) <= 3:
        raise ConfigurationError(f"expected 1-3 frames, got {len(frames)}")
    tag_sets = [set(np.unique(f.frame_index)) for f in frames if len(f)]
    seen: set[int] = set()
    for tags in tag_sets:
        if tags & seen:
            raise ConfigurationError("duplicate frame_index across merged frames")
        seen |= tags
    if len(frames) == 1:
        return frames[0]
    if all(f.colors is not None or len(f) == 0 for f in frames):
        colors = np.concatenate(
            [f.colors if f.colors is not None else np.zeros((0, 3), np.uint8) for f in frames]
        )
    else:
        colors = None
    return TimedPointCloud(
        points=np.concatenate([f.points for f in frames]),
        colors=colors,
        frame_index=np.concatenate([f.frame_index for f in frames]),
        sensor_id=np.concatenate([f.sensor_id for f in frames]),
    )


def unproject_depth(
    dense,
    rgb: np.ndarray,
    cam: CameraModel,
    frame_index: int = 0,
    sensor_id: int = 0,
) -> TimedPointCloud:
    """Lift every valid pixel of a dense depth map to a colored world point.

    ``dense`` is any object with ``depth`` and ``valid`` rasters (a
    DenseDepthMap); ``rgb`` is the (H, W, 3) guidance image that supplies
    per-point colors.
    """
    depth = np.asarray(dense.depth)
    valid = np.asarray(dense.valid).astype(bool)
    if rgb.shape[:2] != depth.shape or (cam.height, cam.width) != depth.shape:
        raise ConfigurationError("dense map, rgb and camera dimensions disagree")
    vs, us = np.nonzero(valid)
    if len(vs) == 0:
        return TimedPointCloud.empty()
    d = depth[vs, us].astype(np.float64)
    x = (us - cam.cx) * d / cam.fx
    y = (vs - cam.cy) * d / cam.fy
    p_cam = np.stack([x, y, d], axis=1)
    points = cam.camera_to_world(p_cam)
    colors = np.clip(np.rint(rgb[vs, us]), 0, 255).astype(np.uint8)
    n = len(points)
    return TimedPointCloud(
        points=points,
        colors=colors,
        frame_index=np.full(n, frame_index, dtype=np.int32),
        sensor_id=np.full(n, sensor_id, dtype=np.int32),
    )
