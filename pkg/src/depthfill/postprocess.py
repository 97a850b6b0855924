"""Contour-noise suppression and multi-view point cloud fusion."""

from __future__ import annotations

import numpy as np

from .densify import DenseDepthMap
from .geometry import ConfigurationError, TimedPointCloud


def _axis_gradient(depth: np.ndarray, valid: np.ndarray, axis: int):
    """Per-pixel depth slope along one axis, restricted to valid pixels.

    Central differences where both neighbors are valid, one-sided at
    validity borders. Returns (magnitude, defined) rasters; pixels without
    any valid neighbor along the axis are undefined.
    """
    d = depth.astype(np.float64)
    v = valid.astype(bool)
    prev_d = np.zeros_like(d)
    next_d = np.zeros_like(d)
    prev_v = np.zeros_like(v)
    next_v = np.zeros_like(v)
    if axis == 1:
        prev_d[:, 1:], prev_v[:, 1:] = d[:, :-1], v[:, :-1]
        next_d[:, :-1], next_v[:, :-1] = d[:, 1:], v[:, 1:]
    else:
        prev_d[1:, :], prev_v[1:, :] = d[:-1, :], v[:-1, :]
        next_d[:-1, :], next_v[:-1, :] = d[1:, :], v[1:, :]
    central = next_v & prev_v
    grad = np.zeros_like(d)
    grad[central] = (next_d[central] - prev_d[central]) / 2.0
    fwd = next_v & ~prev_v
    grad[fwd] = next_d[fwd] - d[fwd]
    bwd = prev_v & ~next_v
    grad[bwd] = d[bwd] - prev_d[bwd]
    return np.abs(grad), prev_v | next_v


def contour_filter(dense: DenseDepthMap, grad_thresh: float) -> DenseDepthMap:
    """Invalidate pixels whose depth gradient magnitude exceeds the threshold.

    A pixel with no valid neighbor along either axis is kept: an undefined
    gradient is no evidence of contour noise. Surviving depth values are
    untouched.
    """
    if grad_thresh <= 0:
        raise ConfigurationError("grad_thresh must be > 0")
    valid = dense.valid.astype(bool)
    gx, gx_def = _axis_gradient(dense.depth, valid, axis=1)
    gy, gy_def = _axis_gradient(dense.depth, valid, axis=0)
    remove = valid & ((gx_def & (gx > grad_thresh)) | (gy_def & (gy > grad_thresh)))
    out_valid = valid & ~remove
    return DenseDepthMap(
        depth=np.where(out_valid, dense.depth, np.float32(0.0)).astype(np.float32),
        weight=dense.weight.copy(),
        valid=out_valid.astype(np.uint8),
    )


def fuse_views(clouds: list[TimedPointCloud]) -> TimedPointCloud:
    """Overlay per-viewpoint clouds in the shared world frame.

    Pure concatenation: no deduplication and no cross-view blending, so the
    per-view pipelines stay fully independent. Point order within each input
    is preserved.
    """
    clouds = [c for c in clouds]
    if not clouds:
        return TimedPointCloud.empty()
    if len(clouds) == 1:
        return clouds[0]
    if all(c.colors is not None or len(c) == 0 for c in clouds):
        colors = np.concatenate(
            [c.colors if c.colors is not None else np.zeros((0, 3), np.uint8) for c in clouds]
        )
    else:
        colors = None
    return TimedPointCloud(
        points=np.concatenate([c.points for c in clouds]),
        colors=colors,
        frame_index=np.concatenate([c.frame_index for c in clouds]),
        sensor_id=np.concatenate([c.sensor_id for c in clouds]),
    )
