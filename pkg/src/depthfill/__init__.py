"""depthfill: real-time densification of sparse LiDAR depth maps.

Turns multi-frame LiDAR samples plus a registered RGB image into a dense,
edge-aligned depth map and fused colored point cloud: merge and project,
clean up motion afterimages and camera-occluded points, densify with a
two-stage guided bilateral filter, strip contour noise, unproject and
overlay viewpoints.
"""

from ._kernels import active_backend_name, available_backends
from .config import PipelineConfig, load_config, save_config
from .densify import (
    DenseDepthMap,
    FilterParams,
    WeightVolume,
    apply_spatial,
    color_weights,
    downsample_rgb,
    downsample_sparse,
    jbf_densify,
    jbf_reference,
    scatter_normalize,
    two_stage_densify,
    upsample_inject,
)
from .geometry import (
    CameraModel,
    ConfigurationError,
    SparseDepthMap,
    TimedPointCloud,
    look_at_camera,
    merge_frames,
    project_points,
    unproject_depth,
)
from .postprocess import contour_filter, fuse_views
from .preprocess import (
    MotionMask,
    close_mask,
    motion_mask,
    preprocess,
    remove_afterimages,
    remove_occluded,
    rgb_image,
)
from .scene import Box, Checker, FrameBundle, Plane, SceneSpec, Sphere, render_scene, sample_lidar

__version__ = "0.1.0"

__all__ = [
    "CameraModel",
    "ConfigurationError",
    "DenseDepthMap",
    "FilterParams",
    "MotionMask",
    "PipelineConfig",
    "SparseDepthMap",
    "TimedPointCloud",
    "WeightVolume",
    "active_backend_name",
    "apply_spatial",
    "available_backends",
    "close_mask",
    "color_weights",
    "contour_filter",
    "downsample_rgb",
    "downsample_sparse",
    "fuse_views",
    "jbf_densify",
    "jbf_reference",
    "load_config",
    "look_at_camera",
    "merge_frames",
    "motion_mask",
    "preprocess",
    "project_points",
    "remove_afterimages",
    "remove_occluded",
    "rgb_image",
    "save_config",
    "scatter_normalize",
    "two_stage_densify",
    "unproject_depth",
    "upsample_inject",
    "Box",
    "Checker",
    "FrameBundle",
    "Plane",
    "SceneSpec",
    "Sphere",
    "render_scene",
    "sample_lidar",
]
