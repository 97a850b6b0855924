"""Ready-made synthetic scenes used by tests, benchmarks and the docs.

All three are desk-scale: roughly 1/9 the pixel count of a full-HD rig,
with sample counts to match. Surfaces are deliberately slanted or curved
so interpolation quality actually shows up in depth error metrics.
"""

from __future__ import annotations

from .geometry import look_at_camera
from .scene import Box, Checker, Plane, SceneSpec, Sphere


def default_scene(
    width: int = 640,
    height: int = 360,
    viewpoints: int = 2,
    points_per_frame: int = 10000,
    seed: int = 7,
) -> SceneSpec:
    """Static desk scene: tilted wall and floor, a sphere and a checkered box."""
    fx = fy = width / 2.0
    eyes = [(0.0, -0.05, 0.0), (0.6, -0.12, 0.2), (-0.6, -0.12, 0.2),
            (1.0, -0.2, 0.7), (-1.0, -0.2, 0.7), (0.4, -0.35, -0.2), (-0.4, -0.35, -0.2)]
    cameras = [
        look_at_camera(eye=eyes[i], target=(0.0, 0.15, 2.2), fx=fx, fy=fy, width=width, height=height)
        for i in range(viewpoints)
    ]
    static = [
        Plane(point=(0.0, 0.0, 3.2), normal=(-0.22, -0.08, -1.0), color=(98.0, 102.0, 110.0)),
        Plane(point=(0.0, 0.95, 0.0), normal=(0.0, -1.0, -0.12), color=(120.0, 108.0, 92.0)),
        Sphere(center=(-0.45, 0.25, 2.5), radius=0.35, color=(196.0, 72.0, 48.0)),
        Box(
            center=(0.55, 0.42, 2.6),
            half=(0.28, 0.22, 0.2),
            color=(52.0, 96.0, 190.0),
            checker=Checker(color2=(210.0, 208.0, 118.0), scale=0.14),
        ),
    ]
    return SceneSpec(
        static=static,
        cameras=cameras,
        points_per_lidar_frame=points_per_frame,
        rng_seed=seed,
    )


def moving_box_scene(
    width: int = 640,
    height: int = 360,
    points_per_frame: int = 9000,
    seed: int = 11,
    speed: float = 1.2,
) -> SceneSpec:
    """A checkered box sliding in front of a flat wall; ground truth for
    afterimage (ghost) removal."""
    fx = fy = width / 2.0
    cam = look_at_camera(eye=(0.0, 0.0, 0.0), target=(0.0, 0.0, 2.0), fx=fx, fy=fy, width=width, height=height)
    wall = Plane(point=(0.0, 0.0, 3.0), normal=(0.0, 0.0, -1.0), color=(95.0, 98.0, 105.0))
    box = Box(
        center=(-0.55, 0.05, 2.0),
        half=(0.24, 0.24, 0.14),
        velocity=(speed, 0.0, 0.0),
        color=(205.0, 185.0, 90.0),
        checker=Checker(color2=(70.0, 60.0, 140.0), scale=0.08),
    )
    return SceneSpec(
        static=[wall],
        movers=[box],
        cameras=[cam],
        points_per_lidar_frame=points_per_frame,
        rng_seed=seed,
    )


def occlusion_scene(
    width: int = 640,
    height: int = 360,
    points_per_frame: int = 9000,
    seed: int = 13,
) -> SceneSpec:
    """A near box in front of a far wall with strongly offset LiDAR units,
    so the sensors see wall surface the camera cannot."""
    fx = fy = width / 2.0
    cam = look_at_camera(eye=(0.0, 0.0, 0.0), target=(0.0, 0.0, 2.0), fx=fx, fy=fy, width=width, height=height)
    wall = Plane(point=(0.0, 0.0, 3.0), normal=(0.0, 0.0, -1.0), color=(104.0, 104.0, 100.0))
    box = Box(center=(0.0, 0.05, 1.6), half=(0.22, 0.3, 0.1), color=(180.0, 70.0, 60.0))
    return SceneSpec(
        static=[wall, box],
        cameras=[cam],
        points_per_lidar_frame=points_per_frame,
        rng_seed=seed,
        lidar_offset=0.3,
    )
