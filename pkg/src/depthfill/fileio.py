"""Readers and writers for the on-disk exchange formats.

* Point clouds: ASCII PLY with x/y/z, red/green/blue and integer
  frame_index / sensor_id properties.
* Depth rasters: PFM, little-endian 32-bit float, meters, 0.0 = invalid.
  Scanlines are stored bottom-to-top as the format requires.
* RGB images: binary PPM (P6), 8 bits per channel.
"""

from __future__ import annotations

import numpy as np

from .geometry import TimedPointCloud


def write_ply(path, cloud: TimedPointCloud) -> None:
    """Write a point cloud as ASCII PLY. Colorless clouds get white points."""
    n = len(cloud)
    colors = cloud.colors
    if colors is None:
        colors = np.full((n, 3), 255, dtype=np.uint8)
    header = [
        "ply",
        "format ascii 1.0",
        f"element vertex {n}",
        "property float x",
        "property float y",
        "property float z",
        "property uchar red",
        "property uchar green",
        "property uchar blue",
        "property int frame_index",
        "property int sensor_id",
        "end_header",
    ]
    with open(path, "w") as f:
        f.write("\n".join(header) + "\n")
        for i in range(n):
            x, y, z = cloud.points[i]
            r, g, b = colors[i]
            f.write(
                f"{x:.6f} {y:.6f} {z:.6f} {r} {g} {b} "
                f"{cloud.frame_index[i]} {cloud.sensor_id[i]}\n"
            )


def read_ply(path) -> TimedPointCloud:
    """Read an ASCII PLY vertex cloud; missing tag properties default to 0."""
    with open(path, "r") as f:
        line = f.readline().strip()
        if line != "ply":
            raise ValueError(f"{path}: not a PLY file")
        fmt = f.readline().strip()
        if not fmt.startswith("format ascii"):
            raise ValueError(f"{path}: only ASCII PLY is supported")
        n = None
        props: list[str] = []
        while True:
            line = f.readline()
            if not line:
                raise ValueError(f"{path}: truncated PLY header")
            line = line.strip()
            if line.startswith("comment"):
                continue
            if line.startswith("element vertex"):
                n = int(line.split()[-1])
            elif line.startswith("element"):
                raise ValueError(f"{path}: unsupported element '{line}'")
            elif line.startswith("property"):
                props.append(line.split()[-1])
            elif line == "end_header":
                break
        if n is None:
            raise ValueError(f"{path}: missing vertex element")
        data = np.loadtxt(f, dtype=np.float64, max_rows=n, ndmin=2) if n else np.zeros((0, len(props)))
    if data.shape != (n, len(props)):
        raise ValueError(f"{path}: expected {n}x{len(props)} values, got {data.shape}")
    col = {name: i for i, name in enumerate(props)}
    for axis in ("x", "y", "z"):
        if axis not in col:
            raise ValueError(f"{path}: missing '{axis}' property")
    points = data[:, [col["x"], col["y"], col["z"]]]
    colors = None
    if all(c in col for c in ("red", "green", "blue")):
        colors = data[:, [col["red"], col["green"], col["blue"]]].astype(np.uint8)
    frame_index = data[:, col["frame_index"]].astype(np.int32) if "frame_index" in col else None
    sensor_id = data[:, col["sensor_id"]].astype(np.int32) if "sensor_id" in col else None
    return TimedPointCloud(points=points, colors=colors, frame_index=frame_index, sensor_id=sensor_id)


def write_pfm(path, depth: np.ndarray) -> None:
    """Write a single-channel float32 raster as little-endian PFM."""
    depth = np.asarray(depth, dtype=np.float32)
    if depth.ndim != 2:
        raise ValueError("PFM writer expects a 2-D raster")
    h, w = depth.shape
    with open(path, "wb") as f:
        f.write(b"Pf\n")
        f.write(f"{w} {h}\n".encode("ascii"))
        f.write(b"-1.0\n")  # negative scale = little endian
        f.write(np.ascontiguousarray(depth[::-1]).astype("<f4").tobytes())


def read_pfm(path) -> np.ndarray:
    """Read a grayscale PFM raster into a float32 (H, W) array."""
    with open(path, "rb") as f:
        if f.readline().strip() != b"Pf":
            raise ValueError(f"{path}: not a grayscale PFM file")
        dims = f.readline().split()
        w, h = int(dims[0]), int(dims[1])
        scale = float(f.readline().strip())
        dtype = "<f4" if scale < 0 else ">f4"
        data = np.frombuffer(f.read(4 * w * h), dtype=dtype)
    if data.size != w * h:
        raise ValueError(f"{path}: truncated PFM payload")
    out = data.reshape(h, w)[::-1].astype(np.float32)
    if scale not in (-1.0, 1.0):
        out = out * abs(scale)
    return out


def write_ppm(path, rgb: np.ndarray) -> None:
    """Write an (H, W, 3) image in [0, 255] as binary PPM (P6)."""
    rgb = np.asarray(rgb)
    if rgb.ndim != 3 or rgb.shape[2] != 3:
        raise ValueError("PPM writer expects an (H, W, 3) image")
    h, w = rgb.shape[:2]
    payload = np.clip(np.rint(rgb), 0, 255).astype(np.uint8)
    with open(path, "wb") as f:
        f.write(f"P6\n{w} {h}\n255\n".encode("ascii"))
        f.write(payload.tobytes())


def read_ppm(path) -> np.ndarray:
    """Read a binary PPM (P6) into a float32 (H, W, 3) array in [0, 255]."""
    with open(path, "rb") as f:
        magic = f.readline().strip()
        if magic != b"P6":
            raise ValueError(f"{path}: not a binary PPM file")
        fields: list[int] = []
        while len(fields) < 3:
            line = f.readline()
            if not line:
                raise ValueError(f"{path}: truncated PPM header")
            text = line.split(b"#")[0]
            fields.extend(int(tok) for tok in text.split())
        w, h, maxval = fields
        if maxval != 255:
            raise ValueError(f"{path}: only maxval 255 is supported")
        data = np.frombuffer(f.read(3 * w * h), dtype=np.uint8)
    if data.size != 3 * w * h:
        raise ValueError(f"{path}: truncated PPM payload")
    return data.reshape(h, w, 3).astype(np.float32)
