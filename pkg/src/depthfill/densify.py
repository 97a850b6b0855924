"""Guided depth densification: sparse samples in, edge-aligned dense map out.

The filter runs in three phases over a per-pixel neighbor-weight volume:

1. color weights against the guidance image,
2. a spatial Gaussian applied per neighbor offset,
3. a scatter of each observed depth to its neighbors followed by weight
   normalization.

Weights are anchored at the source pixel and scattered outward; the gather
reference ``jbf_reference`` mirrors that anchoring so both paths compute the
same function. Out-of-raster neighbors contribute zero weight on both paths.

The optimized path works in float32 through pluggable kernels (compiled
extension or numpy, see ``_kernels``); the reference evaluates per output
pixel in float64 and is the correctness oracle for everything else.

``two_stage_densify`` implements the coarse-to-fine schedule: a wide-radius
pass at reduced resolution, nearest-neighbor restoration with re-injection
of the original samples, then a narrow-radius full-resolution pass.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .config import PipelineConfig
from .geometry import ConfigurationError, SparseDepthMap

DEFAULT_W_MIN = 1e-8


@dataclass(frozen=True)
class FilterParams:
    """Neighborhood radius and Gaussian scales of one filter pass."""

    r: int
    sigma_c: float  # RGB distance units on the [0, 255] scale
    sigma_p: float  # pixels

    def __post_init__(self):
        if self.r < 1:
            raise ConfigurationError("filter radius must be >= 1")
        if self.sigma_c <= 0 or self.sigma_p <= 0:
            raise ConfigurationError("filter sigmas must be > 0")


@dataclass
class WeightVolume:
    """Per-pixel neighbor weights over a (2r+1)^2 offset window.

    ``weights[k, y, x]`` is the weight between pixel (x, y) and its neighbor
    at offset (a, b), where k = (2r+1)*(r+a) + (r+b), a offsets x and b
    offsets y. Offsets reaching outside the raster hold zero.
    """

    weights: np.ndarray  # (K, H, W) float32
    r: int


@dataclass
class DenseDepthMap:
    """Densified depth with the accumulated normalization weights."""

    depth: np.ndarray  # (H, W) float32, 0.0 where invalid
    weight: np.ndarray  # (H, W) float32 accumulated weights
    valid: np.ndarray  # (H, W) uint8, 1 where weight > w_min

    @property
    def shape(self) -> tuple[int, int]:
        return self.depth.shape

    @classmethod
    def from_sparse(cls, sparse: SparseDepthMap) -> "DenseDepthMap":
        """View a sparse map as a dense one (unit weight at valid pixels)."""
        return cls(
            depth=sparse.depth.copy(),
            weight=sparse.mask.astype(np.float32),
            valid=sparse.mask.copy(),
        )


def _record(timings, key: str, start: float) -> float:
    now = time.perf_counter()
    if timings is not None:
        timings[key] = timings.get(key, 0.0) + (now - start)
    return now


def _as_guide(guide: np.ndarray) -> np.ndarray:
    g = np.ascontiguousarray(guide, dtype=np.float32)
    if g.ndim != 3 or g.shape[2] != 3:
        raise ConfigurationError("guide image must have shape (H, W, 3)")
    return g


def color_weights(guide: np.ndarray, r: int, sigma_c: float, backend=None) -> WeightVolume:
    """Phase 1: Gaussian of the RGB difference toward each neighbor offset."""
    if r < 1 or sigma_c <= 0:
        raise ConfigurationError("need r >= 1 and sigma_c > 0")
    kern = _kernels.get_backend(backend)
    return WeightVolume(weights=kern.color_weights(_as_guide(guide), int(r), float(sigma_c)), r=int(r))


def apply_spatial(w: WeightVolume, sigma_p: float, backend=None) -> WeightVolume:
    """Phase 2: multiply each offset plane by its spatial Gaussian."""
    if sigma_p <= 0:
        raise ConfigurationError("sigma_p must be > 0")
    kern = _kernels.get_backend(backend)
    return WeightVolume(weights=kern.apply_spatial(w.weights, w.r, float(sigma_p)), r=w.r)


def scatter_normalize(
    sparse: SparseDepthMap, w: WeightVolume, w_min: float = DEFAULT_W_MIN, backend=None
) -> DenseDepthMap:
    """Phase 3: distribute observed depths to neighbors and normalize.

    Pixels whose accumulated weight stays at or below ``w_min`` are invalid
    rather than dividing by (near) zero.
    """
    if w_min <= 0:
        raise ConfigurationError("w_min must be > 0")
    if w.weights.shape[1:] != sparse.shape:
        raise ConfigurationError("weight volume and depth map dimensions disagree")
    kern = _kernels.get_backend(backend)
    dhat, wacc = kern.scatter(
        np.ascontiguousarray(sparse.depth, dtype=np.float32),
        np.ascontiguousarray(sparse.mask, dtype=np.uint8),
        np.ascontiguousarray(w.weights, dtype=np.float32),
        w.r,
    )
    return _normalize(dhat, wacc, w_min)


def _normalize(dhat: np.ndarray, wacc: np.ndarray, w_min: float) -> DenseDepthMap:
    valid = wacc > np.float32(w_min)
    with np.errstate(invalid="ignore", divide="ignore"):
        depth = np.where(valid, dhat / np.maximum(wacc, np.float32(1e-30)), np.float32(0.0))
    return DenseDepthMap(depth=depth.astype(np.float32), weight=wacc, valid=valid.astype(np.uint8))


def jbf_densify(
    guide: np.ndarray,
    sparse: SparseDepthMap,
    p: FilterParams,
    w_min: float = DEFAULT_W_MIN,
    backend=None,
    timings: dict | None = None,
    prefix: str = "",
) -> DenseDepthMap:
    """One joint-bilateral densification pass (optimized scatter form).

    When ``timings`` is given, per-phase wall-clock seconds are accumulated
    under ``{prefix}weights/spatial/scatter/normalize``.
    """
    if guide.shape[:2] != sparse.shape:
        raise ConfigurationError("guide and depth map dimensions disagree")
    kern = _kernels.get_backend(backend)
    g = _as_guide(guide)
    depth = np.ascontiguousarray(sparse.depth, dtype=np.float32)
    mask = np.ascontiguousarray(sparse.mask, dtype=np.uint8)

    t = time.perf_counter()
    vol = kern.color_weights(g, p.r, float(p.sigma_c))
    t = _record(timings, prefix + "weights", t)
    vol = kern.apply_spatial(vol, p.r, float(p.sigma_p))
    t = _record(timings, prefix + "spatial", t)
    dhat, wacc = kern.scatter(depth, mask, vol, p.r)
    t = _record(timings, prefix + "scatter", t)
    out = _normalize(dhat, wacc, w_min)
    _record(timings, prefix + "normalize", t)
    return out


def jbf_reference(
    guide: np.ndarray,
    sparse: SparseDepthMap,
    p: FilterParams,
    w_min: float = DEFAULT_W_MIN,
) -> DenseDepthMap:
    """Naive per-pixel gather evaluation in float64; the correctness oracle.

    Weights are anchored at the contributing (source) pixel exactly like the
    scatter form; with the clipped window both forms sum identical terms.
    Intended for small rasters: cost is O(H * W * (2r+1)^2).
    """
    if guide.shape[:2] != sparse.shape:
        raise ConfigurationError("guide and depth map dimensions disagree")
    g = np.asarray(guide, dtype=np.float64)
    d = np.asarray(sparse.depth, dtype=np.float64)
    m = np.asarray(sparse.mask, dtype=np.float64)
    h, w = d.shape
    r = p.r
    inv_c = 1.0 / (2.0 * p.sigma_c * p.sigma_c)
    ys, xs = np.mgrid[-r : r + 1, -r : r + 1]
    sp_full = np.exp(-(xs * xs + ys * ys) / (2.0 * p.sigma_p * p.sigma_p))
    g0, g1, g2 = g[:, :, 0], g[:, :, 1], g[:, :, 2]
    dm = d * m  # sentinel discipline: depth is 0 wherever mask is 0

    dhat = np.zeros((h, w), dtype=np.float64)
    wacc = np.zeros((h, w), dtype=np.float64)
    for y in range(h):
        ry0, ry1 = max(0, y - r), min(h, y + r + 1)
        w0, w1 = ry0 - y + r, ry1 - y + r
        r0, r1, r2 = g0[ry0:ry1], g1[ry0:ry1], g2[ry0:ry1]
        mrow, drow = m[ry0:ry1], dm[ry0:ry1]
        for x in range(w):
            rx0, rx1 = max(0, x - r), min(w, x + r + 1)
            c0 = r0[:, rx0:rx1] - g0[y, x]
            c1 = r1[:, rx0:rx1] - g1[y, x]
            c2 = r2[:, rx0:rx1] - g2[y, x]
            wgt = c0 * c0
            wgt += c1 * c1
            wgt += c2 * c2
            wgt *= -inv_c
            np.exp(wgt, out=wgt)
            wgt *= sp_full[w0:w1, rx0 - x + r : rx1 - x + r]
            wacc[y, x] = (wgt * mrow[:, rx0:rx1]).sum()
            dhat[y, x] = (wgt * drow[:, rx0:rx1]).sum()
    valid = wacc > w_min
    with np.errstate(invalid="ignore", divide="ignore"):
        depth = np.where(valid, dhat / np.maximum(wacc, 1e-300), 0.0)
    return DenseDepthMap(
        depth=depth.astype(np.float32),
        weight=wacc.astype(np.float32),
        valid=valid.astype(np.uint8),
    )


def downsample_sparse(sparse: SparseDepthMap, factor: int) -> SparseDepthMap:
    """Min-pool valid depths into ceil(dim/factor) cells, keeping frame tags.

    Min-pooling biases toward near surfaces, matching the occlusion-aware
    preprocessing.
    """
    if factor < 1:
        raise ConfigurationError("downsample factor must be >= 1")
    if factor == 1:
        return sparse.copy()
    h, w = sparse.shape
    hc, wc = -(-h // factor), -(-w // factor)
    ph, pw = hc * factor, wc * factor
    big = np.full((ph, pw), np.inf, dtype=np.float32)
    big[:h, :w] = np.where(sparse.mask != 0, sparse.depth, np.float32(np.inf))
    fi = np.zeros((ph, pw), dtype=np.int32)
    fi[:h, :w] = sparse.frame_index
    blocks = big.reshape(hc, factor, wc, factor).transpose(0, 2, 1, 3).reshape(hc, wc, -1)
    fblocks = fi.reshape(hc, factor, wc, factor).transpose(0, 2, 1, 3).reshape(hc, wc, -1)
    arg = blocks.argmin(axis=2)
    best = np.take_along_axis(blocks, arg[:, :, None], axis=2)[:, :, 0]
    mask = np.isfinite(best)
    depth = np.where(mask, best, 0.0).astype(np.float32)
    frame = np.where(mask, np.take_along_axis(fblocks, arg[:, :, None], axis=2)[:, :, 0], 0)
    return SparseDepthMap(depth=depth, mask=mask.astype(np.uint8), frame_index=frame.astype(np.int32))


def downsample_rgb(rgb: np.ndarray, factor: int) -> np.ndarray:
    """Block-average an image to ceil(dim/factor); border blocks average
    over the pixels they actually cover."""
    if factor < 1:
        raise ConfigurationError("downsample factor must be >= 1")
    if factor == 1:
        return np.asarray(rgb, dtype=np.float32)
    img = np.asarray(rgb, dtype=np.float32)
    h, w = img.shape[:2]
    row_idx = np.arange(0, h, factor)
    col_idx = np.arange(0, w, factor)
    sums = np.add.reduceat(np.add.reduceat(img, row_idx, axis=0), col_idx, axis=1)
    rcount = np.minimum(row_idx + factor, h) - row_idx
    ccount = np.minimum(col_idx + factor, w) - col_idx
    counts = rcount[:, None] * ccount[None, :]
    return (sums / counts[:, :, None]).astype(np.float32)


def upsample_inject(coarse: DenseDepthMap, original: SparseDepthMap, factor: int) -> SparseDepthMap:
    """Nearest-neighbor upsample of the coarse result, then overwrite with
    the original sparse samples wherever they exist."""
    if factor < 1:
        raise ConfigurationError("upsample factor must be >= 1")
    h, w = original.shape
    hc, wc = coarse.shape
    if (hc, wc) != (-(-h // factor), -(-w // factor)):
        raise ConfigurationError("coarse dimensions do not match original/factor")
    depth = np.repeat(np.repeat(coarse.depth, factor, axis=0), factor, axis=1)[:h, :w].copy()
    mask = np.repeat(np.repeat(coarse.valid, factor, axis=0), factor, axis=1)[:h, :w].copy()
    frame = np.zeros((h, w), dtype=np.int32)  # interpolated pixels carry no frame tag
    inject = original.mask != 0
    depth[inject] = original.depth[inject]
    mask[inject] = 1
    frame[inject] = original.frame_index[inject]
    depth[mask == 0] = 0.0
    return SparseDepthMap(depth=depth.astype(np.float32), mask=mask.astype(np.uint8), frame_index=frame)


def two_stage_densify(
    guide: np.ndarray,
    sparse: SparseDepthMap,
    cfg: PipelineConfig,
    backend=None,
    timings: dict | None = None,
    check_oracle: bool = False,
) -> DenseDepthMap:
    """Coarse-to-fine densification: wide radius at 1/factor scale, then
    narrow radius at full resolution on the restored-and-reinjected map.

    ``check_oracle=True`` re-evaluates both stages with ``jbf_reference``
    and raises if the optimized path drifts beyond 1e-5 relative.
    """
    if guide.shape[:2] != sparse.shape:
        raise ConfigurationError("guide and depth map dimensions disagree")
    f = cfg.downsample_factor
    p1 = FilterParams(cfg.stage1_radius, cfg.sigma_c, cfg.sigma_p_stage1)
    p2 = FilterParams(cfg.stage2_radius, cfg.sigma_c, cfg.sigma_p_stage2)

    t = time.perf_counter()
    guide_c = downsample_rgb(guide, f)
    sparse_c = downsample_sparse(sparse, f)
    t = _record(timings, "resample.down", t)
    stage1 = jbf_densify(guide_c, sparse_c, p1, cfg.w_min, backend, timings, "stage1.")
    if check_oracle:
        _assert_matches_reference(stage1, guide_c, sparse_c, p1, cfg.w_min, "stage1")
    t = time.perf_counter()
    injected = upsample_inject(stage1, sparse, f)
    _record(timings, "resample.up", t)
    stage2 = jbf_densify(guide, injected, p2, cfg.w_min, backend, timings, "stage2.")
    if check_oracle:
        _assert_matches_reference(stage2, guide, injected, p2, cfg.w_min, "stage2")
    return stage2


def _assert_matches_reference(result, guide, sparse, p, w_min, label, rtol=1e-5):
    ref = jbf_reference(guide, sparse, p, w_min)
    if not np.array_equal(result.valid, ref.valid):
        raise AssertionError(f"{label}: validity mask differs from reference")
    both = ref.valid != 0
    if both.any():
        err = np.abs(result.depth[both] - ref.depth[both]) / np.maximum(ref.depth[both], 1e-12)
        if err.max() > rtol:
            raise AssertionError(f"{label}: max relative error {err.max():.3e} exceeds {rtol}")
