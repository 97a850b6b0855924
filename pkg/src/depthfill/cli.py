"""Command-line entry points: densify, pipeline, bench, synth."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import _kernels
from .bench import bench
from .config import PipelineConfig, load_config
from .densify import two_stage_densify
from .fileio import read_pfm, read_ppm, write_pfm, write_ply, write_ppm
from .geometry import SparseDepthMap, merge_frames, project_points
from .pipeline import run_pipeline
from .preprocess import rgb_image
from .scene import render_scene
from .scenefile import load_scene


def _add_backend(parser) -> None:
    parser.add_argument(
        "--backend",
        choices=["auto", "numpy", "cython"],
        default="auto",
        help="kernel backend (default: compiled extension when available)",
    )


def _load_cfg(args) -> PipelineConfig:
    return load_config(args.config) if args.config else PipelineConfig()


def _cmd_densify(args) -> int:
    cfg = _load_cfg(args)
    rgb = rgb_image(read_ppm(args.rgb))
    depth = read_pfm(args.sparse)
    if depth.shape != rgb.shape[:2]:
        raise SystemExit("rgb and sparse depth dimensions disagree")
    sparse = SparseDepthMap(depth=np.where(depth > 0, depth, 0.0), mask=(depth > 0).astype(np.uint8))
    dense = two_stage_densify(rgb, sparse, cfg, backend=args.backend)
    write_pfm(args.out, np.where(dense.valid != 0, dense.depth, np.float32(0.0)))
    valid = float(dense.valid.mean())
    print(f"densified {args.sparse} -> {args.out} ({valid:.1%} valid)")
    return 0


def _cmd_pipeline(args) -> int:
    cfg = _load_cfg(args)
    spec = load_scene(args.scene)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    report = run_pipeline(spec, args.frames, cfg, backend=args.backend, keep_clouds=True)
    report.write_jsonl(out_dir / "metrics.jsonl")
    for rec, fused in zip(report.records, report.fused):
        write_ply(out_dir / f"fused_{rec.frame:04d}.ply", fused)
    print(f"wrote {len(report.records)} frames to {out_dir}")
    return 0


def _cmd_bench(args) -> int:
    cfg = _load_cfg(args)
    backends = [args.backend]
    if args.backend == "both":
        backends = _kernels.available_backends()
    for backend in backends:
        report = bench(cfg, args.width, args.height, args.samples, args.reps, backend=backend, seed=args.seed)
        report.write_jsonl(sys.stdout)
    return 0


def _cmd_synth(args) -> int:
    spec = load_scene(args.scene)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    bundle = render_scene(spec, args.t)
    for v, cam in enumerate(bundle.cameras):
        write_ppm(out_dir / f"rgb_cam{v}.ppm", bundle.rgb[v])
        write_pfm(out_dir / f"gt_depth_cam{v}.pfm", bundle.gt_depth[v])
        merged = merge_frames(bundle.lidar_frames[v])
        sparse = project_points(merged, cam)
        write_pfm(out_dir / f"sparse_cam{v}.pfm", sparse.depth)
        for j, cloud in enumerate(bundle.lidar_frames[v]):
            write_ply(out_dir / f"lidar_v{v}_f{j}.ply", cloud)
    manifest = {
        "t": args.t,
        "frame_index": bundle.frame_index,
        "cameras": len(bundle.cameras),
        "points_per_lidar_frame": spec.points_per_lidar_frame,
    }
    (out_dir / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")
    print(f"wrote synthetic frame t={args.t} to {out_dir}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="depthfill", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("densify", help="densify one sparse depth raster against an RGB guide")
    p.add_argument("--rgb", required=True, help="guidance image (binary PPM)")
    p.add_argument("--sparse", required=True, help="sparse depth raster (PFM, 0 = missing)")
    p.add_argument("--out", required=True, help="output dense depth raster (PFM)")
    p.add_argument("--config", help="pipeline config file (key=value lines)")
    _add_backend(p)
    p.set_defaults(func=_cmd_densify)

    p = sub.add_parser("pipeline", help="run the multi-viewpoint pipeline on a scene file")
    p.add_argument("--scene", required=True, help="scene description file")
    p.add_argument("--frames", type=int, required=True, help="number of 30 fps ticks to simulate")
    p.add_argument("--out-dir", required=True, help="directory for metrics.jsonl and fused PLYs")
    p.add_argument("--config", help="pipeline config file")
    _add_backend(p)
    p.set_defaults(func=_cmd_pipeline)

    p = sub.add_parser("bench", help="benchmark two-stage densification on random inputs")
    p.add_argument("--width", type=int, required=True)
    p.add_argument("--height", type=int, required=True)
    p.add_argument("--samples", type=int, required=True)
    p.add_argument("--reps", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--config", help="pipeline config file")
    p.add_argument(
        "--backend",
        choices=["auto", "numpy", "cython", "both"],
        default="auto",
        help="'both' benchmarks every available backend",
    )
    p.set_defaults(func=_cmd_bench)

    p = sub.add_parser("synth", help="render one synthetic frame with LiDAR samples")
    p.add_argument("--scene", required=True, help="scene description file")
    p.add_argument("--t", type=float, required=True, help="scene time in seconds")
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=_cmd_synth)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
