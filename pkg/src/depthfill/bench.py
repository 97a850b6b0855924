"""Latency benchmark for the densification core.

Times ``two_stage_densify`` on seeded random inputs of a given size,
reporting median/p95 total latency plus the per-phase breakdown (weights,
spatial, scatter, normalize for each stage, and the resampling steps).
Runs single-pipeline; use the backend argument to compare the compiled
kernels against the numpy fallback on identical inputs.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .config import PipelineConfig
from .densify import two_stage_densify
from .geometry import ConfigurationError, SparseDepthMap

WARMUP_REPS = 2


@dataclass
class BenchReport:
    records: list[dict] = field(default_factory=list)

    def totals_ms(self) -> np.ndarray:
        return np.asarray([r["total_ms"] for r in self.records])

    def summary(self) -> dict:
        totals = self.totals_ms()
        phases = sorted(self.records[0]["phases_ms"]) if self.records else []
        return {
            "record": "summary",
            "backend": self.records[0]["backend"] if self.records else None,
            "reps": len(self.records),
            "median_ms": float(np.median(totals)) if len(totals) else None,
            "p95_ms": float(np.percentile(totals, 95)) if len(totals) else None,
            "phase_median_ms": {
                k: float(np.median([r["phases_ms"][k] for r in self.records])) for k in phases
            },
            "breakdown_fraction": float(np.median([r["breakdown_fraction"] for r in self.records]))
            if self.records
            else None,
        }

    def write_jsonl(self, stream) -> None:
        for rec in self.records:
            stream.write(json.dumps(rec) + "\n")
        stream.write(json.dumps(self.summary()) + "\n")


def random_instance(width: int, height: int, samples: int, seed: int = 0):
    """Seeded random guide image and sparse depth map for benchmarking."""
    rng = np.random.default_rng(seed)
    guide = rng.uniform(0.0, 255.0, size=(height, width, 3)).astype(np.float32)
    samples = min(samples, width * height)
    flat = rng.choice(width * height, size=samples, replace=False)
    depth = np.zeros(height * width, dtype=np.float32)
    depth[flat] = rng.uniform(0.5, 5.0, size=samples).astype(np.float32)
    mask = (depth > 0).astype(np.uint8)
    sparse = SparseDepthMap(depth.reshape(height, width), mask.reshape(height, width))
    return guide, sparse


def bench(
    cfg: PipelineConfig,
    width: int,
    height: int,
    samples: int,
    reps: int,
    backend=None,
    seed: int = 0,
) -> BenchReport:
    """Benchmark the two-stage filter; returns one record per timed rep.

    Two untimed warmup reps precede the measured ones so page faults and
    lazy imports do not pollute the steady-state numbers.
    """
    if reps < 3:
        raise ConfigurationError("need reps >= 3 for stable statistics")
    if width < 1 or height < 1 or samples < 1:
        raise ConfigurationError("width, height and samples must be >= 1")
    backend_name = _kernels.get_backend(backend).NAME
    guide, sparse = random_instance(width, height, samples, seed)

    report = BenchReport()
    for rep in range(WARMUP_REPS + reps):
        timings: dict[str, float] = {}
        t0 = time.perf_counter()
        two_stage_densify(guide, sparse, cfg, backend=backend_name, timings=timings)
        total = time.perf_counter() - t0
        if rep < WARMUP_REPS:
            continue
        phase_sum = sum(timings.values())
        report.records.append(
            {
                "record": "rep",
                "rep": rep - WARMUP_REPS,
                "backend": backend_name,
                "width": width,
                "height": height,
                "samples": samples,
                "total_ms": total * 1000.0,
                "phases_ms": {k: v * 1000.0 for k, v in sorted(timings.items())},
                "breakdown_fraction": phase_sum / total if total > 0 else 0.0,
            }
        )
    return report
