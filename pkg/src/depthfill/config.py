"""Pipeline configuration and its flat key=value file format."""

from __future__ import annotations

from dataclasses import asdict, dataclass, fields

from .geometry import ConfigurationError


@dataclass
class PipelineConfig:
    """Every tunable of the preprocessing, filtering and postprocessing stages.

    Scales are in the units of what they threshold: tau_m in RGB distance on
    the [0, 255] scale, occl_delta and grad_thresh in meters, sigma_p in
    pixels. The stage radii and downsample factor default to the two-stage
    schedule (coarse radius 4 at 1/3 resolution, fine radius 2 at full).
    """

    tau_m: float = 30.0
    closing_radius: int = 5
    occl_window: int = 7
    occl_delta: float = 0.3
    stage1_radius: int = 4
    stage2_radius: int = 2
    downsample_factor: int = 3
    sigma_c: float = 30.0
    sigma_p_stage1: float = 2.0
    sigma_p_stage2: float = 1.0
    grad_thresh: float = 0.10
    w_min: float = 1e-8
    afterimage_removal: bool = True
    occlusion_removal: bool = True

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        positive = ("tau_m", "occl_delta", "sigma_c", "sigma_p_stage1",
                    "sigma_p_stage2", "grad_thresh", "w_min")
        for name in positive:
            if getattr(self, name) <= 0:
                raise ConfigurationError(f"{name} must be > 0")
        at_least_one = ("occl_window", "stage1_radius", "stage2_radius", "downsample_factor")
        for name in at_least_one:
            if getattr(self, name) < 1:
                raise ConfigurationError(f"{name} must be >= 1")
        if self.closing_radius < 0:
            raise ConfigurationError("closing_radius must be >= 0")


_BOOL_WORDS = {"true": True, "1": True, "yes": True, "false": False, "0": False, "no": False}


def load_config(path) -> PipelineConfig:
    """Parse a flat key=value config file. Unknown keys are errors."""
    types = {f.name: f.type for f in fields(PipelineConfig)}
    kwargs = {}
    with open(path) as f:
        for lineno, raw in enumerate(f, start=1):
            line = raw.split("#")[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigurationError(f"{path}:{lineno}: expected key=value, got {raw!r}")
            key, value = (part.strip() for part in line.split("=", 1))
            if key not in types:
                raise ConfigurationError(f"{path}:{lineno}: unknown config key {key!r}")
            kind = types[key]
            if kind == "bool":
                if value.lower() not in _BOOL_WORDS:
                    raise ConfigurationError(f"{path}:{lineno}: bad boolean {value!r}")
                kwargs[key] = _BOOL_WORDS[value.lower()]
            elif kind == "int":
                kwargs[key] = int(value)
            else:
                kwargs[key] = float(value)
    return PipelineConfig(**kwargs)


def save_config(path, cfg: PipelineConfig) -> None:
    """Write every config field as key=value, one per line."""
    with open(path, "w") as f:
        for key, value in asdict(cfg).items():
            f.write(f"{key} = {value}\n")
