"""Plain-text scene description files.

One record per line, ``#`` starts a comment. Records:

    set <key> <value>            rig scalars: seed, points_per_frame,
                                 lidar_offset, lidar_rate_hz, camera_rate_hz
    camera width=.. height=.. fx=.. fy=.. eye=x,y,z target=x,y,z
           [cx=..] [cy=..] [up=x,y,z]
    plane point=x,y,z normal=x,y,z [color=r,g,b] [vel=x,y,z]
          [checker=r,g,b:scale]
    sphere center=x,y,z radius=.. [color|vel|checker as above]
    box center=x,y,z half=x,y,z [color|vel|checker as above]

Primitives with a nonzero ``vel`` become movers. Unknown record types or
keys are errors.
"""

from __future__ import annotations

from .geometry import ConfigurationError, look_at_camera
from .scene import Box, Checker, Plane, Primitive, SceneSpec, Sphere

_SET_KEYS = {
    "seed": int,
    "points_per_frame": int,
    "lidar_offset": float,
    "lidar_rate_hz": float,
    "camera_rate_hz": float,
}

_CAMERA_KEYS = {"width", "height", "fx", "fy", "cx", "cy", "eye", "target", "up"}
_PRIM_KEYS = {
    "plane": {"point", "normal", "color", "vel", "checker"},
    "sphere": {"center", "radius", "color", "vel", "checker"},
    "box": {"center", "half", "color", "vel", "checker"},
}


def _vec(text: str, n: int = 3) -> tuple[float, ...]:
    parts = tuple(float(p) for p in text.split(","))
    if len(parts) != n:
        raise ConfigurationError(f"expected {n} comma-separated values, got {text!r}")
    return parts


def _kv(tokens: list[str], allowed: set[str], where: str) -> dict[str, str]:
    out = {}
    for token in tokens:
        if "=" not in token:
            raise ConfigurationError(f"{where}: expected key=value, got {token!r}")
        key, value = token.split("=", 1)
        if key not in allowed:
            raise ConfigurationError(f"{where}: unknown key {key!r}")
        out[key] = value
    return out


def _common_prim_kwargs(kv: dict[str, str]) -> dict:
    kwargs = {}
    if "color" in kv:
        kwargs["color"] = _vec(kv["color"])
    if "vel" in kv:
        kwargs["velocity"] = _vec(kv["vel"])
    if "checker" in kv:
        spec, _, scale = kv["checker"].rpartition(":")
        kwargs["checker"] = Checker(color2=_vec(spec), scale=float(scale))
    return kwargs


def load_scene(path) -> SceneSpec:
    """Parse a scene file into a SceneSpec."""
    rig: dict = {}
    cameras = []
    static: list[Primitive] = []
    movers: list[Primitive] = []
    with open(path) as f:
        for lineno, raw in enumerate(f, start=1):
            line = raw.split("#")[0].strip()
            if not line:
                continue
            where = f"{path}:{lineno}"
            kind, *tokens = line.split()
            if kind == "set":
                if len(tokens) != 2 or tokens[0] not in _SET_KEYS:
                    raise ConfigurationError(f"{where}: bad set record {line!r}")
                rig[tokens[0]] = _SET_KEYS[tokens[0]](tokens[1])
            elif kind == "camera":
                kv = _kv(tokens, _CAMERA_KEYS, where)
                for req in ("width", "height", "fx", "fy", "eye", "target"):
                    if req not in kv:
                        raise ConfigurationError(f"{where}: camera needs {req}=")
                cameras.append(
                    look_at_camera(
                        eye=_vec(kv["eye"]),
                        target=_vec(kv["target"]),
                        fx=float(kv["fx"]),
                        fy=float(kv["fy"]),
                        width=int(kv["width"]),
                        height=int(kv["height"]),
                        up=_vec(kv["up"]) if "up" in kv else (0.0, -1.0, 0.0),
                        cx=float(kv["cx"]) if "cx" in kv else None,
                        cy=float(kv["cy"]) if "cy" in kv else None,
                    )
                )
            elif kind in _PRIM_KEYS:
                kv = _kv(tokens, _PRIM_KEYS[kind], where)
                kwargs = _common_prim_kwargs(kv)
                if kind == "plane":
                    prim = Plane(point=_vec(kv["point"]), normal=_vec(kv["normal"]), **kwargs)
                elif kind == "sphere":
                    prim = Sphere(center=_vec(kv["center"]), radius=float(kv["radius"]), **kwargs)
                else:
                    prim = Box(center=_vec(kv["center"]), half=_vec(kv["half"]), **kwargs)
                (movers if prim.is_mover else static).append(prim)
            else:
                raise ConfigurationError(f"{where}: unknown record type {kind!r}")
    return SceneSpec(
        static=static,
        movers=movers,
        cameras=cameras,
        points_per_lidar_frame=rig.get("points_per_frame", 5000),
        rng_seed=rig.get("seed", 0),
        lidar_offset=rig.get("lidar_offset", 0.25),
        lidar_rate_hz=rig.get("lidar_rate_hz", 10.0),
        camera_rate_hz=rig.get("camera_rate_hz", 30.0),
    )


def _fmt_vec(values) -> str:
    return ",".join(f"{v:g}" for v in values)


def save_scene(path, spec: SceneSpec) -> None:
    """Write a SceneSpec in the scene-file format (cameras as eye/target)."""
    lines = [
        f"set seed {spec.rng_seed}",
        f"set points_per_frame {spec.points_per_lidar_frame}",
        f"set lidar_offset {spec.lidar_offset:g}",
        f"set lidar_rate_hz {spec.lidar_rate_hz:g}",
        f"set camera_rate_hz {spec.camera_rate_hz:g}",
    ]
    for cam in spec.cameras:
        eye = cam.center
        target = eye + cam.rotation[2]  # forward axis, unit length
        lines.append(
            f"camera width={cam.width} height={cam.height} fx={cam.fx:g} fy={cam.fy:g} "
            f"cx={cam.cx:g} cy={cam.cy:g} eye={_fmt_vec(eye)} target={_fmt_vec(target)} "
            f"up={_fmt_vec(-cam.rotation[1])}"
        )
    for prim in spec.static + spec.movers:
        extra = ""
        if prim.is_mover:
            extra += f" vel={_fmt_vec(prim.velocity)}"
        if prim.checker is not None:
            extra += f" checker={_fmt_vec(prim.checker.color2)}:{prim.checker.scale:g}"
        color = f" color={_fmt_vec(prim.color)}"
        if isinstance(prim, Plane):
            lines.append(f"plane point={_fmt_vec(prim.point)} normal={_fmt_vec(prim.normal)}{color}{extra}")
        elif isinstance(prim, Sphere):
            lines.append(f"sphere center={_fmt_vec(prim.center)} radius={prim.radius:g}{color}{extra}")
        elif isinstance(prim, Box):
            lines.append(f"box center={_fmt_vec(prim.center)} half={_fmt_vec(prim.half)}{color}{extra}")
        else:
            raise ConfigurationError(f"cannot serialize primitive {type(prim).__name__}")
    with open(path, "w") as f:
        f.write("\n".join(lines) + "\n")
