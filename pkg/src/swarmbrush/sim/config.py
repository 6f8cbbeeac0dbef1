"""Simulation configuration and its strict JSON form."""
from __future__ import annotations

import json
from dataclasses import dataclass, field

from swarmbrush.coverage import PIGMENT_INDEX, PIGMENT_NAMES
from swarmbrush.emotion import MotionParams


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class SimConfig:
    n_robots: int = 6
    canvas_size: tuple[float, float] = (500.0, 500.0)
    grid_resolution: int = 256
    dt: float = 0.05
    trail_width: float = 15.0
    motion: MotionParams = field(default_factory=MotionParams)
    sigma: float = 60.0
    intensity: float = 1.0
    u_max: float = 50.0
    equipment: tuple[frozenset[int], ...] = ()
    tau: float = 0.5
    seed: int = 0
    pixels_per_unit: float = 2.0
    trail_strength: float = 0.08
    init: str = "circle"
    max_trail_width: float = 100.0

    def __post_init__(self):
        if self.n_robots < 1:
            raise ConfigError(f"need at least one robot, got {self.n_robots}")
        if not self.equipment:
            all_pigments = frozenset(range(3))
            object.__setattr__(self, "equipment",
                               tuple(all_pigments for _ in range(self.n_robots)))
        if len(self.equipment) != self.n_robots:
            raise ConfigError(
                f"equipment rows ({len(self.equipment)}) != n_robots ({self.n_robots})")
        if self.dt <= 0:
            raise ConfigError(f"dt must be positive, got {self.dt}")
        if self.trail_width <= 0:
            raise ConfigError(f"trail width must be positive, got {self.trail_width}")
        if not 0.0 <= self.trail_strength <= 1.0:
            raise ConfigError(f"trail strength must be in [0,1], got {self.trail_strength}")
        if self.sigma <= 0 or self.intensity <= 0:
            raise ConfigError("sigma and intensity must be positive")
        if self.grid_resolution < 2:
            raise ConfigError("grid resolution must be at least 2")
        if self.canvas_size[0] <= 0 or self.canvas_size[1] <= 0:
            raise ConfigError(f"canvas size must be positive, got {self.canvas_size}")
        if self.tau < 0:
            raise ConfigError(f"tau must be non-negative, got {self.tau}")
        if self.init not in ("circle", "scatter"):
            raise ConfigError(f"init must be 'circle' or 'scatter', got {self.init!r}")
        for row in self.equipment:
            if not row:
                raise ConfigError("every robot must carry at least one pigment")
        for pigment in range(3):
            if not any(pigment in row for row in self.equipment):
                raise ConfigError(
                    f"pigment {PIGMENT_NAMES[pigment]} is carried by no robot")

    @property
    def canvas_pixels(self) -> tuple[int, int]:
        return (int(round(self.canvas_size[0] * self.pixels_per_unit)),
                int(round(self.canvas_size[1] * self.pixels_per_unit)))


_ALLOWED_KEYS = {
    "n_robots", "canvas_size", "grid_resolution", "dt", "trail_width",
    "motion", "sigma", "intensity", "u_max", "equipment", "tau", "seed",
    "pixels_per_unit", "trail_strength", "init", "max_trail_width",
}


def _parse_equipment(rows) -> tuple[frozenset[int], ...]:
    parsed = []
    for idx, row in enumerate(rows):
        if not isinstance(row, list):
            raise ConfigError(f"equipment[{idx}] must be a list of pigment names")
        pigments = set()
        for name in row:
            if name not in PIGMENT_INDEX:
                raise ConfigError(
                    f"equipment[{idx}]: unknown pigment {name!r} (use C, M, Y)")
            pigments.add(PIGMENT_INDEX[name])
        parsed.append(frozenset(pigments))
    return tuple(parsed)


def config_from_dict(doc: dict) -> SimConfig:
    if not isinstance(doc, dict):
        raise ConfigError("config must be a JSON object")
    unknown = set(doc) - _ALLOWED_KEYS
    if unknown:
        raise ConfigError(f"unknown config key(s): {sorted(unknown)}")

    kwargs = {}
    for key in ("n_robots", "grid_resolution", "seed"):
        if key in doc:
            if not isinstance(doc[key], int) or isinstance(doc[key], bool):
                raise ConfigError(f"{key} must be an integer")
            kwargs[key] = doc[key]
    for key in ("dt", "trail_width", "sigma", "intensity", "u_max", "tau",
                "pixels_per_unit", "trail_strength", "max_trail_width"):
        if key in doc:
            if isinstance(doc[key], bool) or not isinstance(doc[key], (int, float)):
                raise ConfigError(f"{key} must be a number")
            kwargs[key] = float(doc[key])
    if "canvas_size" in doc:
        size = doc["canvas_size"]
        if not (isinstance(size, list) and len(size) == 2):
            raise ConfigError("canvas_size must be [width, height]")
        kwargs["canvas_size"] = (float(size[0]), float(size[1]))
    if "motion" in doc:
        m = doc["motion"]
        if not isinstance(m, dict) or set(m) - {"l_min", "l_max", "t_max"}:
            raise ConfigError("motion must be {l_min, l_max, t_max}")
        defaults = MotionParams()
        try:
            kwargs["motion"] = MotionParams(
                float(m.get("l_min", defaults.l_min)),
                float(m.get("l_max", defaults.l_max)),
                float(m.get("t_max", defaults.t_max)))
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
    if "equipment" in doc:
        if not isinstance(doc["equipment"], list):
            raise ConfigError("equipment must be a list of pigment-name lists")
        kwargs["equipment"] = _parse_equipment(doc["equipment"])
    if "init" in doc:
        kwargs["init"] = doc["init"]

    return SimConfig(**kwargs)


def load_config(text: str) -> SimConfig:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON: {exc}") from None
    return config_from_dict(doc)


def config_to_dict(cfg: SimConfig) -> dict:
    return {
        "n_robots": cfg.n_robots,
        "canvas_size": list(cfg.canvas_size),
        "grid_resolution": cfg.grid_resolution,
        "dt": cfg.dt,
        "trail_width": cfg.trail_width,
        "motion": {"l_min": cfg.motion.l_min, "l_max": cfg.motion.l_max,
                   "t_max": cfg.motion.t_max},
        "sigma": cfg.sigma,
        "intensity": cfg.intensity,
        "u_max": cfg.u_max,
        "equipment": [sorted(PIGMENT_NAMES[p] for p in row) for row in cfg.equipment],
        "tau": cfg.tau,
        "seed": cfg.seed,
        "pixels_per_unit": cfg.pixels_per_unit,
        "trail_strength": cfg.trail_strength,
        "init": cfg.init,
        "max_trail_width": cfg.max_trail_width,
    }
