"""Batch runner: paint one timeline under every bundled parameter setup.

Each setup overrides swarm size, pigment equipment, trail width, and the
turn-smoothness parameter (pinned by collapsing the tempo law to a
constant). Outputs are a painting PNG and a metrics JSON per setup plus a
summary document, all byte-stable across reruns.
"""
from __future__ import annotations

import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from importlib import resources
from pathlib import Path

from swarmbrush.emotion import MotionParams
from swarmbrush.music.timeline import MusicTimeline
from swarmbrush.sim.config import SimConfig, _parse_equipment
from swarmbrush.sim.engine import run_headless


@dataclass(frozen=True)
class SweepSetup:
    id: int
    n_robots: int
    l: float
    trail_width: float
    equipment: tuple[frozenset[int], ...] | None  # None = every robot carries all


def load_setups(path: str | None = None) -> list[SweepSetup]:
    if path is None:
        text = (resources.files("swarmbrush.data") / "table3_sweep.json").read_text()
    else:
        text = Path(path).read_text()
    doc = json.loads(text)
    setups = []
    for row in doc["setups"]:
        equipment = row["equipment"]
        setups.append(SweepSetup(
            id=int(row["id"]),
            n_robots=int(row["n_robots"]),
            l=float(row["l"]),
            trail_width=float(row["trail_width"]),
            equipment=None if equipment is None else _parse_equipment(equipment),
        ))
    return setups


def setup_config(setup: SweepSetup, base: SimConfig) -> SimConfig:
    motion = MotionParams(setup.l, setup.l, base.motion.t_max)
    return replace(base,
                   n_robots=setup.n_robots,
                   trail_width=setup.trail_width,
                   motion=motion,
                   equipment=setup.equipment or ())


def _run_one(args: tuple[SweepSetup, SimConfig, MusicTimeline, float | None],
             ) -> tuple[int, bytes, dict]:
    setup, base, timeline, duration = args
    config = setup_config(setup, base)
    engine, metrics = run_headless(config, timeline, duration)
    return setup.id, engine.canvas.render_png(), metrics


def _dump_json(path: Path, doc: dict) -> None:
    path.write_text(json.dumps(doc, sort_keys=True, indent=2) + "\n")


def run_sweep(timeline: MusicTimeline, out_dir: str | Path,
              base: SimConfig | None = None,
              duration: float | None = None,
              jobs: int = 1,
              setups: list[SweepSetup] | None = None) -> dict:
    """Run every setup and write paintings, metrics, and summary.json."""
    if base is None:
        base = SimConfig(grid_resolution=128)
    if setups is None:
        setups = load_setups()
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    tasks = [(s, base, timeline, duration) for s in setups]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_run_one, tasks))
    else:
        results = [_run_one(t) for t in tasks]

    by_id = {setup_id: (png, metrics) for setup_id, png, metrics in results}
    rows = []
    for setup in sorted(setups, key=lambda s: s.id):
        png, metrics = by_id[setup.id]
        painting = f"painting_setup_{setup.id:02d}.png"
        metrics_name = f"metrics_setup_{setup.id:02d}.json"
        (out / painting).write_bytes(png)
        _dump_json(out / metrics_name, metrics)
        rows.append({
            "id": setup.id,
            "n_robots": setup.n_robots,
            "l": setup.l,
            "trail_width": setup.trail_width,
            "painting": painting,
            "metrics": metrics_name,
            "final_cost": metrics["cost"][-1] if metrics["cost"] else None,
            "chords_consumed": metrics["chords_consumed"],
        })
    summary = {"setups": rows}
    _dump_json(out / "summary.json", summary)
    return summary
