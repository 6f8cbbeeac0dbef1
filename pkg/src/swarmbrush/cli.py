"""Command line front end.

Exit codes: 0 on success, 1 when an input cannot be processed, 2 on usage
errors (click's default for bad arguments).
"""
from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from swarmbrush.emotion import PaletteError, load_palette
from swarmbrush.music import analyze_midi
from swarmbrush.music.midi import MidiParseError
from swarmbrush.music.timeline import (
    MusicTimeline,
    TimelineError,
    dump_timeline,
    timeline_from_dict,
)
from swarmbrush.sim.config import ConfigError, SimConfig, load_config
from swarmbrush.sim.engine import run_headless
from swarmbrush.sim.sweep import run_sweep


def _fail(message: str) -> None:
    click.echo(f"error: {message}", err=True)
    sys.exit(1)


def _read_timeline_input(path: Path) -> MusicTimeline:
    """Accept either an SMF file or a timeline JSON document."""
    data = path.read_bytes()
    if data[:4] == b"MThd":
        try:
            return analyze_midi(data)
        except (MidiParseError, TimelineError, ValueError) as exc:
            _fail(f"{path}: {exc}")
    try:
        doc = json.loads(data.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        _fail(f"{path}: neither a MIDI file nor timeline JSON ({exc})")
    try:
        return timeline_from_dict(doc)
    except TimelineError as exc:
        _fail(f"{path}: {exc}")
    raise AssertionError("unreachable")


def _load_config_opt(config_path: str | None, seed: int | None) -> SimConfig:
    if config_path is None:
        cfg = SimConfig()
    else:
        try:
            cfg = load_config(Path(config_path).read_text())
        except (OSError, ConfigError) as exc:
            _fail(f"{config_path}: {exc}")
            raise AssertionError("unreachable")
    if seed is not None:
        from dataclasses import replace
        cfg = replace(cfg, seed=seed)
    return cfg


@click.group()
@click.version_option(package_name="swarmbrush")
def main() -> None:
    """Turn music into swarm paintings."""


@main.command()
@click.argument("midi_file", type=click.Path(exists=True, dir_okay=False,
                                             path_type=Path))
@click.option("--out", "-o", type=click.Path(dir_okay=False, path_type=Path),
              default=None, help="Write the timeline JSON here instead of stdout.")
@click.option("--window", type=float, default=None,
              help="Chord window length in seconds (default: one beat).")
def analyze(midi_file: Path, out: Path | None, window: float | None) -> None:
    """Reduce a MIDI file to a key, chord, and tempo timeline."""
    data = midi_file.read_bytes()
    try:
        timeline = analyze_midi(data, window=window)
    except (MidiParseError, TimelineError, ValueError) as exc:
        _fail(f"{midi_file}: {exc}")
        return
    text = dump_timeline(timeline)
    if out is None:
        click.echo(text, nl=False)
    else:
        out.write_text(text)
        click.echo(f"wrote {out}")


@main.command()
@click.argument("input_file", type=click.Path(exists=True, dir_okay=False,
                                              path_type=Path))
@click.option("--config", "config_path", type=click.Path(exists=True,
              dir_okay=False), default=None, help="Simulation config JSON.")
@click.option("--out", "-o", type=click.Path(dir_okay=False, path_type=Path),
              default=Path("painting.png"), show_default=True,
              help="Output PNG path.")
@click.option("--metrics", type=click.Path(dir_okay=False, path_type=Path),
              default=None, help="Also write the run metrics JSON here.")
@click.option("--duration", type=float, default=None,
              help="Simulated seconds (default: the timeline length).")
@click.option("--seed", type=int, default=None,
              help="Override the config seed.")
@click.option("--palette", "palette_path", type=click.Path(exists=True,
              dir_okay=False), default=None,
              help="Emotion palette JSON overriding the built-in one.")
def paint(input_file: Path, config_path: str | None, out: Path,
          metrics: Path | None, duration: float | None, seed: int | None,
          palette_path: str | None) -> None:
    """Paint one canvas from a MIDI file or a timeline JSON."""
    timeline = _read_timeline_input(input_file)
    cfg = _load_config_opt(config_path, seed)
    palette = None
    if palette_path is not None:
        try:
            palette = load_palette(palette_path)
        except (OSError, PaletteError, ValueError) as exc:
            _fail(f"{palette_path}: {exc}")
    try:
        engine, run_metrics = run_headless(cfg, timeline, duration,
                                           palette=palette)
    except (ConfigError, ValueError) as exc:
        _fail(str(exc))
        return
    out.write_bytes(engine.canvas.render_png())
    click.echo(f"wrote {out} ({engine.step_index} steps, "
               f"{run_metrics['chords_consumed']} chords)")
    if metrics is not None:
        metrics.write_text(json.dumps(run_metrics, sort_keys=True, indent=2)
                           + "\n")
        click.echo(f"wrote {metrics}")


@main.command()
@click.argument("input_file", type=click.Path(exists=True, dir_okay=False,
                                              path_type=Path))
@click.option("--out", "-o", "out_dir", type=click.Path(file_okay=False,
              path_type=Path), default=Path("sweep_out"), show_default=True,
              help="Directory for paintings, metrics, and summary.json.")
@click.option("--config", "config_path", type=click.Path(exists=True,
              dir_okay=False), default=None,
              help="Base config JSON; each setup overrides swarm size, "
                   "equipment, trail width, and turn smoothness.")
@click.option("--duration", type=float, default=None,
              help="Simulated seconds per setup (default: timeline length).")
@click.option("--jobs", type=int, default=1, show_default=True,
              help="Run setups in parallel processes.")
@click.option("--seed", type=int, default=None,
              help="Override the config seed.")
def sweep(input_file: Path, out_dir: Path, config_path: str | None,
          duration: float | None, jobs: int, seed: int | None) -> None:
    """Paint the bundled parameter-study setups against one timeline."""
    timeline = _read_timeline_input(input_file)
    if config_path is None:
        base = SimConfig(grid_resolution=128)
        if seed is not None:
            from dataclasses import replace
            base = replace(base, seed=seed)
    else:
        base = _load_config_opt(config_path, seed)
    if jobs < 1:
        _fail(f"--jobs must be at least 1, got {jobs}")
    try:
        summary = run_sweep(timeline, out_dir, base, duration, jobs)
    except (ConfigError, ValueError) as exc:
        _fail(str(exc))
        return
    click.echo(f"wrote {len(summary['setups'])} setups to {out_dir}")


if __name__ == "__main__":
    main()
