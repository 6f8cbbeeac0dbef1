"""Step loop: music events drive density targets, coverage control drives
robots, robots deposit pigment.

Per step, in order: advance the clock, consume due tempo then chord events,
apply queued user commands, relax densities toward their targets, run the
coverage pass, integrate the unicycle model, clamp to the canvas, deposit.
Everything is float64 and the event cursors are plain indices, so a rerun
with the same inputs reproduces the same state bit for bit.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from swarmbrush.coverage import (
    GaussianDensity,
    GridDomain,
    MassCentroid,
    RobotState,
    color_coverage,
    control_input,
    locational_cost,
    pigment_proportions,
    saturate,
    wrap_angle,
)
from swarmbrush.emotion import (
    ChordWheel,
    ColorRGB,
    chord_to_canvas_position,
    chord_to_emotions,
    classify_function,
    default_palette,
    emotions_to_color,
    rgb_to_cmy,
    tempo_to_l,
)
from swarmbrush.music.timeline import ChordEvent, MusicTimeline
from swarmbrush.sim.canvas import Canvas, Stamp
from swarmbrush.sim.config import SimConfig


class CommandError(ValueError):
    """A user command that cannot be applied; the step proceeds without it."""


@dataclass(frozen=True)
class UserCommand:
    kind: str  # set_center | set_l | set_trail_width | pause | resume
    point: tuple[float, float] | None = None
    value: float | None = None


@dataclass
class _Channel:
    """One pigment's density, relaxing toward its target."""
    center: np.ndarray
    k: float
    target_center: np.ndarray
    target_k: float


@dataclass
class StepResult:
    step: int
    clock: float
    cost: float
    stamps: list[Stamp] = field(default_factory=list)
    chords_consumed: int = 0
    rejected: list[tuple[UserCommand, str]] = field(default_factory=list)


def initial_robots(config: SimConfig) -> list[RobotState]:
    """Starting poses: evenly spaced on a centred circle with tangent
    headings, or a seeded uniform scatter."""
    w, h = config.canvas_size
    cx, cy = w / 2.0, h / 2.0
    robots = []
    if config.init == "circle":
        radius = 0.35 * min(w, h)
        for i in range(config.n_robots):
            angle = 2.0 * math.pi * i / config.n_robots
            pos = np.array([cx + radius * math.cos(angle),
                            cy + radius * math.sin(angle)])
            robots.append(RobotState(i, pos, wrap_angle(angle + math.pi / 2.0),
                                     config.equipment[i]))
    else:
        rng = np.random.default_rng(config.seed)
        for i in range(config.n_robots):
            pos = np.array([rng.uniform(0.1 * w, 0.9 * w),
                            rng.uniform(0.1 * h, 0.9 * h)])
            heading = wrap_angle(rng.uniform(-math.pi, math.pi))
            robots.append(RobotState(i, pos, heading, config.equipment[i]))
    return robots


def si_to_unicycle(u: np.ndarray, heading: float,
                   lookahead: float) -> tuple[float, float]:
    """Project a planar velocity command onto (v, omega) for a
    differential-drive robot with turn-smoothness parameter L."""
    speed = float(np.linalg.norm(u))
    if speed == 0.0:
        return 0.0, 0.0
    delta = wrap_angle(math.atan2(float(u[1]), float(u[0])) - heading)
    omega = delta / lookahead
    v = speed * max(0.0, math.cos(delta))
    return v, omega


# Channels below this share of the configured intensity are treated as off.
_K_EPS_REL = 1e-6


class Engine:
    def __init__(self, config: SimConfig, timeline: MusicTimeline,
                 palette: dict[str, ColorRGB] | None = None):
        timeline.validate()
        self.config = config
        self.timeline = timeline
        self.palette = palette if palette is not None else default_palette()
        self.grid = GridDomain(config.canvas_size[0], config.canvas_size[1],
                               config.grid_resolution, config.grid_resolution)
        self.wheel = ChordWheel.for_canvas(*config.canvas_size)
        self.robots = initial_robots(config)
        self.canvas = Canvas(config.canvas_size, config.pixels_per_unit,
                             config.trail_strength)
        self.channels: dict[int, _Channel] = {}
        self.clock = 0.0
        self.step_index = 0
        self.chord_cursor = 0
        self.tempo_cursor = 0
        self.chords_consumed = 0
        self.paused = False
        self.trail_width = config.trail_width
        self.l_value = tempo_to_l(timeline.bpm_at(0.0), config.motion)
        self.l_pinned = False
        self.current_chord: ChordEvent | None = None
        self.current_function = None
        self.current_emotions: tuple[str, ...] = ()
        self.current_color: ColorRGB | None = None
        self.last_cost = 0.0
        self.last_alphas: list[tuple[float, float, float]] = [
            (0.0, 0.0, 0.0) for _ in range(config.n_robots)]
        self._k_eps = _K_EPS_REL * config.intensity

    # -- music events -------------------------------------------------

    def _apply_chord(self, chord: ChordEvent) -> None:
        function = chord.function
        if function is None:
            function = classify_function(chord, self.timeline.key)
        emotions = chord_to_emotions(function)
        color = emotions_to_color(emotions, self.palette)
        center = np.array(chord_to_canvas_position(chord, self.wheel))
        cmy = rgb_to_cmy(color)
        for pigment, amount in enumerate((cmy.c, cmy.m, cmy.y)):
            target_k = self.config.intensity * amount
            channel = self.channels.get(pigment)
            if target_k > self._k_eps:
                if channel is None:
                    # New channel fades in where the chord wants it.
                    self.channels[pigment] = _Channel(
                        center.copy(), 0.0, center.copy(), target_k)
                else:
                    channel.target_center = center.copy()
                    channel.target_k = target_k
            elif channel is not None:
                channel.target_k = 0.0
        self.current_chord = chord
        self.current_function = function
        self.current_emotions = tuple(e.label for e in emotions)
        self.current_color = color

    def _consume_events(self, t_new: float) -> int:
        tempos = self.timeline.tempos
        while (self.tempo_cursor < len(tempos)
               and tempos[self.tempo_cursor].onset <= t_new):
            self.l_value = tempo_to_l(tempos[self.tempo_cursor].bpm,
                                      self.config.motion)
            self.l_pinned = False
            self.tempo_cursor += 1
        consumed = 0
        chords = self.timeline.chords
        while (self.chord_cursor < len(chords)
               and chords[self.chord_cursor].onset <= t_new):
            self._apply_chord(chords[self.chord_cursor])
            self.chord_cursor += 1
            consumed += 1
        self.chords_consumed += consumed
        return consumed

    # -- user commands ------------------------------------------------

    def apply_command(self, command: UserCommand) -> None:
        """Apply one command at a step boundary; raises CommandError and
        leaves the state untouched when the command is invalid."""
        kind = command.kind
        if kind == "set_center":
            if command.point is None:
                raise CommandError("set_center requires a point")
            x, y = float(command.point[0]), float(command.point[1])
            w, h = self.config.canvas_size
            if not (0.0 <= x <= w and 0.0 <= y <= h):
                raise CommandError(
                    f"center ({x}, {y}) outside the {w} x {h} canvas")
            point = np.array([x, y])
            for channel in self.channels.values():
                channel.target_center = point.copy()
        elif kind == "set_l":
            if command.value is None or not math.isfinite(command.value):
                raise CommandError("set_l requires a finite value")
            if command.value <= 0.0:
                raise CommandError(
                    f"turn-smoothness must be positive, got {command.value}")
            self.l_value = float(command.value)
            self.l_pinned = True
        elif kind == "set_trail_width":
            if command.value is None or not math.isfinite(command.value):
                raise CommandError("set_trail_width requires a finite value")
            if not 0.0 < command.value <= self.config.max_trail_width:
                raise CommandError(
                    f"trail width must be in (0, {self.config.max_trail_width}], "
                    f"got {command.value}")
            self.trail_width = float(command.value)
        elif kind == "pause":
            self.paused = True
        elif kind == "resume":
            self.paused = False
        else:
            raise CommandError(f"unknown command kind {kind!r}")

    # -- densities ----------------------------------------------------

    def _relax_channels(self) -> None:
        if self.config.tau > 0.0:
            factor = math.exp(-self.config.dt / self.config.tau)
        else:
            factor = 0.0
        dead = []
        for pigment, ch in self.channels.items():
            ch.k = ch.target_k + (ch.k - ch.target_k) * factor
            ch.center = ch.target_center + (ch.center - ch.target_center) * factor
            if ch.k <= self._k_eps and ch.target_k <= self._k_eps:
                dead.append(pigment)
        for pigment in dead:
            del self.channels[pigment]

    def active_densities(self) -> list[GaussianDensity]:
        sigma = (self.config.sigma, self.config.sigma)
        out = []
        for pigment in sorted(self.channels):
            ch = self.channels[pigment]
            if ch.k > self._k_eps:
                out.append(GaussianDensity(pigment,
                                           (float(ch.center[0]), float(ch.center[1])),
                                           sigma, ch.k))
        return out

    # -- stepping -----------------------------------------------------

    def step(self, commands: Sequence[UserCommand] = ()) -> StepResult:
        """Advance one dt, applying commands after the due music events.

        An invalid command is skipped and reported in the result rather
        than aborting the step, so a rejected command and no command leave
        identical state behind.
        """
        if self.paused:
            raise CommandError("cannot step while paused")
        t_new = (self.step_index + 1) * self.config.dt
        consumed = self._consume_events(t_new)
        rejected: list[tuple[UserCommand, str]] = []
        for command in commands:
            try:
                self.apply_command(command)
            except CommandError as exc:
                rejected.append((command, str(exc)))
        self._relax_channels()

        densities = self.active_densities()
        stamps: list[Stamp] = []
        if densities:
            per_color: dict[int, dict[int, MassCentroid]] = {}
            for density in densities:
                per_color[density.color] = color_coverage(
                    self.robots, density, self.grid)
            self.last_cost = locational_cost(self.robots, densities, self.grid)

            for robot in self.robots:
                u = saturate(control_input(robot, per_color), self.config.u_max)
                robot.control = u
                v, omega = si_to_unicycle(u, robot.heading, self.l_value)
                dt = self.config.dt
                robot.position = robot.position + dt * v * np.array(
                    [math.cos(robot.heading), math.sin(robot.heading)])
                robot.heading = wrap_angle(robot.heading + dt * omega)
                np.clip(robot.position, (0.0, 0.0), self.config.canvas_size,
                        out=robot.position)

            for robot in self.robots:
                masses = {color: entries[robot.index].mass
                          for color, entries in per_color.items()
                          if robot.index in entries}
                alpha_map = pigment_proportions(robot, masses)
                alpha = tuple(alpha_map.get(p, 0.0) for p in range(3))
                self.last_alphas[robot.index] = alpha
                stamp = Stamp(robot.index, float(robot.position[0]),
                              float(robot.position[1]), self.trail_width, alpha)
                self.canvas.apply_stamp(stamp)
                stamps.append(stamp)
        else:
            self.last_cost = 0.0
            for robot in self.robots:
                robot.control = np.zeros(2)
                self.last_alphas[robot.index] = (0.0, 0.0, 0.0)

        self.step_index += 1
        self.clock = self.step_index * self.config.dt
        return StepResult(self.step_index, self.clock, self.last_cost,
                          stamps, consumed, rejected)


def run_headless(config: SimConfig, timeline: MusicTimeline,
                 duration: float | None = None,
                 scheduled: Iterable[tuple[int, UserCommand]] = (),
                 palette: dict[str, ColorRGB] | None = None,
                 ) -> tuple[Engine, dict]:
    """Run a full session without a clock or a client.

    scheduled holds (step_index, command) pairs applied at the start of
    that step; invalid ones are dropped, matching a live rejection.
    Returns the finished engine and the metrics document.
    """
    engine = Engine(config, timeline, palette)
    if duration is None:
        duration = timeline.duration
    n_steps = int(round(duration / config.dt))
    queue: dict[int, list[UserCommand]] = {}
    for step_idx, command in scheduled:
        queue.setdefault(int(step_idx), []).append(command)

    costs: list[float] = []
    path_lengths = [0.0] * config.n_robots
    before = [r.position.copy() for r in engine.robots]
    for i in range(n_steps):
        engine.paused = False  # headless time has no wall clock to stop
        result = engine.step(queue.get(i, ()))
        costs.append(result.cost)
        for j, robot in enumerate(engine.robots):
            path_lengths[j] += float(np.linalg.norm(robot.position - before[j]))
            before[j] = robot.position.copy()

    metrics = {
        "cost": costs,
        "path_lengths": path_lengths,
        "chords_consumed": engine.chords_consumed,
    }
    return engine, metrics
