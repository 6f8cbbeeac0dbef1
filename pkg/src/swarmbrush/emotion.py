"""Chords to emotions, colors, canvas positions, and the tempo-driven
motion parameter.

Three lookups chained together: the functional role of a chord within
the key, the emotion list that role evokes, and the blended RGB of those
emotions under a Plutchik-style palette. The chord wheel arranges roots
on the circle of fifths (majors outside, relative minors inside) so that
harmonic neighbors land near each other on the canvas.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from importlib import resources
from typing import TYPE_CHECKING

from swarmbrush.music.timeline import ChordQuality

if TYPE_CHECKING:
    from swarmbrush.music.timeline import ChordEvent, Key


class ChordFunction(Enum):
    MAJOR_TONIC = "Major tonic"
    MINOR_TONIC = "Minor tonic"
    NATURAL_MINOR = "Natural minor"
    DOMINANT = "Dominant"
    SEVENTH = "Seventh"
    SECONDARY_DOMINANT = "Secondary dominant"
    MAJOR_SUBDOMINANT = "Major subdominant"
    MAJOR_SUBDOMINANT_7 = "Major subdominant 7th"
    ADDED_SIXTH_MAJOR = "Added sixth in a major"
    ADDED_SIXTH_MINOR = "Added sixth in a minor"
    NEAPOLITAN_SIXTH = "Neapolitan sixth"
    DIMINISHED_SEVENTH = "Diminished seventh"
    AUGMENTED = "Augmented"
    MINOR_SIXTH = "Minor sixth"


class Tier(str, Enum):
    MILD = "mild"
    BASIC = "basic"
    INTENSE = "intense"


@dataclass(frozen=True)
class Emotion:
    label: str
    tier: Tier


# Emotion list per chord function, order preserved.
CHORD_EMOTIONS: dict[ChordFunction, tuple[str, ...]] = {
    ChordFunction.MAJOR_TONIC: ("Serenity", "Acceptance", "Trust"),
    ChordFunction.MINOR_TONIC: ("Grief", "Sadness", "Anger"),
    ChordFunction.NATURAL_MINOR: ("Vigilance", "Aggressiveness"),
    ChordFunction.DOMINANT: ("Joy", "Ecstasy", "Amazement"),
    ChordFunction.SEVENTH: ("Rage", "Grief", "Disgust"),
    ChordFunction.SECONDARY_DOMINANT: ("Surprise", "Bittersweet joy"),
    ChordFunction.MAJOR_SUBDOMINANT: ("Joy", "Admiration", "Serenity"),
    ChordFunction.MAJOR_SUBDOMINANT_7: ("Pensiveness", "Sadness", "Yearning"),
    ChordFunction.ADDED_SIXTH_MAJOR: ("Love", "Trust", "Acceptance"),
    ChordFunction.ADDED_SIXTH_MINOR: ("Grief", "Sadness", "Remorse"),
    ChordFunction.NEAPOLITAN_SIXTH: ("Grief", "Sadness", "Pensiveness"),
    ChordFunction.DIMINISHED_SEVENTH: ("Fear", "Despair", "Terror"),
    ChordFunction.AUGMENTED: ("Amazement", "Surprise", "Ecstasy"),
    ChordFunction.MINOR_SIXTH: ("Fear", "Anxiety", "Apprehension"),
}

# Intensity tier per vocabulary entry: the Plutchik wheel's inner ring is
# intense, outer ring mild; dyads and primaries sit on the basic ring.
EMOTION_TIERS: dict[str, Tier] = {
    "Serenity": Tier.MILD, "Acceptance": Tier.MILD,
    "Apprehension": Tier.MILD, "Pensiveness": Tier.MILD,
    "Ecstasy": Tier.INTENSE, "Admiration": Tier.INTENSE,
    "Terror": Tier.INTENSE, "Amazement": Tier.INTENSE,
    "Grief": Tier.INTENSE, "Rage": Tier.INTENSE, "Vigilance": Tier.INTENSE,
    "Joy": Tier.BASIC, "Trust": Tier.BASIC, "Fear": Tier.BASIC,
    "Surprise": Tier.BASIC, "Sadness": Tier.BASIC, "Disgust": Tier.BASIC,
    "Anger": Tier.BASIC, "Love": Tier.BASIC, "Aggressiveness": Tier.BASIC,
    "Remorse": Tier.BASIC, "Despair": Tier.BASIC, "Anxiety": Tier.BASIC,
    "Yearning": Tier.BASIC, "Bittersweet joy": Tier.BASIC,
}


def _clamp(v: float) -> float:
    return 0.0 if v < 0.0 else 1.0 if v > 1.0 else v


@dataclass(frozen=True)
class ColorRGB:
    r: float
    g: float
    b: float

    def __post_init__(self):
        for name in ("r", "g", "b"):
            object.__setattr__(self, name, _clamp(getattr(self, name)))

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.r, self.g, self.b)


@dataclass(frozen=True)
class ColorCMY:
    c: float
    m: float
    y: float

    def __post_init__(self):
        for name in ("c", "m", "y"):
            object.__setattr__(self, name, _clamp(getattr(self, name)))

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.c, self.m, self.y)


def rgb_to_cmy(color: ColorRGB) -> ColorCMY:
    return ColorCMY(1.0 - color.r, 1.0 - color.g, 1.0 - color.b)


def cmy_to_rgb(color: ColorCMY) -> ColorRGB:
    return ColorRGB(1.0 - color.c, 1.0 - color.m, 1.0 - color.y)


class PaletteError(KeyError):
    pass


def load_palette(path: str | None = None) -> dict[str, ColorRGB]:
    """Emotion-label -> RGB palette, from a JSON file or the bundled one."""
    if path is None:
        text = resources.files("swarmbrush.data").joinpath(
            "plutchik_palette.json").read_text()
    else:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    raw = json.loads(text)
    palette = {}
    for label, rgb in raw.items():
        if (not isinstance(rgb, list)) or len(rgb) != 3:
            raise ValueError(f"palette entry {label!r} must be [r, g, b]")
        palette[label] = ColorRGB(*rgb)
    return palette


@lru_cache(maxsize=1)
def default_palette() -> dict[str, ColorRGB]:
    return load_palette(None)


def classify_function(chord: "ChordEvent", key: "Key") -> ChordFunction:
    """Functional role of a chord relative to the key.

    Scale degree is the semitone offset of the root from the tonic.
    Quality-only rows (diminished seventh, augmented, sixth chords) win
    regardless of degree; the rest is a (degree, quality) decision table
    with a nearest-by-quality fallback for chromatic chords.
    """
    degree = (chord.root - key.tonic) % 12
    q = chord.quality

    if q is ChordQuality.DIMINISHED7:
        return ChordFunction.DIMINISHED_SEVENTH
    if q is ChordQuality.AUGMENTED:
        return ChordFunction.AUGMENTED
    if q is ChordQuality.MINOR6:
        return ChordFunction.MINOR_SIXTH
    if q is ChordQuality.ADDED6_MAJOR:
        return ChordFunction.ADDED_SIXTH_MAJOR
    if q is ChordQuality.ADDED6_MINOR:
        return ChordFunction.ADDED_SIXTH_MINOR

    if q in (ChordQuality.MAJOR, ChordQuality.OTHER):
        if degree == 0:
            return ChordFunction.MAJOR_TONIC
        if degree == 7:
            return ChordFunction.DOMINANT
        if degree == 5:
            return ChordFunction.MAJOR_SUBDOMINANT
        if degree == 1:
            return ChordFunction.NEAPOLITAN_SIXTH
        return ChordFunction.SECONDARY_DOMINANT

    if q is ChordQuality.MINOR:
        if degree == 0:
            return ChordFunction.MINOR_TONIC
        return ChordFunction.NATURAL_MINOR

    if q is ChordQuality.DOMINANT7:
        if degree == 7:
            return ChordFunction.SEVENTH
        if degree == 5:
            return ChordFunction.MAJOR_SUBDOMINANT_7
        return ChordFunction.SECONDARY_DOMINANT

    # major7-subdominant quality
    if degree == 0:
        return ChordFunction.MAJOR_TONIC
    return ChordFunction.MAJOR_SUBDOMINANT_7


def chord_to_emotions(function: ChordFunction) -> list[Emotion]:
    return [Emotion(label, EMOTION_TIERS[label])
            for label in CHORD_EMOTIONS[function]]


def emotions_to_color(emotions: list[Emotion],
                      palette: dict[str, ColorRGB] | None = None) -> ColorRGB:
    """Arithmetic mean of the palette entries for the given emotions."""
    if not emotions:
        raise ValueError("emotions list is empty")
    palette = palette if palette is not None else default_palette()
    r = g = b = 0.0
    for emotion in emotions:
        label = emotion.label if isinstance(emotion, Emotion) else emotion
        if label not in palette:
            raise PaletteError(f"unknown emotion label {label!r}")
        entry = palette[label]
        r += entry.r
        g += entry.g
        b += entry.b
    n = len(emotions)
    return ColorRGB(r / n, g / n, b / n)


# Chord qualities painted on the inner (relative-minor) ring.
MINOR_FAMILY = frozenset({
    ChordQuality.MINOR, ChordQuality.MINOR6,
    ChordQuality.ADDED6_MINOR, ChordQuality.DIMINISHED7,
})


@dataclass(frozen=True)
class ChordWheel:
    center: tuple[float, float]
    r_out: float
    r_in: float

    @classmethod
    def for_canvas(cls, width: float, height: float) -> "ChordWheel":
        side = min(width, height)
        return cls((width / 2.0, height / 2.0), 0.4 * side, 0.25 * side)


def fifths_index(root: int) -> int:
    """Steps clockwise from C on the circle of fifths (7 is self-inverse mod 12)."""
    return (root * 7) % 12


def chord_to_canvas_position(chord: "ChordEvent",
                             wheel: ChordWheel) -> tuple[float, float]:
    """Wheel slot of the chord root: majors outer ring, minors inner ring
    at the angle of their relative major; C major sits at 12 o'clock."""
    if chord.quality in MINOR_FAMILY:
        slot_root = (chord.root + 3) % 12
        radius = wheel.r_in
    else:
        slot_root = chord.root
        radius = wheel.r_out
    angle = math.radians(90.0 - 30.0 * fifths_index(slot_root))
    return (wheel.center[0] + radius * math.cos(angle),
            wheel.center[1] + radius * math.sin(angle))


@dataclass(frozen=True)
class MotionParams:
    l_min: float = 1.0
    l_max: float = 5.0
    t_max: float = 180.0

    def __post_init__(self):
        # l_min == l_max pins the turn smoothness regardless of tempo.
        if not 0 < self.l_min <= self.l_max:
            raise ValueError(f"need 0 < l_min <= l_max, got {self.l_min}, {self.l_max}")
        if self.t_max <= 0:
            raise ValueError(f"t_max must be positive, got {self.t_max}")


def tempo_to_l(bpm: float, params: MotionParams) -> float:
    """Linear inverse mapping from tempo to the turn-smoothness parameter:
    L = L_max - (L_max - L_min) * min(t, t_max) / t_max."""
    if bpm < 0:
        raise ValueError(f"bpm must be non-negative, got {bpm}")
    return params.l_max - (params.l_max - params.l_min) * min(bpm, params.t_max) / params.t_max
