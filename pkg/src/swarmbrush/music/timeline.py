"""Symbolic music timeline: note/chord/tempo events and their JSON form.

The timeline is the contract between music analysis and everything
downstream: a key, a non-overlapping onset-sorted chord list, and a
non-empty tempo list. `load_timeline` / `timeline_to_dict` round-trip
losslessly, so a serialized timeline is a fixed point.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from typing import TYPE_CHECKING

import math

if TYPE_CHECKING:
    from swarmbrush.emotion import ChordFunction

PERCUSSION_CHANNEL = 9


class TimelineError(ValueError):
    """Raised when timeline content violates the schema or an invariant."""


class Mode(str, Enum):
    MAJOR = "major"
    MINOR = "minor"


class ChordQuality(str, Enum):
    MAJOR = "major"
    MINOR = "minor"
    DOMINANT7 = "dominant7"
    MAJOR7_SUBDOMINANT = "major7-subdominant"
    DIMINISHED7 = "diminished7"
    AUGMENTED = "augmented"
    MINOR6 = "minor6"
    ADDED6_MAJOR = "added6major"
    ADDED6_MINOR = "added6minor"
    OTHER = "other"


# Interval template (semitones above the root) for each detectable quality.
# "minor6" is read as a minor triad with a minor sixth, which keeps it
# distinct from "added6minor" (minor triad plus major sixth).
QUALITY_TEMPLATES: dict[ChordQuality, frozenset[int]] = {
    ChordQuality.MAJOR: frozenset({0, 4, 7}),
    ChordQuality.MINOR: frozenset({0, 3, 7}),
    ChordQuality.DOMINANT7: frozenset({0, 4, 7, 10}),
    ChordQuality.MAJOR7_SUBDOMINANT: frozenset({0, 4, 7, 11}),
    ChordQuality.DIMINISHED7: frozenset({0, 3, 6, 9}),
    ChordQuality.AUGMENTED: frozenset({0, 4, 8}),
    ChordQuality.MINOR6: frozenset({0, 3, 7, 8}),
    ChordQuality.ADDED6_MAJOR: frozenset({0, 4, 7, 9}),
    ChordQuality.ADDED6_MINOR: frozenset({0, 3, 7, 9}),
}

PITCH_CLASS_NAMES = ["C", "C#", "D", "D#", "E", "F", "F#", "G", "G#", "A", "A#", "B"]


@dataclass(frozen=True, order=True)
class NoteEvent:
    onset: float
    duration: float
    pitch: int
    velocity: int = 64

    def __post_init__(self):
        if not (math.isfinite(self.onset) and math.isfinite(self.duration)):
            raise TimelineError(f"non-finite note timing: {self.onset}, {self.duration}")
        if self.onset < 0:
            raise TimelineError(f"negative note onset {self.onset}")
        if self.duration <= 0:
            raise TimelineError(f"non-positive note duration {self.duration}")
        if not 0 <= self.pitch <= 127:
            raise TimelineError(f"pitch {self.pitch} outside 0..127")
        if not 0 <= self.velocity <= 127:
            raise TimelineError(f"velocity {self.velocity} outside 0..127")

    @property
    def end(self) -> float:
        return self.onset + self.duration

    @property
    def pitch_class(self) -> int:
        return self.pitch % 12


@dataclass(frozen=True)
class Key:
    tonic: int
    mode: Mode

    def __post_init__(self):
        if not 0 <= self.tonic <= 11:
            raise TimelineError(f"tonic {self.tonic} outside 0..11")

    def label(self) -> str:
        name = PITCH_CLASS_NAMES[self.tonic]
        return name if self.mode is Mode.MAJOR else name + "m"


@dataclass(frozen=True)
class TempoEvent:
    onset: float
    bpm: float

    def __post_init__(self):
        if not math.isfinite(self.bpm) or self.bpm <= 0:
            raise TimelineError(f"bpm must be finite and positive, got {self.bpm}")
        if not math.isfinite(self.onset) or self.onset < 0:
            raise TimelineError(f"tempo onset must be non-negative, got {self.onset}")


@dataclass(frozen=True)
class ChordEvent:
    onset: float
    duration: float
    root: int
    quality: ChordQuality
    function: "ChordFunction | None" = None
    pitch_classes: frozenset[int] = field(default=frozenset())

    def __post_init__(self):
        if self.duration <= 0:
            raise TimelineError(f"non-positive chord duration {self.duration}")
        if not math.isfinite(self.onset) or self.onset < 0:
            raise TimelineError(f"chord onset must be non-negative, got {self.onset}")
        if not 0 <= self.root <= 11:
            raise TimelineError(f"chord root {self.root} outside 0..11")
        if not self.pitch_classes:
            # Derive the sounding set from the quality template.
            template = QUALITY_TEMPLATES.get(self.quality, frozenset({0}))
            pcs = frozenset((self.root + iv) % 12 for iv in template)
            object.__setattr__(self, "pitch_classes", pcs)

    @property
    def end(self) -> float:
        return self.onset + self.duration

    def label(self) -> str:
        suffix = {
            ChordQuality.MAJOR: "",
            ChordQuality.MINOR: "m",
            ChordQuality.DOMINANT7: "7",
            ChordQuality.MAJOR7_SUBDOMINANT: "maj7",
            ChordQuality.DIMINISHED7: "dim7",
            ChordQuality.AUGMENTED: "aug",
            ChordQuality.MINOR6: "m(b6)",
            ChordQuality.ADDED6_MAJOR: "add6",
            ChordQuality.ADDED6_MINOR: "m(add6)",
            ChordQuality.OTHER: "?",
        }[self.quality]
        return PITCH_CLASS_NAMES[self.root] + suffix


@dataclass(frozen=True)
class MusicTimeline:
    key: Key
    chords: tuple[ChordEvent, ...]
    tempos: tuple[TempoEvent, ...]
    duration: float

    def validate(self) -> "MusicTimeline":
        if not self.tempos:
            raise TimelineError("timeline needs at least one tempo event")
        for name, events in (("chords", self.chords), ("tempos", self.tempos)):
            onsets = [e.onset for e in events]
            if onsets != sorted(onsets):
                raise TimelineError(f"{name} are not onset-sorted")
        for a, b in zip(self.chords, self.chords[1:]):
            if b.onset < a.end - 1e-9:
                raise TimelineError(
                    f"chords overlap: [{a.onset}, {a.end}) and [{b.onset}, {b.end})"
                )
        return self

    def bpm_at(self, t: float) -> float:
        """Tempo in effect at time t (last event with onset <= t)."""
        bpm = self.tempos[0].bpm
        for ev in self.tempos:
            if ev.onset <= t:
                bpm = ev.bpm
            else:
                break
        return bpm


def _require_keys(obj: dict, allowed: set[str], required: set[str], where: str):
    unknown = set(obj) - allowed
    if unknown:
        raise TimelineError(f"unknown field(s) {sorted(unknown)} in {where}")
    missing = required - set(obj)
    if missing:
        raise TimelineError(f"missing field(s) {sorted(missing)} in {where}")


def _as_number(value, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise TimelineError(f"{where} must be a number, got {value!r}")
    return float(value)


def timeline_from_dict(doc: dict) -> MusicTimeline:
    """Build and validate a MusicTimeline from its JSON document form."""
    from swarmbrush.emotion import classify_function

    if not isinstance(doc, dict):
        raise TimelineError("timeline document must be a JSON object")
    _require_keys(doc, {"key", "chords", "tempos"}, {"key", "chords", "tempos"}, "timeline")

    key_doc = doc["key"]
    if not isinstance(key_doc, dict):
        raise TimelineError("key must be an object")
    _require_keys(key_doc, {"tonic", "mode"}, {"tonic", "mode"}, "key")
    try:
        mode = Mode(key_doc["mode"])
    except ValueError:
        raise TimelineError(f"unknown mode {key_doc['mode']!r}") from None
    if not isinstance(key_doc["tonic"], int):
        raise TimelineError("key tonic must be an integer")
    key = Key(key_doc["tonic"], mode)

    chords = []
    for idx, ch in enumerate(doc["chords"]):
        where = f"chords[{idx}]"
        if not isinstance(ch, dict):
            raise TimelineError(f"{where} must be an object")
        _require_keys(ch, {"onset", "duration", "root", "quality"},
                      {"onset", "duration", "root", "quality"}, where)
        try:
            quality = ChordQuality(ch["quality"])
        except ValueError:
            raise TimelineError(f"unknown chord quality {ch['quality']!r} in {where}") from None
        if not isinstance(ch["root"], int):
            raise TimelineError(f"{where} root must be an integer")
        chords.append(ChordEvent(
            onset=_as_number(ch["onset"], where + ".onset"),
            duration=_as_number(ch["duration"], where + ".duration"),
            root=ch["root"],
            quality=quality,
        ))

    tempos = []
    for idx, te in enumerate(doc["tempos"]):
        where = f"tempos[{idx}]"
        if not isinstance(te, dict):
            raise TimelineError(f"{where} must be an object")
        _require_keys(te, {"onset", "bpm"}, {"onset", "bpm"}, where)
        tempos.append(TempoEvent(_as_number(te["onset"], where + ".onset"),
                                 _as_number(te["bpm"], where + ".bpm")))

    chords = [
        ChordEvent(c.onset, c.duration, c.root, c.quality,
                   function=classify_function(c, key), pitch_classes=c.pitch_classes)
        for c in chords
    ]
    duration = max([c.end for c in chords], default=0.0)
    timeline = MusicTimeline(key, tuple(chords), tuple(tempos), duration)
    return timeline.validate()


def load_timeline(text: str) -> MusicTimeline:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise TimelineError(f"invalid JSON: {exc}") from None
    return timeline_from_dict(doc)


def timeline_to_dict(tl: MusicTimeline) -> dict:
    return {
        "key": {"tonic": tl.key.tonic, "mode": tl.key.mode.value},
        "chords": [
            {"onset": c.onset, "duration": c.duration, "root": c.root,
             "quality": c.quality.value}
            for c in tl.chords
        ],
        "tempos": [{"onset": t.onset, "bpm": t.bpm} for t in tl.tempos],
    }


def dump_timeline(tl: MusicTimeline) -> str:
    """Canonical JSON form: sorted keys, two-space indent, exact floats."""
    return json.dumps(timeline_to_dict(tl), sort_keys=True, indent=2) + "\n"
