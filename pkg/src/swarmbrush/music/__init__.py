"""Symbolic music analysis: MIDI in, chord/key/tempo timeline out."""
from __future__ import annotations

from swarmbrush.music.chords import detect_chords, extract_tempo
from swarmbrush.music.keyfinder import estimate_key
from swarmbrush.music.midi import MidiParseError, ParsedMidi, parse_midi
from swarmbrush.music.timeline import (
    ChordEvent,
    ChordQuality,
    Key,
    Mode,
    MusicTimeline,
    NoteEvent,
    TempoEvent,
    TimelineError,
    dump_timeline,
    load_timeline,
    timeline_from_dict,
    timeline_to_dict,
)

__all__ = [
    "ChordEvent", "ChordQuality", "Key", "Mode", "MusicTimeline", "NoteEvent",
    "TempoEvent", "TimelineError", "MidiParseError", "ParsedMidi",
    "parse_midi", "load_timeline", "dump_timeline", "timeline_from_dict",
    "timeline_to_dict", "estimate_key", "detect_chords", "extract_tempo",
    "analyze_midi",
]


def analyze_midi(data: bytes, key: Key | None = None,
                 window: float | None = None) -> MusicTimeline:
    """Full analysis pipeline: SMF bytes to a validated MusicTimeline."""
    parsed = parse_midi(data)
    tempos = extract_tempo(parsed.notes, parsed)
    if key is None:
        if not parsed.notes:
            key = Key(0, Mode.MAJOR)
        else:
            key = estimate_key(parsed.notes)
    chords = detect_chords(parsed.notes, key, window=window, tempos=tempos)
    duration = max(
        [n.end for n in parsed.notes] + [c.end for c in chords], default=0.0)
    return MusicTimeline(key, tuple(chords), tuple(tempos), duration).validate()
