"""swarmbrush: a swarm of virtual painters steered by music.

A MIDI file (or a prebuilt timeline) is reduced to a key, a chord
sequence, and a tempo map. Chords map to emotions and emotions to colors;
each color becomes a Gaussian importance field on the canvas, placed on a
circle-of-fifths wheel. Robots equipped with cyan, magenta, and yellow
pigment run Voronoi coverage control over those fields and leave
subtractive paint trails behind them.
"""
from swarmbrush.music import analyze_midi
from swarmbrush.music.timeline import (
    ChordEvent,
    Key,
    MusicTimeline,
    NoteEvent,
    TempoEvent,
    load_timeline,
    timeline_from_dict,
    timeline_to_dict,
)

__version__ = "0.1.0"

__all__ = [
    "analyze_midi",
    "ChordEvent", "Key", "MusicTimeline", "NoteEvent", "TempoEvent",
    "load_timeline", "timeline_from_dict", "timeline_to_dict",
    "__version__",
]
