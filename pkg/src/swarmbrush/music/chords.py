"""Windowed template matching for chord detection, plus tempo extraction.

The note stream is cut into analysis windows (one beat by default). Each
window's sounding pitch-class set is scored against every (root, quality)
template; the score rewards covered template tones and penalizes
extraneous pitch classes. Runs of windows agreeing on (root, quality)
merge into a single chord event.
"""
from __future__ import annotations

from dataclasses import dataclass

from swarmbrush.music.midi import DEFAULT_BPM, ParsedMidi
from swarmbrush.music.timeline import (
    QUALITY_TEMPLATES,
    ChordEvent,
    ChordQuality,
    Key,
    NoteEvent,
    TempoEvent,
)

EXTRANEOUS_PENALTY = 0.5

# Scoring order fixes the tie-break among equal-scoring qualities.
_QUALITY_ORDER = [q for q in ChordQuality if q in QUALITY_TEMPLATES]


@dataclass(frozen=True)
class _WindowMatch:
    start: float
    end: float
    root: int
    quality: ChordQuality
    pitch_classes: frozenset[int]


def window_pitch_classes(notes: list[NoteEvent], start: float, end: float) -> frozenset[int]:
    """Pitch classes with any sounding time inside [start, end)."""
    present = set()
    for note in notes:
        if note.onset < end - 1e-9 and note.end > start + 1e-9:
            present.add(note.pitch_class)
    return frozenset(present)


def match_template(pcs: frozenset[int]) -> tuple[int, ChordQuality]:
    """Best (root, quality) for a pitch-class set.

    score = |template ∩ set| - 0.5 * |set \\ template|; ties prefer the
    smaller template, then the lower root, then quality order.
    """
    best_rank = None
    best = (0, ChordQuality.MAJOR)
    for root in range(12):
        for q_idx, quality in enumerate(_QUALITY_ORDER):
            template = frozenset((root + iv) % 12 for iv in QUALITY_TEMPLATES[quality])
            score = len(template & pcs) - EXTRANEOUS_PENALTY * len(pcs - template)
            rank = (-score, len(template), root, q_idx)
            if best_rank is None or rank < best_rank:
                best_rank = rank
                best = (root, quality)
    return best


def detect_chords(notes: list[NoteEvent], key: Key,
                  window: float | None = None,
                  tempos: list[TempoEvent] | None = None) -> list[ChordEvent]:
    """Partition the piece into windows and emit merged chord events.

    window=None sizes each window to one beat of the governing tempo
    (the supplied tempo map, or one estimated from onsets); a fixed
    window in seconds can be forced instead. Silent windows yield
    nothing.
    """
    from swarmbrush.emotion import classify_function

    if window is not None and window <= 0:
        raise ValueError("window must be positive")
    if not notes:
        return []

    if tempos is None:
        tempos = extract_tempo(notes, None)
    total_end = max(n.end for n in notes)

    def window_length(t: float) -> float:
        bpm = tempos[0].bpm
        for ev in tempos:
            if ev.onset <= t + 1e-9:
                bpm = ev.bpm
        return window if window is not None else 60.0 / bpm

    matches: list[_WindowMatch] = []
    t = 0.0
    while t < total_end - 1e-9:
        length = window_length(t)
        end = min(t + length, total_end)
        pcs = window_pitch_classes(notes, t, end)
        if pcs:
            root, quality = match_template(pcs)
            matches.append(_WindowMatch(t, end, root, quality, pcs))
        t += length

    chords: list[ChordEvent] = []
    for m in matches:
        prev = chords[-1] if chords else None
        if (prev is not None and prev.root == m.root and prev.quality == m.quality
                and abs(prev.end - m.start) < 1e-9):
            chords[-1] = ChordEvent(
                prev.onset, m.end - prev.onset, prev.root, prev.quality,
                pitch_classes=prev.pitch_classes | m.pitch_classes)
        else:
            chords.append(ChordEvent(m.start, m.end - m.start, m.root, m.quality,
                                     pitch_classes=m.pitch_classes))

    return [
        ChordEvent(c.onset, c.duration, c.root, c.quality,
                   function=classify_function(c, key), pitch_classes=c.pitch_classes)
        for c in chords
    ]


def _median(values: list[float]) -> float:
    ordered = sorted(values)
    n = len(ordered)
    mid = n // 2
    return ordered[mid] if n % 2 else 0.5 * (ordered[mid - 1] + ordered[mid])


def estimate_tempo_events(notes: list[NoteEvent], window_s: float = 4.0,
                          change_threshold: float = 0.05) -> list[TempoEvent]:
    """Tempo from note onsets: 60 / median inter-onset interval.

    The median runs over IOIs inside a sliding window ending at each
    onset; a new event is emitted when the estimate moves more than the
    threshold relative to the last emitted value.
    """
    onsets = sorted({round(n.onset, 9) for n in notes})
    iois = [(b, b - a) for a, b in zip(onsets, onsets[1:]) if b - a > 1e-6]
    if not iois:
        return [TempoEvent(0.0, DEFAULT_BPM)]

    events: list[TempoEvent] = []
    for at, _ in iois:
        recent = [d for t, d in iois if at - window_s <= t <= at]
        bpm = 60.0 / _median(recent)
        if not events:
            events.append(TempoEvent(0.0, bpm))
        elif abs(bpm - events[-1].bpm) > change_threshold * events[-1].bpm:
            events.append(TempoEvent(at, bpm))
    return events


def extract_tempo(notes: list[NoteEvent], parsed: ParsedMidi | None) -> list[TempoEvent]:
    """Tempo meta events pass through; otherwise estimate from onsets."""
    if parsed is not None and parsed.tempos:
        return list(parsed.tempos)
    if not notes:
        return [TempoEvent(0.0, DEFAULT_BPM)]
    return estimate_tempo_events(notes)
