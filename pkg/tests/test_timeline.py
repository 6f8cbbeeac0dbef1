"""Timeline document schema: strict parsing, validation, round trips."""
from __future__ import annotations

import json

import pytest

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


def minimal_doc() -> dict:
    return {
        "key": {"tonic": 0, "mode": "major"},
        "chords": [
            {"onset": 0.0, "duration": 2.0, "root": 0, "quality": "major"},
            {"onset": 2.0, "duration": 2.0, "root": 7, "quality": "dominant7"},
        ],
        "tempos": [{"onset": 0.0, "bpm": 120.0}],
    }


def test_round_trip_preserves_content():
    tl = timeline_from_dict(minimal_doc())
    doc2 = timeline_to_dict(tl)
    tl2 = timeline_from_dict(doc2)
    assert tl2.key == tl.key
    assert [(c.onset, c.duration, c.root, c.quality) for c in tl2.chords] \
        == [(c.onset, c.duration, c.root, c.quality) for c in tl.chords]
    assert tl2.tempos == tl.tempos
    assert tl2.duration == tl.duration


def test_dump_is_stable_text():
    tl = timeline_from_dict(minimal_doc())
    assert dump_timeline(tl) == dump_timeline(load_timeline(dump_timeline(tl)))


def test_functions_assigned_on_load():
    tl = timeline_from_dict(minimal_doc())
    assert tl.chords[0].function is not None
    assert tl.chords[0].function.value == "Major tonic"
    assert tl.chords[1].function.value == "Seventh"


def test_duration_is_last_chord_end():
    assert timeline_from_dict(minimal_doc()).duration == 4.0


@pytest.mark.parametrize("mutate", [
    lambda d: d.update(extra=1),
    lambda d: d["key"].update(name="C"),
    lambda d: d["chords"][0].update(velocity=3),
    lambda d: d["tempos"][0].update(label="fast"),
])
def test_unknown_fields_rejected(mutate):
    doc = minimal_doc()
    mutate(doc)
    with pytest.raises(TimelineError):
        timeline_from_dict(doc)


@pytest.mark.parametrize("mutate", [
    lambda d: d.pop("key"),
    lambda d: d.pop("tempos"),
    lambda d: d["key"].pop("mode"),
    lambda d: d["chords"][0].pop("root"),
])
def test_missing_fields_rejected(mutate):
    doc = minimal_doc()
    mutate(doc)
    with pytest.raises(TimelineError):
        timeline_from_dict(doc)


def test_bad_values_rejected():
    for patch in [
        {"root": 12}, {"root": -1}, {"quality": "sus4"},
        {"onset": -0.5}, {"duration": 0.0}, {"duration": -1.0},
    ]:
        doc = minimal_doc()
        doc["chords"][0].update(patch)
        with pytest.raises((TimelineError, ValueError)):
            timeline_from_dict(doc)


def test_empty_chords_allowed():
    doc = minimal_doc()
    doc["chords"] = []
    tl = timeline_from_dict(doc)
    assert len(tl.chords) == 0
    assert tl.duration == 0.0


def test_overlapping_chords_rejected():
    doc = minimal_doc()
    doc["chords"][1]["onset"] = 1.0
    with pytest.raises(TimelineError):
        timeline_from_dict(doc)


def test_unsorted_chords_rejected():
    doc = minimal_doc()
    doc["chords"] = list(reversed(doc["chords"]))
    with pytest.raises(TimelineError):
        timeline_from_dict(doc)


def test_no_tempo_rejected():
    doc = minimal_doc()
    doc["tempos"] = []
    with pytest.raises(TimelineError):
        timeline_from_dict(doc)


def test_not_json_object():
    with pytest.raises(TimelineError):
        load_timeline(json.dumps([1, 2, 3]))
    with pytest.raises(TimelineError):
        load_timeline("not json at all")


def test_bpm_at_piecewise_lookup():
    doc = minimal_doc()
    doc["tempos"] = [{"onset": 0.0, "bpm": 100.0}, {"onset": 10.0, "bpm": 140.0}]
    tl = timeline_from_dict(doc)
    assert tl.bpm_at(0.0) == 100.0
    assert tl.bpm_at(9.999) == 100.0
    assert tl.bpm_at(10.0) == 140.0
    assert tl.bpm_at(50.0) == 140.0


def test_chord_labels():
    assert ChordEvent(0.0, 1.0, 0, ChordQuality.MAJOR).label() == "C"
    assert ChordEvent(0.0, 1.0, 9, ChordQuality.MINOR).label() == "Am"
    assert ChordEvent(0.0, 1.0, 7, ChordQuality.DOMINANT7).label() == "G7"
    assert Key(0, Mode.MAJOR).label() == "C"
    assert Key(9, Mode.MINOR).label() == "Am"


def test_chord_pitch_classes_derived_from_template():
    c_major = ChordEvent(0.0, 1.0, 0, ChordQuality.MAJOR)
    assert c_major.pitch_classes == frozenset({0, 4, 7})
    g7 = ChordEvent(0.0, 1.0, 7, ChordQuality.DOMINANT7)
    assert g7.pitch_classes == frozenset({7, 11, 2, 5})


def test_note_event_validation():
    with pytest.raises(ValueError):
        NoteEvent(-1.0, 1.0, 60, 64)
    with pytest.raises(ValueError):
        NoteEvent(0.0, 1.0, 128, 64)
    with pytest.raises(ValueError):
        NoteEvent(0.0, -2.0, 60, 64)


def test_tempo_event_validation():
    with pytest.raises(ValueError):
        TempoEvent(0.0, 0.0)
    with pytest.raises(ValueError):
        TempoEvent(-1.0, 120.0)


def test_validate_returns_self():
    tl = timeline_from_dict(minimal_doc())
    assert tl.validate() is tl


def test_manual_timeline_validate_catches_overlap():
    key = Key(0, Mode.MAJOR)
    chords = [ChordEvent(0.0, 3.0, 0, ChordQuality.MAJOR),
              ChordEvent(2.0, 2.0, 7, ChordQuality.MAJOR)]
    tl = MusicTimeline(key, chords, [TempoEvent(0.0, 120.0)], 4.0)
    with pytest.raises(TimelineError):
        tl.validate()
