"""Standard MIDI File (format 0/1) reader.

Produces NoteEvents in absolute seconds plus the tempo map taken from
set-tempo meta events. Only what the analysis stage needs is decoded:
note on/off pairing, tempo, and end-of-track; everything else is skipped
structurally. Channel 10 (index 9) percussion is dropped. Parse failures
report the byte offset at which the file stopped making sense.
"""
from __future__ import annotations

import struct
from bisect import bisect_right
from dataclasses import dataclass, field

from swarmbrush.music.timeline import PERCUSSION_CHANNEL, NoteEvent, TempoEvent

DEFAULT_BPM = 120.0
_DEFAULT_US_PER_QN = 500_000  # 120 bpm

META_TEMPO = 0x51
META_END_OF_TRACK = 0x2F


class MidiParseError(ValueError):
    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (byte offset {offset})")
        self.offset = offset


@dataclass
class ParsedMidi:
    notes: list[NoteEvent]
    tempos: list[TempoEvent]
    warnings: list[str] = field(default_factory=list)
    format: int = 0
    ppq: int = 480

    @property
    def initial_bpm(self) -> float:
        return self.tempos[0].bpm if self.tempos else DEFAULT_BPM


class _Reader:
    """Byte cursor that raises MidiParseError with the failing offset."""

    def __init__(self, data: bytes, pos: int = 0, end: int | None = None):
        self.data = data
        self.pos = pos
        self.end = len(data) if end is None else end

    def remaining(self) -> int:
        return self.end - self.pos

    def bytes(self, n: int, what: str) -> bytes:
        if self.remaining() < n:
            raise MidiParseError(f"truncated {what}", self.pos)
        out = self.data[self.pos:self.pos + n]
        self.pos += n
        return out

    def u8(self, what: str) -> int:
        return self.bytes(1, what)[0]

    def u16(self, what: str) -> int:
        return struct.unpack(">H", self.bytes(2, what))[0]

    def u32(self, what: str) -> int:
        return struct.unpack(">I", self.bytes(4, what))[0]

    def vlq(self, what: str) -> int:
        value = 0
        for _ in range(4):
            b = self.u8(what)
            value = (value << 7) | (b & 0x7F)
            if not b & 0x80:
                return value
        raise MidiParseError(f"variable-length quantity too long in {what}", self.pos)


@dataclass
class _RawNote:
    tick_on: int
    tick_off: int
    pitch: int
    velocity: int
    channel: int


def _parse_track(reader: _Reader, track_no: int, warnings: list[str]):
    """One MTrk chunk -> (raw notes, tempo changes as (tick, us_per_qn))."""
    notes: list[_RawNote] = []
    tempos: list[tuple[int, int]] = []
    open_notes: dict[tuple[int, int], list[_RawNote]] = {}
    tick = 0
    running_status = None

    while reader.remaining() > 0:
        tick += reader.vlq("delta time")
        status = reader.u8("event status")
        if status < 0x80:
            if running_status is None:
                raise MidiParseError("data byte without running status", reader.pos - 1)
            reader.pos -= 1
            status = running_status

        if status == 0xFF:
            running_status = None
            meta_type = reader.u8("meta type")
            length = reader.vlq("meta length")
            payload = reader.bytes(length, "meta payload")
            if meta_type == META_TEMPO and length == 3:
                us = int.from_bytes(payload, "big")
                if us > 0:
                    tempos.append((tick, us))
            elif meta_type == META_END_OF_TRACK:
                break
        elif status in (0xF0, 0xF7):
            running_status = None
            length = reader.vlq("sysex length")
            reader.bytes(length, "sysex payload")
        elif status >= 0xF0:
            raise MidiParseError(f"unexpected system message 0x{status:02X}", reader.pos - 1)
        else:
            running_status = status
            kind = status & 0xF0
            channel = status & 0x0F
            if kind in (0x80, 0x90, 0xA0, 0xB0, 0xE0):
                d1 = reader.u8("event data")
                d2 = reader.u8("event data")
            else:  # program change / channel pressure
                d1 = reader.u8("event data")
                d2 = 0
            if kind == 0x90 and d2 > 0:
                open_notes.setdefault((channel, d1), []).append(
                    _RawNote(tick, -1, d1, d2, channel))
            elif kind == 0x80 or (kind == 0x90 and d2 == 0):
                stack = open_notes.get((channel, d1))
                if stack:
                    note = stack.pop()
                    note.tick_off = tick
                    notes.append(note)
                # orphan note-off is harmless; ignore

    for (channel, pitch), stack in sorted(open_notes.items()):
        for note in stack:
            note.tick_off = tick
            notes.append(note)
            warnings.append(
                f"track {track_no}: note-on pitch {pitch} "
                f"channel {channel} had no note-off; closed at track end")
    return notes, tempos


class _TickClock:
    """Tick -> seconds conversion under a piecewise-constant tempo map."""

    def __init__(self, ppq: int, tempo_ticks: list[tuple[int, int]]):
        merged: dict[int, int] = {}
        for tick, us in sorted(tempo_ticks):
            merged[tick] = us  # same-tick changes: last one wins
        if 0 not in merged:
            merged[0] = _DEFAULT_US_PER_QN
        self.ticks = sorted(merged)
        self.us = [merged[t] for t in self.ticks]
        self.seconds = [0.0]
        for i in range(1, len(self.ticks)):
            span = (self.ticks[i] - self.ticks[i - 1]) * self.us[i - 1] / (1e6 * ppq)
            self.seconds.append(self.seconds[-1] + span)
        self.ppq = ppq

    def to_seconds(self, tick: int) -> float:
        i = bisect_right(self.ticks, tick) - 1
        return self.seconds[i] + (tick - self.ticks[i]) * self.us[i] / (1e6 * self.ppq)


def parse_midi(data: bytes) -> ParsedMidi:
    """Parse SMF format 0/1 bytes into notes, tempo events, and warnings."""
    reader = _Reader(data)
    magic = reader.bytes(4, "header chunk")
    if magic != b"MThd":
        raise MidiParseError(f"not a MIDI file: header chunk is {magic!r}", 0)
    header_len = reader.u32("header length")
    if header_len < 6:
        raise MidiParseError(f"header chunk too short ({header_len} bytes)", reader.pos - 4)
    fmt = reader.u16("header format")
    ntracks = reader.u16("header track count")
    division = reader.u16("header division")
    reader.bytes(header_len - 6, "header padding")
    if fmt not in (0, 1):
        raise MidiParseError(f"unsupported SMF format {fmt}", 8)

    warnings: list[str] = []
    all_raw: list[tuple[_RawNote, int]] = []
    tempo_ticks: list[tuple[int, int]] = []

    tracks_read = 0
    while tracks_read < ntracks and reader.remaining() > 0:
        chunk_magic = reader.bytes(4, f"track {tracks_read} chunk")
        chunk_len = reader.u32(f"track {tracks_read} length")
        if chunk_magic != b"MTrk":
            # Unknown chunk types sit between tracks and must be skipped
            # without counting toward the declared track total.
            reader.bytes(chunk_len, f"chunk {chunk_magic!r}")
            continue
        if reader.remaining() < chunk_len:
            raise MidiParseError(f"truncated track {tracks_read}", reader.pos)
        track_reader = _Reader(data, reader.pos, reader.pos + chunk_len)
        notes, tempos = _parse_track(track_reader, tracks_read, warnings)
        all_raw.extend((n, tracks_read) for n in notes)
        tempo_ticks.extend(tempos)
        reader.pos += chunk_len
        tracks_read += 1
    if tracks_read < ntracks:
        warnings.append(
            f"header declared {ntracks} track(s) but only {tracks_read} found")

    if division & 0x8000:
        # SMPTE division: tempo-independent wall-clock ticks. Tempo metas
        # do not affect timing but still report the musical tempo.
        fps = 256 - (division >> 8)  # two's complement of the high byte
        tpf = division & 0xFF
        if fps == 0 or tpf == 0:
            raise MidiParseError("invalid SMPTE division", 12)
        scale = 1.0 / (fps * tpf)
        to_seconds = lambda tick: tick * scale
        tempo_events = [TempoEvent(tick * scale, 60e6 / us)
                        for tick, us in sorted(tempo_ticks)]
    else:
        ppq = division
        if ppq == 0:
            raise MidiParseError("zero ticks-per-quarter division", 12)
        clock = _TickClock(ppq, tempo_ticks)
        to_seconds = clock.to_seconds
        if tempo_ticks:
            # The clock may prepend an implicit default segment covering
            # [0, first meta); report it, it is what the timing used.
            tempo_events = [
                TempoEvent(clock.seconds[i], 60e6 / clock.us[i])
                for i in range(len(clock.ticks))
            ]
        else:
            tempo_events = []  # no set-tempo meta anywhere

    note_events = []
    for raw, track_no in all_raw:
        if raw.channel == PERCUSSION_CHANNEL:
            continue
        onset = to_seconds(raw.tick_on)
        duration = to_seconds(raw.tick_off) - onset
        if duration <= 0:
            warnings.append(
                f"track {track_no}: zero-length note pitch {raw.pitch} dropped")
            continue
        note_events.append(NoteEvent(onset, duration, raw.pitch, raw.velocity))
    note_events.sort()

    return ParsedMidi(notes=note_events, tempos=tempo_events,
                      warnings=warnings, format=fmt,
                      ppq=0 if division & 0x8000 else division)
