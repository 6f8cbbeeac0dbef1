"""Krumhansl-Schmuckler key estimation.

Correlates the duration-weighted pitch-class histogram of a piece with
the 24 rotated Krumhansl-Kessler major/minor probe-tone profiles and
returns the best-correlated key. Ties (and degenerate histograms) break
deterministically: lowest tonic first, then major before minor.
"""
from __future__ import annotations

import numpy as np

from swarmbrush.music.timeline import Key, Mode, NoteEvent

# Krumhansl & Kessler probe-tone ratings, C-rooted.
MAJOR_PROFILE = np.array(
    [6.35, 2.23, 3.48, 2.33, 4.38, 4.09, 2.52, 5.19, 2.39, 3.66, 2.29, 2.88])
MINOR_PROFILE = np.array(
    [6.33, 2.68, 3.52, 5.38, 2.60, 3.53, 2.54, 4.75, 3.98, 2.69, 3.34, 3.17])


def pitch_class_histogram(notes: list[NoteEvent]) -> np.ndarray:
    """Total sounding duration per pitch class, shape (12,)."""
    hist = np.zeros(12)
    for note in notes:
        hist[note.pitch_class] += note.duration
    return hist


def _correlation(hist: np.ndarray, profile: np.ndarray) -> float:
    h = hist - hist.mean()
    p = profile - profile.mean()
    denom = np.sqrt((h * h).sum() * (p * p).sum())
    if denom == 0:
        return -np.inf
    return float((h * p).sum() / denom)


def estimate_key(notes: list[NoteEvent]) -> Key:
    if not notes:
        raise ValueError("no notes")
    hist = pitch_class_histogram(notes)
    best: tuple[float, int, int] | None = None
    best_key = Key(0, Mode.MAJOR)
    for mode_rank, (mode, profile) in enumerate(
            [(Mode.MAJOR, MAJOR_PROFILE), (Mode.MINOR, MINOR_PROFILE)]):
        for tonic in range(12):
            score = _correlation(hist, np.roll(profile, tonic))
            rank = (-score, tonic, mode_rank)
            if best is None or rank < best:
                best = rank
                best_key = Key(tonic, mode)
    return best_key
