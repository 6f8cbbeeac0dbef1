from __future__ import annotations

import json
from pathlib import Path

import pytest

from smf import i_iv_v_i_midi
from swarmbrush.music.timeline import MusicTimeline, timeline_from_dict

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture(scope="session")
def i_iv_v_i_bytes() -> bytes:
    return i_iv_v_i_midi()


@pytest.fixture(scope="session")
def timeline_60s_doc() -> dict:
    return json.loads((FIXTURES / "timeline_60s.json").read_text())


@pytest.fixture(scope="session")
def timeline_60s(timeline_60s_doc) -> MusicTimeline:
    return timeline_from_dict(timeline_60s_doc)
