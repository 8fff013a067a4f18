"""Python access to the socialrag core: replay, reports and message helpers."""

import json

from ._core import (
    ConfigurationError,
    Error,
    InvalidInput,
    NotFound,
    ValidationError,
    bold_count,
    classify_reaction,
    display_text,
    extract_item_refs,
    mentions,
    report_from_log,
)
from . import _core


def synthetic_transcript(papers=80, events=500, days=30, frequency="daily", seed=1):
    """Seed-deterministic synthetic transcript as a dict."""
    return json.loads(_core.synthetic_transcript_json(papers, events, days, frequency, seed))


def replay(transcript, seed):
    """Replay a transcript given as a dict, a JSON string or a file path."""
    if isinstance(transcript, dict):
        raw = _core.replay_json(json.dumps(transcript), seed)
    elif isinstance(transcript, str) and transcript.lstrip().startswith("{"):
        raw = _core.replay_json(transcript, seed)
    else:
        raw = _core.replay_file(str(transcript), seed)
    return json.loads(raw)


__all__ = [
    "ConfigurationError",
    "Error",
    "InvalidInput",
    "NotFound",
    "ValidationError",
    "bold_count",
    "classify_reaction",
    "display_text",
    "extract_item_refs",
    "mentions",
    "replay",
    "report_from_log",
    "synthetic_transcript",
]
