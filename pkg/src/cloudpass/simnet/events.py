"""Append-only run log and its line-oriented JSON report form.

Every line of a report is one JSON object with keys in a fixed order
(seq, ts, actor, event, details); the last line is a summary with the
outcome counts. Re-emitting the same log yields byte-identical output.
"""

from __future__ import annotations

import io
import json
import os
from dataclasses import dataclass, field

from .clock import render_iso

__all__ = ["ScenarioEvent", "EventLog", "event_line", "emit_report",
           "outcome_counts"]

_OUTCOME_KEYS = ("PERMIT", "ISOLATE", "LOCK_AND_ALERT")


@dataclass(frozen=True)
class ScenarioEvent:
    seq: int
    ts: int
    actor: str
    event: str
    details: dict = field(default_factory=dict)


class EventLog:
    def __init__(self):
        self.events: list[ScenarioEvent] = []

    def emit(self, ts: int, actor: str, event: str, **details) -> ScenarioEvent:
        ev = ScenarioEvent(len(self.events), ts, actor, event, details)
        self.events.append(ev)
        return ev


def event_line(event: ScenarioEvent) -> str:
    record = {
        "seq": event.seq,
        "ts": render_iso(event.ts),
        "actor": event.actor,
        "event": event.event,
        "details": event.details,
    }
    return json.dumps(record, sort_keys=False, separators=(", ", ": "))


def outcome_counts(events: list[ScenarioEvent]) -> dict[str, int]:
    counts = {key: 0 for key in _OUTCOME_KEYS}
    for event in events:
        if event.event == "check-outcome":
            counts[event.details["outcome"]] += 1
    return counts


def emit_report(events: list[ScenarioEvent], target) -> None:
    """Write the log as JSON lines plus the trailing summary line.

    ``target`` is a path or a text stream. N events produce N + 1 lines;
    an empty log still produces its summary line with all counts zero.
    """
    counts = outcome_counts(events)
    summary = {
        "seq": len(events),
        "ts": render_iso(events[-1].ts if events else 0),
        "actor": "world",
        "event": "summary",
        "details": {"events": len(events),
                    **{key.lower(): counts[key] for key in _OUTCOME_KEYS}},
    }
    lines = [event_line(e) for e in events]
    lines.append(json.dumps(summary, sort_keys=False, separators=(", ", ": ")))
    text = "\n".join(lines) + "\n"
    if isinstance(target, (str, os.PathLike)):
        with io.open(target, "w", encoding="utf-8", newline="") as fp:
            fp.write(text)
    else:
        target.write(text)
