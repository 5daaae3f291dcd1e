"""Virtual time: integer seconds, moved only by scenario commands."""

from __future__ import annotations

from datetime import datetime, timedelta, timezone

# Scenario second 0 renders as this instant in reports.
SCENARIO_EPOCH = datetime(2020, 1, 1, tzinfo=timezone.utc)


class VirtualClock:
    """Monotonic scenario clock. Nothing inside the world advances it."""

    __slots__ = ("now",)

    def __init__(self, start: int = 0):
        if start < 0:
            raise ValueError("clock cannot start before the epoch")
        self.now = start

    def advance(self, seconds: int) -> int:
        if seconds < 0:
            raise ValueError("virtual time never goes backwards")
        self.now += seconds
        return self.now


def render_iso(ts: int) -> str:
    """ISO-8601 rendering, used only at the report boundary."""
    return (SCENARIO_EPOCH + timedelta(seconds=ts)).strftime("%Y-%m-%dT%H:%M:%SZ")
