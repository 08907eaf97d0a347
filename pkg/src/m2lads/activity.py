"""Activity matrices from the two log sources, and the joined learner matrix.

Logger events pair start/end markers FIFO per activity id.  MOOC events
run through a configurable boundary model: an "opens" event starts a new
activity (closing any open one), a "closes" event ends it, and session end
closes whatever is still open.  The merge gives the MOOC source priority
for any activity id present in both matrices.
"""

from __future__ import annotations

import json
from bisect import bisect_right
from collections import deque
from dataclasses import dataclass
from typing import IO

from .types import (
    ActivityInterval,
    ActivityMatrix,
    EdxEvent,
    LearnerMatrix,
    LoggeEvent,
    Marker,
    MatrixSource,
    SessionWindow,
    TimestampMs,
    WindowedSeries,
)

UNLABELED = "unlabeled"

OPENS = "opens"
CLOSES = "closes"
IGNORED = "ignored"

# Out-of-the-box mapping for common MOOC event types; anything unmapped is
# ignored for activity purposes.
DEFAULT_BOUNDARY_CONFIG: dict[str, dict[str, str]] = {
    "play_video": {"action": OPENS, "label": "video:{id}"},
    "pause_video": {"action": CLOSES},
    "stop_video": {"action": CLOSES},
    "seq_goto": {"action": OPENS, "label": "page:{id}"},
    "page_close": {"action": CLOSES},
    "problem_check": {"action": IGNORED},
}


class ActivityError(Exception):
    pass


class EndWithoutStart(ActivityError):
    def __init__(self, activity_id: str, t: TimestampMs):
        super().__init__(f"end marker for {activity_id!r} at {t} has no prior start")
        self.activity_id = activity_id
        self.t = t


class InvalidBoundaryConfig(ActivityError):
    def __init__(self, detail: str):
        super().__init__(f"invalid boundary config: {detail}")


@dataclass
class BoundaryRule:
    action: str
    label: str | None = None

    def label_for(self, resource_id: str | None) -> str:
        assert self.label is not None
        return self.label.replace("{id}", resource_id if resource_id else "unknown")


@dataclass
class BoundaryConfig:
    """event_type -> rule; unmapped event types are ignored."""

    rules: dict[str, BoundaryRule]

    def rule_for(self, event_type: str) -> BoundaryRule:
        return self.rules.get(event_type, BoundaryRule(action=IGNORED))

    @classmethod
    def default(cls) -> BoundaryConfig:
        return cls.from_mapping(DEFAULT_BOUNDARY_CONFIG)

    @classmethod
    def from_mapping(cls, mapping: dict) -> BoundaryConfig:
        rules: dict[str, BoundaryRule] = {}
        for event_type, rule in mapping.items():
            if not isinstance(rule, dict) or "action" not in rule:
                raise InvalidBoundaryConfig(f"rule for {event_type!r} needs an action")
            action = rule["action"]
            if action not in (OPENS, CLOSES, IGNORED):
                raise InvalidBoundaryConfig(f"unknown action {action!r}")
            label = rule.get("label")
            if action == OPENS and not label:
                raise InvalidBoundaryConfig(f"opens rule for {event_type!r} needs a label")
            rules[event_type] = BoundaryRule(action=action, label=label)
        return cls(rules=rules)

    @classmethod
    def load(cls, stream: IO[bytes]) -> BoundaryConfig:
        try:
            obj = json.load(stream)
        except json.JSONDecodeError as exc:
            raise InvalidBoundaryConfig(f"not valid JSON ({exc})") from None
        if not isinstance(obj, dict) or not isinstance(obj.get("event_types"), dict):
            raise InvalidBoundaryConfig("top level must be {\"event_types\": {...}}")
        return cls.from_mapping(obj["event_types"])


def _sorted_matrix(source: MatrixSource, intervals: list[ActivityInterval]) -> ActivityMatrix:
    intervals.sort(key=lambda iv: (iv.t_start, iv.activity_id))
    return ActivityMatrix(source=source, intervals=intervals)


def logge_to_activity_matrix(
    events: list[LoggeEvent], window: SessionWindow
) -> ActivityMatrix:
    """Pair start/end markers into intervals (FIFO per activity id).

    A start without a matching end closes at the window end; an end without
    a prior start raises EndWithoutStart.
    """
    open_starts: dict[str, deque[TimestampMs]] = {}
    intervals: list[ActivityInterval] = []
    for event in events:
        if event.marker is Marker.START:
            open_starts.setdefault(event.activity_id, deque()).append(event.time)
        else:
            pending = open_starts.get(event.activity_id)
            if not pending:
                raise EndWithoutStart(event.activity_id, event.time)
            intervals.append(
                ActivityInterval(
                    activity_id=event.activity_id,
                    t_start=pending.popleft(),
                    t_end=event.time,
                )
            )
    for activity_id, pending in open_starts.items():
        for t_start in pending:
            intervals.append(
                ActivityInterval(
                    activity_id=activity_id,
                    t_start=t_start,
                    t_end=max(window.end, t_start),
                )
            )
    return _sorted_matrix(MatrixSource.LOGGE, intervals)


def edx_to_activity_matrix(
    events: list[EdxEvent], window: SessionWindow, mapping: BoundaryConfig
) -> ActivityMatrix:
    """Derive MOOC activity intervals with the boundary-event model.

    An opens event closes the currently open activity and starts a new one
    labeled from its resource id; a closes event ends the open activity (a
    stray closes is a no-op); the window end closes a dangling activity.
    """
    intervals: list[ActivityInterval] = []
    open_label: str | None = None
    open_t: TimestampMs = 0

    def close(t: TimestampMs) -> None:
        nonlocal open_label
        if open_label is not None:
            intervals.append(
                ActivityInterval(activity_id=open_label, t_start=open_t, t_end=t)
            )
            open_label = None

    for event in events:
        rule = mapping.rule_for(event.event_type)
        if rule.action == OPENS:
            close(event.time)
            open_label = rule.label_for(event.resource_id)
            open_t = event.time
        elif rule.action == CLOSES:
            close(event.time)
    close(max(window.end, open_t))
    return _sorted_matrix(MatrixSource.MOOC, intervals)


def merge_activity_matrices(
    logge: ActivityMatrix, mooc: ActivityMatrix
) -> ActivityMatrix:
    """Combine the two matrices, MOOC winning per activity id.

    Ids present in one source keep all their intervals; ids present in both
    contribute only the MOOC intervals.  Presence means activity-id string
    equality, not interval overlap.
    """
    mooc_ids = {iv.activity_id for iv in mooc.intervals}
    merged = [iv for iv in logge.intervals if iv.activity_id not in mooc_ids]
    merged.extend(mooc.intervals)
    return _sorted_matrix(MatrixSource.MERGED, list(merged))


def activity_at(matrix: ActivityMatrix, t: TimestampMs) -> str:
    """The activity covering t, or "unlabeled".

    Among intervals with t_start <= t <= t_end the latest-starting wins;
    ties go to the lexicographically smallest activity id.
    """
    intervals = matrix.intervals
    idx = bisect_right(intervals, t, key=lambda iv: iv.t_start)
    best: ActivityInterval | None = None
    for i in range(idx - 1, -1, -1):
        iv = intervals[i]
        if best is not None and iv.t_start < best.t_start:
            break
        if iv.t_end >= t and (best is None or iv.activity_id < best.activity_id):
            best = iv
    return best.activity_id if best is not None else UNLABELED


def build_learner_matrix(series: WindowedSeries, merged: ActivityMatrix) -> LearnerMatrix:
    """Join the merged activity matrix onto a windowed series, row for row."""
    rows = [
        (t, value, window, activity_at(merged, t)) for t, value, window in series.rows
    ]
    return LearnerMatrix(kind=series.kind, rows=rows)
