"""Parsers for the four raw session sources.

Inputs are UTF-8 byte streams: the MOOC tracking log (JSON Lines), the
activity-logger CSV, biometric signal exports (CSV), pretest answer/key
CSVs, per-video frame indexes, and the learner profile JSON.  Parsing is
strict: the first offending record raises an error carrying its 1-based
line number.  All functions are pure and safe to call concurrently on
distinct streams.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass
from typing import IO

from .timeline import InvalidTimestamp, format_timestamp, normalize_timestamp
from .types import (
    BlinkEvents,
    EEGBand,
    EdxEvent,
    LearnerProfile,
    LoggeEvent,
    Marker,
    PretestMatrix,
    SignalKind,
    SignalSeries,
    TimestampMs,
    VideoFrameIndex,
)

LOGGE_HEADER = ["time", "activity_id", "marker"]
SIGNAL_HEADER = ["t_ms", "value"]
EEG_HEADER = [
    "t_ms",
    "delta",
    "theta",
    "alpha",
    "beta",
    "gamma",
    "attention",
    "meditation",
    "blink",
]
PRETEST_HEADER = ["item", "answer"]
FRAME_HEADER = ["frame", "t_ms"]

# Event-body keys probed, in order, for a resource identifier.
_RESOURCE_KEYS = ("id", "problem_id", "code")


class IngestError(Exception):
    """Base for input parsing failures; line_no is 1-based when known."""

    def __init__(self, message: str, line_no: int | None = None):
        super().__init__(message)
        self.line_no = line_no


class MalformedEvent(IngestError):
    def __init__(self, line_no: int):
        super().__init__(f"line {line_no}: unparseable event", line_no)


class MissingField(IngestError):
    def __init__(self, line_no: int, field: str):
        super().__init__(f"line {line_no}: missing field {field!r}", line_no)
        self.field = field


class MalformedRow(IngestError):
    def __init__(self, line_no: int, detail: str = ""):
        suffix = f" ({detail})" if detail else ""
        super().__init__(f"line {line_no}: malformed row{suffix}", line_no)


class UnknownMarker(IngestError):
    def __init__(self, line_no: int, marker: str):
        super().__init__(f"line {line_no}: unknown marker {marker!r}", line_no)
        self.marker = marker


class NonMonotonicTimestamps(IngestError):
    def __init__(self, line_no: int):
        super().__init__(f"line {line_no}: timestamps not increasing", line_no)


class NonFiniteValue(IngestError):
    def __init__(self, line_no: int):
        super().__init__(f"line {line_no}: value is not a finite number", line_no)


class EmptySeries(IngestError):
    def __init__(self):
        super().__init__("signal file contains no samples")


class InvalidBlinkFlag(IngestError):
    def __init__(self, line_no: int):
        super().__init__(f"line {line_no}: blink flag must be 0 or 1", line_no)


class NonPositiveFrequency(IngestError):
    def __init__(self, freq_hz: float):
        super().__init__(f"frequency must be positive, got {freq_hz}")
        self.freq_hz = freq_hz


class NonMonotonicFrames(IngestError):
    def __init__(self, line_no: int):
        super().__init__(f"line {line_no}: frame numbers not increasing", line_no)


class UnknownItem(IngestError):
    def __init__(self, item: str, line_no: int):
        super().__init__(f"line {line_no}: item {item!r} has no answer-key entry", line_no)
        self.item = item


class DuplicateItem(IngestError):
    def __init__(self, item: str, line_no: int):
        super().__init__(f"line {line_no}: duplicate item {item!r}", line_no)
        self.item = item


class InvalidProfile(IngestError):
    def __init__(self, detail: str):
        super().__init__(f"invalid learner profile: {detail}")


def _text(stream: IO[bytes]) -> io.TextIOWrapper:
    return io.TextIOWrapper(stream, encoding="utf-8", newline="")


def _stringify(value: object) -> str:
    if isinstance(value, str):
        return value
    return json.dumps(value, sort_keys=True)


def parse_edx_log(stream: IO[bytes]) -> list[EdxEvent]:
    """Parse a MOOC tracking log (one JSON object per line), in file order.

    Required top-level keys: username, event_type, time (ISO-8601).  The
    optional ``event`` object is flattened into the payload as strings;
    its id/problem_id/code field, when present, becomes the resource id.
    Events without a recognizable resource id are kept with resource_id
    None.  Blank lines are skipped.
    """
    events: list[EdxEvent] = []
    for line_no, raw in enumerate(_text(stream), start=1):
        if not raw.strip():
            continue
        try:
            obj = json.loads(raw)
        except json.JSONDecodeError:
            raise MalformedEvent(line_no) from None
        if not isinstance(obj, dict):
            raise MalformedEvent(line_no)

        for field in ("username", "event_type", "time"):
            value = obj.get(field)
            if value is None or (isinstance(value, str) and not value):
                raise MissingField(line_no, field)
        try:
            time = normalize_timestamp(str(obj["time"]))
        except InvalidTimestamp:
            raise MalformedEvent(line_no) from None

        body = obj.get("event", {})
        if not isinstance(body, dict):
            raise MalformedEvent(line_no)

        resource_id = None
        for key in _RESOURCE_KEYS:
            candidate = body.get(key)
            if candidate is not None and _stringify(candidate):
                resource_id = _stringify(candidate)
                break

        payload = {
            k: _stringify(v)
            for k, v in obj.items()
            if k not in ("username", "event_type", "time", "event")
        }
        payload.update({k: _stringify(v) for k, v in body.items()})

        events.append(
            EdxEvent(
                username=str(obj["username"]),
                event_type=str(obj["event_type"]),
                time=time,
                resource_id=resource_id,
                payload=payload,
            )
        )
    return events


def _read_csv(stream: IO[bytes], header: list[str]):
    """Yield (line_no, row) for each data row after validating the header."""
    reader = csv.reader(_text(stream))
    try:
        first = next(reader)
    except StopIteration:
        raise MalformedRow(1, "missing header") from None
    if first != header:
        raise MalformedRow(1, f"expected header {','.join(header)}")
    for row in reader:
        if not row:
            continue
        yield reader.line_num, row


def parse_logge_csv(stream: IO[bytes]) -> list[LoggeEvent]:
    """Parse the activity-logger CSV (time,activity_id,marker), in file order."""
    events: list[LoggeEvent] = []
    for line_no, row in _read_csv(stream, LOGGE_HEADER):
        if len(row) != 3:
            raise MalformedRow(line_no, "expected 3 fields")
        time_text, activity_id, marker_text = row
        try:
            time = normalize_timestamp(time_text)
        except InvalidTimestamp:
            raise MalformedRow(line_no, "bad timestamp") from None
        if not activity_id:
            raise MalformedRow(line_no, "empty activity_id")
        try:
            marker = Marker(marker_text)
        except ValueError:
            raise UnknownMarker(line_no, marker_text) from None
        events.append(LoggeEvent(time=time, activity_id=activity_id, marker=marker))
    return events


def _parse_t_ms(text: str, line_no: int) -> TimestampMs:
    try:
        t = int(text)
    except ValueError:
        raise MalformedRow(line_no, "bad t_ms") from None
    if t < 0:
        raise MalformedRow(line_no, "negative t_ms")
    return t


def _parse_value(text: str, line_no: int) -> float:
    try:
        value = float(text)
    except ValueError:
        raise NonFiniteValue(line_no) from None
    if not math.isfinite(value):
        raise NonFiniteValue(line_no)
    return value


def parse_signal_csv(stream: IO[bytes], kind: SignalKind) -> SignalSeries:
    """Parse a t_ms,value CSV into a series of the given kind.

    Timestamps must be strictly increasing and values finite; a data-free
    file raises EmptySeries.
    """
    samples: list[tuple[TimestampMs, float]] = []
    for line_no, row in _read_csv(stream, SIGNAL_HEADER):
        if len(row) != 2:
            raise MalformedRow(line_no, "expected 2 fields")
        t = _parse_t_ms(row[0], line_no)
        if samples and t <= samples[-1][0]:
            raise NonMonotonicTimestamps(line_no)
        samples.append((t, _parse_value(row[1], line_no)))
    if not samples:
        raise EmptySeries()
    return SignalSeries(kind=kind, samples=samples)


@dataclass
class EegData:
    """The seven series of one EEG export plus blink timestamps."""

    series: dict[SignalKind, SignalSeries]
    blinks: BlinkEvents


_EEG_COLUMN_KINDS = [
    SignalKind.EEG_DELTA,
    SignalKind.EEG_THETA,
    SignalKind.EEG_ALPHA,
    SignalKind.EEG_BETA,
    SignalKind.EEG_GAMMA,
    SignalKind.ATTENTION,
    SignalKind.MEDITATION,
]


def parse_eeg_csv(stream: IO[bytes]) -> EegData:
    """Parse the headband export: five band powers, attention, meditation,
    and a 0/1 blink flag per row.

    Returns seven series sharing the row timestamps, plus the timestamps of
    rows flagged as blinks.
    """
    columns: list[list[tuple[TimestampMs, float]]] = [[] for _ in _EEG_COLUMN_KINDS]
    blink_times: list[TimestampMs] = []
    last_t: TimestampMs | None = None
    for line_no, row in _read_csv(stream, EEG_HEADER):
        if len(row) != len(EEG_HEADER):
            raise MalformedRow(line_no, f"expected {len(EEG_HEADER)} fields")
        t = _parse_t_ms(row[0], line_no)
        if last_t is not None and t <= last_t:
            raise NonMonotonicTimestamps(line_no)
        last_t = t
        values = [_parse_value(cell, line_no) for cell in row[1:8]]
        if row[8] not in ("0", "1"):
            raise InvalidBlinkFlag(line_no)
        for column, value in zip(columns, values):
            column.append((t, value))
        if row[8] == "1":
            blink_times.append(t)
    if last_t is None:
        raise EmptySeries()
    series = {
        kind: SignalSeries(kind=kind, samples=samples)
        for kind, samples in zip(_EEG_COLUMN_KINDS, columns)
    }
    return EegData(series=series, blinks=BlinkEvents(times=blink_times))


def classify_band(freq_hz: float) -> EEGBand:
    """Map a positive frequency (Hz) to its band.

    Boundaries are half-open [lo, hi): 4 Hz is theta, 8 alpha, 13 beta,
    30 gamma, so the five bands partition (0, inf).
    """
    if not freq_hz > 0:
        raise NonPositiveFrequency(freq_hz)
    if freq_hz < 4:
        return EEGBand.DELTA
    if freq_hz < 8:
        return EEGBand.THETA
    if freq_hz < 13:
        return EEGBand.ALPHA
    if freq_hz < 30:
        return EEGBand.BETA
    return EEGBand.GAMMA


def _read_item_answer(stream: IO[bytes]) -> dict[str, tuple[str, int]]:
    """Read an item,answer CSV into item -> (answer, line_no), rejecting dupes."""
    out: dict[str, tuple[str, int]] = {}
    for line_no, row in _read_csv(stream, PRETEST_HEADER):
        if len(row) != 2:
            raise MalformedRow(line_no, "expected 2 fields")
        item, answer = row
        if not item:
            raise MalformedRow(line_no, "empty item")
        if item in out:
            raise DuplicateItem(item, line_no)
        out[item] = (answer, line_no)
    return out


def parse_pretest(answers: IO[bytes], key: IO[bytes]) -> PretestMatrix:
    """Grade pretest answers against the key.

    Score is 1.0 on an exact, case-sensitive match and 0.0 otherwise; an
    answered item absent from the key raises UnknownItem.  Rows come back
    in answer-file order.
    """
    key_map = _read_item_answer(key)
    answer_map = _read_item_answer(answers)
    rows: list[tuple[str, float]] = []
    for item, (answer, line_no) in answer_map.items():
        if item not in key_map:
            raise UnknownItem(item, line_no)
        rows.append((item, 1.0 if answer == key_map[item][0] else 0.0))
    return PretestMatrix(rows=rows)


def parse_frame_index(stream: IO[bytes], video_id: str) -> VideoFrameIndex:
    """Parse a frame,t_ms CSV; frames strictly increasing, times non-decreasing.

    An empty index (header only) is valid.
    """
    rows: list[tuple[int, TimestampMs]] = []
    for line_no, row in _read_csv(stream, FRAME_HEADER):
        if len(row) != 2:
            raise MalformedRow(line_no, "expected 2 fields")
        try:
            frame = int(row[0])
        except ValueError:
            raise MalformedRow(line_no, "bad frame number") from None
        if frame < 0:
            raise MalformedRow(line_no, "negative frame number")
        t = _parse_t_ms(row[1], line_no)
        if rows:
            if frame <= rows[-1][0]:
                raise NonMonotonicFrames(line_no)
            if t < rows[-1][1]:
                raise NonMonotonicTimestamps(line_no)
        rows.append((frame, t))
    return VideoFrameIndex(video_id=video_id, rows=rows)


def parse_learner_profile(stream: IO[bytes]) -> LearnerProfile:
    """Parse the learner profile JSON: {learner_id, attributes: {...}}."""
    try:
        obj = json.load(_text(stream))
    except json.JSONDecodeError as exc:
        raise InvalidProfile(f"not valid JSON ({exc})") from None
    if not isinstance(obj, dict):
        raise InvalidProfile("top level must be an object")
    learner_id = obj.get("learner_id")
    if not isinstance(learner_id, str) or not learner_id:
        raise InvalidProfile("learner_id must be a non-empty string")
    attributes = obj.get("attributes", {})
    if not isinstance(attributes, dict):
        raise InvalidProfile("attributes must be an object")
    return LearnerProfile(
        learner_id=learner_id,
        attributes={str(k): _stringify(v) for k, v in attributes.items()},
    )


def logge_events_to_csv(events: list[LoggeEvent]) -> bytes:
    """Serialize events back to the logger CSV format (inverse of parse)."""
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(LOGGE_HEADER)
    for event in events:
        writer.writerow([format_timestamp(event.time), event.activity_id, event.marker.value])
    return out.getvalue().encode("utf-8")


def signal_series_to_csv(series: SignalSeries) -> bytes:
    """Serialize a series back to t_ms,value CSV (inverse of parse)."""
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(SIGNAL_HEADER)
    for t, value in series.samples:
        writer.writerow([t, repr(value)])
    return out.getvalue().encode("utf-8")
