"""Canonical JSON and CSV forms of the pipeline's products.

Canonical JSON is deterministic byte-for-byte: object keys sorted,
compact separators, timestamps as integers, reals as Python's shortest
round-trip repr, NaN/Infinity rejected.  Two encodes of equal records
produce identical bytes, which is what the persistence and reproducibility
tests compare.
"""

from __future__ import annotations

import csv
import io
import json
from typing import Any, BinaryIO, TextIO

from .types import (
    ActivityInterval,
    ActivityMatrix,
    ActivitySummary,
    ActivitySummaryRow,
    BlinkEvents,
    CorrelationMatrix,
    LearnerMatrix,
    LearnerProfile,
    MatrixSource,
    PerformanceReport,
    PosttestMatrix,
    PretestMatrix,
    SessionRecord,
    SessionWindow,
    SignalKind,
    VideoFrameIndex,
)

LM_CSV_HEADER = ["t_ms", "value", "window", "activity_id"]


class SerializationError(Exception):
    pass


class MalformedRecord(SerializationError):
    def __init__(self, detail: str):
        super().__init__(f"malformed session record: {detail}")


def canonical_json_bytes(payload: Any) -> bytes:
    """Serialize a JSON-compatible payload to canonical UTF-8 bytes."""
    return json.dumps(
        payload, sort_keys=True, separators=(",", ":"), allow_nan=False, ensure_ascii=False
    ).encode("utf-8")


def record_to_payload(record: SessionRecord) -> dict[str, Any]:
    return {
        "session_id": record.session_id,
        "learner": {
            "learner_id": record.learner.learner_id,
            "attributes": dict(record.learner.attributes),
        },
        "window": {"start": record.window.start, "end": record.window.end},
        "merged_matrix": _matrix_to_payload(record.merged_matrix),
        "learner_matrices": {
            kind.value: {"kind": kind.value, "rows": [list(row) for row in lm.rows]}
            for kind, lm in record.learner_matrices.items()
        },
        "blinks": list(record.blinks.times),
        "pretest": {"rows": [list(row) for row in record.pretest.rows]},
        "posttest": {"rows": [list(row) for row in record.posttest.rows]},
        "performance": {
            "per_item": [list(row) for row in record.performance.per_item],
            "pre_mean": record.performance.pre_mean,
            "post_mean": record.performance.post_mean,
            "gain": record.performance.gain,
        },
        "correlations": {
            "kinds": [kind.value for kind in record.correlations.kinds],
            "r": [list(row) for row in record.correlations.r],
        },
        "summaries": {
            "rows": [
                {
                    "activity_id": row.activity_id,
                    "kind": row.kind.value,
                    "mean": row.mean,
                    "min": row.min,
                    "max": row.max,
                    "sample_count": row.sample_count,
                    "duration_share": row.duration_share,
                }
                for row in record.summaries.rows
            ]
        },
        "frame_indexes": [
            {"video_id": fi.video_id, "rows": [list(row) for row in fi.rows]}
            for fi in record.frame_indexes
        ],
        "created_at": record.created_at,
    }


def _matrix_to_payload(matrix: ActivityMatrix) -> dict[str, Any]:
    return {
        "source": matrix.source.value,
        "intervals": [
            {"activity_id": iv.activity_id, "t_start": iv.t_start, "t_end": iv.t_end}
            for iv in matrix.intervals
        ],
    }


def encode_record(record: SessionRecord) -> bytes:
    return canonical_json_bytes(record_to_payload(record))


def _expect(condition: bool, detail: str) -> None:
    if not condition:
        raise MalformedRecord(detail)


def _as_float(value: Any, detail: str) -> float:
    _expect(isinstance(value, (int, float)) and not isinstance(value, bool), detail)
    return float(value)


def _opt_float(value: Any, detail: str) -> float | None:
    if value is None:
        return None
    return _as_float(value, detail)


def _as_int(value: Any, detail: str) -> int:
    _expect(isinstance(value, int) and not isinstance(value, bool), detail)
    return value


def _as_str(value: Any, detail: str) -> str:
    _expect(isinstance(value, str), detail)
    return value


def _score_rows(raw: Any) -> list[tuple[str, float]]:
    rows = []
    for row in raw:
        _expect(isinstance(row, list) and len(row) == 2, "score row shape")
        rows.append((_as_str(row[0], "score item"), _as_float(row[1], "score value")))
    return rows


def _kind(token: Any, detail: str) -> SignalKind:
    try:
        return SignalKind.from_token(_as_str(token, detail))
    except KeyError:
        raise MalformedRecord(f"{detail}: unknown signal kind {token!r}") from None


def payload_to_record(payload: Any) -> SessionRecord:
    """Rebuild a SessionRecord from its JSON payload; inverse of
    record_to_payload on valid input, MalformedRecord otherwise."""
    _expect(isinstance(payload, dict), "top level is not an object")
    try:
        learner_raw = payload["learner"]
        _expect(isinstance(learner_raw, dict), "learner is not an object")
        attributes = learner_raw["attributes"]
        _expect(isinstance(attributes, dict), "learner.attributes is not an object")
        learner = LearnerProfile(
            learner_id=_as_str(learner_raw["learner_id"], "learner_id"),
            attributes={
                _as_str(k, "attribute key"): _as_str(v, "attribute value")
                for k, v in attributes.items()
            },
        )
        window = SessionWindow(
            start=_as_int(payload["window"]["start"], "window.start"),
            end=_as_int(payload["window"]["end"], "window.end"),
        )
        merged = _payload_to_matrix(payload["merged_matrix"])
        lms_raw = payload["learner_matrices"]
        _expect(isinstance(lms_raw, dict), "learner_matrices is not an object")
        learner_matrices: dict[SignalKind, LearnerMatrix] = {}
        for token, lm_raw in lms_raw.items():
            kind = _kind(token, "learner_matrices key")
            _expect(lm_raw.get("kind") == token, f"learner matrix {token} kind mismatch")
            rows = []
            for row in lm_raw["rows"]:
                _expect(isinstance(row, list) and len(row) == 4, "LM row shape")
                rows.append(
                    (
                        _as_int(row[0], "LM t_ms"),
                        _as_float(row[1], "LM value"),
                        _as_float(row[2], "LM window"),
                        _as_str(row[3], "LM activity_id"),
                    )
                )
            learner_matrices[kind] = LearnerMatrix(kind=kind, rows=rows)
        blinks = BlinkEvents(times=[_as_int(t, "blink time") for t in payload["blinks"]])
        pretest = PretestMatrix(rows=_score_rows(payload["pretest"]["rows"]))
        posttest = PosttestMatrix(rows=_score_rows(payload["posttest"]["rows"]))
        perf_raw = payload["performance"]
        per_item = []
        for row in perf_raw["per_item"]:
            _expect(isinstance(row, list) and len(row) == 3, "per_item row shape")
            per_item.append(
                (
                    _as_str(row[0], "per_item id"),
                    _opt_float(row[1], "per_item pre"),
                    _opt_float(row[2], "per_item post"),
                )
            )
        performance = PerformanceReport(
            per_item=per_item,
            pre_mean=_as_float(perf_raw["pre_mean"], "pre_mean"),
            post_mean=_as_float(perf_raw["post_mean"], "post_mean"),
            gain=_as_float(perf_raw["gain"], "gain"),
        )
        corr_raw = payload["correlations"]
        correlations = CorrelationMatrix(
            kinds=[_kind(token, "correlation kind") for token in corr_raw["kinds"]],
            r=[
                [_opt_float(cell, "correlation cell") for cell in row]
                for row in corr_raw["r"]
            ],
        )
        summary_rows = []
        for row in payload["summaries"]["rows"]:
            _expect(isinstance(row, dict), "summary row is not an object")
            summary_rows.append(
                ActivitySummaryRow(
                    activity_id=_as_str(row["activity_id"], "summary activity_id"),
                    kind=_kind(row["kind"], "summary kind"),
                    mean=_opt_float(row["mean"], "summary mean"),
                    min=_opt_float(row["min"], "summary min"),
                    max=_opt_float(row["max"], "summary max"),
                    sample_count=_as_int(row["sample_count"], "summary sample_count"),
                    duration_share=_as_float(row["duration_share"], "summary duration_share"),
                )
            )
        frame_indexes = []
        for fi_raw in payload["frame_indexes"]:
            rows = []
            for row in fi_raw["rows"]:
                _expect(isinstance(row, list) and len(row) == 2, "frame row shape")
                rows.append((_as_int(row[0], "frame number"), _as_int(row[1], "frame t_ms")))
            frame_indexes.append(
                VideoFrameIndex(video_id=_as_str(fi_raw["video_id"], "video_id"), rows=rows)
            )
        return SessionRecord(
            session_id=_as_str(payload["session_id"], "session_id"),
            learner=learner,
            window=window,
            merged_matrix=merged,
            learner_matrices=learner_matrices,
            blinks=blinks,
            pretest=pretest,
            posttest=posttest,
            performance=performance,
            correlations=correlations,
            summaries=ActivitySummary(rows=summary_rows),
            frame_indexes=frame_indexes,
            created_at=_as_int(payload["created_at"], "created_at"),
        )
    except (KeyError, TypeError) as exc:
        raise MalformedRecord(str(exc)) from None


def _payload_to_matrix(raw: Any) -> ActivityMatrix:
    _expect(isinstance(raw, dict), "activity matrix is not an object")
    try:
        source = MatrixSource(raw["source"])
    except (KeyError, ValueError):
        raise MalformedRecord(f"bad matrix source {raw.get('source')!r}") from None
    intervals = [
        ActivityInterval(
            activity_id=_as_str(iv["activity_id"], "interval activity_id"),
            t_start=_as_int(iv["t_start"], "interval t_start"),
            t_end=_as_int(iv["t_end"], "interval t_end"),
        )
        for iv in raw["intervals"]
    ]
    return ActivityMatrix(source=source, intervals=intervals)


def decode_record(data: bytes) -> SessionRecord:
    try:
        payload = json.loads(data.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise MalformedRecord(f"not valid JSON: {exc}") from None
    return payload_to_record(payload)


def write_lm_csv(lm: LearnerMatrix, stream: TextIO) -> None:
    """Write the four-column form: t_ms,value,window,activity_id.

    Floats use repr so a re-parse restores the exact values.
    """
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(LM_CSV_HEADER)
    for t, value, window, activity_id in lm.rows:
        writer.writerow([t, repr(value), repr(window), activity_id])


def read_lm_csv(stream: BinaryIO | TextIO, kind: SignalKind) -> LearnerMatrix:
    text = stream if isinstance(stream, io.TextIOBase) else io.TextIOWrapper(stream, encoding="utf-8")
    reader = csv.reader(text)
    header = next(reader, None)
    if header != LM_CSV_HEADER:
        raise MalformedRecord(f"bad LM CSV header: {header!r}")
    rows = []
    for row in reader:
        if not row:
            continue
        if len(row) != 4:
            raise MalformedRecord(f"LM CSV line {reader.line_num}: expected 4 fields")
        try:
            rows.append((int(row[0]), float(row[1]), float(row[2]), row[3]))
        except ValueError as exc:
            raise MalformedRecord(f"LM CSV line {reader.line_num}: {exc}") from None
    return LearnerMatrix(kind=kind, rows=rows)
