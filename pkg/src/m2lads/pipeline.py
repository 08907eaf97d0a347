"""Session assembly: manifest in, SessionRecord out.

The manifest names every input file for one recorded session.  Assembly
parses all sources, synchronizes them onto the common time window, builds
and merges the activity matrices, annotates trailing-window means, joins
activity ids into per-signal learner matrices, and computes the analytics
that the dashboard reads.
"""

from __future__ import annotations

import json
import os
import time
from bisect import bisect_left, bisect_right
from dataclasses import dataclass, field
from typing import Any

import jsonschema

from . import activity, analytics, ingest, timeline
from .types import (
    ActivitySummary,
    BlinkEvents,
    LearnerMatrix,
    ResampledSeries,
    SessionRecord,
    SignalKind,
    TimestampMs,
    VideoFrameIndex,
    WindowedSeries,
)

ENV_FAKE_NOW = "M2LADS_FAKE_NOW"

# Kinds that may arrive as standalone two-column CSVs.  Attention,
# meditation and the band powers ride in the EEG export instead.
STANDALONE_KINDS = (SignalKind.HEART_RATE, SignalKind.PUPIL_LEFT, SignalKind.PUPIL_RIGHT)

MANIFEST_SCHEMA: dict[str, Any] = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "Ingest manifest",
    "type": "object",
    "properties": {
        "session_id": {"type": "string", "minLength": 1},
        "learner_profile_path": {"type": "string", "minLength": 1},
        "edx_log_path": {"type": "string", "minLength": 1},
        "logge_csv_path": {"type": "string", "minLength": 1},
        "pretest_answers_path": {"type": "string", "minLength": 1},
        "pretest_key_path": {"type": "string", "minLength": 1},
        "eeg_csv_path": {"type": "string", "minLength": 1},
        "signal_csv_paths": {
            "type": "object",
            "propertyNames": {"enum": [kind.value for kind in STANDALONE_KINDS]},
            "additionalProperties": {"type": "string", "minLength": 1},
        },
        "frame_index_paths": {
            "type": "object",
            "additionalProperties": {"type": "string", "minLength": 1},
        },
        "media_paths": {
            "type": "object",
            "additionalProperties": {"type": "string", "minLength": 1},
        },
        "boundary_config_path": {"type": "string", "minLength": 1},
        "window_ms": {"type": "integer", "minimum": 1},
        "grid_ms": {"type": "integer", "minimum": 1},
    },
    "required": [
        "session_id",
        "learner_profile_path",
        "edx_log_path",
        "logge_csv_path",
        "pretest_answers_path",
        "pretest_key_path",
        "eeg_csv_path",
    ],
    "additionalProperties": False,
}


class InvalidManifest(Exception):
    def __init__(self, detail: str):
        super().__init__(f"invalid manifest: {detail}")


@dataclass
class IngestManifest:
    """All inputs for one session, with paths resolved to absolute form."""

    session_id: str
    learner_profile_path: str
    edx_log_path: str
    logge_csv_path: str
    pretest_answers_path: str
    pretest_key_path: str
    eeg_csv_path: str
    signal_csv_paths: dict[SignalKind, str] = field(default_factory=dict)
    frame_index_paths: dict[str, str] = field(default_factory=dict)
    media_paths: dict[str, str] = field(default_factory=dict)
    boundary_config_path: str | None = None
    window_ms: int = timeline.DEFAULT_WINDOW_MS
    grid_ms: int = timeline.DEFAULT_GRID_MS

    @classmethod
    def from_payload(cls, payload: Any, base_dir: str = ".") -> IngestManifest:
        try:
            jsonschema.validate(payload, MANIFEST_SCHEMA)
        except jsonschema.ValidationError as exc:
            raise InvalidManifest(exc.message) from None

        def resolve(path: str) -> str:
            return os.path.normpath(os.path.join(base_dir, path))

        return cls(
            session_id=payload["session_id"],
            learner_profile_path=resolve(payload["learner_profile_path"]),
            edx_log_path=resolve(payload["edx_log_path"]),
            logge_csv_path=resolve(payload["logge_csv_path"]),
            pretest_answers_path=resolve(payload["pretest_answers_path"]),
            pretest_key_path=resolve(payload["pretest_key_path"]),
            eeg_csv_path=resolve(payload["eeg_csv_path"]),
            signal_csv_paths={
                SignalKind.from_token(token): resolve(path)
                for token, path in payload.get("signal_csv_paths", {}).items()
            },
            frame_index_paths={
                video_id: resolve(path)
                for video_id, path in payload.get("frame_index_paths", {}).items()
            },
            media_paths={
                name: resolve(path) for name, path in payload.get("media_paths", {}).items()
            },
            boundary_config_path=(
                resolve(payload["boundary_config_path"])
                if "boundary_config_path" in payload
                else None
            ),
            window_ms=payload.get("window_ms", timeline.DEFAULT_WINDOW_MS),
            grid_ms=payload.get("grid_ms", timeline.DEFAULT_GRID_MS),
        )

    @classmethod
    def from_file(cls, path: str | os.PathLike[str]) -> IngestManifest:
        with open(path, "rb") as handle:
            try:
                payload = json.load(handle)
            except json.JSONDecodeError as exc:
                raise InvalidManifest(f"not valid JSON: {exc}") from None
        return cls.from_payload(payload, base_dir=os.path.dirname(os.fspath(path)))


def current_time_ms() -> TimestampMs:
    """Wall-clock epoch ms, or the pinned value from M2LADS_FAKE_NOW."""
    fake = os.environ.get(ENV_FAKE_NOW)
    if fake is not None:
        try:
            return int(fake)
        except ValueError:
            raise InvalidManifest(f"{ENV_FAKE_NOW} is not an integer: {fake!r}") from None
    return time.time_ns() // 1_000_000


def _clip_times(times: list[TimestampMs], window) -> list[TimestampMs]:
    return times[bisect_left(times, window.start) : bisect_right(times, window.end)]


def build_record(manifest: IngestManifest, created_at: TimestampMs | None = None) -> SessionRecord:
    """Run the full assembly for one manifest.  Pure given file contents
    and created_at; repeated runs produce equal records."""
    if created_at is None:
        created_at = current_time_ms()

    with open(manifest.learner_profile_path, "rb") as handle:
        learner = ingest.parse_learner_profile(handle)
    with open(manifest.edx_log_path, "rb") as handle:
        edx_events = ingest.parse_edx_log(handle)
    edx_events.sort(key=lambda e: e.time)
    with open(manifest.logge_csv_path, "rb") as handle:
        logge_events = ingest.parse_logge_csv(handle)
    with open(manifest.eeg_csv_path, "rb") as handle:
        eeg = ingest.parse_eeg_csv(handle)
    series_by_kind = dict(eeg.series)
    for kind, path in manifest.signal_csv_paths.items():
        if kind in series_by_kind:
            raise InvalidManifest(f"signal {kind.value} supplied twice")
        with open(path, "rb") as handle:
            series_by_kind[kind] = ingest.parse_signal_csv(handle, kind)
    with open(manifest.pretest_answers_path, "rb") as answers:
        with open(manifest.pretest_key_path, "rb") as key:
            pretest = ingest.parse_pretest(answers, key)
    frame_indexes: list[VideoFrameIndex] = []
    for video_id in sorted(manifest.frame_index_paths):
        with open(manifest.frame_index_paths[video_id], "rb") as handle:
            frame_indexes.append(ingest.parse_frame_index(handle, video_id))
    if manifest.boundary_config_path is not None:
        with open(manifest.boundary_config_path, "rb") as handle:
            boundary = activity.BoundaryConfig.load(handle)
    else:
        boundary = activity.BoundaryConfig.default()

    ordered_kinds = [kind for kind in SignalKind if kind in series_by_kind]
    window, clipped, _ = timeline.synchronize(
        [series_by_kind[kind] for kind in ordered_kinds], []
    )
    clipped_by_kind = dict(zip(ordered_kinds, clipped))

    logge_matrix = timeline.clip_activity_matrix(
        activity.logge_to_activity_matrix(logge_events, window), window
    )
    mooc_matrix = timeline.clip_activity_matrix(
        activity.edx_to_activity_matrix(edx_events, window, boundary), window
    )
    merged = activity.merge_activity_matrices(logge_matrix, mooc_matrix)

    learner_matrices: dict[SignalKind, LearnerMatrix] = {}
    resampled: list[ResampledSeries] = []
    summary_rows = []
    for kind in ordered_kinds:
        series = clipped_by_kind[kind]
        windowed: WindowedSeries = timeline.annotate_windows(series, manifest.window_ms)
        lm = activity.build_learner_matrix(windowed, merged)
        learner_matrices[kind] = lm
        resampled.append(
            timeline.resample(series, window, manifest.grid_ms, manifest.window_ms)
        )
        summary_rows.extend(analytics.summarize_by_activity(lm, window, merged).rows)

    posttest = analytics.score_posttest(edx_events)
    return SessionRecord(
        session_id=manifest.session_id,
        learner=learner,
        window=window,
        merged_matrix=merged,
        learner_matrices=learner_matrices,
        blinks=BlinkEvents(times=_clip_times(eeg.blinks.times, window)),
        pretest=pretest,
        posttest=posttest,
        performance=analytics.compare_performance(pretest, posttest),
        correlations=analytics.correlation_matrix(resampled),
        summaries=ActivitySummary(rows=summary_rows),
        frame_indexes=frame_indexes,
        created_at=created_at,
    )
