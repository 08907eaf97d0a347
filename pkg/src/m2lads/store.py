"""File-backed session store.

One directory per session with the record as canonical JSON, media files
alongside, and a catalog document for listings:

    <root>/catalog.json
    <root>/sessions/<id>/record.json
    <root>/media/<id>/<name>

Writes go through a temp file and rename, so a concurrent reader sees
either the previous state or the new one, never a torn file.  The store
keeps no in-memory cache; reopening a root over existing files yields
the same contents.
"""

from __future__ import annotations

import json
import os
import shutil
import tempfile
from bisect import bisect_left, bisect_right
from dataclasses import dataclass
from typing import BinaryIO

from .serialization import (
    MalformedRecord,
    canonical_json_bytes,
    decode_record,
    encode_record,
)
from .types import MediaRef, SessionRecord, SessionWindow, SignalKind, TimestampMs

ENV_STORE_ROOT = "M2LADS_STORE_ROOT"
DEFAULT_STORE_ROOT = "m2lads_store"


class StoreError(Exception):
    pass


class DuplicateSession(StoreError):
    def __init__(self, session_id: str):
        super().__init__(f"session already stored: {session_id!r}")
        self.session_id = session_id


class ValidationFailed(StoreError):
    def __init__(self, reason: str):
        super().__init__(f"invalid session record: {reason}")
        self.reason = reason


class NotFound(StoreError):
    def __init__(self, what: str):
        super().__init__(f"not found: {what}")


class NameCollision(StoreError):
    def __init__(self, name: str):
        super().__init__(f"media name already attached: {name!r}")


class PathViolation(StoreError):
    def __init__(self, name: str):
        super().__init__(f"name escapes the media directory: {name!r}")


class InvalidRange(StoreError):
    def __init__(self, detail: str):
        super().__init__(f"bad query range: {detail}")


@dataclass
class CatalogEntry:
    session_id: str
    learner_id: str
    window: SessionWindow
    created_at: TimestampMs


def _checked_name(name: str, error: type[StoreError]) -> str:
    """A single path component: no separators, no traversal, printable."""
    if (
        not name
        or name in (".", "..")
        or "/" in name
        or "\\" in name
        or "\x00" in name
        or os.path.basename(name) != name
    ):
        raise error(name)
    return name


def validate_record(record: SessionRecord) -> None:
    if not record.session_id:
        raise ValidationFailed("empty session_id")
    try:
        _checked_name(record.session_id, PathViolation)
    except PathViolation:
        raise ValidationFailed(f"session_id unusable as a directory name: {record.session_id!r}") from None
    window = record.window
    if window.start >= window.end:
        raise ValidationFailed(f"window start {window.start} >= end {window.end}")
    for iv in record.merged_matrix.intervals:
        if iv.t_start < window.start or iv.t_end > window.end or iv.t_start > iv.t_end:
            raise ValidationFailed(
                f"activity interval {iv.activity_id!r} [{iv.t_start},{iv.t_end}] outside window"
            )
    for kind, lm in record.learner_matrices.items():
        if lm.kind != kind:
            raise ValidationFailed(f"learner matrix keyed {kind.value} carries kind {lm.kind.value}")
        for t, _, _, _ in lm.rows:
            if t < window.start or t > window.end:
                raise ValidationFailed(f"{kind.value} row at {t} outside window")


class SessionStore:
    """Store rooted at a directory; see module docstring for the layout."""

    def __init__(self, root: str | os.PathLike[str] | None = None):
        if root is None:
            root = os.environ.get(ENV_STORE_ROOT, DEFAULT_STORE_ROOT)
        self.root = os.fspath(root)
        os.makedirs(self.root, exist_ok=True)

    # -- paths ---------------------------------------------------------

    def _catalog_path(self) -> str:
        return os.path.join(self.root, "catalog.json")

    def _session_dir(self, session_id: str) -> str:
        return os.path.join(self.root, "sessions", session_id)

    def _record_path(self, session_id: str) -> str:
        return os.path.join(self._session_dir(session_id), "record.json")

    def _media_dir(self, session_id: str) -> str:
        return os.path.join(self.root, "media", session_id)

    def _write_atomic(self, path: str, data: bytes) -> None:
        directory = os.path.dirname(path)
        os.makedirs(directory, exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-")
        try:
            with os.fdopen(fd, "wb") as handle:
                handle.write(data)
            os.replace(tmp, path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise

    # -- catalog -------------------------------------------------------

    def _read_catalog(self) -> dict[str, dict]:
        try:
            with open(self._catalog_path(), "rb") as handle:
                return json.load(handle)
        except FileNotFoundError:
            return {}

    def _write_catalog(self, catalog: dict[str, dict]) -> None:
        self._write_atomic(self._catalog_path(), canonical_json_bytes(catalog))

    # -- sessions ------------------------------------------------------

    def put_session(self, record: SessionRecord) -> str:
        validate_record(record)
        catalog = self._read_catalog()
        if record.session_id in catalog or os.path.exists(self._record_path(record.session_id)):
            raise DuplicateSession(record.session_id)
        self._write_atomic(self._record_path(record.session_id), encode_record(record))
        catalog[record.session_id] = {
            "learner_id": record.learner.learner_id,
            "window": {"start": record.window.start, "end": record.window.end},
            "created_at": record.created_at,
        }
        self._write_catalog(catalog)
        return record.session_id

    def get_session(self, session_id: str) -> SessionRecord:
        try:
            with open(self._record_path(session_id), "rb") as handle:
                data = handle.read()
        except (FileNotFoundError, NotADirectoryError):
            raise NotFound(f"session {session_id!r}") from None
        try:
            return decode_record(data)
        except MalformedRecord as exc:
            raise ValidationFailed(str(exc)) from None

    def has_session(self, session_id: str) -> bool:
        return os.path.exists(self._record_path(session_id))

    def list_sessions(
        self,
        learner_id: str | None = None,
        time_range: tuple[TimestampMs, TimestampMs] | None = None,
    ) -> list[CatalogEntry]:
        """Catalog entries, newest first.  Filters are conjunctive; the
        time-range filter keeps sessions whose window overlaps the range."""
        entries = []
        for session_id, raw in self._read_catalog().items():
            entry = CatalogEntry(
                session_id=session_id,
                learner_id=raw["learner_id"],
                window=SessionWindow(start=raw["window"]["start"], end=raw["window"]["end"]),
                created_at=raw["created_at"],
            )
            if learner_id is not None and entry.learner_id != learner_id:
                continue
            if time_range is not None:
                lo, hi = time_range
                if entry.window.end < lo or entry.window.start > hi:
                    continue
            entries.append(entry)
        entries.sort(key=lambda e: (-e.created_at, e.session_id))
        return entries

    # -- media ---------------------------------------------------------

    def attach_media(self, session_id: str, name: str, source: str | os.PathLike[str]) -> MediaRef:
        if not self.has_session(session_id):
            raise NotFound(f"session {session_id!r}")
        _checked_name(name, PathViolation)
        media_dir = self._media_dir(session_id)
        target = os.path.join(media_dir, name)
        if os.path.exists(target):
            raise NameCollision(name)
        os.makedirs(media_dir, exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=media_dir, prefix=".tmp-")
        os.close(fd)
        try:
            shutil.copyfile(source, tmp)
            os.replace(tmp, target)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise
        return MediaRef(
            session_id=session_id,
            name=name,
            relative_path=os.path.join("media", session_id, name),
            byte_size=os.path.getsize(target),
        )

    def open_media(self, session_id: str, name: str) -> BinaryIO:
        _checked_name(name, PathViolation)
        try:
            return open(os.path.join(self._media_dir(session_id), name), "rb")
        except (FileNotFoundError, NotADirectoryError):
            raise NotFound(f"media {name!r} for session {session_id!r}") from None

    def media_path(self, session_id: str, name: str) -> str:
        """Filesystem path of an attached file; NotFound if absent."""
        _checked_name(name, PathViolation)
        path = os.path.join(self._media_dir(session_id), name)
        if not os.path.isfile(path):
            raise NotFound(f"media {name!r} for session {session_id!r}")
        return path

    def list_media(self, session_id: str) -> list[MediaRef]:
        if not self.has_session(session_id):
            raise NotFound(f"session {session_id!r}")
        media_dir = self._media_dir(session_id)
        try:
            names = sorted(os.listdir(media_dir))
        except FileNotFoundError:
            return []
        return [
            MediaRef(
                session_id=session_id,
                name=name,
                relative_path=os.path.join("media", session_id, name),
                byte_size=os.path.getsize(os.path.join(media_dir, name)),
            )
            for name in names
            if not name.startswith(".tmp-")
        ]

    # -- queries -------------------------------------------------------

    def query_signal(
        self,
        session_id: str,
        kind: SignalKind,
        t_from: TimestampMs,
        t_to: TimestampMs,
        max_points: int,
    ) -> list[tuple[TimestampMs, float, float, float, str]]:
        """Learner-matrix rows in [t_from, t_to], downsampled to at most
        max_points buckets of (t, mean, min, max, activity_id).

        Buckets split the inclusive range into equal time slices; each
        non-empty bucket reports its first row's timestamp and activity
        id with the mean/min/max of its values.  When the range holds no
        more rows than max_points the raw rows pass through unchanged.
        """
        if t_from > t_to:
            raise InvalidRange(f"from {t_from} > to {t_to}")
        if max_points < 1:
            raise InvalidRange(f"max_points {max_points} < 1")
        record = self.get_session(session_id)
        lm = record.learner_matrices.get(kind)
        if lm is None:
            raise NotFound(f"signal {kind.value!r} for session {session_id!r}")
        times = [row[0] for row in lm.rows]
        rows = lm.rows[bisect_left(times, t_from) : bisect_right(times, t_to)]
        if len(rows) <= max_points:
            return [(t, value, value, value, activity_id) for t, value, _, activity_id in rows]
        span = t_to - t_from + 1
        buckets: dict[int, list[tuple[TimestampMs, float, str]]] = {}
        for t, value, _, activity_id in rows:
            buckets.setdefault((t - t_from) * max_points // span, []).append(
                (t, value, activity_id)
            )
        out = []
        for index in sorted(buckets):
            members = buckets[index]
            values = [v for _, v, _ in members]
            first_t, _, first_activity = members[0]
            out.append(
                (first_t, sum(values) / len(values), min(values), max(values), first_activity)
            )
        return out
