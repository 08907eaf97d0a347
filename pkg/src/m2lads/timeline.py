"""Time standardization, stream synchronization, and windowed aggregates.

The trailing window for a sample at t is the closed interval
[t - width_ms, t]; the sample itself is always inside its own window, so
per-sample window means are total.  Window sums use prefix sums over the
sorted samples, which matches a fresh per-window summation bit for bit
whenever the partial sums are exactly representable, and to ~1 ulp of the
accumulated sum otherwise.
"""

from __future__ import annotations

from bisect import bisect_left, bisect_right
from datetime import datetime, timedelta, timezone

from .types import (
    ActivityInterval,
    ActivityMatrix,
    ResampledSeries,
    SessionWindow,
    SignalSeries,
    TimestampMs,
    WindowedSeries,
)

DEFAULT_WINDOW_MS = 30_000
DEFAULT_GRID_MS = 1_000


class TimelineError(Exception):
    pass


class InvalidTimestamp(TimelineError):
    def __init__(self, text: str):
        super().__init__(f"invalid timestamp: {text!r}")
        self.text = text


class NoTemporalOverlap(TimelineError):
    def __init__(self, start: TimestampMs, end: TimestampMs):
        super().__init__(
            f"streams share no time span (latest start {start} >= earliest end {end})"
        )
        self.start = start
        self.end = end


class EmptyWindow(TimelineError):
    def __init__(self, t: TimestampMs, width_ms: int):
        super().__init__(f"no samples in [{t - width_ms}, {t}]")
        self.t = t
        self.width_ms = width_ms


class InvalidGridStep(TimelineError):
    def __init__(self, grid_step_ms: int):
        super().__init__(f"grid step must be positive, got {grid_step_ms}")
        self.grid_step_ms = grid_step_ms


_EPOCH = datetime(1970, 1, 1, tzinfo=timezone.utc)


def normalize_timestamp(iso: str) -> TimestampMs:
    """Convert an ISO-8601 string with an explicit zone (or trailing Z)
    to epoch milliseconds UTC.

    Naive datetimes and pre-epoch instants are rejected.  Sub-millisecond
    fractions are rounded to the nearest millisecond.
    """
    text = iso.strip()
    if text.endswith(("Z", "z")):
        text = text[:-1] + "+00:00"
    try:
        dt = datetime.fromisoformat(text)
    except ValueError:
        raise InvalidTimestamp(iso) from None
    if dt.tzinfo is None:
        raise InvalidTimestamp(iso)
    delta = dt.astimezone(timezone.utc) - _EPOCH
    ms = (delta.days * 86_400 + delta.seconds) * 1000 + round(delta.microseconds / 1000)
    if ms < 0:
        raise InvalidTimestamp(iso)
    return ms


def format_timestamp(ms: TimestampMs) -> str:
    """Inverse of normalize_timestamp: epoch ms to an ISO-8601 UTC string.

    Whole seconds get second precision, otherwise millisecond precision.
    """
    dt = _EPOCH + timedelta(milliseconds=ms)
    precision = "seconds" if ms % 1000 == 0 else "milliseconds"
    return dt.isoformat(timespec=precision).replace("+00:00", "Z")


def clip_series(series: SignalSeries, window: SessionWindow) -> SignalSeries:
    """Drop samples outside [window.start, window.end] (closed)."""
    ts = series.timestamps()
    lo = bisect_left(ts, window.start)
    hi = bisect_right(ts, window.end)
    return SignalSeries(kind=series.kind, samples=series.samples[lo:hi])


def clip_activity_matrix(matrix: ActivityMatrix, window: SessionWindow) -> ActivityMatrix:
    """Clip intervals to the window; intervals entirely outside are dropped."""
    clipped = []
    for iv in matrix.intervals:
        if iv.t_end < window.start or iv.t_start > window.end:
            continue
        clipped.append(
            ActivityInterval(
                activity_id=iv.activity_id,
                t_start=max(iv.t_start, window.start),
                t_end=min(iv.t_end, window.end),
            )
        )
    clipped.sort(key=lambda iv: (iv.t_start, iv.activity_id))
    return ActivityMatrix(source=matrix.source, intervals=clipped)


def synchronize(
    series_set: list[SignalSeries], matrices: list[ActivityMatrix]
) -> tuple[SessionWindow, list[SignalSeries], list[ActivityMatrix]]:
    """Intersect all stream spans into one session window and clip.

    The window runs from the latest first-sample timestamp to the earliest
    last-sample timestamp; samples and intervals outside it are dropped.
    Raises NoTemporalOverlap when the streams share no span.
    """
    if not series_set:
        raise ValueError("synchronize needs at least one series")
    for s in series_set:
        if not s.samples:
            raise ValueError(f"series {s.kind.value} is empty")
    start = max(s.samples[0][0] for s in series_set)
    end = min(s.samples[-1][0] for s in series_set)
    if start >= end:
        raise NoTemporalOverlap(start, end)
    window = SessionWindow(start=start, end=end)
    clipped_series = [clip_series(s, window) for s in series_set]
    clipped_matrices = [clip_activity_matrix(m, window) for m in matrices]
    return window, clipped_series, clipped_matrices


def _prefix_sums(values: list[float]) -> list[float]:
    acc = 0.0
    out = [0.0]
    for v in values:
        acc += v
        out.append(acc)
    return out


def window_average(
    series: SignalSeries, t: TimestampMs, width_ms: int = DEFAULT_WINDOW_MS
) -> float:
    """Mean of the values with timestamp in the closed interval [t - width_ms, t]."""
    ts = series.timestamps()
    lo = bisect_left(ts, t - width_ms)
    hi = bisect_right(ts, t)
    if hi == lo:
        raise EmptyWindow(t, width_ms)
    prefix = _prefix_sums(series.values())
    return (prefix[hi] - prefix[lo]) / (hi - lo)


def annotate_windows(
    series: SignalSeries, width_ms: int = DEFAULT_WINDOW_MS
) -> WindowedSeries:
    """Attach the trailing-window mean to every sample.

    One output row per input row, timestamps unchanged; the sample at t is
    inside its own window, so the mean is always defined.
    """
    ts = series.timestamps()
    values = series.values()
    prefix = _prefix_sums(values)
    rows: list[tuple[TimestampMs, float, float]] = []
    lo = 0
    for i, t in enumerate(ts):
        floor = t - width_ms
        while ts[lo] < floor:
            lo += 1
        mean = (prefix[i + 1] - prefix[lo]) / (i + 1 - lo)
        rows.append((t, values[i], mean))
    return WindowedSeries(kind=series.kind, rows=rows)


def resample(
    series: SignalSeries,
    window: SessionWindow,
    grid_step_ms: int = DEFAULT_GRID_MS,
    width_ms: int = DEFAULT_WINDOW_MS,
) -> ResampledSeries:
    """Trailing-window means on the regular grid start + k * grid_step_ms.

    Grid points whose window is empty fall back to the most recent sample
    before the window (sample-and-hold); points with no preceding sample at
    all are marked missing (None).
    """
    if grid_step_ms <= 0:
        raise InvalidGridStep(grid_step_ms)
    ts = series.timestamps()
    values = series.values()
    prefix = _prefix_sums(values)
    points: list[tuple[TimestampMs, float | None]] = []
    for k in range((window.end - window.start) // grid_step_ms + 1):
        t = window.start + k * grid_step_ms
        lo = bisect_left(ts, t - width_ms)
        hi = bisect_right(ts, t)
        if hi > lo:
            value: float | None = (prefix[hi] - prefix[lo]) / (hi - lo)
        elif lo > 0:
            value = values[lo - 1]
        else:
            value = None
        points.append((t, value))
    return ResampledSeries(kind=series.kind, grid_step_ms=grid_step_ms, points=points)
