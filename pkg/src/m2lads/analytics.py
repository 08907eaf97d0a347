"""Correlations, posttest scoring, pre/post comparison, activity summaries.

Correlation cells are None (undefined) rather than 0 when a series is
constant or fewer than two paired points exist; dashboards render those
as blank cells.  Pairing is pairwise-complete over the resampled grids:
a pair of series is correlated over exactly the grid points where both
have values.
"""

from __future__ import annotations

import math
from collections import defaultdict

from .activity import UNLABELED, activity_at
from .types import (
    ActivityInterval,
    ActivityMatrix,
    ActivitySummary,
    ActivitySummaryRow,
    CorrelationMatrix,
    EdxEvent,
    LearnerMatrix,
    PerformanceReport,
    PosttestMatrix,
    PretestMatrix,
    ResampledSeries,
    SessionWindow,
    SignalKind,
    TimestampMs,
)


class AnalyticsError(Exception):
    pass


class LengthMismatch(AnalyticsError):
    def __init__(self, nx: int, ny: int):
        super().__init__(f"input lengths differ: {nx} vs {ny}")


class TooFewPoints(AnalyticsError):
    def __init__(self, n: int):
        super().__init__(f"need at least 2 points, got {n}")


class GridMismatch(AnalyticsError):
    def __init__(self, detail: str):
        super().__init__(f"resampled series do not share a grid: {detail}")


class InvalidGrade(AnalyticsError):
    def __init__(self, item: str, detail: str):
        super().__init__(f"invalid grade for item {item!r}: {detail}")
        self.item = item


def pearson(x: list[float], y: list[float]) -> float | None:
    """Sample Pearson coefficient, or None when either input is constant."""
    if len(x) != len(y):
        raise LengthMismatch(len(x), len(y))
    if len(x) < 2:
        raise TooFewPoints(len(x))
    n = len(x)
    mean_x = sum(x) / n
    mean_y = sum(y) / n
    sxy = sxx = syy = 0.0
    for xi, yi in zip(x, y):
        dx = xi - mean_x
        dy = yi - mean_y
        sxy += dx * dy
        sxx += dx * dx
        syy += dy * dy
    if sxx == 0.0 or syy == 0.0:
        return None
    return sxy / math.sqrt(sxx * syy)


def correlation_matrix(resampled: list[ResampledSeries]) -> CorrelationMatrix:
    """Pairwise Pearson over shared grid points, in canonical kind order.

    The output ordering follows SignalKind declaration order regardless of
    input order.  Each pair uses the grid points where both series have
    values; cells with fewer than two such points, or a constant series,
    are None.  The diagonal is 1.0 where defined.
    """
    if not resampled:
        return CorrelationMatrix(kinds=[], r=[])
    reference = resampled[0]
    for series in resampled[1:]:
        if series.grid_step_ms != reference.grid_step_ms:
            raise GridMismatch(
                f"{series.grid_step_ms} ms vs {reference.grid_step_ms} ms step"
            )
        if [t for t, _ in series.points] != [t for t, _ in reference.points]:
            raise GridMismatch(f"{series.kind.value} grid differs from {reference.kind.value}")
    ordered = sorted(resampled, key=lambda s: list(SignalKind).index(s.kind))
    kinds = [s.kind for s in ordered]
    values = [[v for _, v in s.points] for s in ordered]
    n = len(ordered)
    r: list[list[float | None]] = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(i, n):
            xs = []
            ys = []
            for vx, vy in zip(values[i], values[j]):
                if vx is not None and vy is not None:
                    xs.append(vx)
                    ys.append(vy)
            cell: float | None
            if len(xs) < 2:
                cell = None
            elif i == j:
                cell = 1.0 if any(v != xs[0] for v in xs) else None
            else:
                cell = pearson(xs, ys)
            r[i][j] = cell
            r[j][i] = cell
    return CorrelationMatrix(kinds=kinds, r=r)


def score_posttest(events: list[EdxEvent]) -> PosttestMatrix:
    """Grade posttest items from graded MOOC events.

    Each problem_check event with grade fields scores its resource as
    grade/max_grade; for repeated attempts the last one wins.  Events
    lacking a resource id or grade fields are skipped (browser-side
    problem_check emissions carry no grade).
    """
    scores: dict[str, float] = {}
    for event in events:
        if event.event_type != "problem_check" or event.resource_id is None:
            continue
        grade_text = event.payload.get("grade")
        max_text = event.payload.get("max_grade")
        if grade_text is None or max_text is None:
            continue
        try:
            grade = float(grade_text)
            max_grade = float(max_text)
        except ValueError:
            raise InvalidGrade(event.resource_id, "grade fields are not numbers") from None
        if max_grade <= 0:
            raise InvalidGrade(event.resource_id, f"max_grade {max_grade} <= 0")
        if grade > max_grade:
            raise InvalidGrade(event.resource_id, f"grade {grade} > max_grade {max_grade}")
        scores[event.resource_id] = grade / max_grade
    return PosttestMatrix(rows=[(item, scores[item]) for item in scores])


def _mean(values: list[float]) -> float:
    return sum(values) / len(values) if values else 0.0


def compare_performance(pre: PretestMatrix, post: PosttestMatrix) -> PerformanceReport:
    """Line up pre and post scores per item and compute the gain.

    Rows cover the union of item ids (sorted), with None on the side an
    item is missing from; each mean is over its own matrix's scores, and
    an empty matrix contributes a mean of 0.0.
    """
    pre_scores = dict(pre.rows)
    post_scores = dict(post.rows)
    per_item = [
        (item, pre_scores.get(item), post_scores.get(item))
        for item in sorted(pre_scores.keys() | post_scores.keys())
    ]
    pre_mean = _mean([s for _, s in pre.rows])
    post_mean = _mean([s for _, s in post.rows])
    return PerformanceReport(
        per_item=per_item,
        pre_mean=pre_mean,
        post_mean=post_mean,
        gain=post_mean - pre_mean,
    )


def _segment_label(intervals: list[ActivityInterval], lo: TimestampMs, hi: TimestampMs) -> str:
    """Activity label on the open segment (lo, hi), matching activity_at
    for every instant strictly inside it."""
    best: ActivityInterval | None = None
    for iv in intervals:
        if iv.t_start <= lo and iv.t_end >= hi:
            if (
                best is None
                or iv.t_start > best.t_start
                or (iv.t_start == best.t_start and iv.activity_id < best.activity_id)
            ):
                best = iv
    return best.activity_id if best is not None else UNLABELED


def duration_shares(merged: ActivityMatrix, window: SessionWindow) -> dict[str, float]:
    """Fraction of the window each activity labels under lookup semantics.

    The window is swept between interval boundaries; each open segment is
    attributed to the activity a point lookup inside it would return.
    Shares over all labels (including "unlabeled") sum to 1.
    """
    cuts = {window.start, window.end}
    for iv in merged.intervals:
        for t in (iv.t_start, iv.t_end):
            if window.start < t < window.end:
                cuts.add(t)
    ordered = sorted(cuts)
    length = window.length_ms
    shares: dict[str, float] = defaultdict(float)
    for lo, hi in zip(ordered, ordered[1:]):
        shares[_segment_label(merged.intervals, lo, hi)] += (hi - lo) / length
    return dict(shares)


def summarize_by_activity(
    lm: LearnerMatrix, window: SessionWindow, merged: ActivityMatrix
) -> ActivitySummary:
    """Per-activity value statistics and time shares for one learner matrix.

    Rows cover every activity that labels at least one sample or a positive
    slice of the window; activities with time but no samples report None
    statistics.  An empty learner matrix yields an empty summary.
    """
    if not lm.rows:
        return ActivitySummary(rows=[])
    by_activity: dict[str, list[float]] = defaultdict(list)
    for t, value, _, activity_id in lm.rows:
        by_activity[activity_id].append(value)
    shares = duration_shares(merged, window)
    rows = []
    for activity_id in sorted(by_activity.keys() | shares.keys()):
        values = by_activity.get(activity_id, [])
        rows.append(
            ActivitySummaryRow(
                activity_id=activity_id,
                kind=lm.kind,
                mean=_mean(values) if values else None,
                min=min(values) if values else None,
                max=max(values) if values else None,
                sample_count=len(values),
                duration_share=shares.get(activity_id, 0.0),
            )
        )
    return ActivitySummary(rows=rows)
