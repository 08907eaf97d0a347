"""Correlation, posttest scoring, performance comparison, summaries."""

from __future__ import annotations

import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from m2lads import analytics
from m2lads.types import (
    ActivityInterval,
    ActivityMatrix,
    EdxEvent,
    LearnerMatrix,
    MatrixSource,
    PosttestMatrix,
    PretestMatrix,
    ResampledSeries,
    SessionWindow,
    SignalKind,
)

finite = st.floats(min_value=-1e6, max_value=1e6, allow_nan=False, width=32)


def raw_moment_pearson(x, y):
    """Textbook formula on raw moments; intentionally a different
    algebraic route than the implementation."""
    n = len(x)
    sx, sy = sum(x), sum(y)
    sxx = sum(v * v for v in x)
    syy = sum(v * v for v in y)
    sxy = sum(a * b for a, b in zip(x, y))
    den = math.sqrt((n * sxx - sx * sx) * (n * syy - sy * sy))
    if den == 0:
        return None
    return (n * sxy - sx * sy) / den


class TestPearson:
    def test_known_value(self):
        assert analytics.pearson([1, 2, 3, 4], [1, 3, 2, 4]) == pytest.approx(0.8, abs=1e-9)

    def test_self_correlation(self):
        assert analytics.pearson([1, 2, 3], [1, 2, 3]) == pytest.approx(1.0)

    def test_anti_correlation(self):
        assert analytics.pearson([1, 2, 3], [3, 2, 1]) == pytest.approx(-1.0)

    def test_constant_is_undefined(self):
        assert analytics.pearson([1, 1, 1], [1, 2, 3]) is None
        assert analytics.pearson([1, 2, 3], [5, 5, 5]) is None

    def test_length_mismatch(self):
        with pytest.raises(analytics.LengthMismatch):
            analytics.pearson([1, 2], [1, 2, 3])

    def test_too_few_points(self):
        with pytest.raises(analytics.TooFewPoints):
            analytics.pearson([1], [2])

    @settings(max_examples=150)
    @given(st.lists(st.tuples(finite, finite), min_size=2, max_size=50))
    def test_against_raw_moment_formula(self, pairs):
        x = [a for a, _ in pairs]
        y = [b for _, b in pairs]
        expected = raw_moment_pearson(x, y)
        actual = analytics.pearson(x, y)
        if actual is None or expected is None:
            # degenerate draws: at least agree that one input is constant
            assert len(set(x)) == 1 or len(set(y)) == 1 or expected is None
        else:
            assert actual == pytest.approx(expected, abs=1e-7)
            assert abs(actual) <= 1 + 1e-12

    @given(
        st.lists(finite, min_size=2, max_size=30),
        st.floats(min_value=0.01, max_value=100, allow_nan=False),
        finite,
    )
    def test_affine_images(self, x, a, b):
        if len(set(x)) < 2:
            return
        up = [a * v + b for v in x]
        down = [-a * v + b for v in x]
        r_up = analytics.pearson(x, up)
        r_down = analytics.pearson(x, down)
        if r_up is not None:
            assert r_up == pytest.approx(1.0, abs=1e-9)
        if r_down is not None:
            assert r_down == pytest.approx(-1.0, abs=1e-9)

    @given(st.lists(st.tuples(finite, finite), min_size=2, max_size=30))
    def test_symmetry(self, pairs):
        x = [a for a, _ in pairs]
        y = [b for _, b in pairs]
        assert analytics.pearson(x, y) == analytics.pearson(y, x)


def rs(kind, values, step=1000):
    return ResampledSeries(
        kind=kind,
        grid_step_ms=step,
        points=[(1000 * i, v) for i, v in enumerate(values)],
    )


class TestCorrelationMatrix:
    def test_identical_series(self):
        matrix = analytics.correlation_matrix(
            [rs(SignalKind.ATTENTION, [1.0, 2.0, 3.0]), rs(SignalKind.HEART_RATE, [1.0, 2.0, 3.0])]
        )
        assert matrix.kinds == [SignalKind.ATTENTION, SignalKind.HEART_RATE]
        assert matrix.r[0][1] == pytest.approx(1.0)
        assert matrix.r[0][0] == 1.0 and matrix.r[1][1] == 1.0

    def test_constant_series_undefined(self):
        matrix = analytics.correlation_matrix(
            [rs(SignalKind.ATTENTION, [5.0, 5.0, 5.0]), rs(SignalKind.HEART_RATE, [1.0, 2.0, 3.0])]
        )
        assert matrix.r[0][1] is None
        assert matrix.r[1][0] is None
        assert matrix.r[0][0] is None  # no variance, no self-correlation
        assert matrix.r[1][1] == 1.0

    def test_pairwise_complete_over_missing(self):
        a = rs(SignalKind.ATTENTION, [None, 1.0, 2.0, 3.0, 4.0])
        b = rs(SignalKind.HEART_RATE, [9.0, 2.0, 4.0, 6.0, None])
        matrix = analytics.correlation_matrix([a, b])
        shared_a = [1.0, 2.0, 3.0]
        shared_b = [2.0, 4.0, 6.0]
        assert matrix.r[0][1] == pytest.approx(analytics.pearson(shared_a, shared_b))

    def test_too_few_shared_points(self):
        a = rs(SignalKind.ATTENTION, [1.0, None, None])
        b = rs(SignalKind.HEART_RATE, [None, 1.0, 2.0])
        assert analytics.correlation_matrix([a, b]).r[0][1] is None

    def test_order_fixed_regardless_of_input(self):
        series = [
            rs(SignalKind.EEG_GAMMA, [1.0, 2.0, 4.0]),
            rs(SignalKind.ATTENTION, [2.0, 1.0, 5.0]),
            rs(SignalKind.HEART_RATE, [3.0, 0.0, 6.0]),
        ]
        forward = analytics.correlation_matrix(series)
        backward = analytics.correlation_matrix(series[::-1])
        assert forward.kinds == [SignalKind.ATTENTION, SignalKind.HEART_RATE, SignalKind.EEG_GAMMA]
        assert forward == backward

    def test_symmetric(self):
        series = [
            rs(SignalKind.ATTENTION, [1.0, 4.0, 2.0, 8.0]),
            rs(SignalKind.MEDITATION, [2.0, 3.0, 5.0, 1.0]),
            rs(SignalKind.HEART_RATE, [9.0, 1.0, 4.0, 4.0]),
        ]
        matrix = analytics.correlation_matrix(series)
        for i in range(3):
            for j in range(3):
                assert matrix.r[i][j] == matrix.r[j][i]

    def test_grid_mismatch(self):
        with pytest.raises(analytics.GridMismatch):
            analytics.correlation_matrix(
                [rs(SignalKind.ATTENTION, [1.0, 2.0]), rs(SignalKind.HEART_RATE, [1.0, 2.0], step=500)]
            )

    def test_empty_input(self):
        assert analytics.correlation_matrix([]).kinds == []


def check_event(t, item, grade, max_grade):
    return EdxEvent(
        username="u1",
        event_type="problem_check",
        time=t,
        resource_id=item,
        payload={"grade": str(grade), "max_grade": str(max_grade)},
    )


class TestScorePosttest:
    def test_full_credit(self):
        matrix = analytics.score_posttest([check_event(0, "q1", 2, 2)])
        assert matrix.rows == [("q1", 1.0)]

    def test_last_attempt_wins(self):
        matrix = analytics.score_posttest(
            [check_event(0, "q1", 0, 2), check_event(1000, "q1", 1, 2)]
        )
        assert matrix.rows == [("q1", 0.5)]

    def test_no_checks(self):
        assert analytics.score_posttest([]).rows == []

    def test_grade_above_max_rejected(self):
        with pytest.raises(analytics.InvalidGrade):
            analytics.score_posttest([check_event(0, "q1", 3, 2)])

    def test_non_positive_max_rejected(self):
        with pytest.raises(analytics.InvalidGrade):
            analytics.score_posttest([check_event(0, "q1", 0, 0)])

    def test_browser_checks_without_grades_skipped(self):
        event = EdxEvent(
            username="u1",
            event_type="problem_check",
            time=0,
            resource_id="q1",
            payload={"answers": "a"},
        )
        assert analytics.score_posttest([event]).rows == []

    @given(st.lists(st.sampled_from(["play_video", "seq_goto", "page_close"]), max_size=10))
    def test_unrelated_events_ignored(self, noise_types):
        graded = [check_event(100, "q1", 1, 2), check_event(300, "q2", 2, 2)]
        noise = [
            EdxEvent(username="u1", event_type=t, time=50 + i, resource_id="x", payload={})
            for i, t in enumerate(noise_types)
        ]
        merged = sorted(graded + noise, key=lambda e: e.time)
        assert analytics.score_posttest(merged) == analytics.score_posttest(graded)


class TestComparePerformance:
    def test_means_and_gain(self):
        report = analytics.compare_performance(
            PretestMatrix(rows=[("q1", 0.0), ("q2", 1.0)]),
            PosttestMatrix(rows=[("q1", 1.0), ("q2", 1.0)]),
        )
        assert report.pre_mean == 0.5
        assert report.post_mean == 1.0
        assert report.gain == 0.5
        assert report.per_item == [("q1", 0.0, 1.0), ("q2", 1.0, 1.0)]

    def test_identical_sides_zero_gain(self):
        rows = [("q1", 0.5), ("q2", 0.75)]
        report = analytics.compare_performance(PretestMatrix(rows=rows), PosttestMatrix(rows=rows))
        assert report.gain == 0.0

    def test_union_marks_missing_side(self):
        report = analytics.compare_performance(
            PretestMatrix(rows=[("q1", 1.0)]),
            PosttestMatrix(rows=[("q1", 1.0), ("q3", 0.5)]),
        )
        assert ("q3", None, 0.5) in report.per_item
        # q3 does not drag the pretest mean
        assert report.pre_mean == 1.0

    def test_empty_matrices(self):
        report = analytics.compare_performance(PretestMatrix(rows=[]), PosttestMatrix(rows=[]))
        assert report.per_item == []
        assert report.pre_mean == 0.0 and report.post_mean == 0.0 and report.gain == 0.0


def lm(kind, rows):
    return LearnerMatrix(kind=kind, rows=rows)


class TestSummarizeByActivity:
    def test_single_activity_spans_window(self):
        window = SessionWindow(start=0, end=100)
        merged = ActivityMatrix(
            source=MatrixSource.MERGED, intervals=[ActivityInterval("read", 0, 100)]
        )
        matrix = lm(SignalKind.ATTENTION, [(10, 2.0, 2.0, "read"), (20, 4.0, 3.0, "read")])
        summary = analytics.summarize_by_activity(matrix, window, merged)
        (row,) = summary.rows
        assert row.activity_id == "read"
        assert row.mean == 3.0
        assert row.duration_share == pytest.approx(1.0)

    def test_two_halves(self):
        window = SessionWindow(start=0, end=200)
        merged = ActivityMatrix(
            source=MatrixSource.MERGED,
            intervals=[ActivityInterval("first", 0, 100), ActivityInterval("second", 100, 200)],
        )
        rows = [(10, 10.0, 10.0, "first"), (150, 30.0, 20.0, "second")]
        summary = analytics.summarize_by_activity(lm(SignalKind.HEART_RATE, rows), window, merged)
        by_id = {row.activity_id: row for row in summary.rows}
        assert by_id["first"].mean == 10.0
        assert by_id["second"].mean == 30.0
        assert by_id["first"].duration_share == pytest.approx(0.5)
        assert by_id["second"].duration_share == pytest.approx(0.5)

    def test_empty_lm(self):
        window = SessionWindow(start=0, end=100)
        merged = ActivityMatrix(source=MatrixSource.MERGED, intervals=[])
        assert analytics.summarize_by_activity(lm(SignalKind.ATTENTION, []), window, merged).rows == []

    def test_uncovered_time_is_unlabeled(self):
        window = SessionWindow(start=0, end=100)
        merged = ActivityMatrix(
            source=MatrixSource.MERGED, intervals=[ActivityInterval("read", 0, 25)]
        )
        rows = [(10, 1.0, 1.0, "read"), (50, 2.0, 1.5, "unlabeled")]
        summary = analytics.summarize_by_activity(lm(SignalKind.ATTENTION, rows), window, merged)
        by_id = {row.activity_id: row for row in summary.rows}
        assert by_id["read"].duration_share == pytest.approx(0.25)
        assert by_id["unlabeled"].duration_share == pytest.approx(0.75)

    def test_activity_with_time_but_no_samples(self):
        window = SessionWindow(start=0, end=100)
        merged = ActivityMatrix(
            source=MatrixSource.MERGED,
            intervals=[ActivityInterval("read", 0, 60), ActivityInterval("idle", 60, 100)],
        )
        rows = [(10, 1.0, 1.0, "read")]
        summary = analytics.summarize_by_activity(lm(SignalKind.ATTENTION, rows), window, merged)
        by_id = {row.activity_id: row for row in summary.rows}
        assert by_id["idle"].sample_count == 0
        assert by_id["idle"].mean is None and by_id["idle"].min is None
        assert by_id["idle"].duration_share > 0

    @given(
        st.lists(
            st.tuples(st.sampled_from("abc"), st.integers(0, 100), st.integers(0, 100)),
            max_size=10,
        )
    )
    def test_shares_sum_to_one(self, raw):
        window = SessionWindow(start=0, end=100)
        intervals = sorted(
            [
                ActivityInterval(i, min(s, e), max(s, e))
                for i, s, e in raw
            ],
            key=lambda iv: (iv.t_start, iv.activity_id),
        )
        merged = ActivityMatrix(source=MatrixSource.MERGED, intervals=intervals)
        rows = [(50, 1.0, 1.0, "whatever")]
        summary = analytics.summarize_by_activity(lm(SignalKind.ATTENTION, rows), window, merged)
        assert sum(row.duration_share for row in summary.rows) == pytest.approx(1.0, abs=1e-9)
