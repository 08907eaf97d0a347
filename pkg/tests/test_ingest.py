"""Parser contracts: field mapping, located errors, loss-free round trips."""

from __future__ import annotations

import io
import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from m2lads import ingest
from m2lads.types import EEGBand, Marker, SignalKind


def _stream(text: str) -> io.BytesIO:
    return io.BytesIO(text.encode("utf-8"))


class TestEdxLog:
    def test_maps_fields(self):
        line = '{"username":"u1","event_type":"play_video","time":"1970-01-01T00:00:10Z","event":{"id":"v1"}}'
        events = ingest.parse_edx_log(_stream(line + "\n"))
        assert len(events) == 1
        event = events[0]
        assert event.username == "u1"
        assert event.event_type == "play_video"
        assert event.time == 10_000
        assert event.resource_id == "v1"

    def test_empty_file(self):
        assert ingest.parse_edx_log(_stream("")) == []

    def test_malformed_line_locates(self):
        with pytest.raises(ingest.MalformedEvent) as err:
            ingest.parse_edx_log(_stream('{"username":\n'))
        assert err.value.line_no == 1

    def test_missing_field(self):
        with pytest.raises(ingest.MissingField):
            ingest.parse_edx_log(_stream('{"username":"u1","time":"1970-01-01T00:00:10Z"}\n'))

    def test_payload_keeps_grade_fields(self):
        line = json.dumps(
            {
                "username": "u1",
                "event_type": "problem_check",
                "time": "1970-01-01T00:01:00Z",
                "event": {"id": "q1", "grade": 2, "max_grade": 2},
            }
        )
        (event,) = ingest.parse_edx_log(_stream(line + "\n"))
        assert event.payload["grade"] == "2"
        assert event.payload["max_grade"] == "2"

    def test_no_resource_id_kept(self):
        line = '{"username":"u1","event_type":"page_close","time":"1970-01-01T00:00:10Z"}'
        (event,) = ingest.parse_edx_log(_stream(line + "\n"))
        assert event.resource_id is None


class TestLoggeCsv:
    def test_maps_rows(self):
        text = (
            "time,activity_id,marker\n"
            "1970-01-01T00:00:00Z,read_pdf,start\n"
            "1970-01-01T00:00:30Z,read_pdf,end\n"
        )
        events = ingest.parse_logge_csv(_stream(text))
        assert [(e.time, e.activity_id, e.marker) for e in events] == [
            (0, "read_pdf", Marker.START),
            (30_000, "read_pdf", Marker.END),
        ]

    def test_header_only(self):
        assert ingest.parse_logge_csv(_stream("time,activity_id,marker\n")) == []

    def test_unknown_marker(self):
        text = "time,activity_id,marker\n1970-01-01T00:00:00Z,read_pdf,pause\n"
        with pytest.raises(ingest.UnknownMarker) as err:
            ingest.parse_logge_csv(_stream(text))
        assert err.value.line_no == 2

    def test_round_trip(self):
        text = (
            "time,activity_id,marker\n"
            "2024-03-15T10:00:00Z,notes,start\n"
            "2024-03-15T10:05:30.250Z,notes,end\n"
        )
        events = ingest.parse_logge_csv(_stream(text))
        assert ingest.logge_events_to_csv(events).decode() == text


class TestSignalCsv:
    def test_two_samples(self):
        series = ingest.parse_signal_csv(
            _stream("t_ms,value\n0,72.0\n1000,75.0\n"), SignalKind.HEART_RATE
        )
        assert series.kind is SignalKind.HEART_RATE
        assert series.samples == [(0, 72.0), (1000, 75.0)]

    def test_non_monotonic(self):
        with pytest.raises(ingest.NonMonotonicTimestamps) as err:
            ingest.parse_signal_csv(
                _stream("t_ms,value\n1000,72.0\n500,75.0\n"), SignalKind.HEART_RATE
            )
        assert err.value.line_no == 3

    def test_header_only_is_empty(self):
        with pytest.raises(ingest.EmptySeries):
            ingest.parse_signal_csv(_stream("t_ms,value\n"), SignalKind.HEART_RATE)

    def test_non_finite_value(self):
        with pytest.raises(ingest.NonFiniteValue):
            ingest.parse_signal_csv(_stream("t_ms,value\n0,nan\n"), SignalKind.HEART_RATE)

    def test_bad_header(self):
        with pytest.raises(ingest.MalformedRow) as err:
            ingest.parse_signal_csv(_stream("time,value\n0,1\n"), SignalKind.HEART_RATE)
        assert err.value.line_no == 1

    @given(
        st.lists(
            st.tuples(st.integers(0, 10**7), st.integers(-10**6, 10**6)),
            min_size=1,
            max_size=40,
            unique_by=lambda s: s[0],
        )
    )
    def test_round_trip_exact(self, raw):
        raw.sort()
        samples = [(t, v / 64) for t, v in raw]
        from m2lads.types import SignalSeries

        series = SignalSeries(kind=SignalKind.PUPIL_LEFT, samples=samples)
        data = ingest.signal_series_to_csv(series)
        again = ingest.parse_signal_csv(io.BytesIO(data), SignalKind.PUPIL_LEFT)
        assert again.samples == samples


class TestEegCsv:
    HEADER = "t_ms,delta,theta,alpha,beta,gamma,attention,meditation,blink\n"

    def test_single_row_with_blink(self):
        data = ingest.parse_eeg_csv(_stream(self.HEADER + "500,1,2,3,4,5,60,50,1\n"))
        assert data.blinks.times == [500]
        assert set(data.series) == {
            SignalKind.EEG_DELTA,
            SignalKind.EEG_THETA,
            SignalKind.EEG_ALPHA,
            SignalKind.EEG_BETA,
            SignalKind.EEG_GAMMA,
            SignalKind.ATTENTION,
            SignalKind.MEDITATION,
        }
        assert data.series[SignalKind.EEG_GAMMA].samples == [(500, 5.0)]
        assert data.series[SignalKind.ATTENTION].samples == [(500, 60.0)]

    def test_no_blinks(self):
        rows = "".join(f"{t},1,1,1,1,1,50,50,0\n" for t in (0, 1000, 2000))
        data = ingest.parse_eeg_csv(_stream(self.HEADER + rows))
        assert data.blinks.times == []
        assert len(data.series[SignalKind.EEG_DELTA].samples) == 3

    def test_bad_blink_flag(self):
        with pytest.raises(ingest.InvalidBlinkFlag):
            ingest.parse_eeg_csv(_stream(self.HEADER + "0,1,1,1,1,1,50,50,2\n"))


class TestClassifyBand:
    @pytest.mark.parametrize(
        "freq,band",
        [
            (9.5, EEGBand.ALPHA),
            (4.0, EEGBand.THETA),
            (45.0, EEGBand.GAMMA),
            (3.999, EEGBand.DELTA),
            (8.0, EEGBand.ALPHA),
            (13.0, EEGBand.BETA),
            (30.0, EEGBand.GAMMA),
        ],
    )
    def test_boundaries(self, freq, band):
        assert ingest.classify_band(freq) is band

    def test_rejects_non_positive(self):
        for bad in (0.0, -1.0, float("nan")):
            with pytest.raises(ingest.NonPositiveFrequency):
                ingest.classify_band(bad)

    @given(st.floats(min_value=1e-9, max_value=1e6, allow_nan=False))
    def test_total_over_positive_frequencies(self, freq):
        assert ingest.classify_band(freq) in EEGBand


class TestPretest:
    def _matrix(self, answers: str, key: str):
        return ingest.parse_pretest(_stream(answers), _stream(key))

    def test_match_scores_one(self):
        matrix = self._matrix("item,answer\nq1,b\n", "item,answer\nq1,b\n")
        assert matrix.rows == [("q1", 1.0)]

    def test_mismatch_scores_zero(self):
        matrix = self._matrix("item,answer\nq1,a\n", "item,answer\nq1,b\n")
        assert matrix.rows == [("q1", 0.0)]

    def test_case_sensitive(self):
        matrix = self._matrix("item,answer\nq1,B\n", "item,answer\nq1,b\n")
        assert matrix.rows == [("q1", 0.0)]

    def test_unknown_item(self):
        with pytest.raises(ingest.UnknownItem) as err:
            self._matrix("item,answer\nq9,a\n", "item,answer\nq1,b\n")
        assert err.value.item == "q9"

    def test_duplicate_item(self):
        with pytest.raises(ingest.DuplicateItem):
            self._matrix("item,answer\nq1,a\nq1,b\n", "item,answer\nq1,b\n")


class TestFrameIndex:
    def test_rows(self):
        index = ingest.parse_frame_index(_stream("frame,t_ms\n0,0\n1,33\n"), "cam")
        assert index.video_id == "cam"
        assert index.rows == [(0, 0), (1, 33)]

    def test_non_monotonic_frames(self):
        with pytest.raises(ingest.NonMonotonicFrames) as err:
            ingest.parse_frame_index(_stream("frame,t_ms\n1,33\n0,0\n"), "cam")
        assert err.value.line_no == 3

    def test_header_only_valid(self):
        assert ingest.parse_frame_index(_stream("frame,t_ms\n"), "cam").rows == []

    def test_time_may_repeat_but_not_decrease(self):
        index = ingest.parse_frame_index(_stream("frame,t_ms\n0,10\n1,10\n"), "cam")
        assert index.rows == [(0, 10), (1, 10)]
        with pytest.raises(ingest.NonMonotonicTimestamps):
            ingest.parse_frame_index(_stream("frame,t_ms\n0,10\n1,9\n"), "cam")


class TestLearnerProfile:
    def test_parses(self):
        payload = '{"learner_id": "u1", "attributes": {"sex": "F", "mark": "8.5"}}'
        profile = ingest.parse_learner_profile(_stream(payload))
        assert profile.learner_id == "u1"
        assert profile.attributes == {"sex": "F", "mark": "8.5"}

    def test_empty_id_rejected(self):
        with pytest.raises(ingest.InvalidProfile):
            ingest.parse_learner_profile(_stream('{"learner_id": "", "attributes": {}}'))
