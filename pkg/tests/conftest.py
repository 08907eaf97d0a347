"""Shared fixtures: one synthetic session generated once per run, plus a
factory for small randomized session records used by persistence tests."""

from __future__ import annotations

import random

import pytest

from m2lads import pipeline, synthetic
from m2lads.store import SessionStore
from m2lads.types import (
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

FAKE_NOW = 1_710_500_000_000

_criterion_verdicts: dict[str, bool] = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    label = getattr(getattr(item, "function", None), "criterion_label", None)
    if label is None or report.when not in ("setup", "call"):
        return
    if report.failed:
        _criterion_verdicts[label] = False
    elif report.when == "call" and report.passed:
        _criterion_verdicts.setdefault(label, True)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _criterion_verdicts:
        return
    terminalreporter.write_sep("-", "acceptance criteria")
    for label, passed in _criterion_verdicts.items():
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'}: {label}")


@pytest.fixture(scope="session")
def fixture_dir(tmp_path_factory):
    directory = tmp_path_factory.mktemp("session_inputs")
    synthetic.write_fixture(directory)
    return directory


@pytest.fixture(scope="session")
def fixture_manifest(fixture_dir) -> pipeline.IngestManifest:
    return pipeline.IngestManifest.from_file(fixture_dir / "manifest.json")


@pytest.fixture(scope="session")
def fixture_record(fixture_manifest) -> SessionRecord:
    return pipeline.build_record(fixture_manifest, created_at=FAKE_NOW)


@pytest.fixture(scope="session")
def fixture_store(tmp_path_factory, fixture_record, fixture_manifest) -> SessionStore:
    store = SessionStore(tmp_path_factory.mktemp("store_root"))
    store.put_session(fixture_record)
    for name in sorted(fixture_manifest.media_paths):
        store.attach_media(fixture_record.session_id, name, fixture_manifest.media_paths[name])
    return store


def _random_lm(rng: random.Random, kind: SignalKind, window: SessionWindow) -> LearnerMatrix:
    count = rng.randint(0, 50)
    times = sorted(rng.sample(range(window.start, window.end + 1), count))
    rows = []
    for t in times:
        value = rng.randint(-2000, 2000) / 16
        rows.append((t, value, value / 2, rng.choice(["a", "b", "unlabeled"])))
    return LearnerMatrix(kind=kind, rows=rows)


def make_random_record(rng: random.Random, session_id: str) -> SessionRecord:
    """A structurally valid record with randomized contents, small enough
    to build a hundred of them quickly."""
    start = rng.randint(0, 10**9)
    window = SessionWindow(start=start, end=start + rng.randint(1000, 10**6))
    kinds = rng.sample(list(SignalKind), rng.randint(1, 4))
    intervals = []
    for i in range(rng.randint(0, 8)):
        t0 = rng.randint(window.start, window.end)
        intervals.append(
            ActivityInterval(
                activity_id=rng.choice(["read", "video:v1", "quiz"]),
                t_start=t0,
                t_end=rng.randint(t0, window.end),
            )
        )
    intervals.sort(key=lambda iv: (iv.t_start, iv.activity_id))
    items = [f"q{i}" for i in range(rng.randint(0, 5))]
    pre_rows = [(item, float(rng.randint(0, 1))) for item in items]
    post_rows = [(item, rng.randint(0, 4) / 4) for item in items if rng.random() < 0.8]
    corr_kinds = sorted(kinds, key=list(SignalKind).index)
    n = len(corr_kinds)
    r: list[list[float | None]] = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(i, n):
            cell = None if rng.random() < 0.2 else rng.randint(-1000, 1000) / 1000
            r[i][j] = cell
            r[j][i] = cell
    return SessionRecord(
        session_id=session_id,
        learner=LearnerProfile(
            learner_id=f"u{rng.randint(1, 9)}",
            attributes={"sex": rng.choice(["F", "M", "X"])},
        ),
        window=window,
        merged_matrix=ActivityMatrix(source=MatrixSource.MERGED, intervals=intervals),
        learner_matrices={kind: _random_lm(rng, kind, window) for kind in kinds},
        blinks=BlinkEvents(times=sorted(rng.sample(range(window.start, window.end), rng.randint(0, 10)))),
        pretest=PretestMatrix(rows=pre_rows),
        posttest=PosttestMatrix(rows=post_rows),
        performance=PerformanceReport(
            per_item=[(item, 1.0, 0.5) for item in items],
            pre_mean=rng.randint(0, 10) / 10,
            post_mean=rng.randint(0, 10) / 10,
            gain=rng.randint(-10, 10) / 10,
        ),
        correlations=CorrelationMatrix(kinds=corr_kinds, r=r),
        summaries=ActivitySummary(
            rows=[
                ActivitySummaryRow(
                    activity_id="read",
                    kind=kinds[0],
                    mean=1.5,
                    min=0.5,
                    max=2.5,
                    sample_count=3,
                    duration_share=0.25,
                )
            ]
        ),
        frame_indexes=[
            VideoFrameIndex(video_id="cam", rows=[(i, window.start + 33 * i) for i in range(5)])
        ],
        created_at=rng.randint(0, 2 * 10**12),
    )


@pytest.fixture
def record_factory():
    return make_random_record


def write_mini_session(directory, session_id: str = "mini-001") -> str:
    """A tiny but complete input set (seconds, not minutes); returns the
    manifest path.  Useful where ingesting the full fixture would be
    needless weight."""
    directory.mkdir(parents=True, exist_ok=True)

    def put(name: str, text: str) -> str:
        path = directory / name
        path.write_text(text, encoding="utf-8")
        return str(path)

    eeg_rows = "".join(
        f"{1000 * k},{10 + k},{20 + k},{30 + k},{4 + k},{5 + k},{k},{50 - k},{1 if k == 5 else 0}\n"
        for k in range(11)
    )
    put("eeg.csv", "t_ms,delta,theta,alpha,beta,gamma,attention,meditation,blink\n" + eeg_rows)
    hr_rows = "".join(f"{500 + 1000 * k},{70 + k}.5\n" for k in range(10))
    put("heart_rate.csv", "t_ms,value\n" + hr_rows)
    put("profile.json", '{"learner_id": "u9", "attributes": {"sex": "X"}}\n')
    put(
        "logge.csv",
        "time,activity_id,marker\n"
        "1970-01-01T00:00:01Z,solo,start\n"
        "1970-01-01T00:00:08Z,solo,end\n",
    )
    put(
        "edx.jsonl",
        '{"username":"u9","event_type":"play_video","time":"1970-01-01T00:00:02Z","event":{"id":"v1"}}\n'
        '{"username":"u9","event_type":"problem_check","time":"1970-01-01T00:00:07Z",'
        '"event":{"id":"q1","grade":1,"max_grade":1}}\n',
    )
    put("pretest_answers.csv", "item,answer\nq1,b\n")
    put("pretest_key.csv", "item,answer\nq1,b\n")
    manifest = {
        "session_id": session_id,
        "learner_profile_path": "profile.json",
        "edx_log_path": "edx.jsonl",
        "logge_csv_path": "logge.csv",
        "pretest_answers_path": "pretest_answers.csv",
        "pretest_key_path": "pretest_key.csv",
        "eeg_csv_path": "eeg.csv",
        "signal_csv_paths": {"heart_rate": "heart_rate.csv"},
    }
    import json

    path = directory / "manifest.json"
    path.write_text(json.dumps(manifest, indent=2), encoding="utf-8")
    return str(path)


@pytest.fixture
def mini_session(tmp_path):
    return write_mini_session(tmp_path / "mini")
