"""Deterministic synthetic session generator.

Produces the full input set for one 30-minute recorded session: EEG
export at 1 Hz (five bands, attention, meditation, blinks), heart rate at
1 Hz, both pupil diameters at 10 Hz, a LOGGE activity log, a MOOC
tracking log with video/page navigation and ten graded items, pretest
answers and key, two frame indexes, two small media files, and the
manifest tying them together.  Everything derives from one seed, so two
generator runs write identical files.
"""

from __future__ import annotations

import csv
import json
import os
import random
from datetime import datetime, timezone

from .timeline import format_timestamp

SESSION_START_MS = int(datetime(2024, 3, 15, 10, 0, tzinfo=timezone.utc).timestamp()) * 1000
SESSION_LENGTH_MS = 1_800_000

PRETEST_ITEMS = [f"q{i:02d}" for i in range(1, 11)]
_CHOICES = ["a", "b", "c", "d"]


def _walk(rng: random.Random, n: int, start: float, lo: float, hi: float, step: float, digits: int) -> list[float]:
    value = start
    out = []
    for _ in range(n):
        value = min(hi, max(lo, value + rng.uniform(-step, step)))
        out.append(round(value, digits))
    return out


def _write_csv(path: str, header: list[str], rows: list[list]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def _write_eeg(path: str, rng: random.Random) -> None:
    n = 1800
    bands = [
        _walk(rng, n, 60.0, 5.0, 120.0, 6.0, 2),
        _walk(rng, n, 40.0, 5.0, 100.0, 5.0, 2),
        _walk(rng, n, 30.0, 5.0, 90.0, 5.0, 2),
        _walk(rng, n, 25.0, 5.0, 80.0, 4.0, 2),
        _walk(rng, n, 15.0, 2.0, 60.0, 3.0, 2),
    ]
    attention = _walk(rng, n, 55.0, 0.0, 100.0, 4.0, 1)
    meditation = _walk(rng, n, 50.0, 0.0, 100.0, 4.0, 1)
    rows = []
    for k in range(n):
        blink = 1 if rng.random() < 0.05 else 0
        rows.append(
            [SESSION_START_MS + 1000 * k]
            + [bands[b][k] for b in range(5)]
            + [attention[k], meditation[k], blink]
        )
    _write_csv(path, ["t_ms", "delta", "theta", "alpha", "beta", "gamma", "attention", "meditation", "blink"], rows)


def _write_signal(path: str, rng: random.Random, t0: int, step_ms: int, count: int, start: float, lo: float, hi: float, wiggle: float, digits: int) -> None:
    values = _walk(rng, count, start, lo, hi, wiggle, digits)
    rows = [[t0 + step_ms * k, values[k]] for k in range(count)]
    _write_csv(path, ["t_ms", "value"], rows)


def _write_logge(path: str) -> None:
    base = SESSION_START_MS
    spans = [
        ("reading_pdf", 5_000, 180_000),
        ("taking_notes", 120_000, 300_000),
        ("exercise_sheet", 310_000, 600_000),
        ("forum", 650_000, 800_000),
        ("reading_pdf", 820_000, 1_000_000),
        ("break", 1_020_000, 1_100_000),
    ]
    events = []
    for activity_id, rel_start, rel_end in spans:
        events.append((base + rel_start, activity_id, "start"))
        events.append((base + rel_end, activity_id, "end"))
    events.sort()
    rows = [[format_timestamp(t), activity_id, marker] for t, activity_id, marker in events]
    _write_csv(path, ["time", "activity_id", "marker"], rows)


def _edx_line(event_type: str, rel_ms: int, body: dict | None) -> str:
    obj = {
        "username": "u1",
        "event_type": event_type,
        "time": format_timestamp(SESSION_START_MS + rel_ms),
        "event": body or {},
    }
    return json.dumps(obj, separators=(",", ":"))


def _write_edx(path: str) -> None:
    lines = [
        _edx_line("page_view", 1_000, {"id": "course_home"}),
        _edx_line("play_video", 150_000, {"id": "v1"}),
        _edx_line("pause_video", 230_000, {"id": "v1"}),
        _edx_line("seq_goto", 600_000, {"id": "p1"}),
        _edx_line("page_close", 640_000, None),
        _edx_line("play_video", 900_000, {"id": "v2"}),
        # browser-side check, no grade fields: delimits nothing, scores nothing
        _edx_line("problem_check", 950_000, {"id": "q01", "answers": "a"}),
        _edx_line("pause_video", 1_050_000, {"id": "v2"}),
        _edx_line("seq_goto", 1_150_000, {"id": "p2"}),
        _edx_line("page_close", 1_300_000, None),
        _edx_line("play_video", 1_350_000, {"id": "v1"}),
        _edx_line("stop_video", 1_500_000, {"id": "v1"}),
        _edx_line("seq_goto", 1_550_000, {"id": "p3"}),
        # first attempts, then full-credit retries: the retry wins
        _edx_line("problem_check", 1_560_000, {"id": "q03", "grade": 0, "max_grade": 1}),
        _edx_line("problem_check", 1_570_000, {"id": "q07", "grade": 0, "max_grade": 2}),
    ]
    for i, item in enumerate(PRETEST_ITEMS):
        max_grade = 2 if item == "q07" else 1
        body = {"id": item, "grade": max_grade, "max_grade": max_grade, "attempts": 1}
        lines.append(_edx_line("problem_check", 1_600_000 + 10_000 * i, body))
    with open(path, "w", encoding="utf-8", newline="") as handle:
        handle.write("\n".join(lines) + "\n")


def _write_pretest(answers_path: str, key_path: str, rng: random.Random) -> None:
    key = {item: rng.choice(_CHOICES) for item in PRETEST_ITEMS}
    answers = {}
    for i, item in enumerate(PRETEST_ITEMS):
        if i < 5:
            answers[item] = key[item]
        else:
            wrong = [c for c in _CHOICES if c != key[item]]
            answers[item] = rng.choice(wrong)
    _write_csv(key_path, ["item", "answer"], [[item, key[item]] for item in PRETEST_ITEMS])
    _write_csv(answers_path, ["item", "answer"], [[item, answers[item]] for item in PRETEST_ITEMS])


def _write_frames(path: str, t0: int, step_ms: int, count: int) -> None:
    rows = [[k, t0 + step_ms * k] for k in range(count)]
    _write_csv(path, ["frame", "t_ms"], rows)


def write_fixture(directory: str | os.PathLike[str], seed: int = 7) -> str:
    """Write all session inputs into `directory`; returns the manifest path."""
    rng = random.Random(seed)
    directory = os.fspath(directory)
    os.makedirs(directory, exist_ok=True)

    def p(name: str) -> str:
        return os.path.join(directory, name)

    with open(p("profile.json"), "w", encoding="utf-8") as handle:
        json.dump(
            {
                "learner_id": "u1",
                "attributes": {"sex": "F", "mouse_hand": "right", "course_mark": "8.5"},
            },
            handle,
            indent=2,
        )
        handle.write("\n")

    _write_eeg(p("eeg.csv"), rng)
    _write_signal(p("heart_rate.csv"), rng, SESSION_START_MS - 2_000, 1_000, 1_806, 72.0, 55.0, 110.0, 2.0, 1)
    _write_signal(p("pupil_left.csv"), rng, SESSION_START_MS + 1_500, 100, 17_996, 4.2, 2.0, 8.0, 0.15, 3)
    _write_signal(p("pupil_right.csv"), rng, SESSION_START_MS + 1_700, 100, 17_991, 4.4, 2.0, 8.0, 0.15, 3)
    _write_logge(p("logge.csv"))
    _write_edx(p("edx_log.jsonl"))
    _write_pretest(p("pretest_answers.csv"), p("pretest_key.csv"), rng)
    _write_frames(p("frames_front_cam.csv"), SESSION_START_MS, 33, 200)
    _write_frames(p("frames_screen.csv"), SESSION_START_MS, 40, 100)
    with open(p("front_cam.mp4"), "wb") as handle:
        handle.write(rng.randbytes(2048))
    with open(p("screen.mp4"), "wb") as handle:
        handle.write(rng.randbytes(4096))

    manifest = {
        "session_id": "ls-demo-001",
        "learner_profile_path": "profile.json",
        "edx_log_path": "edx_log.jsonl",
        "logge_csv_path": "logge.csv",
        "pretest_answers_path": "pretest_answers.csv",
        "pretest_key_path": "pretest_key.csv",
        "eeg_csv_path": "eeg.csv",
        "signal_csv_paths": {
            "heart_rate": "heart_rate.csv",
            "pupil_left": "pupil_left.csv",
            "pupil_right": "pupil_right.csv",
        },
        "frame_index_paths": {
            "front_cam": "frames_front_cam.csv",
            "screen": "frames_screen.csv",
        },
        "media_paths": {
            "front_cam.mp4": "front_cam.mp4",
            "screen.mp4": "screen.mp4",
        },
    }
    manifest_path = p("manifest.json")
    with open(manifest_path, "w", encoding="utf-8") as handle:
        json.dump(manifest, handle, indent=2)
        handle.write("\n")
    return manifest_path
