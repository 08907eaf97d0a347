"""Command-line entry point.

Subcommands:
  ingest <manifest.json>   run the pipeline and persist the session
  validate <manifest.json> check a manifest without touching the store
  export <id>              write learner matrices and analytics to files
  serve                    run the REST service

Exit codes: 0 success, 1 validation problem, 2 I/O problem.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys

from . import api, serialization, timeline
from .activity import ActivityError
from .analytics import AnalyticsError
from .ingest import IngestError
from .pipeline import IngestManifest, InvalidManifest, build_record, current_time_ms
from .serialization import encode_record
from .store import SessionStore, StoreError
from .timeline import TimelineError

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_IO = 2


class CommandError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def _load_manifest(path: str, args: argparse.Namespace) -> IngestManifest:
    manifest = IngestManifest.from_file(path)
    if args.window_ms is not None:
        manifest.window_ms = args.window_ms
    if args.grid_ms is not None:
        manifest.grid_ms = args.grid_ms
    if manifest.window_ms < 1 or manifest.grid_ms < 1:
        raise InvalidManifest("window_ms and grid_ms must be positive")
    return manifest


def cmd_ingest(args: argparse.Namespace) -> int:
    manifest = _load_manifest(args.manifest, args)
    record = build_record(manifest, created_at=current_time_ms())
    store = SessionStore(args.store_root)
    store.put_session(record)
    for name in sorted(manifest.media_paths):
        store.attach_media(record.session_id, name, manifest.media_paths[name])
    print(record.session_id)
    return EXIT_OK


def cmd_validate(args: argparse.Namespace) -> int:
    manifest = _load_manifest(args.manifest, args)
    missing = [
        path
        for path in [
            manifest.learner_profile_path,
            manifest.edx_log_path,
            manifest.logge_csv_path,
            manifest.pretest_answers_path,
            manifest.pretest_key_path,
            manifest.eeg_csv_path,
            *manifest.signal_csv_paths.values(),
            *manifest.frame_index_paths.values(),
            *manifest.media_paths.values(),
            *([manifest.boundary_config_path] if manifest.boundary_config_path else []),
        ]
        if not os.path.isfile(path)
    ]
    if missing:
        raise CommandError(
            "missing input files: " + ", ".join(sorted(missing)), EXIT_VALIDATION
        )
    print("ok")
    return EXIT_OK


def cmd_export(args: argparse.Namespace) -> int:
    store = SessionStore(args.store_root)
    record = store.get_session(args.session_id)
    out_dir = args.out
    os.makedirs(out_dir, exist_ok=True)
    if args.format == "json":
        with open(os.path.join(out_dir, "record.json"), "wb") as handle:
            handle.write(encode_record(record))
        print(os.path.join(out_dir, "record.json"))
        return EXIT_OK

    written = []
    for kind, lm in record.learner_matrices.items():
        path = os.path.join(out_dir, f"lm_{kind.value}.csv")
        with open(path, "w", encoding="utf-8", newline="") as handle:
            serialization.write_lm_csv(lm, handle)
        written.append(path)

    def table(name: str, header: list[str], rows: list[list]) -> None:
        path = os.path.join(out_dir, name)
        with open(path, "w", encoding="utf-8", newline="") as handle:
            writer = csv.writer(handle, lineterminator="\n")
            writer.writerow(header)
            writer.writerows(rows)
        written.append(path)

    tokens = [kind.value for kind in record.correlations.kinds]
    table(
        "correlations.csv",
        ["kind"] + tokens,
        [
            [tokens[i]] + ["" if cell is None else repr(cell) for cell in row]
            for i, row in enumerate(record.correlations.r)
        ],
    )
    table(
        "performance.csv",
        ["item", "pre", "post"],
        [
            [item, "" if pre is None else repr(pre), "" if post is None else repr(post)]
            for item, pre, post in record.performance.per_item
        ],
    )
    table(
        "performance_means.csv",
        ["pre_mean", "post_mean", "gain"],
        [[repr(record.performance.pre_mean), repr(record.performance.post_mean), repr(record.performance.gain)]],
    )
    table(
        "summaries.csv",
        ["activity_id", "kind", "mean", "min", "max", "sample_count", "duration_share"],
        [
            [
                row.activity_id,
                row.kind.value,
                "" if row.mean is None else repr(row.mean),
                "" if row.min is None else repr(row.min),
                "" if row.max is None else repr(row.max),
                row.sample_count,
                repr(row.duration_share),
            ]
            for row in record.summaries.rows
        ],
    )
    table(
        "activities.csv",
        ["activity_id", "t_start", "t_end"],
        [[iv.activity_id, iv.t_start, iv.t_end] for iv in record.merged_matrix.intervals],
    )
    for path in written:
        print(path)
    return EXIT_OK


def cmd_serve(args: argparse.Namespace) -> int:
    config = api.ApiConfig(
        bind_address=args.bind,
        store_root=args.store_root,
        cors_allowed_origin=args.cors_origin,
        max_points_cap=args.max_points_cap,
    )
    try:
        api.serve(config)
    except (api.BindFailure, api.StoreUnavailable) as exc:
        raise CommandError(str(exc), EXIT_IO) from None
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="m2lads", description="session analytics pipeline and service"
    )
    parser.add_argument("--store-root", default=None, help="session store directory (default: $M2LADS_STORE_ROOT)")
    sub = parser.add_subparsers(dest="command", required=True)

    p_ingest = sub.add_parser("ingest", help="run the pipeline on a manifest")
    p_ingest.add_argument("manifest")
    p_ingest.add_argument("--window-ms", type=int, default=None, help=f"trailing window width (default {timeline.DEFAULT_WINDOW_MS})")
    p_ingest.add_argument("--grid-ms", type=int, default=None, help=f"resampling grid step (default {timeline.DEFAULT_GRID_MS})")
    p_ingest.set_defaults(func=cmd_ingest)

    p_validate = sub.add_parser("validate", help="check a manifest and its files")
    p_validate.add_argument("manifest")
    p_validate.add_argument("--window-ms", type=int, default=None)
    p_validate.add_argument("--grid-ms", type=int, default=None)
    p_validate.set_defaults(func=cmd_validate)

    p_export = sub.add_parser("export", help="write a stored session to files")
    p_export.add_argument("session_id")
    p_export.add_argument("--format", choices=["csv", "json"], default="csv")
    p_export.add_argument("--out", default=".", help="output directory")
    p_export.set_defaults(func=cmd_export)

    p_serve = sub.add_parser("serve", help="run the REST service")
    p_serve.add_argument("--bind", default="127.0.0.1:8000")
    p_serve.add_argument("--cors-origin", default="*")
    p_serve.add_argument("--max-points-cap", type=int, default=5000)
    p_serve.set_defaults(func=cmd_serve)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CommandError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except (
        InvalidManifest,
        IngestError,
        ActivityError,
        AnalyticsError,
        TimelineError,
        StoreError,
        serialization.SerializationError,
        json.JSONDecodeError,
    ) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
