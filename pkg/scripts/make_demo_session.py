#!/usr/bin/env python3
"""Generate a synthetic 30-minute session, run it through the pipeline,
and drop the result into a session store.

    python scripts/make_demo_session.py --out demo_inputs --store-root demo_store

Afterwards `m2lads --store-root demo_store serve` exposes it to the
dashboard, and scripts/session_report.py prints a text summary.
"""

import argparse
import sys
import time

from m2lads import pipeline, synthetic
from m2lads.store import SessionStore


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out", default="demo_inputs", help="directory for the generated input files")
    parser.add_argument("--store-root", default="demo_store", help="session store to ingest into")
    parser.add_argument("--seed", type=int, default=7)
    args = parser.parse_args()

    from pathlib import Path

    manifest_path = synthetic.write_fixture(Path(args.out), seed=args.seed)
    print(f"inputs written under {args.out}/ (manifest: {manifest_path})")

    manifest = pipeline.IngestManifest.from_file(manifest_path)
    started = time.perf_counter()
    record = pipeline.build_record(manifest)
    elapsed = time.perf_counter() - started

    store = SessionStore(args.store_root)
    if store.has_session(record.session_id):
        print(f"store already has {record.session_id}; leaving it untouched", file=sys.stderr)
        return 1
    store.put_session(record)
    for name in sorted(manifest.media_paths):
        store.attach_media(record.session_id, name, manifest.media_paths[name])

    total_rows = sum(len(lm.rows) for lm in record.learner_matrices.values())
    print(f"ingested {record.session_id} in {elapsed:.2f} s")
    print(f"  window   {record.window.start}..{record.window.end} ({record.window.length_ms / 60000:.1f} min)")
    print(f"  matrices {len(record.learner_matrices)} kinds, {total_rows} rows total")
    print(f"  activities {len(record.merged_matrix.intervals)}")
    print(f"  gain     {record.performance.gain:+.2f}")
    print(f"serve it:  m2lads --store-root {args.store_root} serve")
    return 0


if __name__ == "__main__":
    sys.exit(main())
