#!/usr/bin/env python3
"""Print a text report for a stored session: activity timeline, strongest
signal correlations, and pre/post performance.

    python scripts/session_report.py --store-root demo_store ls-demo-001
"""

import argparse
import sys

from m2lads.store import NotFound, SessionStore


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("session_id")
    parser.add_argument("--store-root", default=None, help="defaults to $M2LADS_STORE_ROOT")
    parser.add_argument("--top", type=int, default=8, help="correlation pairs to show")
    args = parser.parse_args()

    store = SessionStore(args.store_root)
    try:
        record = store.get_session(args.session_id)
    except NotFound:
        print(f"no session {args.session_id!r} in {store.root}", file=sys.stderr)
        return 1

    window = record.window
    print(f"session {record.session_id}  learner {record.learner.learner_id}")
    print(f"window  {window.start}..{window.end}  ({window.length_ms / 60000:.1f} min)")

    print("\nactivities:")
    for iv in record.merged_matrix.intervals:
        offset = (iv.t_start - window.start) / 1000
        length = (iv.t_end - iv.t_start) / 1000
        print(f"  {offset:8.1f}s  {length:7.1f}s  {iv.activity_id}")

    pairs = []
    kinds = record.correlations.kinds
    for i in range(len(kinds)):
        for j in range(i + 1, len(kinds)):
            r = record.correlations.r[i][j]
            if r is not None:
                pairs.append((abs(r), r, kinds[i].value, kinds[j].value))
    pairs.sort(reverse=True)
    print(f"\nstrongest correlations (of {len(pairs)} defined pairs):")
    for _, r, a, b in pairs[: args.top]:
        print(f"  {r:+.3f}  {a} ~ {b}")

    perf = record.performance
    print(f"\nperformance: pre {perf.pre_mean:.2f}  post {perf.post_mean:.2f}  gain {perf.gain:+.2f}")
    fmt = lambda v: "-" if v is None else f"{v:.2f}"
    for item, pre, post in perf.per_item:
        print(f"  {item:12s} pre {fmt(pre):>5s}  post {fmt(post):>5s}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
