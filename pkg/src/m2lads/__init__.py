"""Multimodal learning-session analytics.

Ingests one recorded session (MOOC tracking log, activity log, pretest,
biometric signal exports), synchronizes the streams onto a common time
window, derives per-signal learner matrices with trailing-window means
and activity labels, computes correlation/performance/summary analytics,
persists everything to a file store, and serves it over REST.
"""

from .pipeline import IngestManifest, build_record
from .store import SessionStore
from .types import (
    ActivityInterval,
    ActivityMatrix,
    LearnerMatrix,
    SessionRecord,
    SessionWindow,
    SignalKind,
)

__all__ = [
    "ActivityInterval",
    "ActivityMatrix",
    "IngestManifest",
    "LearnerMatrix",
    "SessionRecord",
    "SessionStore",
    "SessionWindow",
    "SignalKind",
    "build_record",
]

__version__ = "0.1.0"
