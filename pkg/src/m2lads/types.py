"""Shared domain types for the session-analytics pipeline.

All timestamps are integer milliseconds since the Unix epoch, UTC
(``TimestampMs``).  Every container here is a plain dataclass; invariants
(sortedness, finiteness, window containment) are enforced by the operations
that construct them, not by the constructors.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

TimestampMs = int


class EEGBand(Enum):
    DELTA = "delta"
    THETA = "theta"
    ALPHA = "alpha"
    BETA = "beta"
    GAMMA = "gamma"


class SignalKind(Enum):
    """One biometric variable.

    Declaration order is the canonical ordering used by correlation
    matrices and API payloads.  ``value`` is the stable URL/config token.
    """

    ATTENTION = "attention"
    MEDITATION = "meditation"
    HEART_RATE = "heart_rate"
    PUPIL_LEFT = "pupil_left"
    PUPIL_RIGHT = "pupil_right"
    EEG_DELTA = "eeg_delta"
    EEG_THETA = "eeg_theta"
    EEG_ALPHA = "eeg_alpha"
    EEG_BETA = "eeg_beta"
    EEG_GAMMA = "eeg_gamma"

    @property
    def unit(self) -> str:
        return _UNITS[self]

    @property
    def band(self) -> EEGBand | None:
        """The EEG band this kind carries, or None for non-EEG signals."""
        return _BANDS.get(self)

    @classmethod
    def from_token(cls, token: str) -> SignalKind:
        """Look up a kind by its snake_case token; raises KeyError."""
        try:
            return cls(token)
        except ValueError:
            raise KeyError(token) from None

    @classmethod
    def for_band(cls, band: EEGBand) -> SignalKind:
        return _KIND_FOR_BAND[band]


_UNITS = {
    SignalKind.ATTENTION: "score (0-100)",
    SignalKind.MEDITATION: "score (0-100)",
    SignalKind.HEART_RATE: "bpm",
    SignalKind.PUPIL_LEFT: "mm",
    SignalKind.PUPIL_RIGHT: "mm",
    SignalKind.EEG_DELTA: "band power (a.u.)",
    SignalKind.EEG_THETA: "band power (a.u.)",
    SignalKind.EEG_ALPHA: "band power (a.u.)",
    SignalKind.EEG_BETA: "band power (a.u.)",
    SignalKind.EEG_GAMMA: "band power (a.u.)",
}

_BANDS = {
    SignalKind.EEG_DELTA: EEGBand.DELTA,
    SignalKind.EEG_THETA: EEGBand.THETA,
    SignalKind.EEG_ALPHA: EEGBand.ALPHA,
    SignalKind.EEG_BETA: EEGBand.BETA,
    SignalKind.EEG_GAMMA: EEGBand.GAMMA,
}

_KIND_FOR_BAND = {band: kind for kind, band in _BANDS.items()}


class Marker(Enum):
    START = "start"
    END = "end"


class MatrixSource(Enum):
    LOGGE = "logge"
    MOOC = "mooc"
    MERGED = "merged"


@dataclass
class EdxEvent:
    """One MOOC tracking-log event.

    ``payload`` keeps the raw event body (and any unrecognized top-level
    fields) as strings, so graded events retain grade/max_grade.
    """

    username: str
    event_type: str
    time: TimestampMs
    resource_id: str | None
    payload: dict[str, str] = field(default_factory=dict)


@dataclass
class LoggeEvent:
    time: TimestampMs
    activity_id: str
    marker: Marker


@dataclass
class SignalSeries:
    """Samples of one variable, strictly increasing in time, finite values."""

    kind: SignalKind
    samples: list[tuple[TimestampMs, float]]

    def timestamps(self) -> list[TimestampMs]:
        return [t for t, _ in self.samples]

    def values(self) -> list[float]:
        return [v for _, v in self.samples]


@dataclass
class BlinkEvents:
    times: list[TimestampMs]


@dataclass
class PretestMatrix:
    """Two columns: item id and score in [0, 1]."""

    rows: list[tuple[str, float]]


@dataclass
class PosttestMatrix:
    rows: list[tuple[str, float]]


@dataclass
class VideoFrameIndex:
    """Per-video mapping of frame number to capture timestamp."""

    video_id: str
    rows: list[tuple[int, TimestampMs]]


@dataclass
class LearnerProfile:
    learner_id: str
    attributes: dict[str, str] = field(default_factory=dict)


@dataclass
class SessionWindow:
    """Common time span of all synchronized streams; start < end."""

    start: TimestampMs
    end: TimestampMs

    @property
    def length_ms(self) -> int:
        return self.end - self.start


@dataclass
class WindowedSeries:
    """Rows of (timestamp, value, trailing-window mean)."""

    kind: SignalKind
    rows: list[tuple[TimestampMs, float, float]]


@dataclass
class ResampledSeries:
    """Values on a regular grid; None marks points before the first sample."""

    kind: SignalKind
    grid_step_ms: int
    points: list[tuple[TimestampMs, float | None]]


@dataclass
class ActivityInterval:
    activity_id: str
    t_start: TimestampMs
    t_end: TimestampMs


@dataclass
class ActivityMatrix:
    """Activity intervals from one source, sorted by (t_start, activity_id)."""

    source: MatrixSource
    intervals: list[ActivityInterval]


@dataclass
class LearnerMatrix:
    """Four columns per row: timestamp, value, window mean, activity id."""

    kind: SignalKind
    rows: list[tuple[TimestampMs, float, float, str]]


@dataclass
class CorrelationMatrix:
    """Pairwise Pearson coefficients; None marks undefined cells."""

    kinds: list[SignalKind]
    r: list[list[float | None]]


@dataclass
class PerformanceReport:
    """Pre/post comparison; per_item rows are (item, pre, post) with None
    for the side the item is missing from."""

    per_item: list[tuple[str, float | None, float | None]]
    pre_mean: float
    post_mean: float
    gain: float


@dataclass
class ActivitySummaryRow:
    activity_id: str
    kind: SignalKind
    mean: float | None
    min: float | None
    max: float | None
    sample_count: int
    duration_share: float


@dataclass
class ActivitySummary:
    rows: list[ActivitySummaryRow]


@dataclass
class MediaRef:
    session_id: str
    name: str
    relative_path: str
    byte_size: int


@dataclass
class SessionRecord:
    """Everything the pipeline produces for one learning session."""

    session_id: str
    learner: LearnerProfile
    window: SessionWindow
    merged_matrix: ActivityMatrix
    learner_matrices: dict[SignalKind, LearnerMatrix]
    blinks: BlinkEvents
    pretest: PretestMatrix
    posttest: PosttestMatrix
    performance: PerformanceReport
    correlations: CorrelationMatrix
    summaries: ActivitySummary
    frame_indexes: list[VideoFrameIndex]
    created_at: TimestampMs
