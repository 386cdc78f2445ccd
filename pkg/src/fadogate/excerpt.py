"""Selection of the 10-second analysis window from a full song.

Four strategies: the beginning, end, or middle of the track, or the window
centered on the loudest 50-ms frame (max RMS). Songs shorter than the
window are right-padded with zeros and flagged rather than rejected, so
batch runs can report them instead of aborting.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .audio_io import AudioBuffer, rms
from .errors import EmptyInputError, InputShorterThanFrameError

# 50 ms at 22050 Hz is 1102.5 samples; an even 1102 keeps frames integral.
FRAME_MS = 50.0


class ExcerptStrategy(enum.Enum):
    """Where the analysis window is taken from."""

    BEGINNING = "beginning"
    END = "end"
    MIDDLE = "middle"
    MAX_RMS = "max-rms"

    @classmethod
    def from_cli(cls, name: str) -> "ExcerptStrategy":
        for member in cls:
            if member.value == name:
                return member
        raise ValueError(f"unknown strategy {name!r}")


@dataclass
class Excerpt:
    """A fixed-length sample window plus its provenance.

    pre_norm_rms is the RMS of the window before any normalization; it
    becomes the dynamics component of the feature vector. padded marks
    windows drawn from songs shorter than the requested duration.
    """

    samples: np.ndarray
    start_sample: int
    strategy: ExcerptStrategy
    pre_norm_rms: float
    sample_rate: int
    padded: bool = field(default=False)


def default_frame(sample_rate: int):
    """(frame_len, hop) for 50-ms half-overlapping frames at this rate."""
    frame_len = int(FRAME_MS / 1000.0 * sample_rate)
    frame_len -= frame_len % 2
    return frame_len, frame_len // 2


def max_rms_center(buf: AudioBuffer, frame_len: int | None = None,
                   hop: int | None = None) -> int:
    """Center sample of the frame with the highest RMS.

    Frames default to 50 ms with half overlap. Ties go to the earliest
    frame so the result is deterministic.

    Raises:
        InputShorterThanFrameError: fewer samples than one frame.
    """
    if frame_len is None or hop is None:
        d_len, d_hop = default_frame(buf.sample_rate)
        frame_len = d_len if frame_len is None else frame_len
        hop = d_hop if hop is None else hop
    n = len(buf.samples)
    if n < frame_len:
        raise InputShorterThanFrameError(
            f"{n} samples, frame needs {frame_len}"
        )
    windows = np.lib.stride_tricks.sliding_window_view(
        buf.samples, frame_len)[::hop]
    energy = np.mean(np.square(windows), axis=1)
    best = int(np.argmax(energy))  # argmax returns the first maximum
    return best * hop + frame_len // 2


def select_excerpt(buf: AudioBuffer, strategy: ExcerptStrategy,
                   duration_s: float = 10.0) -> Excerpt:
    """Cut the analysis window out of a song by the given strategy.

    The window is always exactly duration_s * sample_rate samples long.
    For songs at least that long it is a contiguous slice of the source;
    shorter songs are zero-padded on the right and flagged.

    Raises:
        EmptyInputError: empty buffer or non-positive duration.
    """
    if duration_s <= 0:
        raise EmptyInputError("duration_s must be positive")
    n = len(buf.samples)
    if n == 0:
        raise EmptyInputError("cannot excerpt an empty buffer")

    excerpt_len = int(round(duration_s * buf.sample_rate))
    if n <= excerpt_len:
        samples = np.zeros(excerpt_len)
        samples[:n] = buf.samples
        return Excerpt(samples, 0, strategy, rms(samples),
                       buf.sample_rate, padded=n < excerpt_len)

    last_start = n - excerpt_len
    if strategy is ExcerptStrategy.BEGINNING:
        start = 0
    elif strategy is ExcerptStrategy.END:
        start = last_start
    elif strategy is ExcerptStrategy.MIDDLE:
        start = last_start // 2
    elif strategy is ExcerptStrategy.MAX_RMS:
        center = max_rms_center(buf)
        start = min(max(center - excerpt_len // 2, 0), last_start)
    else:  # pragma: no cover - enum is closed
        raise ValueError(f"unhandled strategy {strategy}")

    samples = buf.samples[start:start + excerpt_len].copy()
    return Excerpt(samples, start, strategy, rms(samples), buf.sample_rate)
