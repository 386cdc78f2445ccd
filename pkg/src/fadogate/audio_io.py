"""WAV decoding, mono mixdown, downsampling, and RMS normalization.

All analysis downstream runs on mono float buffers at 22050 Hz; this module
gets arbitrary 16-bit PCM WAV files into that shape. Only integer PCM at
16 bits is accepted so the decoder stays small and exactly testable.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass

import numpy as np

from .errors import (
    EmptyInputError,
    NonPositiveParameterError,
    NotWavError,
    SilentInputError,
    TruncatedDataError,
    UnsupportedEncodingError,
    UpsampleRequestedError,
)

CANONICAL_RATE = 22050

# Buffers quieter than this RMS are rejected rather than scaled by huge gains.
SILENCE_RMS_EPSILON = 1e-6

# Default normalization level, about -20 dBFS. Any fixed target works the
# same downstream because the loudness information is carried separately
# by the pre-normalization RMS.
DEFAULT_TARGET_RMS = 0.1

_RESAMPLE_TAPS = 64
_KAISER_BETA = 8.6


@dataclass
class AudioBuffer:
    """Mono PCM samples in [-1, 1] plus their sample rate in Hz."""

    samples: np.ndarray
    sample_rate: int

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=np.float64)
        if self.samples.ndim != 1:
            raise ValueError("AudioBuffer expects a 1-D sample array")
        if self.sample_rate <= 0:
            raise ValueError("sample_rate must be positive")

    def __len__(self):
        return len(self.samples)

    @property
    def duration_s(self) -> float:
        return len(self.samples) / self.sample_rate


def decode_wav(path) -> AudioBuffer:
    """Decode a RIFF/WAVE file into a mono AudioBuffer.

    Accepts 16-bit integer PCM with 1 or 2 channels at any sample rate.
    Stereo is mixed down by averaging the two channels per frame; samples
    are scaled by 1/32768 so they lie in [-1, 1).

    Raises:
        NotWavError: bad RIFF/WAVE magic, or fmt/data chunks missing/broken.
        UnsupportedEncodingError: non-PCM encoding, bit depth != 16, or
            more than 2 channels.
        TruncatedDataError: data chunk shorter than its declared size.
    """
    with open(path, "rb") as fh:
        raw = fh.read()

    if len(raw) < 12 or raw[0:4] != b"RIFF" or raw[8:12] != b"WAVE":
        raise NotWavError(f"{path}: not a RIFF/WAVE file")

    fmt = None
    data = None
    pos = 12
    while pos + 8 <= len(raw):
        chunk_id = raw[pos:pos + 4]
        (chunk_size,) = struct.unpack_from("<I", raw, pos + 4)
        body = raw[pos + 8:pos + 8 + chunk_size]
        if chunk_id == b"fmt ":
            if chunk_size < 16 or len(body) < 16:
                raise NotWavError(f"{path}: fmt chunk too small")
            fmt = struct.unpack_from("<HHIIHH", body, 0)
        elif chunk_id == b"data":
            if len(body) < chunk_size:
                raise TruncatedDataError(
                    f"{path}: data chunk declares {chunk_size} bytes, "
                    f"file holds {len(body)}"
                )
            data = body
        # chunks are word-aligned; odd sizes carry a pad byte
        pos += 8 + chunk_size + (chunk_size & 1)

    if fmt is None:
        raise NotWavError(f"{path}: missing fmt chunk")
    if data is None:
        raise NotWavError(f"{path}: missing data chunk")

    audio_format, channels, sample_rate, _, _, bits = fmt
    if audio_format != 1:
        raise UnsupportedEncodingError(
            f"{path}: audio format {audio_format}, only PCM (1) supported"
        )
    if bits != 16:
        raise UnsupportedEncodingError(
            f"{path}: {bits}-bit samples, only 16-bit supported"
        )
    if channels not in (1, 2):
        raise UnsupportedEncodingError(
            f"{path}: {channels} channels, only mono/stereo supported"
        )
    if sample_rate <= 0:
        raise NotWavError(f"{path}: non-positive sample rate in header")

    frame_bytes = 2 * channels
    usable = len(data) - (len(data) % frame_bytes)
    pcm = np.frombuffer(data[:usable], dtype="<i2").astype(np.float64)
    if channels == 2:
        pcm = pcm.reshape(-1, 2).mean(axis=1)
    return AudioBuffer(pcm / 32768.0, sample_rate)


def write_wav_pcm16(path, samples, sample_rate: int) -> None:
    """Write mono float samples as a 16-bit PCM WAV file.

    Values are scaled by 32768, rounded, and clipped to the int16 range,
    so decode_wav(write_wav_pcm16(x)) recovers x within one quantization
    step. Output bytes are a pure function of the inputs.
    """
    x = np.asarray(samples, dtype=np.float64)
    q = np.clip(np.rint(x * 32768.0), -32768, 32767).astype("<i2")
    payload = q.tobytes()
    header = struct.pack(
        "<4sI4s4sIHHIIHH4sI",
        b"RIFF", 36 + len(payload), b"WAVE",
        b"fmt ", 16, 1, 1, sample_rate, sample_rate * 2, 2, 16,
        b"data", len(payload),
    )
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(payload)


def _kaiser_taps(l_up: int, m_down: int) -> np.ndarray:
    """Polyphase windowed-sinc bank: one row of taps per output phase.

    Cutoff sits at the new Nyquist. Each phase is normalized to unit DC
    gain so constant signals pass through exactly.
    """
    half = _RESAMPLE_TAPS // 2
    cutoff = l_up / m_down
    j = np.arange(_RESAMPLE_TAPS, dtype=np.float64)
    phases = np.empty((l_up, _RESAMPLE_TAPS))
    for r in range(l_up):
        t = j - (half - 1) - r / l_up
        u = t / half
        window = np.where(
            np.abs(u) <= 1.0,
            np.i0(_KAISER_BETA * np.sqrt(np.maximum(0.0, 1.0 - u * u))),
            0.0,
        ) / np.i0(_KAISER_BETA)
        taps = cutoff * np.sinc(cutoff * t) * window
        phases[r] = taps / taps.sum()
    return phases


def resample(buf: AudioBuffer, target_rate: int) -> AudioBuffer:
    """Downsample to target_rate with a 64-tap Kaiser windowed sinc.

    Returns the input unchanged when the rates already match. The output
    length is round(len * target_rate / source_rate); the signal is treated
    as zero outside its bounds.

    Raises:
        UpsampleRequestedError: source rate below the target.
    """
    if target_rate <= 0:
        raise NonPositiveParameterError("target_rate must be positive")
    if buf.sample_rate == target_rate:
        return buf
    if buf.sample_rate < target_rate:
        raise UpsampleRequestedError(
            f"source {buf.sample_rate} Hz below target {target_rate} Hz"
        )

    n_in = len(buf.samples)
    source_rate = buf.sample_rate
    out_len = (2 * n_in * target_rate + source_rate) // (2 * source_rate)
    if out_len == 0:
        return AudioBuffer(np.zeros(0), target_rate)

    g = math.gcd(source_rate, target_rate)
    l_up = target_rate // g
    m_down = source_rate // g
    phases = _kaiser_taps(l_up, m_down)

    half = _RESAMPLE_TAPS // 2
    xp = np.pad(buf.samples, (half, half + 1))
    y = np.zeros(out_len)
    m_inv = pow(m_down, -1, l_up) if l_up > 1 else 0
    for r in range(l_up):
        n0 = (m_inv * r) % l_up
        if n0 >= out_len:
            continue
        count = (out_len - n0 + l_up - 1) // l_up
        base0 = (n0 * m_down) // l_up
        acc = np.zeros(count)
        for j in range(_RESAMPLE_TAPS):
            start = base0 + 1 + j
            acc += phases[r, j] * xp[start::m_down][:count]
        y[n0::l_up] = acc
    return AudioBuffer(y, target_rate)


def rms(samples) -> float:
    """Root mean square of a non-empty sample sequence."""
    x = np.asarray(samples, dtype=np.float64)
    if x.size == 0:
        raise EmptyInputError("rms of an empty sequence")
    return float(np.sqrt(np.mean(np.square(x))))


def normalize_rms(buf: AudioBuffer, target_rms: float = DEFAULT_TARGET_RMS):
    """Scale a buffer to the target RMS level.

    Returns (scaled buffer, original RMS). The original RMS is what the
    feature vector later carries as its dynamics component.

    Raises:
        SilentInputError: buffer RMS below the silence floor.
    """
    original = rms(buf.samples)
    if original < SILENCE_RMS_EPSILON:
        raise SilentInputError(
            f"rms {original:.3g} below silence floor {SILENCE_RMS_EPSILON:g}"
        )
    scaled = buf.samples * (target_rms / original)
    return AudioBuffer(scaled, buf.sample_rate), original
