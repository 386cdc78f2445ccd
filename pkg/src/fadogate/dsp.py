"""Framing, magnitude spectra, mel filterbank, and DCT.

Shared numerical substrate for the rhythmic and timbral features. All
functions are pure; frames can be transformed in parallel as long as the
results keep their frame order.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.fft

from .errors import (
    BadFftSizeError,
    DegenerateFilterError,
    EmptyBandError,
    InputShorterThanFrameError,
)

DEFAULT_FFT_SIZE = 2048  # ~10.77 Hz/bin at 22050 Hz; the 20-100 Hz band gets 8 bins
DEFAULT_N_MELS = 40
LOG_FLOOR = 1e-10  # keeps log energies finite on silent filters


@dataclass
class FrameSequence:
    """Overlapping signal frames, one per row."""

    frames: np.ndarray
    frame_len: int
    hop: int
    sample_rate: int


@dataclass
class Spectrogram:
    """Per-frame magnitude spectra (rows = time, columns = frequency)."""

    magnitudes: np.ndarray
    bin_hz: float
    sample_rate: int
    hop: int

    @property
    def n_frames(self) -> int:
        return self.magnitudes.shape[0]

    @property
    def frame_hop_s(self) -> float:
        return self.hop / self.sample_rate


def frame_signal(samples, frame_len: int, hop: int,
                 sample_rate: int = 0) -> FrameSequence:
    """Slice a signal into frames of frame_len samples every hop samples.

    Frame i covers samples[i*hop : i*hop + frame_len]; a trailing partial
    frame is discarded.

    Raises:
        InputShorterThanFrameError: fewer samples than one frame.
    """
    x = np.asarray(samples, dtype=np.float64)
    if hop < 1:
        raise ValueError("hop must be >= 1")
    if len(x) < frame_len:
        raise InputShorterThanFrameError(
            f"{len(x)} samples, frame needs {frame_len}"
        )
    frames = np.lib.stride_tricks.sliding_window_view(x, frame_len)[::hop]
    return FrameSequence(np.ascontiguousarray(frames), frame_len, hop,
                         sample_rate)


def hann_window(n: int) -> np.ndarray:
    """Symmetric Hann window, w[i] = 0.5 * (1 - cos(2*pi*i/(n-1)))."""
    if n == 1:
        return np.ones(1)
    i = np.arange(n, dtype=np.float64)
    return 0.5 * (1.0 - np.cos(2.0 * np.pi * i / (n - 1)))


def _check_fft_size(fft_size: int, frame_len: int) -> None:
    if fft_size < 1 or (fft_size & (fft_size - 1)) != 0:
        raise BadFftSizeError(f"fft_size {fft_size} is not a power of two")
    if fft_size < frame_len:
        raise BadFftSizeError(
            f"fft_size {fft_size} smaller than frame length {frame_len}"
        )


def magnitude_spectrum(frame, fft_size: int) -> np.ndarray:
    """|DFT| of a Hann-windowed, zero-padded frame, bins 0..fft_size/2.

    Raises:
        BadFftSizeError: size is not a power of two or is below the frame
            length.
    """
    x = np.asarray(frame, dtype=np.float64)
    _check_fft_size(fft_size, len(x))
    windowed = x * hann_window(len(x))
    return np.abs(np.fft.rfft(windowed, n=fft_size))


def spectrogram(samples, frame_len: int, hop: int, fft_size: int,
                sample_rate: int) -> Spectrogram:
    """Magnitude spectrogram of half-overlapping Hann-windowed frames."""
    seq = frame_signal(samples, frame_len, hop, sample_rate)
    _check_fft_size(fft_size, frame_len)
    windowed = seq.frames * hann_window(frame_len)
    mags = np.abs(np.fft.rfft(windowed, n=fft_size, axis=1))
    return Spectrogram(mags, sample_rate / fft_size, sample_rate, hop)


def band_slice(spec: Spectrogram, f_lo: float, f_hi: float) -> Spectrogram:
    """Restrict a spectrogram to bins with f_lo <= bin_center < f_hi.

    The half-open interval keeps a bin out of two adjacent bands and keeps
    the Nyquist bin out of a band ending exactly there.

    Raises:
        EmptyBandError: no bin center falls inside the band.
    """
    if not (0 <= f_lo < f_hi <= spec.sample_rate / 2):
        raise ValueError(
            f"band [{f_lo}, {f_hi}) outside [0, {spec.sample_rate / 2}]"
        )
    centers = np.arange(spec.magnitudes.shape[1]) * spec.bin_hz
    keep = (centers >= f_lo) & (centers < f_hi)
    if not np.any(keep):
        raise EmptyBandError(f"no bin centers in [{f_lo}, {f_hi}) Hz")
    return Spectrogram(spec.magnitudes[:, keep], spec.bin_hz,
                       spec.sample_rate, spec.hop)


def hz_to_mel(f):
    return 2595.0 * np.log10(1.0 + np.asarray(f, dtype=np.float64) / 700.0)


def mel_to_hz(m):
    return 700.0 * (np.power(10.0, np.asarray(m, dtype=np.float64) / 2595.0) - 1.0)


def mel_filterbank(n_filters: int, fft_size: int, sample_rate: int,
                   f_min: float = 0.0, f_max: float | None = None) -> np.ndarray:
    """Triangular mel filters evaluated at the FFT bin centers.

    Centers are equally spaced on the mel scale between f_min and f_max;
    each triangle peaks at 1 and falls to 0 at its neighbours' centers.
    Returns an (n_filters, fft_size/2 + 1) weight matrix.

    Raises:
        DegenerateFilterError: adjacent centers land on the same FFT bin,
            i.e. the filterbank is too dense for this FFT size.
    """
    if f_max is None:
        f_max = sample_rate / 2.0
    if n_filters < 1:
        raise ValueError("n_filters must be >= 1")
    if not (0 <= f_min < f_max <= sample_rate / 2.0):
        raise ValueError(f"bad filter range [{f_min}, {f_max}]")

    mel_points = np.linspace(hz_to_mel(f_min), hz_to_mel(f_max), n_filters + 2)
    hz_points = mel_to_hz(mel_points)
    bin_hz = sample_rate / fft_size
    if np.any(np.diff(np.round(hz_points / bin_hz)) < 1):
        raise DegenerateFilterError(
            f"{n_filters} filters collapse at fft_size {fft_size}"
        )

    bin_freqs = np.arange(fft_size // 2 + 1) * bin_hz
    bank = np.zeros((n_filters, fft_size // 2 + 1))
    for i in range(n_filters):
        lo, center, hi = hz_points[i], hz_points[i + 1], hz_points[i + 2]
        rising = (bin_freqs - lo) / (center - lo)
        falling = (hi - bin_freqs) / (hi - center)
        bank[i] = np.maximum(0.0, np.minimum(rising, falling))
    return bank


def filter_centers_hz(n_filters: int, f_min: float, f_max: float) -> np.ndarray:
    """Center frequencies of the mel filterbank, in Hz."""
    mel_points = np.linspace(hz_to_mel(f_min), hz_to_mel(f_max), n_filters + 2)
    return mel_to_hz(mel_points[1:-1])


def dct_ii(v, n_out: int) -> np.ndarray:
    """First n_out coefficients of the orthonormal DCT-II of v."""
    x = np.asarray(v, dtype=np.float64)
    if n_out > len(x):
        raise ValueError(f"n_out {n_out} exceeds input length {len(x)}")
    return scipy.fft.dct(x, type=2, norm="ortho")[:n_out]
