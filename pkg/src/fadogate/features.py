"""The 32-dimensional song descriptor.

Layout, frozen for all serialized vectors:

    [0]      RMS of the excerpt before normalization (dynamics)
    [1..9]   rhythmic descriptor of the 20-100 Hz band
    [10..18] rhythmic descriptor of the 8000-11025 Hz band
    [19..31] mean MFCCs 1..13 over the excerpt's frames (timbre)

Everything after component [0] is computed on the RMS-normalized excerpt,
so a pure gain change moves only component [0].
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.fft

from . import dsp
from .audio_io import DEFAULT_TARGET_RMS, AudioBuffer, normalize_rms
from .excerpt import Excerpt, default_frame

N_FEATURES = 32
N_MFCC = 13
LOW_BAND = (20.0, 100.0)
HIGH_BAND = (8000.0, 11025.0)

# Peak admission threshold, as a fraction of the envelope maximum. Reuses
# the descriptor's own 0.15 level so noise-floor wiggles don't count.
PEAK_ADMISSION = 0.15


@dataclass
class FeatureConfig:
    """Extraction parameters; defaults match the canonical 22050 Hz setup."""

    fft_size: int = dsp.DEFAULT_FFT_SIZE
    n_mels: int = dsp.DEFAULT_N_MELS
    n_mfcc: int = N_MFCC
    low_band: tuple = LOW_BAND
    high_band: tuple = HIGH_BAND
    target_rms: float = DEFAULT_TARGET_RMS
    frame_len: int | None = None  # None: 50 ms at the excerpt's rate
    hop: int | None = None        # None: half the frame

    def frame(self, sample_rate: int):
        d_len, d_hop = default_frame(sample_rate)
        frame_len = self.frame_len if self.frame_len is not None else d_len
        hop = self.hop if self.hop is not None else frame_len // 2
        return frame_len, hop


@dataclass
class BandEnvelope:
    """Per-frame mean magnitude of one frequency band."""

    values: np.ndarray
    frame_hop_s: float


@dataclass
class RhythmicDescriptor:
    """Nine statistics of a band envelope.

    count_80/count_15 count envelope values above fractions of the
    envelope maximum; count_max/count_min count individual spectrogram
    entries outside the envelope's range. Peak distances are in frames
    and fall back to 0 when fewer than two peaks exist.
    """

    maxamp: float
    minamp: float
    count_80: int
    count_15: int
    count_max: int
    count_min: int
    mean_peak_dist: float
    std_peak_dist: float
    max_peak_dist: float

    def as_values(self) -> list:
        return [
            self.maxamp, self.minamp,
            float(self.count_80), float(self.count_15),
            float(self.count_max), float(self.count_min),
            self.mean_peak_dist, self.std_peak_dist, self.max_peak_dist,
        ]


@dataclass
class FeatureVector:
    """The 32 descriptor values in the frozen order above."""

    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.values.shape != (N_FEATURES,):
            raise ValueError(
                f"expected {N_FEATURES} values, got {self.values.shape}"
            )
        if not np.all(np.isfinite(self.values)):
            raise ValueError("feature vector contains non-finite values")

    @property
    def pre_norm_rms(self) -> float:
        return float(self.values[0])

    @property
    def low_band(self) -> np.ndarray:
        return self.values[1:10]

    @property
    def high_band(self) -> np.ndarray:
        return self.values[10:19]

    @property
    def mfcc(self) -> np.ndarray:
        return self.values[19:32]


def band_envelope(spec: dsp.Spectrogram) -> BandEnvelope:
    """Mean magnitude over the band's bins, one value per frame."""
    if spec.magnitudes.size == 0:
        raise ValueError("empty spectrogram")
    return BandEnvelope(spec.magnitudes.mean(axis=1), spec.frame_hop_s)


def detect_peaks(env: BandEnvelope) -> np.ndarray:
    """Frame indices of strict interior local maxima of the envelope.

    A frame counts as a peak when it exceeds both neighbours and reaches
    at least PEAK_ADMISSION times the envelope maximum.
    """
    v = env.values
    if len(v) < 3:
        return np.zeros(0, dtype=int)
    threshold = PEAK_ADMISSION * float(v.max())
    interior = v[1:-1]
    mask = (interior > v[:-2]) & (interior > v[2:]) & (interior >= threshold)
    return np.nonzero(mask)[0] + 1


def rhythmic_descriptor(spec: dsp.Spectrogram,
                        env: BandEnvelope) -> RhythmicDescriptor:
    """Table of envelope extrema, threshold counts, and peak spacing."""
    v = env.values
    maxamp = float(v.max())
    minamp = float(v.min())
    peaks = detect_peaks(env)
    if len(peaks) >= 2:
        dist = np.diff(peaks).astype(np.float64)
        mean_d, std_d, max_d = float(dist.mean()), float(dist.std()), float(dist.max())
    else:
        mean_d = std_d = max_d = 0.0
    return RhythmicDescriptor(
        maxamp=maxamp,
        minamp=minamp,
        count_80=int(np.sum(v > 0.8 * maxamp)),
        count_15=int(np.sum(v > 0.15 * maxamp)),
        count_max=int(np.sum(spec.magnitudes > maxamp)),
        count_min=int(np.sum(spec.magnitudes < minamp)),
        mean_peak_dist=mean_d,
        std_peak_dist=std_d,
        max_peak_dist=max_d,
    )


def mfcc_frames(spec: dsp.Spectrogram, filterbank: np.ndarray,
                n_coeffs: int = N_MFCC) -> np.ndarray:
    """MFCCs 1..n_coeffs per frame, one row per frame.

    Each frame: mel-filtered squared magnitudes -> floored log -> DCT-II
    (orthonormal). Coefficient 0 is dropped; overall level is carried by
    the separate dynamics component.
    """
    energies = np.square(spec.magnitudes) @ filterbank.T
    log_energies = np.log(np.maximum(energies, dsp.LOG_FLOOR))
    coeffs = scipy.fft.dct(log_energies, type=2, norm="ortho", axis=1)
    return coeffs[:, 1:1 + n_coeffs]


def mean_mfcc(spec: dsp.Spectrogram, filterbank: np.ndarray,
              n_coeffs: int = N_MFCC) -> np.ndarray:
    """Per-coefficient mean of MFCCs 1..n_coeffs over all frames."""
    return mfcc_frames(spec, filterbank, n_coeffs).mean(axis=0)


def extract_feature_vector(excerpt: Excerpt,
                           config: FeatureConfig | None = None) -> FeatureVector:
    """Compute the full 32-dimensional descriptor of one excerpt."""
    cfg = config if config is not None else FeatureConfig()
    sr = excerpt.sample_rate
    normalized, _ = normalize_rms(AudioBuffer(excerpt.samples, sr),
                                  cfg.target_rms)

    frame_len, hop = cfg.frame(sr)
    spec = dsp.spectrogram(normalized.samples, frame_len, hop,
                           cfg.fft_size, sr)

    parts = [np.array([excerpt.pre_norm_rms])]
    for f_lo, f_hi in (cfg.low_band, cfg.high_band):
        band = dsp.band_slice(spec, f_lo, min(f_hi, sr / 2))
        desc = rhythmic_descriptor(band, band_envelope(band))
        parts.append(np.array(desc.as_values()))

    bank = dsp.mel_filterbank(cfg.n_mels, cfg.fft_size, sr, 0.0, sr / 2.0)
    parts.append(mean_mfcc(spec, bank, cfg.n_mfcc))
    return FeatureVector(np.concatenate(parts))
