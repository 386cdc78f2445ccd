"""Synthetic two-class test corpus.

Stands in for a real song collection when none is at hand. The recipes
push the two classes apart exactly where the features look:

fado-like   harmonic voices with fundamentals between 200 and 800 Hz,
            short plucked bursts whose partials sit above 8 kHz, a slow
            amplitude sway, and nothing below 100 Hz.
other       a strong 40-90 Hz bass line, kick-like low thumps on every
            beat, and a four-on-the-floor amplitude pulse, so the low
            band carries periodic energy at the beat period.

All randomness (pitches, tempi, phases, levels) comes from a generator
seeded per clip, so a given SynthSpec always produces byte-identical files.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .audio_io import write_wav_pcm16
from .datafiles import FADO_LABEL, OTHER_LABEL, ManifestEntry, write_manifest

MANIFEST_NAME = "manifest.csv"


@dataclass
class SynthSpec:
    n_per_class: int
    seed: int
    duration_s: float = 12.0
    sample_rate: int = 22050

    def __post_init__(self):
        if self.n_per_class < 1:
            raise ValueError("n_per_class must be >= 1")


def _clip_rng(spec: SynthSpec, class_code: int, index: int):
    return np.random.default_rng([spec.seed, class_code, index])


def fado_clip(rng, duration_s: float, sample_rate: int) -> np.ndarray:
    n = int(round(duration_s * sample_rate))
    t = np.arange(n) / sample_rate
    x = np.zeros(n)

    for _ in range(int(rng.integers(3, 6))):
        f0 = rng.uniform(250.0, 800.0)
        for k in range(1, 6):
            amp = rng.uniform(0.6, 1.0) / k**1.5
            x += amp * np.sin(2 * np.pi * k * f0 * t + rng.uniform(0, 2 * np.pi))
    x *= 1.0 + 0.25 * np.sin(2 * np.pi * rng.uniform(0.1, 0.4) * t
                             + rng.uniform(0, 2 * np.pi))

    # plucked-string bursts: bright partials, soft attack so the onset does
    # not splatter energy across the whole spectrum, fast exponential decay
    bed_scale = np.max(np.abs(x))
    pos = rng.uniform(0.05, 0.3)
    while pos < duration_s - 0.05:
        i0 = int(pos * sample_rate)
        seg = min(int(0.35 * sample_rate), n - i0)
        tt = np.arange(seg) / sample_rate
        burst = np.zeros(seg)
        for _ in range(int(rng.integers(2, 5))):
            f = rng.uniform(8200.0, 10800.0)
            burst += rng.uniform(0.5, 1.0) * np.sin(2 * np.pi * f * tt
                                                    + rng.uniform(0, 2 * np.pi))
        attack = np.minimum(tt / 0.008, 1.0)
        burst *= attack * np.exp(-tt / rng.uniform(0.05, 0.12))
        peak = np.max(np.abs(burst))
        if peak > 0:
            x[i0:i0 + seg] += 0.9 * bed_scale * burst / peak
        pos += rng.uniform(0.25, 0.7)

    return x * (rng.uniform(0.4, 0.9) / np.max(np.abs(x)))


def other_clip(rng, duration_s: float, sample_rate: int) -> np.ndarray:
    n = int(round(duration_s * sample_rate))
    t = np.arange(n) / sample_rate

    beat_s = 60.0 / rng.uniform(100.0, 140.0)
    pulse = 0.5 + 0.5 * np.cos(2 * np.pi * t / beat_s)  # peaks on each beat
    am = 0.55 + 0.45 * pulse

    f_mid = rng.uniform(250.0, 600.0)
    x = 0.3 * np.sin(2 * np.pi * f_mid * t + rng.uniform(0, 2 * np.pi)) * am

    # bass notes struck on every beat: a kick-like attack plus a longer
    # sustain on one oscillator, alternating between two pitches. Keeping
    # all low-frequency energy beat-gated gives the band envelope exactly
    # one peak per beat.
    f_low = rng.uniform(40.0, 70.0)
    f_alt = f_low + rng.uniform(15.0, 20.0)
    note_len = int(0.3 * sample_rate)
    beat = 0
    while True:
        i0 = int(round(beat * beat_s * sample_rate))
        if i0 >= n:
            break
        seg = min(note_len, n - i0)
        tt = np.arange(seg) / sample_rate
        freq = f_low if beat % 2 == 0 else f_alt
        envelope = 1.2 * np.exp(-tt / 0.05) + 0.7 * np.exp(-tt / 0.12)
        x[i0:i0 + seg] += envelope * np.sin(2 * np.pi * freq * tt)
        beat += 1

    return x * (rng.uniform(0.5, 0.95) / np.max(np.abs(x)))


def generate_corpus(spec: SynthSpec, out_dir) -> Path:
    """Write WAV clips and a manifest; returns the manifest path.

    Manifest paths are bare filenames relative to the manifest itself, so
    the corpus directory can be moved around freely.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    entries = []
    recipes = (
        ("fado", FADO_LABEL, fado_clip),
        ("other", OTHER_LABEL, other_clip),
    )
    for class_code, (name, label, render) in enumerate(recipes):
        for i in range(spec.n_per_class):
            rng = _clip_rng(spec, class_code, i)
            samples = render(rng, spec.duration_s, spec.sample_rate)
            filename = f"{name}_{i:03d}.wav"
            write_wav_pcm16(out / filename, samples, spec.sample_rate)
            entries.append(ManifestEntry(filename, label))
    manifest_path = out / MANIFEST_NAME
    write_manifest(entries, manifest_path)
    return manifest_path
