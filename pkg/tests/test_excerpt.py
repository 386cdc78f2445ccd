import numpy as np
import pytest

from fadogate.audio_io import AudioBuffer, rms
from fadogate.errors import EmptyInputError, InputShorterThanFrameError
from fadogate.excerpt import (
    ExcerptStrategy,
    default_frame,
    max_rms_center,
    select_excerpt,
)

from oracles import frame_rms_scan

SR = 22050
TEN_S = 10 * SR


def song(seconds, value=0.0):
    return AudioBuffer(np.full(int(seconds * SR), value), SR)


def hann_burst(n):
    i = np.arange(n)
    return 0.9 * np.sin(0.5 * np.pi * i) * (0.5 - 0.5 * np.cos(2 * np.pi * i / (n - 1)))


class TestStrategies:
    def test_beginning(self):
        cut = select_excerpt(song(60, 0.1), ExcerptStrategy.BEGINNING)
        assert cut.start_sample == 0
        assert len(cut.samples) == TEN_S

    def test_middle_arithmetic(self):
        cut = select_excerpt(song(60, 0.1), ExcerptStrategy.MIDDLE)
        assert cut.start_sample == (60 * SR - TEN_S) // 2 == 551250

    def test_end(self):
        cut = select_excerpt(song(60, 0.1), ExcerptStrategy.END)
        assert cut.start_sample == 60 * SR - TEN_S

    def test_cli_names(self):
        assert [s.value for s in ExcerptStrategy] == [
            "beginning", "end", "middle", "max-rms"]
        assert ExcerptStrategy.from_cli("max-rms") is ExcerptStrategy.MAX_RMS
        with pytest.raises(ValueError):
            ExcerptStrategy.from_cli("loudest")

    def test_empty_rejected(self):
        with pytest.raises(EmptyInputError):
            select_excerpt(AudioBuffer(np.zeros(0), SR),
                           ExcerptStrategy.BEGINNING)
        with pytest.raises(EmptyInputError):
            select_excerpt(song(60), ExcerptStrategy.BEGINNING, duration_s=0)


class TestMaxRmsCenter:
    def test_constant_signal_tie_breaks_earliest(self):
        frame_len, _ = default_frame(SR)
        center = max_rms_center(song(30, 0.2))
        assert center == frame_len // 2  # first frame wins the tie

    def test_impulse_found_within_one_frame(self):
        frame_len, hop = default_frame(SR)
        x = np.zeros(5 * SR)
        s = 61234
        x[s] = 1.0
        center = max_rms_center(AudioBuffer(x, SR))
        assert abs(center - s) <= frame_len
        # agree with the exhaustive frame scan
        scan = frame_rms_scan(x, frame_len, hop)
        assert center == int(np.argmax(scan)) * hop + frame_len // 2

    def test_input_shorter_than_frame(self):
        with pytest.raises(InputShorterThanFrameError):
            max_rms_center(AudioBuffer(np.zeros(100), SR))


class TestPlantedBurst:
    def test_burst_at_30s_window_contains_it(self):
        x = np.zeros(60 * SR)
        burst = hann_burst(SR)  # one second, peaked in its middle
        x[30 * SR:31 * SR] = burst
        cut = select_excerpt(AudioBuffer(x, SR), ExcerptStrategy.MAX_RMS)
        start_s = cut.start_sample / SR
        assert start_s <= 30.0 and start_s + 10.0 >= 31.0  # whole burst inside
        _, hop = default_frame(SR)
        expected_start = (30.5 - 5.0) * SR  # burst center minus half window
        assert abs(cut.start_sample - expected_start) <= hop

    def test_burst_at_2s_clamps_to_start(self):
        x = np.zeros(60 * SR)
        x[2 * SR:3 * SR] = hann_burst(SR)
        cut = select_excerpt(AudioBuffer(x, SR), ExcerptStrategy.MAX_RMS)
        assert cut.start_sample == 0

    def test_burst_near_end_clamps_to_last_window(self):
        x = np.zeros(60 * SR)
        x[58 * SR:59 * SR] = hann_burst(SR)
        cut = select_excerpt(AudioBuffer(x, SR), ExcerptStrategy.MAX_RMS)
        assert cut.start_sample == 60 * SR - TEN_S


class TestShortSongs:
    def test_padding_flagged(self):
        buf = AudioBuffer(np.full(5 * SR, 0.3), SR)
        cut = select_excerpt(buf, ExcerptStrategy.MIDDLE)
        assert cut.padded
        assert len(cut.samples) == TEN_S
        assert np.all(cut.samples[:5 * SR] == 0.3)
        assert np.all(cut.samples[5 * SR:] == 0.0)
        assert cut.pre_norm_rms == pytest.approx(rms(cut.samples))

    def test_exact_length_not_flagged(self):
        buf = AudioBuffer(np.full(TEN_S, 0.3), SR)
        cut = select_excerpt(buf, ExcerptStrategy.END)
        assert not cut.padded
        assert cut.start_sample == 0
        assert np.array_equal(cut.samples, buf.samples)


class TestInvariants:
    def test_contiguous_slice_and_fixed_length(self, rng):
        x = rng.normal(0, 0.1, 37 * SR)
        buf = AudioBuffer(x, SR)
        for strategy in ExcerptStrategy:
            cut = select_excerpt(buf, strategy)
            assert len(cut.samples) == TEN_S
            s = cut.start_sample
            assert 0 <= s <= len(x) - TEN_S
            assert np.array_equal(cut.samples, x[s:s + TEN_S])
            assert cut.pre_norm_rms == pytest.approx(rms(cut.samples))

    def test_max_rms_beats_other_strategies_within_slack(self, rng):
        _, hop = default_frame(SR)
        for trial in range(8):
            # music-like: noise under a smooth random loudness envelope
            n = int(rng.uniform(25, 45)) * SR
            t = np.arange(n) / SR
            envelope = 0.2 + 0.8 * np.square(
                np.sin(2 * np.pi * rng.uniform(0.01, 0.04) * t
                       + rng.uniform(0, 2 * np.pi)))
            x = envelope * rng.normal(0, 0.2, n)
            buf = AudioBuffer(x, SR)
            best = rms(select_excerpt(buf, ExcerptStrategy.MAX_RMS).samples)
            slack = np.max(np.abs(x)) * np.sqrt(hop / TEN_S)
            for other in (ExcerptStrategy.BEGINNING, ExcerptStrategy.END,
                          ExcerptStrategy.MIDDLE):
                other_rms = rms(select_excerpt(buf, other).samples)
                assert best >= other_rms - slack
