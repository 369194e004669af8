"""Waveform containers, framing, windows and overlap-add reconstruction.

Shape conventions used throughout the package:

    waveform samples: (M, L)    M channels, L samples
    frame stacks:     (M, T, P) T frames of P samples per channel
    feature tensors:  (M, N, T) N feature dimensions per frame

All operations here are pure functions on immutable inputs; channels and
frames can be processed data-parallel.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.io import wavfile

__all__ = [
    "MultiChannelWaveform",
    "FrameStack",
    "hann",
    "frame",
    "overlap_add",
    "read_wav",
    "write_wav",
]

DEFAULT_SAMPLE_RATE = 16000

# overlap positions whose window-energy normalizer falls below this are
# treated as unreconstructable and set to zero
_NORMALIZER_FLOOR = 1e-8


@dataclass
class MultiChannelWaveform:
    """An (M, L) block of real samples plus its sample rate.

    A 1-D array is promoted to a single channel. Samples must be finite.
    """

    samples: np.ndarray
    sample_rate: int = DEFAULT_SAMPLE_RATE

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=np.float64)
        if samples.ndim == 1:
            samples = samples[None, :]
        if samples.ndim != 2:
            raise ValueError(f"expected (M, L) samples, got shape {samples.shape}")
        if samples.shape[0] < 1 or samples.shape[1] < 1:
            raise ValueError(f"waveform must have M >= 1 and L >= 1, got {samples.shape}")
        if not np.all(np.isfinite(samples)):
            raise ValueError("waveform contains non-finite samples")
        if self.sample_rate <= 0:
            raise ValueError(f"sample_rate must be positive, got {self.sample_rate}")
        self.samples = samples

    @property
    def num_channels(self) -> int:
        return self.samples.shape[0]

    @property
    def num_samples(self) -> int:
        return self.samples.shape[1]

    def channel(self, m: int) -> "MultiChannelWaveform":
        """Single-channel view of channel ``m`` as a new waveform."""
        return MultiChannelWaveform(self.samples[m : m + 1].copy(), self.sample_rate)


@dataclass
class FrameStack:
    """Frames of a multi-channel waveform: (M, T, P) plus the hop used."""

    frames: np.ndarray
    hop: int

    def __post_init__(self):
        frames = np.asarray(self.frames, dtype=np.float64)
        if frames.ndim == 2:
            frames = frames[None, :, :]
        if frames.ndim != 3:
            raise ValueError(f"expected (M, T, P) frames, got shape {frames.shape}")
        if self.hop < 1:
            raise ValueError(f"hop must be >= 1, got {self.hop}")
        if self.hop > frames.shape[2]:
            raise ValueError(f"hop {self.hop} exceeds frame length {frames.shape[2]}")
        self.frames = frames

    @property
    def num_channels(self) -> int:
        return self.frames.shape[0]

    @property
    def num_frames(self) -> int:
        return self.frames.shape[1]

    @property
    def window_len(self) -> int:
        return self.frames.shape[2]

    @property
    def span(self) -> int:
        """Number of samples covered by the stack: (T - 1) * hop + P."""
        return (self.num_frames - 1) * self.hop + self.window_len


def hann(num_samples: int) -> np.ndarray:
    """Periodic Hann window w[n] = 0.5 * (1 - cos(2*pi*n/P)), n = 0..P-1."""
    if num_samples < 2:
        raise ValueError(f"window length must be >= 2, got {num_samples}")
    n = np.arange(num_samples)
    return 0.5 * (1.0 - np.cos(2.0 * np.pi * n / num_samples))


def _frame_count(num_samples: int, window_len: int, hop: int) -> int:
    # minimal tail covering: frames start at multiples of hop, the last one
    # is zero-padded to full length if it overshoots the signal
    return int(np.ceil(max(num_samples - window_len, 0) / hop)) + 1


def frame(
    waveform: MultiChannelWaveform,
    window_len: int,
    hop: int | None = None,
    analysis_window: np.ndarray | None = None,
) -> FrameStack:
    """Slice a waveform into overlapping frames of ``window_len`` samples.

    Frame t covers samples [t*hop, t*hop + window_len). The tail is
    zero-padded so the last frame is complete. ``hop`` defaults to a
    quarter of the window and must divide the window length. If an
    analysis window is supplied every frame is multiplied by it.
    """
    if window_len < 2:
        raise ValueError(f"window length must be >= 2, got {window_len}")
    if hop is None:
        if window_len % 4 != 0:
            raise ValueError(
                f"default hop is window/4 but window {window_len} is not divisible by 4"
            )
        hop = window_len // 4
    if hop < 1 or hop > window_len:
        raise ValueError(f"hop must be in [1, {window_len}], got {hop}")
    if window_len % hop != 0:
        raise ValueError(f"hop {hop} must divide the window length {window_len}")
    if analysis_window is not None:
        analysis_window = np.asarray(analysis_window, dtype=np.float64)
        if analysis_window.shape != (window_len,):
            raise ValueError(
                f"analysis window length {analysis_window.shape} != window {window_len}"
            )

    samples = waveform.samples
    num_channels, num_samples = samples.shape
    if window_len > num_samples:
        raise ValueError(
            f"window length {window_len} exceeds signal length {num_samples}"
        )

    num_frames = _frame_count(num_samples, window_len, hop)
    padded_len = (num_frames - 1) * hop + window_len
    if padded_len > num_samples:
        samples = np.pad(samples, ((0, 0), (0, padded_len - num_samples)))

    idx = np.arange(num_frames)[:, None] * hop + np.arange(window_len)[None, :]
    frames = samples[:, idx]
    if analysis_window is not None:
        frames = frames * analysis_window[None, None, :]
    return FrameStack(frames, hop)


def overlap_add(
    stack: FrameStack,
    synthesis_window: np.ndarray | None = None,
    out_len: int | None = None,
    sample_rate: int = DEFAULT_SAMPLE_RATE,
) -> MultiChannelWaveform:
    """Reconstruct a waveform from frames by windowed overlap-add.

    output[n] = sum_t frames[t][n - t*hop] * win[n - t*hop]
                / sum_t win^2[n - t*hop]

    with a rectangular window (all ones) when none is supplied. Samples
    whose normalizer is below 1e-8 are set to zero. ``out_len`` beyond the
    reconstructable span is rejected.
    """
    frames = stack.frames
    num_channels, num_frames, window_len = frames.shape
    hop = stack.hop
    span = stack.span
    if out_len is None:
        out_len = span
    if out_len > span:
        raise ValueError(f"out_len {out_len} exceeds reconstructable span {span}")

    if synthesis_window is None:
        win = np.ones(window_len)
    else:
        win = np.asarray(synthesis_window, dtype=np.float64)
        if win.shape != (window_len,):
            raise ValueError(f"synthesis window length {win.shape} != {window_len}")

    out = np.zeros((num_channels, span))
    norm = np.zeros(span)
    win_sq = win * win
    for t in range(num_frames):
        sl = slice(t * hop, t * hop + window_len)
        out[:, sl] += frames[:, t, :] * win[None, :]
        norm[sl] += win_sq
    ok = norm >= _NORMALIZER_FLOOR
    out[:, ok] /= norm[ok][None, :]
    out[:, ~ok] = 0.0
    return MultiChannelWaveform(out[:, :out_len], sample_rate)


def read_wav(path) -> MultiChannelWaveform:
    """Read a RIFF WAV file (PCM 16-bit or IEEE float32) as (M, L) floats.

    Integer samples are normalized to [-1, 1]; float samples pass through.
    """
    rate, data = wavfile.read(path)
    if data.ndim == 1:
        data = data[:, None]
    data = data.T  # wavfile returns (L, C)
    if data.dtype == np.int16:
        samples = data.astype(np.float64) / 32768.0
    elif data.dtype == np.int32:
        samples = data.astype(np.float64) / 2147483648.0
    elif data.dtype in (np.float32, np.float64):
        samples = data.astype(np.float64)
    else:
        raise ValueError(f"unsupported WAV sample format {data.dtype} in {path}")
    return MultiChannelWaveform(samples, int(rate))


def write_wav(path, waveform: MultiChannelWaveform, fmt: str = "float32"):
    """Write a waveform as WAV. ``fmt`` is 'float32' (default) or 'pcm16'."""
    data = waveform.samples.T  # wavfile expects (L, C)
    if fmt == "float32":
        wavfile.write(path, waveform.sample_rate, data.astype(np.float32))
    elif fmt == "pcm16":
        clipped = np.clip(data, -1.0, 1.0 - 1.0 / 32768.0)
        wavfile.write(path, waveform.sample_rate, np.round(clipped * 32768.0).astype(np.int16))
    else:
        raise ValueError(f"unknown WAV format {fmt!r}, expected 'float32' or 'pcm16'")
