"""Frequency-domain baselines: STFT/iSTFT and per-bin Wiener beamformers.

The multi-channel Wiener filter solves, independently at every frequency
bin f, the complex least-squares problem

    h(f) = argmin_h  sum_t | h(f)^H S(f, t) - z(f, t) |^2

through the Hermitian normal equations, with the same trace-scaled
diagonal loading policy as the time-domain solver. The parameterized
variant trades target distortion against interference leakage through a
nonnegative weight beta on the interference covariance.

Covariances accumulate over all frames of the utterance; there is no
recursive averaging.
"""

from dataclasses import dataclass

import numpy as np

from .signal import FrameStack, MultiChannelWaveform, frame, hann, overlap_add

__all__ = [
    "Spectrogram",
    "FreqFilterBank",
    "PmwfConfig",
    "stft",
    "istft",
    "fd_mcwf",
    "fd_pmwf",
    "apply_freq_filter",
]

DEFAULT_EPS = 1e-6


@dataclass
class Spectrogram:
    """One-sided complex spectra: (M, F, T) with F = fft_size/2 + 1."""

    bins: np.ndarray
    fft_size: int
    hop: int

    def __post_init__(self):
        self.bins = np.asarray(self.bins, dtype=np.complex128)
        if self.bins.ndim != 3:
            raise ValueError(f"expected (M, F, T) bins, got shape {self.bins.shape}")
        if self.bins.shape[1] != self.fft_size // 2 + 1:
            raise ValueError(
                f"bin count {self.bins.shape[1]} != fft_size/2+1 = {self.fft_size // 2 + 1}"
            )
        if not np.all(np.isfinite(self.bins)):
            raise ValueError("spectrogram contains non-finite bins")

    @property
    def num_channels(self) -> int:
        return self.bins.shape[0]

    @property
    def num_bins(self) -> int:
        return self.bins.shape[1]

    @property
    def num_frames(self) -> int:
        return self.bins.shape[2]


@dataclass
class FreqFilterBank:
    """One complex weight vector per bin: weights shape (F, M)."""

    weights: np.ndarray

    def __post_init__(self):
        self.weights = np.asarray(self.weights, dtype=np.complex128)
        if self.weights.ndim != 2:
            raise ValueError(f"expected (F, M) weights, got shape {self.weights.shape}")
        if not np.all(np.isfinite(self.weights)):
            raise ValueError("filter weights contain non-finite entries")


@dataclass
class PmwfConfig:
    beta: float = 0.0
    reference_channel: int = 0

    def __post_init__(self):
        if self.beta < 0:
            raise ValueError(f"beta must be >= 0, got {self.beta}")


def stft(
    waveform: MultiChannelWaveform,
    fft_size: int,
    hop: int | None = None,
    window: np.ndarray | None = None,
) -> Spectrogram:
    """One-sided STFT with a Hann analysis window and hop = fft_size/4.

    The signal is zero-padded by fft_size - hop samples at the front (and
    as needed at the tail) so every real sample sees the full window
    overlap; :func:`istft` drops the padding again. Without this, samples
    near the edges carry almost no window energy and modified spectrograms
    could not be renormalized there.
    """
    if hop is None:
        hop = fft_size // 4
    if window is None:
        window = hann(fft_size)
    pad = fft_size - hop
    padded = MultiChannelWaveform(
        np.pad(waveform.samples, ((0, 0), (pad, pad))), waveform.sample_rate
    )
    stack = frame(padded, fft_size, hop, analysis_window=window)
    bins = np.fft.rfft(stack.frames, axis=2)  # (M, T, F)
    return Spectrogram(bins.transpose(0, 2, 1), fft_size, hop)


def istft(
    spec: Spectrogram,
    out_len: int,
    window: np.ndarray | None = None,
    sample_rate: int = 16000,
) -> MultiChannelWaveform:
    """Inverse STFT: per-frame inverse FFT and windowed overlap-add.

    The synthesis window (Hann by default, matching the analysis side)
    is applied once and the overlap of its squares normalizes the sum.
    Raises if the requested span has no window energy to reconstruct from.
    """
    if window is None:
        window = hann(spec.fft_size)
    window = np.asarray(window, dtype=np.float64)
    # steady-state overlap of the squared window: every hop-residue must
    # carry energy once all shifted copies are summed
    steady = np.zeros(spec.hop)
    wsq = window * window
    for start in range(0, spec.fft_size, spec.hop):
        steady += wsq[start : start + spec.hop]
    if np.any(steady < 1e-8):
        raise ValueError(
            "window/hop combination leaves samples without overlap energy "
            "(constant-overlap-add violated)"
        )
    frames = np.fft.irfft(spec.bins.transpose(0, 2, 1), n=spec.fft_size, axis=2)
    stack = FrameStack(frames, spec.hop)
    pad = spec.fft_size - spec.hop  # matches the stft front padding
    if pad + out_len > stack.span:
        raise ValueError(
            f"out_len {out_len} exceeds reconstructable span {stack.span - pad}"
        )
    full = overlap_add(stack, window, out_len=pad + out_len, sample_rate=sample_rate)
    return MultiChannelWaveform(full.samples[:, pad:], sample_rate)


def _loaded_solve(cov: np.ndarray, cross: np.ndarray, eps: float, what: str) -> np.ndarray:
    """Batched Hermitian solve with trace-scaled loading; names the bad bin."""
    F, M, _ = cov.shape
    if eps > 0:
        traces = np.trace(cov, axis1=1, axis2=2).real
        cov = cov + (eps * traces / M)[:, None, None] * np.eye(M)[None]
    try:
        return np.linalg.solve(cov, cross[..., None])[..., 0]
    except np.linalg.LinAlgError:
        # retry bin by bin to report which frequency is singular
        weights = np.empty((F, M), dtype=np.complex128)
        for f in range(F):
            try:
                weights[f] = np.linalg.solve(cov[f], cross[f])
            except np.linalg.LinAlgError as err:
                raise np.linalg.LinAlgError(
                    f"singular {what} covariance at bin {f} (eps={eps})"
                ) from err
        return weights


def fd_mcwf(
    spec: Spectrogram,
    target_spec: Spectrogram,
    eps: float = DEFAULT_EPS,
) -> FreqFilterBank:
    """Per-bin MMSE combiner between the observations and a 1-channel target.

    Arguments:
        spec: observations, bins (M, F, T)
        target_spec: estimated target, bins (1, F, T)
    Return:
        bank with weights (F, M) solving the per-bin normal equations
    """
    if target_spec.num_channels != 1:
        raise ValueError("target spectrogram must be single-channel")
    if spec.bins.shape[1:] != target_spec.bins.shape[1:]:
        raise ValueError(
            f"shape mismatch: observations {spec.bins.shape}, target {target_spec.bins.shape}"
        )
    S = spec.bins
    z = target_spec.bins[0]
    cov = np.einsum("mft,nft->fmn", S, S.conj())
    cross = np.einsum("mft,ft->fm", S, z.conj())
    weights = _loaded_solve(cov, cross, eps, "observation")
    return FreqFilterBank(weights)


def fd_pmwf(
    soi_spec: Spectrogram,
    interference_spec: Spectrogram,
    cfg: PmwfConfig,
    eps: float = DEFAULT_EPS,
) -> FreqFilterBank:
    """Parameterized multi-channel Wiener filter from oracle components.

    Solves per bin
        (sum_t Z Z^H + beta * sum_t N N^H + loading) h = sum_t Z z_ref^*
    where Z and N are the multi-channel target and interference bins.
    beta = 0 keeps only the target covariance in the system matrix.
    """
    if soi_spec.bins.shape != interference_spec.bins.shape:
        raise ValueError("target and interference spectrograms must share shape")
    M = soi_spec.num_channels
    if not 0 <= cfg.reference_channel < M:
        raise ValueError(f"reference channel {cfg.reference_channel} out of range for M={M}")
    Z = soi_spec.bins
    N = interference_spec.bins
    cov = np.einsum("mft,nft->fmn", Z, Z.conj())
    if cfg.beta > 0:
        cov = cov + cfg.beta * np.einsum("mft,nft->fmn", N, N.conj())
    cross = np.einsum("mft,ft->fm", Z, Z[cfg.reference_channel].conj())
    weights = _loaded_solve(cov, cross, eps, "target-plus-interference")
    return FreqFilterBank(weights)


def apply_freq_filter(spec: Spectrogram, bank: FreqFilterBank) -> Spectrogram:
    """Beamform: out(f, t) = h(f)^H S(f, t), returning a 1-channel spectrogram."""
    if bank.weights.shape != (spec.num_bins, spec.num_channels):
        raise ValueError(
            f"weights {bank.weights.shape} do not match spectrogram "
            f"(F={spec.num_bins}, M={spec.num_channels})"
        )
    out = np.einsum("fm,mft->ft", bank.weights.conj(), spec.bins)
    return Spectrogram(out[None], spec.fft_size, spec.hop)
