"""Image-method room simulation and randomized acoustic scene synthesis.

Rooms are shoebox-shaped with uniform wall absorption derived from the
target reverberation time (Eyring inversion, so any positive T60 maps to a
physical reflection coefficient). Image sources are accumulated with
fractional delays realized by an 81-tap Hann-windowed sinc and amplitude
1/(4*pi*d).

Scene sampling follows fixed uniform ranges: room length/width 3-10 m,
height 2.5-4 m, T60 0.1-0.5 s, two speakers plus one noise point source,
speaker overlap ratio 0-100%, relative speaker SNR 0-5 dB, speech-to-noise
SNR 10-20 dB, all positions at least 0.5 m from the walls. Arrays are
either a 10 cm circular array or ad-hoc with 2-6 microphones.

RIR generation per (source, mic) pair is independent; scene sampling is a
single sequential stream per seed for determinism.
"""

import json
import math
from dataclasses import dataclass, field

import numpy as np
from numba import njit
from scipy.signal import fftconvolve, lfilter

from .signal import MultiChannelWaveform

__all__ = [
    "RoomSpec",
    "ArrayGeometry",
    "Rir",
    "SceneRanges",
    "SceneInstance",
    "image_method_rir",
    "direct_path_rir",
    "sample_scene_params",
    "sample_scene",
    "synthesize_mixture",
    "convolve_with_rirs",
    "speech_like_source",
    "chirp_noise_source",
    "estimate_t60",
    "scene_manifest",
    "write_manifest",
    "load_manifest",
]

SPEED_OF_SOUND = 343.0
SINC_HALF_TAPS = 40  # 81-tap interpolation kernel
DIRECT_PATH_MS = 6.0


@dataclass
class RoomSpec:
    """Shoebox room: length x width x height in meters plus target T60."""

    length: float
    width: float
    height: float
    t60: float
    speed_of_sound: float = SPEED_OF_SOUND

    def __post_init__(self):
        if min(self.length, self.width, self.height) <= 0:
            raise ValueError("room dimensions must be positive")
        if self.t60 <= 0:
            raise ValueError("t60 must be positive")

    @property
    def dims(self) -> np.ndarray:
        return np.array([self.length, self.width, self.height])

    @property
    def volume(self) -> float:
        return self.length * self.width * self.height

    @property
    def surface(self) -> float:
        return 2.0 * (
            self.length * self.width
            + self.length * self.height
            + self.width * self.height
        )

    def reflection_coeff(self) -> float:
        """Uniform wall reflection coefficient matching the target T60.

        The magnitude is calibrated against the image lattice's own energy
        decay (diffuse-field inversions misjudge the slow axial image
        chains of elongated rooms) and the sign is negative so successive
        reflections decorrelate instead of piling up coherently at DC.
        """
        if not hasattr(self, "_beta_cache"):
            self._beta_cache = -_calibrated_wall_coefficient(
                self.dims, self.t60, self.speed_of_sound
            )
        return self._beta_cache


@dataclass
class ArrayGeometry:
    """Microphone positions (M, 3); circular arrays carry their diameter."""

    kind: str
    positions: np.ndarray
    diameter: float | None = None

    def __post_init__(self):
        if self.kind not in ("circular", "adhoc"):
            raise ValueError(f"unknown array kind {self.kind!r}")
        self.positions = np.asarray(self.positions, dtype=np.float64)
        if self.positions.ndim != 2 or self.positions.shape[1] != 3:
            raise ValueError("positions must be (M, 3)")

    @property
    def num_mics(self) -> int:
        return self.positions.shape[0]


@dataclass
class Rir:
    taps: np.ndarray
    sample_rate: int = 16000

    def __post_init__(self):
        self.taps = np.asarray(self.taps, dtype=np.float64)
        if self.taps.ndim != 1:
            raise ValueError("RIR taps must be a 1-D vector")
        if not np.all(np.isfinite(self.taps)):
            raise ValueError("RIR contains non-finite taps")


@dataclass
class SceneRanges:
    """Uniform sampling ranges for the randomized scene generator."""

    room_length: tuple = (3.0, 10.0)
    room_width: tuple = (3.0, 10.0)
    room_height: tuple = (2.5, 4.0)
    t60: tuple = (0.1, 0.5)
    overlap_ratio: tuple = (0.0, 1.0)
    speaker_snr_db: tuple = (0.0, 5.0)
    noise_snr_db: tuple = (10.0, 20.0)
    wall_margin: float = 0.5
    circular_diameter: float = 0.10
    circular_mics: int = 6
    adhoc_mic_range: tuple = (2, 6)
    num_speakers: int = 2
    duration_s: float = 4.0
    sample_rate: int = 16000
    rir_decay_factor: float = 1.5


@dataclass
class SceneInstance:
    room: RoomSpec
    array: ArrayGeometry
    source_positions: np.ndarray  # (C+1, 3), speakers first, noise last
    overlap_ratio: float
    speaker_snr_db: float
    noise_snr_db: float
    rirs: list = field(default_factory=list)  # (C+1) lists of M Rir
    seed: int = 0
    sample_rate: int = 16000
    duration_s: float = 4.0

    @property
    def num_sources(self) -> int:
        return self.source_positions.shape[0]

    @property
    def num_speakers(self) -> int:
        return self.num_sources - 1


@njit(cache=True)
def _accumulate_images(out, dx2, ex, dy2, ey, dz2, ez, beta, r_max, c, fs):
    """Scatter windowed-sinc image contributions into ``out``.

    dx2/dy2/dz2 hold squared per-axis offsets of every (order, parity)
    combination, ex/ey/ez the matching wall-hit counts.
    """
    r2_max = r_max * r_max
    n_taps = out.shape[0]
    half = SINC_HALF_TAPS
    span = 2 * half + 1
    for ix in range(dx2.shape[0]):
        ax = dx2[ix]
        if ax > r2_max:
            continue
        for iy in range(dy2.shape[0]):
            axy = ax + dy2[iy]
            if axy > r2_max:
                continue
            for iz in range(dz2.shape[0]):
                d2 = axy + dz2[iz]
                if d2 > r2_max:
                    continue
                d = math.sqrt(d2)
                if d < 1e-9:
                    continue
                expo = ex[ix] + ey[iy] + ez[iz]
                amp = abs(beta) ** expo / (4.0 * math.pi * d)
                if amp == 0.0:
                    continue
                if beta < 0.0 and (expo & 1):
                    amp = -amp
                delay = d / c * fs
                i0 = int(math.floor(delay))
                fr = delay - i0
                sin_pf = math.sin(math.pi * fr)
                for j in range(-half, half + 1):
                    n = i0 + j
                    if n < 0 or n >= n_taps:
                        continue
                    t = j - fr
                    if abs(t) < 1e-12:
                        s = 1.0
                    else:
                        # sinc(j - fr) via one shared sine evaluation
                        sign = 1.0 if (j & 1) else -1.0
                        s = sign * sin_pf / (math.pi * t)
                    w = 0.5 * (1.0 + math.cos(2.0 * math.pi * t / span))
                    out[n] += amp * s * w


def _axis_offsets(order: int, src: float, mic: float, dim: float):
    """Per-axis image offsets and wall-hit counts for all (j, parity) pairs."""
    count = 2 * (2 * order + 1)
    d2 = np.empty(count)
    hits = np.empty(count, dtype=np.int64)
    k = 0
    for j in range(-order, order + 1):
        for q in (0, 1):
            coord = (1 - 2 * q) * src + 2.0 * j * dim
            d2[k] = (coord - mic) ** 2
            hits[k] = abs(j - q) + abs(j)
            k += 1
    return d2, hits


def image_method_rir(
    room: RoomSpec,
    src,
    mic,
    fs: int = 16000,
    length_s: float | None = None,
    max_order: int | None = None,
    reflection_coeff: float | None = None,
) -> Rir:
    """Simulate the impulse response between a source and a microphone.

    Every image source within the requested path length contributes an
    attenuated, fractionally delayed impulse spread over an 81-tap
    Hann-windowed sinc. The default response length covers the direct
    flight time plus 1.5x the T60 decay; ``max_order`` caps the per-axis
    reflection order instead (0 gives the anechoic direct path), and
    ``reflection_coeff`` overrides the wall coefficient derived from T60.
    """
    src = np.asarray(src, dtype=np.float64)
    mic = np.asarray(mic, dtype=np.float64)
    dims = room.dims
    for name, p in (("source", src), ("microphone", mic)):
        if p.shape != (3,):
            raise ValueError(f"{name} position must be a 3-D point")
        if np.any(p <= 0) or np.any(p >= dims):
            raise ValueError(f"{name} position {p} outside room {dims}")
    dist = float(np.linalg.norm(src - mic))
    if dist == 0.0:
        raise ValueError("source and microphone positions coincide")

    c = room.speed_of_sound
    beta = room.reflection_coeff() if reflection_coeff is None else float(reflection_coeff)
    if not -1.0 < beta < 1.0:
        raise ValueError(f"reflection coefficient magnitude must be < 1, got {beta}")

    if max_order is not None:
        orders = np.full(3, int(max_order))
        r_max = float(np.linalg.norm(2 * orders * dims + dims))
        if length_s is not None:
            r_max = min(r_max, length_s * c)
    else:
        if length_s is None:
            length_s = 1.5 * room.t60 + dist / c
        r_max = length_s * c
        orders = np.ceil(r_max / (2.0 * dims)).astype(np.int64)

    n_taps = int(round(r_max / c * fs)) + SINC_HALF_TAPS + 1
    out = np.zeros(n_taps)
    dx2, ex = _axis_offsets(int(orders[0]), src[0], mic[0], dims[0])
    dy2, ey = _axis_offsets(int(orders[1]), src[1], mic[1], dims[1])
    dz2, ez = _axis_offsets(int(orders[2]), src[2], mic[2], dims[2])
    _accumulate_images(out, dx2, ex, dy2, ey, dz2, ez, beta, r_max, c, float(fs))
    return Rir(out, fs)


def direct_path_rir(rir: Rir) -> Rir:
    """Keep only +-6 ms around the strongest tap, zeroing the rest."""
    taps = rir.taps
    if not np.any(taps):
        raise ValueError("RIR is identically zero")
    peak = int(np.argmax(np.abs(taps)))
    half = int(round(DIRECT_PATH_MS * 1e-3 * rir.sample_rate))
    out = np.zeros_like(taps)
    lo = max(0, peak - half)
    hi = min(taps.shape[0], peak + half + 1)
    out[lo:hi] = taps[lo:hi]
    return Rir(out, rir.sample_rate)


def _uniform(rng, lo_hi) -> float:
    lo, hi = lo_hi
    return float(rng.uniform(lo, hi))


def _reject_position(rng, dims, margin, budget=10000) -> np.ndarray:
    """Uniform position inside the room, rejected until margins hold."""
    if np.any(dims <= 2 * margin):
        raise ValueError(f"room {dims} too small for wall margin {margin}")
    for _ in range(budget):
        p = rng.uniform(0.0, dims)
        if np.all(p >= margin) and np.all(p <= dims - margin):
            return p
    raise RuntimeError("position rejection budget exhausted")


def _sample_array(rng, kind, dims, ranges: SceneRanges, num_mics, budget=10000):
    margin = ranges.wall_margin
    if kind == "circular":
        M = ranges.circular_mics if num_mics is None else int(num_mics)
        radius = ranges.circular_diameter / 2.0
        for _ in range(budget):
            center = rng.uniform(0.0, dims)
            theta0 = rng.uniform(0.0, 2.0 * np.pi)
            angles = theta0 + 2.0 * np.pi * np.arange(M) / M
            pos = np.stack(
                [
                    center[0] + radius * np.cos(angles),
                    center[1] + radius * np.sin(angles),
                    np.full(M, center[2]),
                ],
                axis=1,
            )
            if np.all(pos >= margin) and np.all(pos <= dims - margin):
                return ArrayGeometry("circular", pos, ranges.circular_diameter)
        raise RuntimeError("array placement rejection budget exhausted")
    if kind == "adhoc":
        if num_mics is None:
            lo, hi = ranges.adhoc_mic_range
            M = int(rng.integers(lo, hi + 1))
        else:
            M = int(num_mics)
        pos = np.stack([_reject_position(rng, dims, margin) for _ in range(M)])
        return ArrayGeometry("adhoc", pos)
    raise ValueError(f"unknown array kind {kind!r}")


def sample_scene_params(
    ranges: SceneRanges,
    seed: int,
    array_kind: str = "circular",
    num_mics: int | None = None,
) -> SceneInstance:
    """Draw a scene (geometry and mixing parameters) without computing RIRs."""
    rng = np.random.default_rng(seed)
    room = RoomSpec(
        length=_uniform(rng, ranges.room_length),
        width=_uniform(rng, ranges.room_width),
        height=_uniform(rng, ranges.room_height),
        t60=_uniform(rng, ranges.t60),
    )
    array = _sample_array(rng, array_kind, room.dims, ranges, num_mics)
    num_sources = ranges.num_speakers + 1
    source_positions = np.stack(
        [_reject_position(rng, room.dims, ranges.wall_margin) for _ in range(num_sources)]
    )
    return SceneInstance(
        room=room,
        array=array,
        source_positions=source_positions,
        overlap_ratio=_uniform(rng, ranges.overlap_ratio),
        speaker_snr_db=_uniform(rng, ranges.speaker_snr_db),
        noise_snr_db=_uniform(rng, ranges.noise_snr_db),
        rirs=[],
        seed=seed,
        sample_rate=ranges.sample_rate,
        duration_s=ranges.duration_s,
    )


def sample_scene(
    ranges: SceneRanges,
    seed: int,
    array_kind: str = "circular",
    num_mics: int | None = None,
) -> SceneInstance:
    """Draw a scene and simulate all (source, microphone) impulse responses."""
    scene = sample_scene_params(ranges, seed, array_kind, num_mics)
    decay_s = ranges.rir_decay_factor * scene.room.t60
    scene.rirs = [
        [
            image_method_rir(
                scene.room,
                scene.source_positions[s],
                scene.array.positions[m],
                fs=ranges.sample_rate,
                length_s=decay_s
                + float(np.linalg.norm(scene.source_positions[s] - scene.array.positions[m]))
                / scene.room.speed_of_sound,
            )
            for m in range(scene.array.num_mics)
        ]
        for s in range(scene.num_sources)
    ]
    return scene


def convolve_with_rirs(source: np.ndarray, rirs, out_len: int) -> np.ndarray:
    """Convolve a mono signal with M impulse responses: returns (M, out_len)."""
    source = np.asarray(source, dtype=np.float64)
    out = np.zeros((len(rirs), out_len))
    for m, rir in enumerate(rirs):
        img = fftconvolve(source, rir.taps)[:out_len]
        out[m, : img.shape[0]] = img
    return out


def _active_span(x: np.ndarray) -> tuple:
    """First/last sample indices above 1e-4 of the peak magnitude."""
    mag = np.abs(x)
    thresh = 1e-4 * mag.max()
    idx = np.flatnonzero(mag > thresh)
    return int(idx[0]), int(idx[-1])


def _fit_length(x: np.ndarray, length: int) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64).ravel()
    if x.shape[0] >= length:
        return x[:length].copy()
    return np.pad(x, (0, length - x.shape[0]))


def synthesize_mixture(scene: SceneInstance, sources) -> dict:
    """Mix dry sources through the scene's impulse responses.

    ``sources`` holds the two speaker signals followed by the noise signal;
    each is truncated or zero-padded to the scene duration. Speaker 2 is
    delayed so the overlap with speaker 1's active span matches the scene's
    overlap ratio, speakers are rescaled to the sampled relative SNR
    (speaker 1 louder), and the noise is rescaled against the summed
    speech. All signals are then convolved with their RIRs and summed.

    Returns a dict with the M-channel mixture, per-speaker reverberant and
    direct-path images, the noise image and the processed dry sources.
    """
    if len(sources) != scene.num_sources:
        raise ValueError(
            f"expected {scene.num_sources} sources (speakers + noise), got {len(sources)}"
        )
    if scene.num_speakers != 2:
        raise ValueError("mixture synthesis expects exactly two speakers")
    if not scene.rirs:
        raise ValueError("scene has no RIRs; use sample_scene, not sample_scene_params")
    fs = scene.sample_rate
    L = int(round(scene.duration_s * fs))
    fitted = [_fit_length(s, L) for s in sources]
    for i, s in enumerate(fitted):
        if not np.any(s):
            raise ValueError(f"source {i} is silent; SNR scaling undefined")

    s1, s2, noise = fitted
    first, last = _active_span(s1)
    span = last - first + 1
    shift = int(round((1.0 - scene.overlap_ratio) * span))
    s2 = _fit_length(np.concatenate([np.zeros(shift), s2]), L)
    if not np.any(s2):
        raise ValueError("speaker 2 fully shifted out of the utterance")

    e1 = float(np.dot(s1, s1))
    e2 = float(np.dot(s2, s2))
    gain2 = np.sqrt(e1 / (e2 * 10.0 ** (scene.speaker_snr_db / 10.0)))
    s2 = s2 * gain2

    speech_sum = s1 + s2
    e_speech = float(np.dot(speech_sum, speech_sum))
    e_noise = float(np.dot(noise, noise))
    gain_n = np.sqrt(e_speech / (e_noise * 10.0 ** (scene.noise_snr_db / 10.0)))
    noise = noise * gain_n

    dry = [s1, s2, noise]
    reverberant = [convolve_with_rirs(dry[c], scene.rirs[c], L) for c in range(2)]
    noise_image = convolve_with_rirs(noise, scene.rirs[2], L)
    direct = [
        convolve_with_rirs(dry[c], [direct_path_rir(r) for r in scene.rirs[c]], L)
        for c in range(2)
    ]
    mixture = reverberant[0] + reverberant[1] + noise_image

    return {
        "mixture": MultiChannelWaveform(mixture, fs),
        "reverberant_targets": [MultiChannelWaveform(r, fs) for r in reverberant],
        "direct_targets": [MultiChannelWaveform(d, fs) for d in direct],
        "noise_image": MultiChannelWaveform(noise_image, fs),
        "dry_sources": dry,
    }


# classic pink-noise shaping filter (Paul Kellet's economy coefficients)
_PINK_B = (0.049922035, -0.095993537, 0.050612699, -0.004408786)
_PINK_A = (1.0, -2.494956002, 2.017265875, -0.522189400)


def speech_like_source(duration_s: float, sample_rate: int, seed: int) -> np.ndarray:
    """Seeded speech-shaped burst signal (synthetic stand-in for a talker).

    Mostly voiced syllables: harmonic combs on a per-talker pitch track
    with vibrato and drift, shaped by randomized formant resonators, with
    occasional weak unvoiced noise bursts and natural pauses. The comb
    structure plus the pauses give the time-frequency sparsity that makes
    narrowband filters meaningful on mixtures of talkers. RMS-normalized.
    """
    rng = np.random.default_rng(seed)
    fs = sample_rate
    L = int(round(duration_s * fs))
    out = np.zeros(L)
    f0_base = rng.uniform(85.0, 240.0)  # talker register
    pos = int(rng.uniform(0.0, 0.08) * fs)
    while pos < L:
        seg_len = int(rng.uniform(0.12, 0.45) * fs)
        seg_len = min(seg_len, L - pos)
        if seg_len < int(0.04 * fs):
            break
        if rng.uniform() < 0.85:
            # voiced syllable: harmonic comb under a formant envelope
            f0 = f0_base * rng.uniform(0.9, 1.15)
            t = np.arange(seg_len) / fs
            drift = rng.uniform(-0.12, 0.12)
            vibrato = 0.01 * np.sin(2.0 * np.pi * rng.uniform(4.0, 7.0) * t)
            inst_f = f0 * (1.0 + drift * t / t[-1] + vibrato)
            phase = 2.0 * np.pi * np.cumsum(inst_f) / fs
            formants = [
                (rng.uniform(300.0, 900.0), rng.uniform(60.0, 120.0)),
                (rng.uniform(900.0, 2200.0), rng.uniform(80.0, 160.0)),
                (rng.uniform(2200.0, 3500.0), rng.uniform(120.0, 250.0)),
            ]
            num_harm = int(min(3800.0, 0.45 * fs) / f0)
            seg = np.zeros(seg_len)
            for k in range(1, num_harm + 1):
                fk = k * f0
                gain = (1.0 / k) * sum(
                    1.0 / (1.0 + ((fk - fc) / bw) ** 2) for fc, bw in formants
                )
                seg += gain * np.cos(k * phase + rng.uniform(0.0, 2.0 * np.pi))
        else:
            # weak unvoiced burst: bandpassed noise
            seg = lfilter(_PINK_B, _PINK_A, rng.standard_normal(seg_len))
            r = np.exp(-np.pi * 1200.0 / fs)
            w0 = 2.0 * np.pi * rng.uniform(1500.0, 4000.0) / fs
            seg = lfilter([1.0 - r], [1.0, -2.0 * r * np.cos(w0), r * r], seg)
            seg *= 0.5
        fade = min(int(0.015 * fs), seg_len // 2)
        env = np.ones(seg_len)
        ramp = 0.5 * (1.0 - np.cos(np.pi * np.arange(fade) / fade))
        env[:fade] = ramp
        env[seg_len - fade :] = ramp[::-1]
        rms = np.sqrt(np.mean(seg**2))
        if rms > 0:
            seg = seg / rms * rng.uniform(0.6, 1.0)
        out[pos : pos + seg_len] += seg * env
        pos += seg_len + int(rng.uniform(0.05, 0.3) * fs)
    rms = np.sqrt(np.mean(out**2))
    if rms == 0.0:
        raise RuntimeError("synthetic source came out silent")
    return out / rms * 0.05


def chirp_noise_source(duration_s: float, sample_rate: int, seed: int) -> np.ndarray:
    """Seeded background noise: pink noise plus slow wandering chirps."""
    rng = np.random.default_rng(seed)
    fs = sample_rate
    L = int(round(duration_s * fs))
    noise = lfilter(_PINK_B, _PINK_A, rng.standard_normal(L))
    t = np.arange(L) / fs
    chirps = np.zeros(L)
    for _ in range(3):
        f_lo = rng.uniform(100.0, 1000.0)
        f_hi = rng.uniform(1000.0, 4000.0)
        rate = (f_hi - f_lo) / duration_s
        phase = 2.0 * np.pi * (f_lo * t + 0.5 * rate * t**2)
        chirps += rng.uniform(0.2, 0.6) * np.sin(phase + rng.uniform(0.0, 2.0 * np.pi))
    out = noise / np.sqrt(np.mean(noise**2)) + 0.3 * chirps
    return out / np.sqrt(np.mean(out**2)) * 0.05


def _t60_from_energy(energy: np.ndarray, rate: float, fit_range_db) -> float:
    """Schroeder backward integration plus a line fit between two dB levels."""
    edc = np.cumsum(energy[::-1])[::-1]
    if edc[0] <= 0:
        raise ValueError("no energy to integrate")
    edc_db = 10.0 * np.log10(np.maximum(edc / edc[0], 1e-300))
    hi_db, lo_db = fit_range_db
    mask = (edc_db <= hi_db) & (edc_db >= lo_db)
    if mask.sum() < 8:
        raise ValueError("decay range too short for a T60 fit")
    t = np.flatnonzero(mask) / rate
    slope, _ = np.polyfit(t, edc_db[mask], 1)
    if slope >= 0:
        raise ValueError("energy-decay curve is not decaying")
    return float(-60.0 / slope)


def estimate_t60(rir: Rir, fit_range_db=(-5.0, -25.0)) -> float:
    """Reverberation time from Schroeder backward integration.

    Fits a line to the energy-decay curve between the given dB levels and
    extrapolates to -60 dB.
    """
    return _t60_from_energy(rir.taps**2, rir.sample_rate, fit_range_db)


@njit(cache=True)
def _lattice_energy_bins(bins, dx2, ex, dy2, ey, dz2, ez, beta_mag, r_max, c, bin_rate):
    """Incoherent image-lattice arrival energy, histogrammed over delay."""
    r2_max = r_max * r_max
    nb = bins.shape[0]
    for ix in range(dx2.shape[0]):
        ax = dx2[ix]
        if ax > r2_max:
            continue
        for iy in range(dy2.shape[0]):
            axy = ax + dy2[iy]
            if axy > r2_max:
                continue
            for iz in range(dz2.shape[0]):
                d2 = axy + dz2[iz]
                if d2 > r2_max or d2 < 1e-12:
                    continue
                d = math.sqrt(d2)
                expo = ex[ix] + ey[iy] + ez[iz]
                amp = beta_mag**expo / (4.0 * math.pi * d)
                b = int(d / c * bin_rate)
                if 0 <= b < nb:
                    bins[b] += amp * amp


# canonical off-symmetry calibration positions, as room-dimension fractions
_CAL_SRC_FRAC = np.array([0.351, 0.427, 0.449])
_CAL_MIC_FRAC = np.array([0.633, 0.571, 0.521])
_CAL_BIN_RATE = 4000.0


def _calibrated_wall_coefficient(dims, t60: float, c: float) -> float:
    """Bisect the uniform |beta| whose lattice decay measures as the target.

    Runs the same Schroeder fit as :func:`estimate_t60` on an incoherent
    energy histogram of the image lattice, over the same time horizon the
    simulated responses use, so the measured T60 of generated RIRs tracks
    the requested one across room shapes.
    """
    dims = np.asarray(dims, dtype=np.float64)
    src = dims * _CAL_SRC_FRAC
    mic = dims * _CAL_MIC_FRAC
    length_s = 1.5 * t60 + float(np.linalg.norm(src - mic)) / c
    r_max = length_s * c
    orders = np.ceil(r_max / (2.0 * dims)).astype(np.int64)
    dx2, ex = _axis_offsets(int(orders[0]), src[0], mic[0], dims[0])
    dy2, ey = _axis_offsets(int(orders[1]), src[1], mic[1], dims[1])
    dz2, ez = _axis_offsets(int(orders[2]), src[2], mic[2], dims[2])
    num_bins = int(length_s * _CAL_BIN_RATE) + 1

    lo, hi = 0.01, 0.9995
    for _ in range(16):
        mid = 0.5 * (lo + hi)
        bins = np.zeros(num_bins)
        _lattice_energy_bins(bins, dx2, ex, dy2, ey, dz2, ez, mid, r_max, c, _CAL_BIN_RATE)
        try:
            measured = _t60_from_energy(bins, _CAL_BIN_RATE, (-5.0, -25.0))
        except ValueError:
            measured = 0.0  # decay too fast to fit: raise beta
        if measured < t60:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def scene_manifest(scene: SceneInstance, ranges: SceneRanges,
                   array_kind: str, wav_paths: dict | None = None) -> dict:
    """All sampled parameters plus emitted file paths, JSON-serializable.

    Together with the seed this regenerates the scene exactly.
    """
    return {
        "seed": scene.seed,
        "array_kind": array_kind,
        "num_mics": scene.array.num_mics,
        "sample_rate": scene.sample_rate,
        "duration_s": scene.duration_s,
        "ranges": {
            "room_length": list(ranges.room_length),
            "room_width": list(ranges.room_width),
            "room_height": list(ranges.room_height),
            "t60": list(ranges.t60),
            "overlap_ratio": list(ranges.overlap_ratio),
            "speaker_snr_db": list(ranges.speaker_snr_db),
            "noise_snr_db": list(ranges.noise_snr_db),
            "wall_margin": ranges.wall_margin,
            "circular_diameter": ranges.circular_diameter,
            "adhoc_mic_range": list(ranges.adhoc_mic_range),
            "rir_decay_factor": ranges.rir_decay_factor,
        },
        "room": {
            "length": scene.room.length,
            "width": scene.room.width,
            "height": scene.room.height,
            "t60": scene.room.t60,
        },
        "array_positions": scene.array.positions.tolist(),
        "source_positions": scene.source_positions.tolist(),
        "overlap_ratio": scene.overlap_ratio,
        "speaker_snr_db": scene.speaker_snr_db,
        "noise_snr_db": scene.noise_snr_db,
        "wav_paths": wav_paths or {},
    }


def write_manifest(path, manifest: dict):
    with open(path, "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_manifest(path) -> dict:
    with open(path) as fh:
        return json.load(fh)
