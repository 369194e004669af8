import numpy as np
import pytest

from tdgwf.acoustics import (
    Rir,
    RoomSpec,
    SceneRanges,
    chirp_noise_source,
    convolve_with_rirs,
    direct_path_rir,
    estimate_t60,
    image_method_rir,
    load_manifest,
    sample_scene,
    sample_scene_params,
    scene_manifest,
    speech_like_source,
    synthesize_mixture,
    write_manifest,
)
from conftest import TOY_RANGES, make_toy_scene


def test_anechoic_rir_is_single_spread_impulse():
    room = RoomSpec(6.0, 5.0, 3.0, 0.3)
    # distance chosen so the delay lands on the sample grid
    dist = 47.0 * 343.0 / 16000.0
    rir = image_method_rir(room, [2.0, 2.0, 1.5], [2.0 + dist, 2.0, 1.5],
                           reflection_coeff=0.0, max_order=0)
    peak = int(np.argmax(np.abs(rir.taps)))
    assert peak == 47
    assert rir.taps[peak] == pytest.approx(1.0 / (4.0 * np.pi * dist), rel=1e-6)
    # all energy concentrated in the interpolation kernel around the peak
    outside = np.concatenate([rir.taps[: peak - 41], rir.taps[peak + 42 :]])
    assert np.abs(outside).max() <= 1e-12


def test_one_meter_delay():
    room = RoomSpec(5.0, 4.0, 3.0, 0.2)
    rir = image_method_rir(room, [1.0, 2.0, 1.5], [2.0, 2.0, 1.5],
                           reflection_coeff=0.0, max_order=0)
    peak = int(np.argmax(np.abs(rir.taps)))
    assert abs(peak - round(16000.0 / 343.0)) <= 1


def test_first_arrival_matches_geometry_over_random_cases():
    rng = np.random.default_rng(0)
    for _ in range(100):
        dims = rng.uniform([3.0, 3.0, 2.5], [10.0, 10.0, 4.0])
        room = RoomSpec(*dims, t60=0.2)
        src = rng.uniform(0.5, dims - 0.5)
        mic = rng.uniform(0.5, dims - 0.5)
        dist = np.linalg.norm(src - mic)
        if dist < 0.1:
            continue
        rir = image_method_rir(room, src, mic, reflection_coeff=0.0, max_order=0)
        peak = int(np.argmax(np.abs(rir.taps)))
        assert abs(peak - dist / 343.0 * 16000.0) <= 1.0


@pytest.mark.parametrize("t60", [0.2, 0.5])
def test_schroeder_t60_tracks_target(t60):
    room = RoomSpec(6.0, 5.0, 3.0, t60)
    rir = image_method_rir(room, [2.0, 1.3, 1.4], [4.1, 3.6, 1.7])
    est = estimate_t60(rir)
    assert abs(est - t60) / t60 <= 0.3


def test_rir_rejects_outside_positions():
    room = RoomSpec(4.0, 4.0, 3.0, 0.2)
    with pytest.raises(ValueError):
        image_method_rir(room, [5.0, 1.0, 1.0], [1.0, 1.0, 1.0])
    with pytest.raises(ValueError):
        image_method_rir(room, [1.0, 1.0, 1.0], [1.0, 1.0, 1.0])


def test_direct_path_window():
    taps = np.zeros(400)
    taps[100] = 1.0
    out = direct_path_rir(Rir(taps))
    assert out.taps[100] == 1.0
    support = np.flatnonzero(np.abs(out.taps) > 0)
    assert support.min() >= 4 and support.max() <= 196

    spread = np.zeros(400)
    spread[100] = 1.0
    spread[90:110] += 0.01
    windowed = direct_path_rir(Rir(spread))
    assert np.array_equal(windowed.taps[4:197], spread[4:197])
    assert not np.any(windowed.taps[:4]) and not np.any(windowed.taps[197:])


def test_direct_path_keeps_anechoic_rir():
    room = RoomSpec(5.0, 4.0, 3.0, 0.2)
    rir = image_method_rir(room, [1.0, 2.0, 1.5], [2.5, 2.0, 1.5],
                           reflection_coeff=0.0, max_order=0)
    out = direct_path_rir(rir)
    assert np.array_equal(out.taps, rir.taps)


def test_direct_path_energy_bounded():
    room = RoomSpec(5.0, 4.0, 3.0, 0.4)
    rir = image_method_rir(room, [1.0, 2.0, 1.5], [3.5, 2.8, 1.7])
    out = direct_path_rir(rir)
    assert np.dot(out.taps, out.taps) <= np.dot(rir.taps, rir.taps)


def test_scene_params_deterministic():
    a = sample_scene_params(SceneRanges(), 123)
    b = sample_scene_params(SceneRanges(), 123)
    assert a.room == b.room
    assert np.array_equal(a.array.positions, b.array.positions)
    assert np.array_equal(a.source_positions, b.source_positions)
    assert (a.overlap_ratio, a.speaker_snr_db, a.noise_snr_db) == (
        b.overlap_ratio,
        b.speaker_snr_db,
        b.noise_snr_db,
    )


def test_sampled_quantities_stay_in_ranges():
    ranges = SceneRanges()
    for seed in range(300):
        s = sample_scene_params(ranges, seed, array_kind="adhoc")
        assert 3.0 <= s.room.length <= 10.0
        assert 3.0 <= s.room.width <= 10.0
        assert 2.5 <= s.room.height <= 4.0
        assert 0.1 <= s.room.t60 <= 0.5
        assert 0.0 <= s.overlap_ratio <= 1.0
        assert 0.0 <= s.speaker_snr_db <= 5.0
        assert 10.0 <= s.noise_snr_db <= 20.0
        assert 2 <= s.array.num_mics <= 6
        dims = s.room.dims
        for p in np.vstack([s.array.positions, s.source_positions]):
            assert np.all(p >= 0.5 - 1e-12) and np.all(p <= dims - 0.5 + 1e-12)


def test_circular_array_spacing():
    for seed in (1, 2, 3):
        s = sample_scene_params(SceneRanges(), seed, array_kind="circular")
        pos = s.array.positions
        M = pos.shape[0]
        expected = 0.10 * np.sin(np.pi / M)
        for i in range(M):
            gap = np.linalg.norm(pos[i] - pos[(i + 1) % M])
            assert gap == pytest.approx(expected, abs=1e-9)


def test_scene_too_small_for_margin_rejected():
    ranges = SceneRanges(room_length=(0.8, 0.9), room_width=(0.8, 0.9),
                         room_height=(0.8, 0.9))
    with pytest.raises((ValueError, RuntimeError)):
        sample_scene_params(ranges, 1, array_kind="adhoc")


def test_synthesize_full_overlap_means_no_shift():
    scene = sample_scene(TOY_RANGES, 55)
    dur, fs = scene.duration_s, scene.sample_rate
    scene.overlap_ratio = 1.0
    sources = [
        speech_like_source(dur, fs, (1, 1)),
        speech_like_source(dur, fs, (1, 2)),
        chirp_noise_source(dur, fs, (1, 3)),
    ]
    mixed = synthesize_mixture(scene, sources)
    s2 = mixed["dry_sources"][1]
    fitted = sources[1][: s2.shape[0]]
    # zero shift: the scaled source is exactly proportional to the original
    scale = np.dot(s2, fitted) / np.dot(fitted, fitted)
    assert np.allclose(s2, scale * fitted, atol=1e-12)


def test_synthesize_mixture_is_sum_of_images(toy_scene):
    _, mixed = toy_scene
    total = (
        mixed["reverberant_targets"][0].samples
        + mixed["reverberant_targets"][1].samples
        + mixed["noise_image"].samples
    )
    assert np.array_equal(mixed["mixture"].samples, total)


def test_synthesize_measured_relative_snr(toy_scene):
    scene, mixed = toy_scene
    s1, s2 = mixed["dry_sources"][:2]
    measured = 10.0 * np.log10(np.dot(s1, s1) / np.dot(s2, s2))
    assert measured == pytest.approx(scene.speaker_snr_db, abs=0.01)


def test_synthesize_measured_noise_snr(toy_scene):
    scene, mixed = toy_scene
    s1, s2, noise = mixed["dry_sources"]
    speech = s1 + s2
    measured = 10.0 * np.log10(np.dot(speech, speech) / np.dot(noise, noise))
    assert measured == pytest.approx(scene.noise_snr_db, abs=0.01)


def test_synthesize_rejects_silent_source(toy_scene):
    scene, _ = toy_scene
    dur, fs = scene.duration_s, scene.sample_rate
    sources = [
        speech_like_source(dur, fs, (2, 1)),
        np.zeros(int(dur * fs)),
        chirp_noise_source(dur, fs, (2, 3)),
    ]
    with pytest.raises(ValueError, match="silent"):
        synthesize_mixture(scene, sources)


def test_convolution_stage_is_linear(toy_scene):
    scene, _ = toy_scene
    rng = np.random.default_rng(3)
    x = rng.standard_normal(2000)
    one = convolve_with_rirs(x, scene.rirs[0], 2000)
    two = convolve_with_rirs(2.0 * x, scene.rirs[0], 2000)
    assert np.allclose(two, 2.0 * one, atol=1e-12)


def test_manifest_regenerates_scene(tmp_path):
    ranges = TOY_RANGES
    scene = sample_scene(ranges, 77, "circular")
    manifest = scene_manifest(scene, ranges, "circular", {"mixture": "mixture.wav"})
    path = tmp_path / "manifest.json"
    write_manifest(path, manifest)
    loaded = load_manifest(path)

    again = sample_scene(ranges, loaded["seed"], loaded["array_kind"])
    manifest2 = scene_manifest(again, ranges, "circular", {"mixture": "mixture.wav"})
    write_manifest(tmp_path / "manifest2.json", manifest2)
    assert (tmp_path / "manifest.json").read_bytes() == (tmp_path / "manifest2.json").read_bytes()


def test_synthetic_sources_deterministic_and_active():
    a = speech_like_source(2.0, 16000, (5, 1))
    b = speech_like_source(2.0, 16000, (5, 1))
    assert np.array_equal(a, b)
    assert np.sqrt(np.mean(a**2)) == pytest.approx(0.05, rel=1e-6)
    c = chirp_noise_source(2.0, 16000, (5, 2))
    assert np.sqrt(np.mean(c**2)) == pytest.approx(0.05, rel=1e-6)
