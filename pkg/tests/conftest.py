import numpy as np
import pytest

from tdgwf.acoustics import (
    SceneRanges,
    chirp_noise_source,
    sample_scene,
    speech_like_source,
    synthesize_mixture,
)

# compact rooms and short utterances keep module-level tests quick
TOY_RANGES = SceneRanges(
    room_length=(5.0, 7.0),
    room_width=(4.0, 6.0),
    room_height=(2.6, 3.2),
    t60=(0.15, 0.25),
    duration_s=2.0,
)


def make_toy_scene(seed: int, ranges: SceneRanges = TOY_RANGES, array_kind="circular",
                   num_mics=None):
    scene = sample_scene(ranges, seed, array_kind, num_mics)
    dur, fs = ranges.duration_s, ranges.sample_rate
    sources = [
        speech_like_source(dur, fs, (seed, 1)),
        speech_like_source(dur, fs, (seed, 2)),
        chirp_noise_source(dur, fs, (seed, 3)),
    ]
    return scene, synthesize_mixture(scene, sources)


@pytest.fixture(scope="session")
def toy_scene():
    return make_toy_scene(42)
