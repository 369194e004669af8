import numpy as np
import pytest

from tdgwf.signal import MultiChannelWaveform, frame, overlap_add
from tdgwf.transforms import (
    HouseholderParams,
    TransformPair,
    decode,
    dft_transform,
    encode,
    householder_transform,
    identity_transform,
    load_transform,
    random_householder_params,
    save_transform,
    unconstrained_transform,
)


def test_identity_transform_basics():
    t = identity_transform(4)
    assert t.kind == "identity"
    assert np.array_equal(t.B, np.eye(4))
    assert np.array_equal(t.D, np.eye(4))
    assert np.count_nonzero(t.B) == 4


def test_identity_encode_is_reshape():
    rng = np.random.default_rng(0)
    x = rng.standard_normal(32)
    stack = frame(MultiChannelWaveform(x), 8, 2)
    t = identity_transform(8)
    feat = encode(stack, t)
    assert np.array_equal(feat, stack.frames.transpose(0, 2, 1))
    back = decode(feat, t, stack.hop)
    assert np.array_equal(back.frames, stack.frames)


def test_householder_single_reflection():
    t = householder_transform(HouseholderParams(np.array([[1.0, 0.0]])))
    assert np.allclose(t.B, [[-1.0, 0.0], [0.0, 1.0]])
    assert np.array_equal(t.D, t.B.T)


def test_householder_orthonormality_over_seeded_draws():
    for seed in range(50):
        K = [1, 2, 4][seed % 3]
        t = householder_transform(random_householder_params(16, K, seed))
        assert np.abs(t.B.T @ t.B - np.eye(16)).max() <= 1e-12
        assert np.abs(t.B @ t.D - np.eye(16)).max() <= 1e-10


def test_householder_determinant_sign():
    for K in (1, 2, 3, 4):
        t = householder_transform(random_householder_params(12, K, seed=K))
        assert np.linalg.det(t.B) == pytest.approx((-1.0) ** K, abs=1e-8)


def test_householder_rejects_zero_vector():
    with pytest.raises(ValueError):
        HouseholderParams(np.zeros((1, 4)))


def test_unconstrained_deterministic():
    a = unconstrained_transform(32, seed=9)
    b = unconstrained_transform(32, seed=9)
    assert np.array_equal(a.B, b.B)
    assert np.array_equal(a.D, b.D)
    c = unconstrained_transform(32, seed=10)
    assert not np.array_equal(a.B, c.B)


def test_unconstrained_is_not_a_reconstruction_pair():
    t = unconstrained_transform(16, seed=1)
    assert np.abs(t.B @ t.D - np.eye(16)).max() > 1e-2


def test_unconstrained_entry_statistics():
    t = unconstrained_transform(512, seed=123)
    assert abs(t.B.mean()) <= 0.01
    assert t.B.std() == pytest.approx(1.0 / np.sqrt(512), rel=0.05)


def test_dft_p2():
    t = dft_transform(2)
    assert np.allclose(t.forward, [[1, 1], [1, -1]])


def test_dft_inverse():
    t = dft_transform(16)
    assert np.abs(t.forward @ t.inverse - np.eye(16)).max() <= 1e-12


def test_dft_impulse_is_flat():
    t = dft_transform(8)
    impulse = np.zeros(8)
    impulse[0] = 1.0
    assert np.allclose(impulse @ t.forward, np.ones(8))


def test_encode_linearity():
    rng = np.random.default_rng(2)
    t = householder_transform(random_householder_params(8, 2, 5))
    sa = frame(MultiChannelWaveform(rng.standard_normal((2, 40))), 8, 2)
    sb = frame(MultiChannelWaveform(rng.standard_normal((2, 40))), 8, 2)
    both = type(sa)(sa.frames + sb.frames, sa.hop)
    assert np.allclose(encode(both, t), encode(sa, t) + encode(sb, t), atol=1e-12)


def test_householder_frame_roundtrip():
    rng = np.random.default_rng(4)
    t = householder_transform(random_householder_params(16, 2, 8))
    stack = frame(MultiChannelWaveform(rng.standard_normal(128)), 16, 4)
    back = decode(encode(stack, t), t, stack.hop)
    assert np.abs(back.frames - stack.frames).max() <= 1e-10


def test_householder_full_roundtrip_through_overlap_add():
    rng = np.random.default_rng(6)
    x = rng.standard_normal(300)
    t = householder_transform(random_householder_params(32, 2, 17))
    stack = frame(MultiChannelWaveform(x), 32, 8)
    back = overlap_add(decode(encode(stack, t), t, stack.hop), out_len=300).samples[0]
    assert np.linalg.norm(back - x) / np.linalg.norm(x) <= 1e-10


def test_encode_rejects_mismatched_window():
    stack = frame(MultiChannelWaveform(np.ones(32)), 8, 2)
    with pytest.raises(ValueError):
        encode(stack, identity_transform(16))


@pytest.mark.parametrize("maker", [
    lambda: identity_transform(6),
    lambda: householder_transform(random_householder_params(6, 2, 3)),
    lambda: unconstrained_transform(6, 4, seed=2),
])
def test_transform_file_roundtrip(tmp_path, maker):
    t = maker()
    path = tmp_path / "t.txt"
    save_transform(path, t)
    back = load_transform(path)
    assert back.kind == t.kind
    assert np.array_equal(back.B, t.B)
    assert np.array_equal(back.D, t.D)


def test_transform_pair_validates_shapes():
    with pytest.raises(ValueError):
        TransformPair(np.ones((4, 3)), np.ones((4, 3)), "unconstrained")
    with pytest.raises(ValueError):
        TransformPair(np.ones((2, 2)), np.ones((2, 2)), "mystery")
