"""Time-domain generalized Wiener filtering on transformed frame features.

The pipeline: frame the mixture and the target estimate without an analysis
window, encode through a transform pair, split the feature dimension into V
contiguous groups (stacking the M channels inside every group), solve one
regularized least-squares filter per group over the whole utterance, apply
it, concatenate groups and decode back through overlap-add.

Group solves are independent and deterministic; they may run data-parallel.
"""

from dataclasses import dataclass, field

import numpy as np

from .signal import FrameStack, MultiChannelWaveform, frame, overlap_add
from .transforms import TransformPair, decode, encode

__all__ = [
    "GroupedFeatures",
    "WienerFilterBank",
    "group_split",
    "group_concat",
    "solve_group_wiener",
    "solve_filter_bank",
    "apply_filter_bank",
    "td_gwf",
    "save_filter_bank",
]

DEFAULT_EPS = 1e-6


@dataclass
class GroupedFeatures:
    """V feature groups, each (M*N/V, T) with channel-major row stacking.

    Group v holds the v-th contiguous N/V-dimensional slice of every
    channel: rows [0, N/V) come from channel 0, the next N/V rows from
    channel 1, and so on.
    """

    groups: list
    num_channels: int
    feature_dim: int

    @property
    def num_groups(self) -> int:
        return len(self.groups)

    @property
    def group_dim(self) -> int:
        return self.feature_dim // self.num_groups


@dataclass
class WienerFilterBank:
    """One filter matrix per group, each (M*N/V) x (N/V)."""

    filters: list
    regularization: float = DEFAULT_EPS

    @property
    def num_groups(self) -> int:
        return len(self.filters)

    @property
    def coefficient_count(self) -> int:
        """Total coefficients across groups: V * (M*N/V) * (N/V) = M*N^2/V."""
        return int(sum(w.size for w in self.filters))


def group_split(features: np.ndarray, num_groups: int) -> GroupedFeatures:
    """Split (M, N, T) features into V non-overlapping groups along N.

    V must divide N. Channels are stacked channel-major inside each group.
    """
    features = np.asarray(features, dtype=np.float64)
    if features.ndim != 3:
        raise ValueError(f"expected (M, N, T) features, got shape {features.shape}")
    M, N, T = features.shape
    if num_groups < 1 or N % num_groups != 0:
        raise ValueError(f"group count {num_groups} must divide feature dim {N}")
    g = N // num_groups
    groups = [
        features[:, v * g : (v + 1) * g, :].reshape(M * g, T).copy()
        for v in range(num_groups)
    ]
    return GroupedFeatures(groups, M, N)


def group_concat(groups: list) -> np.ndarray:
    """Concatenate single-channel groups of (N/V, T) back into (N, T)."""
    return np.concatenate(list(groups), axis=0)


def solve_group_wiener(
    group_obs: np.ndarray,
    group_target: np.ndarray,
    eps: float = DEFAULT_EPS,
    group_index: int = 0,
) -> np.ndarray:
    """Closed-form MMSE filter for one group: argmin ||W^T Y - X||_F.

    Solves (Y Y^H + eps * (tr(Y Y^H)/d) * I) W = Y X^H as a linear system
    (never through an explicit inverse), with d the number of stacked
    rows in Y. eps defaults to 1e-6; eps = 0 is allowed and raises on a
    singular system, naming the group.

    Arguments:
        group_obs: Y, shape (d, T), real or complex
        group_target: X, shape (g, T)
    Return:
        W, shape (d, g)
    """
    Y = np.atleast_2d(np.asarray(group_obs))
    X = np.atleast_2d(np.asarray(group_target))
    if Y.shape[1] != X.shape[1]:
        raise ValueError(f"frame counts differ: Y has {Y.shape[1]}, X has {X.shape[1]}")
    if not (np.all(np.isfinite(Y)) and np.all(np.isfinite(X))):
        raise ValueError("non-finite entries in group features")
    if eps < 0:
        raise ValueError(f"regularization must be >= 0, got {eps}")

    cov = Y @ Y.conj().T
    cross = Y @ X.conj().T
    d = cov.shape[0]
    if eps > 0:
        cov = cov + (eps * np.trace(cov).real / d) * np.eye(d)
    try:
        return np.linalg.solve(cov, cross)
    except np.linalg.LinAlgError as err:
        raise np.linalg.LinAlgError(
            f"singular covariance in group {group_index} (eps={eps}); "
            f"increase eps or supply more frames"
        ) from err


def solve_filter_bank(
    grouped_obs: GroupedFeatures,
    grouped_target: GroupedFeatures,
    eps: float = DEFAULT_EPS,
) -> WienerFilterBank:
    """Solve every group's filter against the single-channel target groups."""
    if grouped_obs.num_groups != grouped_target.num_groups:
        raise ValueError("observation and target group counts differ")
    if grouped_target.num_channels != 1:
        raise ValueError("target features must be single-channel")
    filters = [
        solve_group_wiener(Yv, Xv, eps=eps, group_index=v)
        for v, (Yv, Xv) in enumerate(zip(grouped_obs.groups, grouped_target.groups))
    ]
    return WienerFilterBank(filters, regularization=eps)


def apply_filter_bank(grouped: GroupedFeatures, bank: WienerFilterBank) -> np.ndarray:
    """Apply W_v^T to every group and concatenate: returns (1, N, T)."""
    if grouped.num_groups != bank.num_groups:
        raise ValueError(
            f"group count mismatch: features {grouped.num_groups}, bank {bank.num_groups}"
        )
    outputs = []
    for v, (Yv, Wv) in enumerate(zip(grouped.groups, bank.filters)):
        if Wv.shape[0] != Yv.shape[0]:
            raise ValueError(
                f"group {v}: filter rows {Wv.shape[0]} != feature rows {Yv.shape[0]}"
            )
        outputs.append(Wv.conj().T @ Yv)
    stacked = group_concat(outputs)
    return stacked[None, :, :]


def td_gwf(
    mixture: MultiChannelWaveform,
    soi_estimate: MultiChannelWaveform,
    transform: TransformPair,
    num_groups: int = 1,
    eps: float = DEFAULT_EPS,
    hop: int | None = None,
    return_bank: bool = False,
):
    """Beamform a multi-channel mixture against a single-channel estimate.

    Frames are taken without an analysis window at hop = P/4 by default.
    The output is a single-channel waveform of the same length as the
    input. With ``return_bank`` the solved filter bank is returned too.
    """
    if soi_estimate.num_channels != 1:
        raise ValueError("the target estimate must be single-channel")
    if mixture.num_samples != soi_estimate.num_samples:
        raise ValueError(
            f"length mismatch: mixture {mixture.num_samples}, "
            f"estimate {soi_estimate.num_samples}"
        )
    P = transform.window_len
    obs_stack = frame(mixture, P, hop)
    est_stack = frame(soi_estimate, P, hop)

    obs_feat = encode(obs_stack, transform)
    est_feat = encode(est_stack, transform)

    grouped_obs = group_split(obs_feat, num_groups)
    grouped_est = group_split(est_feat, num_groups)

    bank = solve_filter_bank(grouped_obs, grouped_est, eps=eps)
    filtered = apply_filter_bank(grouped_obs, bank)

    out_stack = decode(filtered, transform, obs_stack.hop)
    out = overlap_add(out_stack, None, out_len=mixture.num_samples,
                      sample_rate=mixture.sample_rate)
    if return_bank:
        return out, bank
    return out


def save_filter_bank(path, bank: WienerFilterBank):
    """Dump a filter bank to a binary .npz matrix file for inspection."""
    arrays = {f"w{v:04d}": w for v, w in enumerate(bank.filters)}
    np.savez(path, regularization=np.float64(bank.regularization), **arrays)
