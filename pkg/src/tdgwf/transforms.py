"""Analysis/synthesis transform pairs applied to waveform frames.

A transform pair maps P-sample frames to N-dimensional features through a
real matrix B (P x N) and back through D (N x P), using the row-vector
convention: feature = frame @ B, frame = feature @ D.

Three families are provided: identity (B = D = I), orthonormal pairs built
from products of Householder reflections (D = B^T, exact reconstruction),
and unconstrained seeded Gaussian matrices (no reconstruction guarantee).
A complex DFT matrix pair backs the frequency-domain path.
"""

from dataclasses import dataclass

import numpy as np

from .signal import FrameStack

__all__ = [
    "TransformPair",
    "HouseholderParams",
    "ComplexTransform",
    "identity_transform",
    "householder_transform",
    "random_householder_params",
    "unconstrained_transform",
    "dft_transform",
    "encode",
    "decode",
    "save_transform",
    "load_transform",
]

KINDS = ("identity", "householder", "unconstrained")


@dataclass
class TransformPair:
    """Analysis matrix B (P x N), synthesis matrix D (N x P) and a kind tag."""

    B: np.ndarray
    D: np.ndarray
    kind: str

    def __post_init__(self):
        self.B = np.asarray(self.B, dtype=np.float64)
        self.D = np.asarray(self.D, dtype=np.float64)
        if self.kind not in KINDS:
            raise ValueError(f"unknown transform kind {self.kind!r}")
        if self.B.ndim != 2 or self.D.ndim != 2:
            raise ValueError("B and D must be matrices")
        if self.B.shape != self.D.shape[::-1]:
            raise ValueError(f"inconsistent shapes B {self.B.shape}, D {self.D.shape}")
        if not (np.all(np.isfinite(self.B)) and np.all(np.isfinite(self.D))):
            raise ValueError("transform matrices contain non-finite entries")

    @property
    def window_len(self) -> int:
        return self.B.shape[0]

    @property
    def feature_dim(self) -> int:
        return self.B.shape[1]


@dataclass
class HouseholderParams:
    """K reflection vectors of length P, one per Householder factor."""

    vectors: np.ndarray

    def __post_init__(self):
        self.vectors = np.atleast_2d(np.asarray(self.vectors, dtype=np.float64))
        if self.vectors.shape[0] < 1:
            raise ValueError("need at least one reflection vector")
        norms = np.linalg.norm(self.vectors, axis=1)
        if np.any(norms == 0.0):
            raise ValueError("reflection vectors must be nonzero")

    @property
    def num_reflections(self) -> int:
        return self.vectors.shape[0]

    @property
    def window_len(self) -> int:
        return self.vectors.shape[1]


@dataclass
class ComplexTransform:
    """Forward/inverse complex matrix pair (DFT analysis for the FD path)."""

    forward: np.ndarray
    inverse: np.ndarray


def identity_transform(window_len: int) -> TransformPair:
    """B = D = I, features are the raw windowed frames."""
    if window_len < 1:
        raise ValueError("window length must be >= 1")
    eye = np.eye(window_len)
    return TransformPair(eye, eye.copy(), "identity")


def householder_transform(params: HouseholderParams) -> TransformPair:
    """Orthonormal pair from a product of Householder reflections.

    Each factor is V_k = I - 2 * v_k v_k^T / ||v_k||^2; the analysis matrix
    is B = V_1 V_2 ... V_K and the synthesis matrix is D = B^T = B^{-1},
    so the pair reconstructs frames exactly.
    """
    P = params.window_len
    B = np.eye(P)
    for v in params.vectors:
        u = v / np.linalg.norm(v)
        # B <- B @ (I - 2 u u^T), rank-1 update instead of a dense product
        B -= 2.0 * np.outer(B @ u, u)
    return TransformPair(B, B.T.copy(), "householder")


def random_householder_params(window_len: int, num_reflections: int = 2, seed: int = 0) -> HouseholderParams:
    """Seeded standard-normal reflection vectors; default two reflections."""
    rng = np.random.default_rng(seed)
    return HouseholderParams(rng.standard_normal((num_reflections, window_len)))


def unconstrained_transform(window_len: int, feature_dim: int | None = None, seed: int = 0) -> TransformPair:
    """Seeded Gaussian B and D scaled by 1/sqrt(P); square by default.

    No reconstruction property is implied: B @ D != I in general.
    """
    if feature_dim is None:
        feature_dim = window_len
    if feature_dim < 1:
        raise ValueError("feature dimension must be >= 1")
    rng = np.random.default_rng(seed)
    scale = 1.0 / np.sqrt(window_len)
    B = rng.standard_normal((window_len, feature_dim)) * scale
    D = rng.standard_normal((feature_dim, window_len)) * scale
    return TransformPair(B, D, "unconstrained")


def dft_transform(window_len: int) -> ComplexTransform:
    """DFT matrix pair: forward[n, f] = exp(-2i pi n f / P)."""
    if window_len < 2:
        raise ValueError("window length must be >= 2")
    n = np.arange(window_len)
    forward = np.exp(-2j * np.pi * np.outer(n, n) / window_len)
    inverse = forward.conj().T / window_len
    return ComplexTransform(forward, inverse)


def encode(stack: FrameStack, transform: TransformPair) -> np.ndarray:
    """Apply the analysis matrix to every frame.

    Arguments:
        stack: frames of shape (M, T, P)
        transform: pair with window length P
    Return:
        feature tensor of shape (M, N, T)
    """
    if stack.window_len != transform.window_len:
        raise ValueError(
            f"frame length {stack.window_len} != transform window {transform.window_len}"
        )
    # per frame: feature = frame @ B
    return np.einsum("mtp,pn->mnt", stack.frames, transform.B)


def decode(features: np.ndarray, transform: TransformPair, hop: int) -> FrameStack:
    """Map features back to frames through the synthesis matrix D."""
    features = np.asarray(features, dtype=np.float64)
    if features.ndim != 3:
        raise ValueError(f"expected (M, N, T) features, got shape {features.shape}")
    if features.shape[1] != transform.feature_dim:
        raise ValueError(
            f"feature dim {features.shape[1]} != transform dim {transform.feature_dim}"
        )
    frames = np.einsum("mnt,np->mtp", features, transform.D)
    return FrameStack(frames, hop)


def save_transform(path, transform: TransformPair):
    """Write a transform as a text matrix file.

    Header line: ``kind P N``; then P rows of B and N rows of D, row-major.
    """
    with open(path, "w") as fh:
        fh.write(f"{transform.kind} {transform.window_len} {transform.feature_dim}\n")
        np.savetxt(fh, transform.B, fmt="%.17g")
        np.savetxt(fh, transform.D, fmt="%.17g")


def load_transform(path) -> TransformPair:
    with open(path) as fh:
        kind, p_str, n_str = fh.readline().split()
        P, N = int(p_str), int(n_str)
        rows = [np.array(line.split(), dtype=np.float64) for line in fh if line.strip()]
    if len(rows) != P + N:
        raise ValueError(f"malformed transform file {path}: expected {P + N} matrix rows")
    B = np.vstack(rows[:P])
    D = np.vstack(rows[P:])
    return TransformPair(B, D, kind)
