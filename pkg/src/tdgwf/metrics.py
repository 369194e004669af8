"""Signal quality metrics and permutation-invariant scoring.

Scores are in dB. Exact matches are capped at +200 dB so averages across
utterances stay finite.
"""

import itertools
from dataclasses import dataclass

import numpy as np

__all__ = ["EvalRecord", "si_sdr", "snr", "pit_score", "SCORE_CAP_DB"]

SCORE_CAP_DB = 200.0

_METRICS = {}


@dataclass
class EvalRecord:
    """Per-source scores under the best source-to-reference assignment."""

    metric: str
    per_source_db: list
    mean_db: float
    permutation: tuple

    def __post_init__(self):
        self.per_source_db = [float(v) for v in self.per_source_db]
        self.permutation = tuple(int(i) for i in self.permutation)
        if sorted(self.permutation) != list(range(len(self.permutation))):
            raise ValueError(f"permutation {self.permutation} is not a bijection")


def _as_mono(x) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if x.ndim == 2 and x.shape[0] == 1:
        x = x[0]
    if x.ndim != 1:
        raise ValueError(f"expected a mono waveform, got shape {x.shape}")
    return x


def _capped_ratio_db(signal_energy: float, error_energy: float) -> float:
    if error_energy == 0.0:
        return SCORE_CAP_DB
    return float(min(SCORE_CAP_DB, 10.0 * np.log10(signal_energy / error_energy)))


def si_sdr(est, ref) -> float:
    """Scale-invariant signal-to-distortion ratio in dB.

    The estimate is projected onto the reference,
    s = (<est, ref> / ||ref||^2) ref, and the score is
    10 log10(||s||^2 / ||est - s||^2). Invariant to rescaling the
    estimate; exact matches return the +200 dB cap.
    """
    est, ref = _as_mono(est), _as_mono(ref)
    if est.shape != ref.shape:
        raise ValueError(f"length mismatch: est {est.shape}, ref {ref.shape}")
    ref_energy = float(np.dot(ref, ref))
    if ref_energy == 0.0:
        raise ValueError("reference signal is zero; SI-SDR undefined")
    scale = float(np.dot(est, ref)) / ref_energy
    target = scale * ref
    err = est - target
    return _capped_ratio_db(float(np.dot(target, target)), float(np.dot(err, err)))


def snr(est, ref) -> float:
    """Signal-to-noise ratio 10 log10(||ref||^2 / ||est - ref||^2) in dB."""
    est, ref = _as_mono(est), _as_mono(ref)
    if est.shape != ref.shape:
        raise ValueError(f"length mismatch: est {est.shape}, ref {ref.shape}")
    err = est - ref
    return _capped_ratio_db(float(np.dot(ref, ref)), float(np.dot(err, err)))


_METRICS["si_sdr"] = si_sdr
_METRICS["snr"] = snr


def pit_score(ests, refs, metric: str = "si_sdr") -> EvalRecord:
    """Best-permutation score over all source-to-reference assignments.

    Evaluates the metric under every assignment (C <= 4, exhaustive) and
    returns the one maximizing the mean. ``permutation[i]`` is the
    reference index assigned to estimate i.
    """
    if metric not in _METRICS:
        raise ValueError(f"unknown metric {metric!r}; choose from {sorted(_METRICS)}")
    ests = [_as_mono(e) for e in ests]
    refs = [_as_mono(r) for r in refs]
    if len(ests) != len(refs):
        raise ValueError(f"source count mismatch: {len(ests)} estimates, {len(refs)} references")
    C = len(ests)
    if not 1 <= C <= 4:
        raise ValueError(f"exhaustive assignment supports 1..4 sources, got {C}")
    score = _METRICS[metric]

    # pre-score all pairs once, then search assignments
    table = np.array([[score(e, r) for r in refs] for e in ests])
    best_perm, best_mean = None, -np.inf
    for perm in itertools.permutations(range(C)):
        mean = float(np.mean([table[i, perm[i]] for i in range(C)]))
        if mean > best_mean:
            best_perm, best_mean = perm, mean
    per_source = [float(table[i, best_perm[i]]) for i in range(C)]
    return EvalRecord(metric, per_source, best_mean, best_perm)
