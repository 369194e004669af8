"""Multi-channel Wiener beamforming toolkit.

Time-domain generalized Wiener filtering on learnable-style signal
transforms with group-split MMSE solving, frequency-domain Wiener
baselines, an image-method scene simulator, separation metrics and a
sequential separate/beamform/refine pipeline.
"""

from .acoustics import (
    ArrayGeometry,
    Rir,
    RoomSpec,
    SceneInstance,
    SceneRanges,
    chirp_noise_source,
    direct_path_rir,
    estimate_t60,
    image_method_rir,
    sample_scene,
    sample_scene_params,
    speech_like_source,
    synthesize_mixture,
)
from .bench import BenchConfig, check_trends, run_oracle_bench
from .fdbeam import (
    FreqFilterBank,
    PmwfConfig,
    Spectrogram,
    apply_freq_filter,
    fd_mcwf,
    fd_pmwf,
    istft,
    stft,
)
from .gwf import (
    GroupedFeatures,
    WienerFilterBank,
    apply_filter_bank,
    group_concat,
    group_split,
    solve_filter_bank,
    solve_group_wiener,
    td_gwf,
)
from .metrics import EvalRecord, pit_score, si_sdr, snr
from .pipeline import (
    BeamformerConfig,
    PipelineConfig,
    SeparatorSpec,
    make_beamformer,
    run_sequential,
)
from .signal import (
    FrameStack,
    MultiChannelWaveform,
    frame,
    hann,
    overlap_add,
    read_wav,
    write_wav,
)
from .transforms import (
    ComplexTransform,
    HouseholderParams,
    TransformPair,
    dft_transform,
    encode,
    decode,
    householder_transform,
    identity_transform,
    random_householder_params,
    unconstrained_transform,
)

__version__ = "0.1.0"
