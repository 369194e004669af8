"""Command-line front end: scene simulation, beamforming, oracle benchmark.

Option resolution order: explicit flag > config file entry > TDGWF_*
environment variable > built-in default. Config files are JSON with the
same keys as the long flag names (dashes become underscores).
"""

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from .acoustics import (
    SceneRanges,
    chirp_noise_source,
    sample_scene,
    scene_manifest,
    speech_like_source,
    synthesize_mixture,
    write_manifest,
)
from .bench import (
    BenchConfig,
    bench_manifest,
    check_trends,
    config_from_manifest,
    rows_to_csv,
    rows_to_markdown,
    run_oracle_bench,
)
from .fdbeam import apply_freq_filter, fd_mcwf, istft, stft
from .gwf import save_filter_bank, td_gwf
from .pipeline import window_samples
from .signal import read_wav, write_wav
from .transforms import identity_transform

ENV_PREFIX = "TDGWF_"


def _env(name, cast, default):
    raw = os.environ.get(ENV_PREFIX + name.upper().replace("-", "_"))
    if raw is None:
        return default
    return cast(raw)


def _resolve(args, config, key, cast, default):
    """flag > config > environment > default"""
    flag = getattr(args, key, None)
    if flag is not None:
        return flag
    if config and key in config:
        return cast(config[key])
    return _env(key, cast, default)


def _load_config(path):
    if path is None:
        return {}
    with open(path) as fh:
        return json.load(fh)


def _progress(msg):
    print(msg, file=sys.stderr, flush=True)


def cmd_simulate(args) -> int:
    config = _load_config(args.config)
    seed = _resolve(args, config, "seed", int, 1)
    scenes = _resolve(args, config, "scenes", int, 1)
    array = _resolve(args, config, "array", str, "circular")
    mics = _resolve(args, config, "mics", int, None)
    out_dir = Path(_resolve(args, config, "out", str, "scenes_out"))
    ranges = SceneRanges()

    out_dir.mkdir(parents=True, exist_ok=True)
    for i in range(scenes):
        scene_seed = seed * 100000 + i
        scene = sample_scene(ranges, scene_seed, array, mics)
        sources = [
            speech_like_source(ranges.duration_s, ranges.sample_rate, (scene_seed, 1)),
            speech_like_source(ranges.duration_s, ranges.sample_rate, (scene_seed, 2)),
            chirp_noise_source(ranges.duration_s, ranges.sample_rate, (scene_seed, 3)),
        ]
        mixed = synthesize_mixture(scene, sources)
        scene_dir = out_dir / f"scene_{i:03d}"
        scene_dir.mkdir(parents=True, exist_ok=True)
        paths = {}
        write_wav(scene_dir / "mixture.wav", mixed["mixture"])
        paths["mixture"] = "mixture.wav"
        for c in range(2):
            write_wav(scene_dir / f"speaker{c + 1}_reverb.wav", mixed["reverberant_targets"][c])
            write_wav(scene_dir / f"speaker{c + 1}_direct.wav", mixed["direct_targets"][c])
            paths[f"speaker{c + 1}_reverb"] = f"speaker{c + 1}_reverb.wav"
            paths[f"speaker{c + 1}_direct"] = f"speaker{c + 1}_direct.wav"
        write_wav(scene_dir / "noise_image.wav", mixed["noise_image"])
        paths["noise_image"] = "noise_image.wav"
        write_manifest(scene_dir / "manifest.json", scene_manifest(scene, ranges, array, paths))
        _progress(f"wrote {scene_dir} ({scene.array.num_mics} mics)")
    return 0


def cmd_oracle_bench(args) -> int:
    config = _load_config(args.config)
    if config.get("command") == "oracle-bench":
        cfg = config_from_manifest(config)
        if args.seed is not None:
            cfg.seed = args.seed
        if args.scenes is not None:
            cfg.num_scenes = args.scenes
    else:
        cfg = BenchConfig(
            seed=_resolve(args, config, "seed", int, 1),
            num_scenes=_resolve(args, config, "scenes", int, 20),
            array_kind=_resolve(args, config, "array", str, "circular"),
            num_mics=_resolve(args, config, "mics", int, None),
            eps=_resolve(args, config, "eps", float, 1e-6),
        )
        if config.get("fd_windows_ms"):
            cfg.fd_windows_ms = tuple(float(w) for w in config["fd_windows_ms"])
        if config.get("td_configs"):
            cfg.td_configs = tuple((float(w), int(v)) for w, v in config["td_configs"])
        if "pmwf_betas" in config:
            cfg.pmwf_betas = tuple(float(b) for b in config["pmwf_betas"])
        if "pmwf_window_ms" in config:
            cfg.pmwf_window_ms = float(config["pmwf_window_ms"])
        if "duration_s" in config:
            cfg.ranges.duration_s = float(config["duration_s"])

    out_dir = Path(_resolve(args, config, "out", str, "bench_out"))
    out_dir.mkdir(parents=True, exist_ok=True)

    rows = run_oracle_bench(cfg, progress=_progress if not args.quiet else None)
    (out_dir / "summary.csv").write_text(rows_to_csv(rows))
    (out_dir / "summary.md").write_text(rows_to_markdown(rows))
    write_manifest(out_dir / "bench_manifest.json", bench_manifest(cfg))
    print(rows_to_markdown(rows))

    if args.assert_trends:
        violations = check_trends(rows)
        if violations:
            for v in violations:
                print(f"TREND VIOLATION: {v}", file=sys.stderr)
            return 1
        print("all trend assertions hold")
    return 0


def cmd_beamform(args) -> int:
    config = _load_config(args.config)
    beamformer = _resolve(args, config, "beamformer", str, "td_gwf")
    window_ms = _resolve(args, config, "window_ms", float, 8.0)
    groups = _resolve(args, config, "groups", int, 1)
    eps = _resolve(args, config, "eps", float, 1e-6)

    for path in (args.mixture, args.estimate):
        if not Path(path).exists():
            print(f"error: input file not found: {path}", file=sys.stderr)
            return 1
    mixture = read_wav(args.mixture)
    estimate = read_wav(args.estimate)
    if estimate.num_channels != 1:
        print(
            f"error: estimate must be mono, got {estimate.num_channels} channels "
            f"in {args.estimate}",
            file=sys.stderr,
        )
        return 1
    if estimate.num_samples != mixture.num_samples:
        print(
            f"error: length mismatch: mixture has {mixture.num_samples} samples, "
            f"estimate has {estimate.num_samples}",
            file=sys.stderr,
        )
        return 1

    if beamformer == "td_gwf":
        P = window_samples(window_ms, mixture.sample_rate)
        transform = identity_transform(P)
        out, bank = td_gwf(mixture, estimate, transform, groups, eps, return_bank=True)
        if args.dump_bank:
            save_filter_bank(args.dump_bank, bank)
    elif beamformer == "fd_mcwf":
        fft_size = window_samples(window_ms, mixture.sample_rate)
        spec = stft(mixture, fft_size)
        bank = fd_mcwf(spec, stft(estimate, fft_size), eps)
        out = istft(apply_freq_filter(spec, bank), mixture.num_samples,
                    sample_rate=mixture.sample_rate)
    elif beamformer == "fd_pmwf":
        print(
            "error: fd_pmwf needs oracle multi-channel target and interference "
            "signals; it is only available inside the oracle benchmark",
            file=sys.stderr,
        )
        return 1
    else:
        print(f"error: unknown beamformer {beamformer!r}", file=sys.stderr)
        return 1

    write_wav(args.output, out)
    _progress(f"wrote {args.output}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tdgwf",
        description="multi-channel Wiener beamforming toolkit",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="sample scenes and write WAVs + manifests")
    sim.add_argument("--config", help="JSON config file")
    sim.add_argument("--seed", type=int)
    sim.add_argument("--scenes", type=int)
    sim.add_argument("--array", choices=("circular", "adhoc"))
    sim.add_argument("--mics", type=int)
    sim.add_argument("--out")
    sim.set_defaults(func=cmd_simulate)

    bench = sub.add_parser("oracle-bench", help="run the oracle beamformer grid")
    bench.add_argument("--config", help="JSON config or a previous bench manifest")
    bench.add_argument("--seed", type=int)
    bench.add_argument("--scenes", type=int)
    bench.add_argument("--array", choices=("circular", "adhoc"))
    bench.add_argument("--mics", type=int)
    bench.add_argument("--eps", type=float)
    bench.add_argument("--out")
    bench.add_argument("--assert-trends", action="store_true",
                       help="exit nonzero if any expected ordering is violated")
    bench.add_argument("--quiet", action="store_true")
    bench.set_defaults(func=cmd_oracle_bench)

    bf = sub.add_parser("beamform", help="beamform a mixture WAV against an estimate WAV")
    bf.add_argument("mixture", help="multi-channel mixture WAV")
    bf.add_argument("estimate", help="mono target-estimate WAV")
    bf.add_argument("-o", "--output", default="beamformed.wav")
    bf.add_argument("--config", help="JSON config file")
    bf.add_argument("--beamformer", choices=("td_gwf", "fd_mcwf", "fd_pmwf"))
    bf.add_argument("--window-ms", dest="window_ms", type=float)
    bf.add_argument("--groups", type=int)
    bf.add_argument("--eps", type=float)
    bf.add_argument("--dump-bank", help="write the solved filter bank to this .npz path")
    bf.set_defaults(func=cmd_beamform)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
