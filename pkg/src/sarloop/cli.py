"""Command-line frontend chaining the processing stages.

Stages and their file hand-offs:

    simulate    scene + waypoints -> scanlog.bin, truth.pgm
    backproject scanlog.bin      -> sar.cpx (complex image dump)
    post        sar.cpx          -> image.pgm, image.f32
    match       two images       -> features_*.bin, matches.tsv
    loopclose   two images       -> features_*.bin, loopclose.tsv
    pipeline    all of the above against the bundled stage outputs

Every command is deterministic for fixed inputs, config, and seed; outputs
are refused if they already exist unless --overwrite is given. A default
config file may be named in the SARLOOP_CONFIG environment variable.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

import numpy as np

from . import imgpost
from .backprojection import build_sar, derive_grid
from .features import detect_and_describe, save_feature_set, load_feature_set
from .loopclose import (match_feature_sets, validate_loop, write_report_table)
from .radar import compress_scan
from .runconfig import RunConfig, load_config
from .scanlog import load_scan_log, log_from_simulation
from .simulate import (TrajectorySpec, load_scene, load_trajectory,
                       noise_std_for_snr, render_scene)

PROG = "sarloop"


def _ensure_fresh(paths: list[Path], overwrite: bool) -> None:
    clashes = [str(p) for p in paths if p.exists()]
    if clashes and not overwrite:
        raise ValueError("refusing to overwrite existing outputs "
                         f"(pass --overwrite): {', '.join(clashes)}")


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _load_cfg(args) -> RunConfig:
    config_path = args.config or os.environ.get("SARLOOP_CONFIG")
    overrides = list(args.set or [])
    if args.seed is not None:
        overrides.append(f"seed={args.seed}")
    return load_config(config_path, overrides)


def cmd_simulate(args) -> int:
    cfg = _load_cfg(args)
    out = _out_dir(args)
    log_path, truth_path = out / "scanlog.bin", out / "truth.pgm"
    _ensure_fresh([log_path, truth_path], args.overwrite)

    scene = load_scene(args.scene)
    waypoints = load_trajectory(args.trajectory)
    spec = TrajectorySpec(tuple(waypoints), cfg.scan_spacing_m,
                          radar_mounts=cfg.mounts_rad())
    radar = cfg.radar_config()
    clean, _ = render_scene(scene, spec, radar, _unit_grid(cfg))
    grid = derive_grid([s.pose for s in clean], radar, cfg.grid_resolution_m)
    std = noise_std_for_snr(clean, cfg.snr_db)
    scans, truth = render_scene(scene, spec, radar, grid, noise_std=std,
                                rng=np.random.default_rng(cfg.seed))
    from .scanlog import save_scan_log
    save_scan_log(log_from_simulation(scans, radar, cfg.mounts_rad()), log_path)
    imgpost.write_pgm(
        imgpost.GrayImage(truth.astype(np.uint8) * 255, grid.resolution_m),
        truth_path, origin_m=grid.origin_m)
    print(f"wrote {log_path} ({len(scans)} scans) and {truth_path}")
    return 0


def _unit_grid(cfg: RunConfig):
    # Placeholder grid for the noiseless pre-pass (truth grid is ignored).
    from .backprojection import ImageGrid
    return ImageGrid(1, 1, cfg.grid_resolution_m)


def cmd_backproject(args) -> int:
    cfg = _load_cfg(args)
    out = _out_dir(args)
    sar_path = out / "sar.cpx"
    _ensure_fresh([sar_path], args.overwrite)

    log = load_scan_log(args.scanlog)
    if not log.records:
        raise ValueError(f"{args.scanlog}: scan log has no records")
    pulse = cfg.pulse()
    pairs = log.to_raw_scans()
    compressed = [compress_scan(raw, pulse) for raw, _ in pairs]
    configs = [c for _, c in pairs]
    grid = derive_grid([s.pose for s in compressed], log.config,
                       cfg.grid_resolution_m)
    sar = build_sar(compressed, configs, grid)
    imgpost.write_sar_dump(sar, sar_path)
    print(f"wrote {sar_path} ({grid.width_px}x{grid.height_px} px, "
          f"{sar.scan_count} scans)")
    return 0


def cmd_post(args) -> int:
    cfg = _load_cfg(args)
    out = _out_dir(args)
    pgm_path, dump_path = out / "image.pgm", out / "image.f32"
    _ensure_fresh([pgm_path, dump_path], args.overwrite)

    sar = imgpost.read_sar_dump(args.sar)
    enhanced = imgpost.gaussian_blur(imgpost.positive_image(sar), cfg.blur_sigma_px)
    imgpost.write_float_dump(enhanced, dump_path)
    imgpost.write_pgm(imgpost.quantize(enhanced), pgm_path,
                      origin_m=sar.grid.origin_m)
    print(f"wrote {pgm_path} and {dump_path}")
    return 0


def _match_images(args, cfg: RunConfig, out: Path, with_decision: bool) -> int:
    img_a, _ = imgpost.read_pgm(args.image_a)
    img_b, _ = imgpost.read_pgm(args.image_b)
    if img_a.resolution_m != img_b.resolution_m:
        raise ValueError(f"image resolutions differ: {img_a.resolution_m} "
                         f"vs {img_b.resolution_m}")
    det_cfgs = cfg.detector_configs()
    if with_decision and len(det_cfgs) < 2:
        raise ValueError("loop validation needs two detectors "
                         f"(configured: {', '.join(cfg.detectors) or 'none'})")
    feature_paths, reports = [], []
    for k, dc in enumerate(det_cfgs):
        feature_paths += [out / f"features_{dc.detector_id}_a.bin",
                          out / f"features_{dc.detector_id}_b.bin"]
    table = out / ("loopclose.tsv" if with_decision else "matches.tsv")
    _ensure_fresh(feature_paths + [table], args.overwrite)

    for k, dc in enumerate(det_cfgs):
        fa = detect_and_describe(img_a, dc)
        fb = detect_and_describe(img_b, dc)
        save_feature_set(fa, feature_paths[2 * k])
        save_feature_set(fb, feature_paths[2 * k + 1])
        reports.append(match_feature_sets(
            fa, fb, ratio=cfg.ratio, ransac=cfg.ransac_config(),
            seed=cfg.seed + k, resolution_m=img_a.resolution_m))

    decision = None
    if with_decision:
        decision = validate_loop(reports[0], reports[1], cfg.thresholds())
        verdict = "accepted" if decision.accepted else "rejected"
        detail = "" if decision.accepted else f" (reasons: {', '.join(decision.reasons)})"
        print(f"loop {verdict}{detail}")
    write_report_table(table, reports, decision)
    print(f"wrote {table}")
    return 0


def cmd_match(args) -> int:
    cfg = _load_cfg(args)
    out = _out_dir(args)
    if args.features_a or args.features_b:
        if not (args.features_a and args.features_b):
            raise ValueError("--features-a and --features-b must be given together")
        table = out / "matches.tsv"
        _ensure_fresh([table], args.overwrite)
        fa = load_feature_set(args.features_a)
        fb = load_feature_set(args.features_b)
        report = match_feature_sets(
            fa, fb, ratio=cfg.ratio, ransac=cfg.ransac_config(),
            seed=cfg.seed, resolution_m=args.resolution_m)
        write_report_table(table, [report])
        print(f"wrote {table}")
        return 0
    if not (args.image_a and args.image_b):
        raise ValueError("need --image-a/--image-b or --features-a/--features-b")
    return _match_images(args, cfg, out, with_decision=False)


def cmd_loopclose(args) -> int:
    cfg = _load_cfg(args)
    return _match_images(args, cfg, _out_dir(args), with_decision=True)


def cmd_pipeline(args) -> int:
    ns = argparse.Namespace(**vars(args))
    out = Path(args.out)
    cmd_simulate(ns)
    ns.scanlog = out / "scanlog.bin"
    cmd_backproject(ns)
    ns.sar = out / "sar.cpx"
    cmd_post(ns)
    ns.image_a = out / "image.pgm"
    ns.image_b = out / "image.pgm"
    return cmd_loopclose(ns)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="run-config file "
                        "(default: $SARLOOP_CONFIG if set)")
    common.add_argument("--set", action="append", metavar="KEY=VALUE",
                        help="override one config key (repeatable)")
    common.add_argument("--seed", type=int, help="override the config seed")
    common.add_argument("--out", required=True, help="output directory")
    common.add_argument("--overwrite", action="store_true",
                        help="replace existing outputs")

    parser = argparse.ArgumentParser(
        prog=PROG, description="UWB radar SAR imaging and loop-closure toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", parents=[common],
                       help="render a scene into a scan log plus truth map")
    p.add_argument("--scene", required=True, help="scatterer file: x_m y_m rcs")
    p.add_argument("--trajectory", required=True,
                   help="waypoint file: x_m y_m theta_rad")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("backproject", parents=[common],
                       help="scan log -> complex SAR image dump")
    p.add_argument("--scanlog", required=True)
    p.set_defaults(func=cmd_backproject)

    p = sub.add_parser("post", parents=[common],
                       help="complex SAR dump -> 8-bit PGM + float dump")
    p.add_argument("--sar", required=True)
    p.set_defaults(func=cmd_post)

    p = sub.add_parser("match", parents=[common],
                       help="match two images or two feature sets")
    p.add_argument("--image-a")
    p.add_argument("--image-b")
    p.add_argument("--features-a")
    p.add_argument("--features-b")
    p.add_argument("--resolution-m", type=float, default=1.0,
                   help="pixel size for feature-set inputs (default 1.0)")
    p.set_defaults(func=cmd_match)

    p = sub.add_parser("loopclose", parents=[common],
                       help="dual-detector loop decision on two images")
    p.add_argument("--image-a", required=True)
    p.add_argument("--image-b", required=True)
    p.set_defaults(func=cmd_loopclose)

    p = sub.add_parser("pipeline", parents=[common],
                       help="simulate -> backproject -> post -> self loopclose")
    p.add_argument("--scene", required=True)
    p.add_argument("--trajectory", required=True)
    p.set_defaults(func=cmd_pipeline)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
