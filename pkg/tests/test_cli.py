"""End-to-end command-line behavior, run in-process via main()."""

import numpy as np
import pytest

from sarloop import GrayImage
from sarloop.cli import main
from sarloop.features import save_feature_set
from sarloop import FeatureSet, Keypoint
from sarloop.imgpost import write_pgm

DEMO = "demo"
FAST = ["--set", "range_max_m=1.2", "--set", "grid_resolution_m=0.01",
        "--set", "scan_spacing_m=0.05"]


@pytest.fixture
def small_scene(tmp_path):
    scene = tmp_path / "scene.txt"
    scene.write_text("0.2 0.6 1.0\n0.35 -0.5 1.2\n")
    traj = tmp_path / "traj.txt"
    traj.write_text("0 0 0\n0.5 0 0\n")
    return scene, traj


def run(*argv):
    return main([str(a) for a in argv])


def test_pipeline_on_a_small_scene(small_scene, tmp_path, capsys):
    scene, traj = small_scene
    out = tmp_path / "run"
    rc = run("pipeline", "--scene", scene, "--trajectory", traj,
             "--out", out, *FAST)
    captured = capsys.readouterr()
    assert rc == 0, captured.err
    assert "loop accepted" in captured.out
    for name in ("scanlog.bin", "truth.pgm", "sar.cpx", "image.pgm",
                 "image.f32", "features_orb_a.bin", "features_brisk_b.bin",
                 "loopclose.tsv"):
        assert (out / name).exists(), name
    table = (out / "loopclose.tsv").read_text().splitlines()
    assert table[0].startswith("# detector_id\t")
    assert table[-1].startswith("fused\t")


def test_bundled_demo_pipeline_accepts_its_own_map(tmp_path, capsys):
    rc = run("pipeline", "--scene", f"{DEMO}/scene.txt",
             "--trajectory", f"{DEMO}/trajectory.txt", "--out", tmp_path / "demo")
    captured = capsys.readouterr()
    assert rc == 0, captured.err
    assert "loop accepted" in captured.out
    assert (tmp_path / "demo" / "image.pgm").stat().st_size > 0


def test_simulate_is_reproducible(small_scene, tmp_path):
    scene, traj = small_scene
    for d in ("a", "b"):
        rc = run("simulate", "--scene", scene, "--trajectory", traj,
                 "--out", tmp_path / d, "--seed", 7, *FAST)
        assert rc == 0
    assert ((tmp_path / "a" / "scanlog.bin").read_bytes()
            == (tmp_path / "b" / "scanlog.bin").read_bytes())


def test_stage_composition_matches_the_pipeline(small_scene, tmp_path):
    scene, traj = small_scene
    piped = tmp_path / "piped"
    staged = tmp_path / "staged"
    assert run("pipeline", "--scene", scene, "--trajectory", traj,
               "--out", piped, *FAST) == 0
    assert run("simulate", "--scene", scene, "--trajectory", traj,
               "--out", staged, *FAST) == 0
    assert run("backproject", "--scanlog", staged / "scanlog.bin",
               "--out", staged, *FAST) == 0
    assert run("post", "--sar", staged / "sar.cpx", "--out", staged, *FAST) == 0
    assert run("loopclose", "--image-a", staged / "image.pgm",
               "--image-b", staged / "image.pgm", "--out", staged, *FAST) == 0
    for name in ("scanlog.bin", "truth.pgm", "sar.cpx", "image.pgm",
                 "image.f32", "loopclose.tsv"):
        assert ((piped / name).read_bytes() == (staged / name).read_bytes()), name


def test_existing_outputs_are_refused_without_overwrite(small_scene, tmp_path,
                                                        capsys):
    scene, traj = small_scene
    out = tmp_path / "out"
    args = ("simulate", "--scene", scene, "--trajectory", traj, "--out", out,
            *FAST)
    assert run(*args) == 0
    assert run(*args) == 1
    assert "refusing to overwrite" in capsys.readouterr().err
    assert run(*args, "--overwrite") == 0


def test_backproject_rejects_an_empty_log(table1, tmp_path, capsys):
    from sarloop import ScanLog, save_scan_log
    log_path = tmp_path / "empty.bin"
    save_scan_log(ScanLog(table1, (0.0,), ()), log_path)
    rc = run("backproject", "--scanlog", log_path, "--out", tmp_path / "o")
    assert rc == 1
    assert "no records" in capsys.readouterr().err


def test_backproject_rejects_garbage_input(tmp_path, capsys):
    bad = tmp_path / "junk.bin"
    bad.write_bytes(b"\x00\x01\x02 no header here")
    rc = run("backproject", "--scanlog", bad, "--out", tmp_path / "o")
    assert rc == 1
    assert "error:" in capsys.readouterr().err


def test_match_refuses_mixed_detector_features(tmp_path, capsys):
    rng = np.random.default_rng(51)
    kps = tuple(Keypoint(float(i), float(i), 1.0) for i in range(5))
    fa = FeatureSet("orb", kps, rng.integers(0, 256, (5, 32)).astype(np.uint8))
    fb = FeatureSet("brisk", kps, rng.integers(0, 256, (5, 64)).astype(np.uint8))
    save_feature_set(fa, tmp_path / "a.bin")
    save_feature_set(fb, tmp_path / "b.bin")
    rc = run("match", "--features-a", tmp_path / "a.bin",
             "--features-b", tmp_path / "b.bin", "--out", tmp_path / "o")
    err = capsys.readouterr().err
    assert rc == 1
    assert "orb" in err and "brisk" in err


def test_match_needs_images_or_features(tmp_path, capsys):
    assert run("match", "--out", tmp_path / "o") == 1
    assert "image" in capsys.readouterr().err
    assert run("match", "--features-a", tmp_path / "only.bin",
               "--out", tmp_path / "o") == 1
    assert "together" in capsys.readouterr().err


def test_loopclose_rejects_mismatched_resolutions(tmp_path, capsys):
    rng = np.random.default_rng(52)
    px = rng.integers(0, 256, (48, 48)).astype(np.uint8)
    write_pgm(GrayImage(px, 0.01), tmp_path / "a.pgm")
    write_pgm(GrayImage(px, 0.02), tmp_path / "b.pgm")
    rc = run("loopclose", "--image-a", tmp_path / "a.pgm",
             "--image-b", tmp_path / "b.pgm", "--out", tmp_path / "o")
    assert rc == 1
    assert "resolutions differ" in capsys.readouterr().err


def test_config_file_and_env_var_feed_the_run(small_scene, tmp_path,
                                              monkeypatch):
    scene, traj = small_scene
    cfg = tmp_path / "run.cfg"
    cfg.write_text("seed=123\nrange_max_m=1.2\ngrid_resolution_m=0.01\n"
                   "scan_spacing_m=0.05\n")

    assert run("simulate", "--scene", scene, "--trajectory", traj,
               "--out", tmp_path / "flagged", "--seed", 123, *FAST) == 0
    monkeypatch.setenv("SARLOOP_CONFIG", str(cfg))
    assert run("simulate", "--scene", scene, "--trajectory", traj,
               "--out", tmp_path / "from_env") == 0
    assert ((tmp_path / "flagged" / "scanlog.bin").read_bytes()
            == (tmp_path / "from_env" / "scanlog.bin").read_bytes())

    # a --set override beats the env config
    assert run("simulate", "--scene", scene, "--trajectory", traj,
               "--out", tmp_path / "shorter", "--set", "scan_spacing_m=0.1") == 0
    assert ((tmp_path / "shorter" / "scanlog.bin").stat().st_size
            < (tmp_path / "from_env" / "scanlog.bin").stat().st_size)


def test_unknown_config_key_is_reported(small_scene, tmp_path, capsys):
    scene, traj = small_scene
    rc = run("simulate", "--scene", scene, "--trajectory", traj,
             "--out", tmp_path / "o", "--set", "range_maxm=2")
    assert rc == 1
    assert "unknown config key" in capsys.readouterr().err
