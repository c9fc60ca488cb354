import json

import numpy as np
import pytest

from ldc import cli, writers
from ldc.fields import Axis, ScalarField, SectionSpec
from ldc.scenario import (
    ScenarioError,
    builtin_names,
    load_scenario,
    probe_median,
    run_scenario,
)


def field2d(values, mask=None, lo=0.0, hi=1.0):
    values = np.asarray(values, dtype=float)
    n = values.shape[0]
    if mask is None:
        mask = np.ones(values.shape, dtype=bool)
    sec = SectionSpec(Axis("x", lo, hi), Axis("y", lo, hi), resolution=n)
    return ScalarField(np.where(mask, values, np.nan), np.asarray(mask), sec, {"quantity": "LD"})


# --- writers -------------------------------------------------------------

def test_csv_round_trip_bit_exact(tmp_path):
    rng = np.random.default_rng(4)
    v = rng.normal(size=(9, 9)) * 10.0 ** rng.integers(-20, 20, size=(9, 9))
    v[0, 0] = 0.1 + 0.2
    v[1, 1] = 5e-324
    f = field2d(v)
    writers.write_csv(f, tmp_path / "a.csv")
    header, back = writers.read_csv(tmp_path / "a.csv")
    assert np.array_equal(back, v)
    assert header.startswith("# axis1=x[0.0,1.0] axis2=y[0.0,1.0] N=9 h=0.125,0.125")


def test_csv_masked_cells_are_nan(tmp_path):
    mask = np.ones((3, 3), dtype=bool)
    mask[0, 2] = False
    writers.write_csv(field2d(np.ones((3, 3)), mask), tmp_path / "m.csv")
    text = (tmp_path / "m.csv").read_text().splitlines()
    assert text[1] == "1,1,nan"
    _, back = writers.read_csv(tmp_path / "m.csv")
    assert np.isnan(back[0, 2]) and np.isfinite(back[mask]).all()


def test_csv_size_from_format_arithmetic(tmp_path):
    # a 500 x 500 log-indicator field; every value needs up to 17 significant digits
    rng = np.random.default_rng(2024)
    v = rng.uniform(-6.0, 3.0, size=(500, 500))
    f = field2d(v)
    path = tmp_path / "big.csv"
    writers.write_csv(f, path)
    per_value = sum(len(format(x, ".17g")) for x in v.ravel())
    expected = len(writers.csv_header(f)) + 1 + per_value + 500 * 499 + 500
    assert path.stat().st_size == expected
    assert path.stat().st_size == 4_951_510


def test_pgm_constant_field_is_mid_gray(tmp_path):
    f = field2d(np.full((3, 3), 7.0))
    writers.write_pgm(f, tmp_path / "c.pgm")
    pix = writers.read_pgm(tmp_path / "c.pgm")
    assert pix.shape == (3, 3) and np.all(pix == (writers.PGM_MAX - 1) // 2)


def test_pgm_masked_corner_is_white(tmp_path):
    mask = np.ones((4, 4), dtype=bool)
    mask[0, 0] = False  # lowest axis2 row, first column
    f = field2d(np.arange(16.0).reshape(4, 4), mask)
    writers.write_pgm(f, tmp_path / "m.pgm", lo=1.0, hi=15.0)
    pix = writers.read_pgm(tmp_path / "m.pgm")
    # image row 0 is the top (largest axis2)
    assert pix[-1, 0] == writers.PGM_MAX
    assert np.count_nonzero(pix == writers.PGM_MAX) == 1
    assert pix[0, -1] == writers.PGM_MAX - 1
    assert pix[-1, 1] == 0


def test_pgm_header_is_16_bit(tmp_path):
    writers.write_pgm(field2d(np.eye(5)), tmp_path / "e.pgm")
    raw = (tmp_path / "e.pgm").read_bytes()
    assert raw.startswith(b"P5\n5 5\n65535\n")
    assert len(raw) == len(b"P5\n5 5\n65535\n") + 2 * 25


def test_value_range_percentiles():
    v = np.arange(100.0).reshape(10, 10)
    mask = np.ones((10, 10), dtype=bool)
    mask[9, 9] = False
    r = writers.value_range(field2d(v, mask))
    assert r["min"] == 0.0 and r["max"] == 98.0 and r["masked"] == 1
    assert r["p_lo"] == pytest.approx(np.percentile(v.ravel()[:-1], 1))


def test_write_errors_name_the_path(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    with pytest.raises(OSError, match="file"):
        writers.write_csv(field2d(np.ones((3, 3))), blocker / "sub" / "a.csv")


# --- scenarios -----------------------------------------------------------

def test_builtin_registry():
    names = builtin_names()
    assert len(names) == len(set(names)) >= 25
    for name in names:
        sc = load_scenario(name)
        assert sc.name == name
        # plain LD maps end in "-ld"; every other 2D scenario is an indicator map
        if not sc.section.line_mode and not name.endswith("-ld"):
            assert sc.post, name


def test_overrides_bare_and_qualified():
    sc = load_scenario("fgl-macro", {"eps": "0.001", "section.resolution": "8", "ld.window": "50"})
    assert sc.model.params["eps"] == 0.001
    assert sc.section.resolution == 8 and sc.ld.window == 50.0
    assert sc.settings["model"]["eps"] == "0.001"


def test_bad_overrides_and_names():
    with pytest.raises(ScenarioError):
        load_scenario("no-such-scenario")
    with pytest.raises(ScenarioError):
        load_scenario("fgl-macro", {"nonsense": "1"})
    with pytest.raises(ScenarioError):
        load_scenario("fgl-macro", {"bogus.eps": "1"})
    with pytest.raises(ScenarioError):
        load_scenario("standard-map-k06", {"ld.window": "10.5"})


def test_scenario_file_path(tmp_path):
    p = tmp_path / "mine.ini"
    p.write_text(
        "[scenario]\nname = mine\n"
        "[model]\nkind = standard\nk = 0\n"
        "[section]\naxis1 = x 0 1\naxis2 = y 0 0.5\nresolution = 5\n"
        "[ld]\nwindow = 150\n"
        "[post]\nchain = second_diff, log10(1e-16)\n"
        "[outputs]\nformats = csv\n"
    )
    res = run_scenario(load_scenario(str(p)), out_dir=tmp_path / "out")
    _, back = writers.read_csv(tmp_path / "out" / "mine.csv")
    # LD = 150 y is linear in the mesh, so every second difference is floored
    assert np.all(back == -16.0)
    assert list(res.manifest["outputs"]) == ["mine.csv"]


def test_run_writes_manifest(tmp_path):
    sc = load_scenario("standard-map-k06", {"section.resolution": "32", "k": "0.7"})
    res = run_scenario(sc, out_dir=tmp_path, overrides={"k": "0.7"})
    meta = json.loads((tmp_path / "standard-map-k06.json").read_text())
    assert meta["overrides"] == {"k": "0.7"}
    assert meta["effective"]["model"]["k"] == "0.7"
    assert meta["spacing"] == [1 / 31, 1 / 31]
    assert set(meta["outputs"]) == {"standard-map-k06.csv", "standard-map-k06.pgm"}
    for key in ("min", "max", "p_lo", "p_hi", "masked"):
        assert key in meta["value_range"]
    assert meta["software"]["version"]
    assert meta["wall_clock_s"] >= 0
    assert set(meta["probe_medians"]) == {"chaotic", "regular"}
    assert res.manifest["field_meta"]["post"] == ["second_diff", "log10(1e-16)"]


def test_probe_median():
    f = field2d(np.arange(25.0).reshape(5, 5))
    # x in [0, 0.3] -> columns 0,1 ; y in [0.7, 1] -> rows 3,4
    assert probe_median(f, (0.0, 0.3, 0.7, 1.0)) == np.median([15, 16, 20, 21])


def test_landscape_csv(tmp_path):
    run_scenario(load_scenario("standard-map-landscape", {"k": "0", "resolution": "65"}), out_dir=tmp_path)
    lines = (tmp_path / "standard-map-landscape.csv").read_text().splitlines()
    assert lines[0] == "position,LD,second_diff"
    pos, ld, d = map(float, lines[33].split(","))
    assert ld == 150 * pos and d == 0.0


# --- command line --------------------------------------------------------

def test_cli_list(capsys):
    assert cli.main(["list"]) == 0
    out = capsys.readouterr().out
    assert "fgl-micro" in out and "I1[0.3,0.4] x I2[0.1,0.2]" in out
    assert "froeschle4d-sigma2" in out and "x[1.45,1.85] x z[0.6,1]" in out
    assert "hh-ype" in out and "y[-0.5,0.8] x E[0.01,0.1666]" in out


def test_cli_run(tmp_path, capsys):
    rc = cli.main(["run", "pendulum-dld", "--resolution", "16", "--final-time", "10",
                   "--threads", "2", "--out", str(tmp_path)])
    assert rc == 0
    out = capsys.readouterr().out
    assert "masked cells: 0" in out and "p99=" in out
    meta = json.loads((tmp_path / "pendulum-dld.json").read_text())
    assert meta["effective"]["ld"]["window"] == "10.0"


def test_cli_set_and_iterates(tmp_path):
    rc = cli.main(["run", "standard-map-k1", "--set", "k=0.2", "--iterates", "20",
                   "--resolution", "8", "--out", str(tmp_path)])
    assert rc == 0
    meta = json.loads((tmp_path / "standard-map-k1.json").read_text())
    assert meta["effective"]["model"]["k"] == "0.2"
    assert meta["field_meta"]["window"] == 20.0


def test_cli_unknown_scenario_is_usage_error(tmp_path, capsys):
    assert cli.main(["run", "nope", "--out", str(tmp_path)]) == cli.EXIT_USAGE
    assert "unknown scenario" in capsys.readouterr().err


def test_cli_unwritable_output_is_io_error(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    rc = cli.main(["run", "standard-map-k06", "--resolution", "4", "--out", str(blocker / "out")])
    assert rc == cli.EXIT_IO


def test_cli_degenerate_output(tmp_path):
    # energy far below the well bottom: every lift fails
    rc = cli.main(["run", "hh-e0105", "--set", "energy=-1", "--resolution", "4", "--out", str(tmp_path)])
    assert rc == cli.EXIT_DEGENERATE


def test_threads_env_fallback(monkeypatch):
    monkeypatch.setenv("LDC_THREADS", "3")
    assert cli._threads(None) == 3
    assert cli._threads(5) == 5
    monkeypatch.delenv("LDC_THREADS")
    assert cli._threads(None) == 1


def test_console_script_installed():
    import shutil
    import subprocess

    exe = shutil.which("ldc")
    if exe is None:
        pytest.skip("package not installed with its console script")
    out = subprocess.run([exe, "list"], capture_output=True, text=True, check=True).stdout
    assert "standard-map-k06" in out
