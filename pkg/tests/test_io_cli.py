import json
import math
import os

import numpy as np
import pytest

import burgers_lab as bl
from burgers_lab.cli import ConfigError, default_config, load_config, main
from burgers_lab.experiments import CATALOG, RUNNERS
from burgers_lab.io import dumps_json, fmt_float, read_snapshots, write_csv, write_json, write_snapshots
from burgers_lab.profiles import PROFILE_NAMES, make_profile, random_equal_mean_pair


def test_fmt_float_roundtrips():
    for v in (0.1, 1.0 / 3.0, 1e-300, -2.5e17, math.pi):
        assert float(fmt_float(v)) == v
    assert fmt_float(float("nan")) == "nan"
    assert fmt_float(float("inf")) == "inf"


def test_json_deterministic_key_order(tmp_path):
    a = {"b": 1.5, "a": [1.0, 2.0], "c": {"y": 0.1, "x": "s"}}
    text = dumps_json(a)
    assert text.index('"a"') < text.index('"b"') < text.index('"c"')
    p = tmp_path / "r.json"
    write_json(p, a)
    q = tmp_path / "r2.json"
    write_json(q, dict(reversed(list(a.items()))))
    assert p.read_bytes() == q.read_bytes()
    assert json.loads(p.read_text())["b"] == 1.5


def test_json_rejects_unknown_types(tmp_path):
    with pytest.raises(TypeError):
        dumps_json({"x": object()})


def test_csv_lf_and_full_precision(tmp_path):
    p = tmp_path / "t.csv"
    write_csv(p, ["t", "v"], [[0.1, 1.0 / 3.0], [0.2, 2.0 / 3.0]])
    raw = p.read_bytes()
    assert b"\r" not in raw
    lines = raw.decode().strip().split("\n")
    assert lines[0] == "t,v"
    assert float(lines[1].split(",")[1]) == 1.0 / 3.0


def test_snapshot_binary_roundtrip(tmp_path):
    times = np.array([0.0, 0.5, 1.0])
    snaps = np.random.default_rng(0).normal(size=(3, 64))
    p = tmp_path / "s.bin"
    write_snapshots(p, times, snaps)
    t2, s2 = read_snapshots(p)
    assert np.array_equal(times, t2)
    assert np.array_equal(snaps, s2)


def test_snapshot_magic_checked(tmp_path):
    p = tmp_path / "bad.bin"
    p.write_bytes(b"NOTMAGIC" + b"\x00" * 32)
    with pytest.raises(ValueError):
        read_snapshots(p)


def test_profiles_available(grid128):
    for name in PROFILE_NAMES:
        f = make_profile(name, grid128, amplitude=0.5, mean_offset=0.1)
        assert f.grid.n == 128
        if name != "constant":
            assert bl.mean_value(f) == pytest.approx(0.1, abs=1e-12)
    with pytest.raises(ValueError):
        make_profile("nope", grid128)


def test_random_pair_equal_means(grid128):
    rng = np.random.default_rng(5)
    u0, v0 = random_equal_mean_pair(grid128, rng, 1.0, 0.25)
    assert bl.mean_value(u0) == pytest.approx(0.25, abs=1e-12)
    assert bl.mean_value(u0) == pytest.approx(bl.mean_value(v0), abs=1e-13)
    assert np.max(np.abs(u0.values - v0.values)) > 1e-3


def test_catalog_covers_runners():
    assert set(CATALOG) == set(RUNNERS)
    assert "contraction → Theorem 3.1" in CATALOG["contraction"]
    assert "stochastic_sync → Theorem 4.3" in CATALOG["stochastic_sync"]


def test_cli_list(capsys):
    assert main(["list"]) == 0
    out = capsys.readouterr().out
    assert "contraction → Theorem 3.1" in out
    assert "stochastic_sync → Theorem 4.3" in out


def _write_toml(path, text):
    path.write_text(text, encoding="utf-8")
    return str(path)


def test_cli_config_errors(tmp_path, capsys):
    bad = _write_toml(
        tmp_path / "bad.toml",
        'schema_version = 1\nexperiment = "oracle"\n[solver]\nnu = -1.0\n',
    )
    assert main(["run", bad]) == 2
    assert "nu must be positive" in capsys.readouterr().err

    unknown = _write_toml(tmp_path / "u.toml", 'experiment = "nope"\n')
    assert main(["run", unknown]) == 2

    missing = str(tmp_path / "none.toml")
    assert main(["run", missing]) == 2

    badver = _write_toml(tmp_path / "v.toml", 'schema_version = 99\nexperiment = "oracle"\n')
    assert main(["run", badver]) == 2

    badtoml = _write_toml(tmp_path / "t.toml", "not [valid")
    assert main(["run", badtoml]) == 2


def test_load_config_json(tmp_path):
    p = tmp_path / "c.json"
    p.write_text(json.dumps({"experiment": "oracle", "solver": {"nu": 0.2}}))
    cfg = load_config(p)
    assert cfg.experiment == "oracle"
    assert cfg.solver.nu == 0.2


def test_load_config_rejects_bad_seeds(tmp_path):
    p = tmp_path / "c.toml"
    p.write_text('experiment = "oracle"\nseeds = ["a"]\n')
    with pytest.raises(ConfigError):
        load_config(p)


def test_default_configs_valid(tmp_path):
    for name in RUNNERS:
        table = default_config(name)
        assert table["experiment"] == name
        p = tmp_path / f"{name}.json"
        p.write_text(json.dumps(table))
        cfg = load_config(p)
        assert cfg.experiment == name


def test_cli_oracle_run_deterministic(tmp_path, capsys):
    cfg = _write_toml(
        tmp_path / "oracle.toml",
        'schema_version = 1\nexperiment = "oracle"\n[solver]\nnu = 0.1\n',
    )
    out1 = tmp_path / "o1"
    out2 = tmp_path / "o2"
    assert main(["run", cfg, "--out", str(out1)]) == 0
    assert main(["run", cfg, "--out", str(out2)]) == 0
    capsys.readouterr()
    for name in ("report.json", "heat_norms.csv", "oracle_heat_decay.svg"):
        assert (out1 / name).read_bytes() == (out2 / name).read_bytes()
    report = json.loads((out1 / "report.json").read_text())
    assert report["passed"] is True
    assert report["report"]["heat_sup_error"] < 1e-6
    assert not (out1 / "failures.json").exists()


def test_cli_failure_exit_code(tmp_path, capsys):
    cfg = _write_toml(
        tmp_path / "coarse.toml",
        'schema_version = 1\nexperiment = "contraction"\nseeds = [0]\n'
        "[solver]\nnu = 0.1\nn = 32\ndt = 0.02\n[params]\nT = 1.0\n",
    )
    out = tmp_path / "f"
    assert main(["run", cfg, "--out", str(out)]) == 1
    failures = json.loads((out / "failures.json").read_text())["failures"]
    assert len(failures) == 1
    assert "seed 0" in failures[0]


def test_cli_seeds_override_and_env_out(tmp_path, capsys, monkeypatch):
    cfg = _write_toml(
        tmp_path / "ctr.toml",
        'schema_version = 1\nexperiment = "contraction"\nseeds = [0, 1, 2, 3]\n'
        "[solver]\nnu = 0.1\nn = 256\ndt = 5e-4\n[params]\nT = 0.5\n",
    )
    env_out = tmp_path / "envout"
    monkeypatch.setenv("BURGERS_LAB_OUT", str(env_out))
    monkeypatch.chdir(tmp_path)
    assert main(["run", cfg, "--seeds", "4"]) == 0
    capsys.readouterr()
    report = json.loads((env_out / "report.json").read_text())
    assert report["seeds"] == [4]
    assert len(report["report"]["cases"]) == 1

    assert main(["run", cfg, "--seeds", "x"]) == 2


def test_cli_threads_do_not_change_results(tmp_path, capsys):
    cfg = _write_toml(
        tmp_path / "hs.toml",
        'schema_version = 1\nexperiment = "harnack_sweep"\nseeds = [0]\n'
        "[solver]\nnu = 0.1\nn = 128\ndt = 1e-3\n"
        "[params]\nrho_values = [0.0, 1.0]\ntrial_count = 2\n",
    )
    o1 = tmp_path / "t1"
    o2 = tmp_path / "t2"
    assert main(["run", cfg, "--out", str(o1), "--threads", "1"]) == 0
    assert main(["run", cfg, "--out", str(o2), "--threads", "4"]) == 0
    capsys.readouterr()
    assert (o1 / "report.json").read_bytes() == (o2 / "report.json").read_bytes()
    assert (o1 / "theta_sweep.csv").read_bytes() == (o2 / "theta_sweep.csv").read_bytes()


def test_stamp_changes_svg_metadata_only_when_asked(tmp_path, capsys):
    cfg = _write_toml(
        tmp_path / "oracle.toml",
        'schema_version = 1\nexperiment = "oracle"\n',
    )
    plain = tmp_path / "plain"
    stamped = tmp_path / "stamped"
    assert main(["run", cfg, "--out", str(plain)]) == 0
    assert main(["run", cfg, "--out", str(stamped), "--stamp"]) == 0
    capsys.readouterr()
    a = (plain / "oracle_heat_decay.svg").read_text()
    b = (stamped / "oracle_heat_decay.svg").read_text()
    assert "dc:date" not in a
    assert a != b
