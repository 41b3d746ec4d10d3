import json

import numpy as np
import pytest

import polyspec as ps
from polyspec.cli import ExperimentConfig, build_parser, main, stream_rng

SUBCOMMANDS = ["transform", "noise", "ns", "profile", "make", "classify",
               "solve", "test-hom", "prs", "audit", "sweep"]


@pytest.mark.parametrize("command", SUBCOMMANDS)
def test_every_subcommand_has_help(command, capsys):
    with pytest.raises(SystemExit) as exc:
        main([command, "--help"])
    assert exc.value.code == 0
    out = capsys.readouterr().out
    assert "usage: polyspec" in out and command in out


def test_unknown_subcommand_exits_2(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 2


def test_make_then_noise_pipeline(tmp_path, capsys):
    fn = tmp_path / "andxor.json"
    out = tmp_path / "noised.json"
    assert main(["make", "--family", "andxor", "--n", "3",
                 "--blocks", "0,1;2", "--out", str(fn)]) == 0
    assert main(["noise", "--rho", "0.5", "--in", str(fn),
                 "--out", str(out)]) == 0
    noised = ps.load_function(out)
    target = ps.make_and_or(3, ps.BlockPartition(({0, 1}, {2})))
    assert np.abs(noised.table - 0.25 * target.table).max() < 1e-12


def test_noise_iterated_flag(tmp_path):
    fn = tmp_path / "and.json"
    out = tmp_path / "t3.json"
    assert main(["make", "--family", "and", "--n", "3", "--coords", "0,1",
                 "--out", str(fn)]) == 0
    assert main(["noise", "--rho", "0.5", "--m", "3", "--in", str(fn),
                 "--out", str(out)]) == 0
    t3 = ps.load_function(out)
    assert np.abs(t3.table - 0.0625 * ps.make_and(3, [0, 1]).table).max() < 1e-12
    assert main(["noise", "--rho", "0.5", "--m", "1", "--in", str(fn)]) == 2


def test_make_counterexample_families(tmp_path, capsys):
    for args in (["--family", "f1", "--n", "12"],
                 ["--family", "f2", "--n", "12", "--lambda", "0.6",
                  "--seed", "3"],
                 ["--family", "midslice", "--n", "12",
                  "--window-scale", "0.5"]):
        assert main(["make", *args]) == 0
        data = json.loads(capsys.readouterr().out)
        assert data["kind"] == "boolean" and data["n"] == 12


def test_audit_triple_via_files(tmp_path, capsys):
    fn = tmp_path / "and.json"
    ps.save_function(ps.make_and(3, [0, 1]), fn)
    assert main(["audit", "--theorem", "2.6", "--f", str(fn), "--g", str(fn),
                 "--h", str(fn), "--p", "0.5", "--rho", "0.5"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["premise"]["epsilon_hom"] == pytest.approx(0.0, abs=1e-12)
    assert data["conclusion"]["delta_g"] == 0.0


def test_test_hom_prints_reference_value(capsys):
    assert main(["test-hom", "--fn", "maj3", "--exact"]) == 0
    assert capsys.readouterr().out.strip() == "0.90625"


def test_test_hom_requires_input(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["test-hom", "--exact"])
    assert exc.value.code == 2


def test_classify_lists_nine_eigenfunctions(capsys):
    assert main(["classify", "--n", "3", "--rho", "0.5"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["count"] == 9
    lams = sorted(e["lambda"] for e in data["eigenfunctions"]
                  if e["lambda"] is not None)
    assert lams == pytest.approx([0.125, 0.25, 0.25, 0.25,
                                  0.5, 0.5, 0.5, 1.0], abs=1e-12)


def test_transform_writes_spectrum(tmp_path, capsys):
    fn = tmp_path / "f.json"
    ps.save_function(ps.make_and(2, [0, 1]), fn)
    out = tmp_path / "spec.json"
    assert main(["transform", "--p", "0.5", "--in", str(fn),
                 "--out", str(out)]) == 0
    data = json.loads(out.read_text())
    assert data["kind"] == "spectrum" and data["p"] == 0.5
    assert data["values"] == pytest.approx([0.25] * 4, abs=1e-12)


def test_profile_reports_json(tmp_path, capsys):
    fn = tmp_path / "f.json"
    ps.save_function(ps.make_majority3(), fn)
    assert main(["profile", "--p", "0.5", "--in", str(fn)]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["monotone"] is True
    assert data["max_sensitivity"] == 2 and data["degree"] == 3


def test_ns_exact(tmp_path, capsys):
    fn = tmp_path / "f.json"
    ps.save_function(ps.make_and(3, [0]), fn)
    assert main(["ns", "--nu", "0.2", "--in", str(fn)]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["exact"] is True
    assert data["estimate"] == pytest.approx(0.1, abs=1e-12)


def test_solve_reports_feasibility(tmp_path, capsys):
    fn = tmp_path / "or.json"
    ps.save_function(ps.make_or(2, [0, 1]), fn)
    assert main(["solve", "--rho", "0.25", "--in", str(fn)]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["feasible"] is False
    assert data["negative_mass"] == pytest.approx(8.0)


def test_prs_cli(tmp_path, capsys):
    fn = tmp_path / "d.json"
    ps.save_function(ps.make_and(4, [0]), fn)
    assert main(["prs", "--in", str(fn)]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["accepted"] is True and data["exact"] is True


def test_audit_strict_exit_codes(tmp_path, capsys):
    part = ps.BlockPartition(({0, 1},))
    f = tmp_path / "f.json"
    g = tmp_path / "g.json"
    ps.save_function(ps.make_and_xor(3, part), f)
    ps.save_function(ps.make_and_or(3, part), g)
    ok = main(["audit", "--theorem", "2.2", "--f", str(f), "--g", str(g),
               "--p", "0.5", "--rho", "0.5", "--lambda", "0.5",
               "--strict", "--eta", "1e-6", "--eps", "1e-6"])
    assert ok == 0
    # a far-from-structured pair under tight thresholds fails strict mode
    rng = np.random.default_rng(0)
    bad = tmp_path / "bad.json"
    ps.save_function(ps.BooleanFunction(3, rng.integers(0, 2, 8)), bad)
    code = main(["audit", "--theorem", "2.1", "--f", str(bad), "--g", str(bad),
                 "--p", "0.5", "--rho", "0.4", "--lambda", "0.9",
                 "--strict", "--eta", "10", "--eps", "1e-9"])
    assert code == 1


def test_missing_file_exits_2(capsys):
    assert main(["profile", "--p", "0.5", "--in", "/nonexistent.json"]) == 2


def test_bad_bias_exits_2(tmp_path, capsys):
    fn = tmp_path / "f.json"
    ps.save_function(ps.make_and(2, [0]), fn)
    assert main(["transform", "--p", "1.5", "--in", str(fn)]) == 2


def test_config_round_trip(tmp_path):
    cfg = ExperimentConfig(n=6, p=0.3, rho=0.25, lam=0.125, nu=0.05, m=3,
                           samples=1000, seed=17, family="maj",
                           sizes="4,6", perturbations="0,3", trials=2)
    path = tmp_path / "run.cfg"
    cfg.to_file(path)
    back = ExperimentConfig.from_file(path)
    assert back == cfg


def test_config_rejects_unknown_keys(tmp_path):
    path = tmp_path / "bad.cfg"
    path.write_text("p=0.5\nwat=1\n")
    with pytest.raises(ValueError):
        ExperimentConfig.from_file(path)


def test_config_validates_probabilities():
    with pytest.raises(ValueError):
        ExperimentConfig(p=1.2)


def test_sweep_byte_identical(tmp_path):
    cfgfile = tmp_path / "sweep.cfg"
    cfgfile.write_text(
        "family=and\nsizes=5,6\nperturbations=0,2\ntrials=2\n"
        "p=0.5\nrho=0.5\nseed=23\n")
    out1, out2 = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(["sweep", "--config", str(cfgfile), "--out", str(out1)]) == 0
    assert main(["sweep", "--config", str(cfgfile), "--out", str(out2)]) == 0
    b1, b2 = out1.read_bytes(), out2.read_bytes()
    assert b1 == b2
    lines = b1.decode().strip().split("\n")
    assert lines[0] == ps.analysis.SWEEP_HEADER
    assert len(lines) == 1 + 2 * 2 * 2


def test_sweep_bad_config_exits_2(tmp_path, capsys):
    cfgfile = tmp_path / "bad.cfg"
    cfgfile.write_text("this is not a config\n")
    assert main(["sweep", "--config", str(cfgfile)]) == 2


def test_stream_rng_independent_names():
    a = stream_rng(5, "alpha").random(4)
    b = stream_rng(5, "beta").random(4)
    a2 = stream_rng(5, "alpha").random(4)
    assert np.array_equal(a, a2)
    assert not np.array_equal(a, b)


def test_parser_prog_name():
    assert build_parser().prog == "polyspec"
