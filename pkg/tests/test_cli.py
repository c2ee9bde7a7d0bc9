import json

import pytest

from colemantrace import io
from colemantrace.cli import main, parse_alpha
from colemantrace.series import Series

BASE = ["--tower", "C1", "-D", "12", "-N", "6"]


def run(tmp_path, *args):
    out = tmp_path / "out.json"
    code = main([*BASE, *args, "-o", str(out)])
    doc = json.loads(out.read_text()) if out.exists() else None
    return code, doc, out


def test_kernel_file_passes_kind_C(tmp_path):
    code, doc, out = run(tmp_path, "trace", "kernel", "--dim", "3")
    assert code == 0
    assert doc["meta"]["dimension"] >= 3
    ker = tmp_path / "ker.json"
    out.rename(ker)
    code, doc, _ = run(tmp_path, "check", "--kind", "C", str(ker))
    assert code == 0
    assert doc["meta"]["verdict"] == "pass"
    assert doc["result"]["type"] == "list"


def test_failed_check_exits_1(tmp_path):
    tower = io.build_tower(io.TowerRef(3, None, None, 20))
    s = tmp_path / "one.json"
    io.write(str(s), Series.const(tower.O_K, 1, 6), tower)
    code, doc, _ = run(tmp_path, "check", "--kind", "C", str(s))
    assert code == 1


def test_lift_on_failing_criterion_exits_2(tmp_path, capsys):
    tower = io.build_tower(io.TowerRef(3, [-3, 0, 1], [[0, -1], 0, 1], 24))
    s = tmp_path / "s.json"
    io.write(str(s), Series.from_coeffs(tower.O_K, [tower.pi_K, 0, 1], D=12),
             tower)
    code = main(["--tower", "C3", "-D", "12", "-N", "4", "--alpha", "pi_L",
                 "lift", str(s)])
    assert code == 2
    assert "criterion" in capsys.readouterr().err


def test_same_config_is_byte_identical(tmp_path):
    cfg = tmp_path / "job.yaml"
    cfg.write_text("tower: C1\nD: 10\nN: 6\nseed: 7\n"
                   "command: [fgl, endo, --a, '2']\n")
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert main(["--config", str(cfg), "-o", str(a)]) == 0
    assert main(["--config", str(cfg), "-o", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_metadata_block(tmp_path):
    code, doc, _ = run(tmp_path, "fgl", "build")
    meta = doc["meta"]
    assert code == 0
    assert (meta["D"], meta["N"]) == (12, 6)
    assert meta["achieved"]["D"] == 12 and meta["achieved"]["N"] > 0
    assert doc["result"]["type"] == "biseries"


def test_output_chains_into_next_command(tmp_path):
    code, _, out = run(tmp_path, "fgl", "endo", "--a", "3")
    e3 = tmp_path / "e3.json"
    out.rename(e3)
    code, doc, _ = run(tmp_path, "trace", "apply", str(e3))
    assert code == 0 and doc["result"]["type"] == "series"


def test_fgl_log_without_input_is_fraction_series(tmp_path):
    code, doc, _ = run(tmp_path, "fgl", "log")
    assert code == 0
    assert doc["result"]["type"] == "fracseries" and doc["meta"]["shift"] >= 1


def test_eigen_pipeline_in_c1(tmp_path):
    code, _, out = run(tmp_path, "trace", "kernel", "--dim", "2")
    ker = tmp_path / "ker.json"
    out.rename(ker)
    code, doc, _ = run(tmp_path, "--alpha", "pi_K^2", "eigen", "rho-inv", str(ker))
    assert code == 0
    assert doc["meta"]["report"]["verdict"] == "pass"
    assert doc["meta"]["alpha"] == "pi_K^2"


def test_bad_arguments_exit_2(capsys):
    assert main([*BASE, "trace", "frobnicate"]) == 2
    assert main([*BASE, "-D", "-4", "fgl", "build"]) == 2
    assert main([*BASE, "eigen", "rho"]) == 2       # no alpha, no input


def test_suite_single_criterion(tmp_path):
    code, doc, _ = run(tmp_path, "suite", "acceptance", "--only", "3,11")
    assert code == 0
    assert [c["number"] for c in doc["meta"]["criteria"]] == [3, 11]


def test_parse_alpha():
    from conftest import context
    ctx = context("C1", 40, 16, 8)
    assert parse_alpha("pi_K^2", ctx) == ctx.K.element(9)
    s = parse_alpha("pi_K^2*(1+x)", ctx)
    assert isinstance(s, Series) and s == Series.from_coeffs(ctx.K, [9, 9], D=16)
    assert parse_alpha("2*3-1", ctx) == 5
    from colemantrace.cli import CommandError
    with pytest.raises(CommandError):
        parse_alpha("__import__('os')", ctx)
    with pytest.raises(CommandError):
        parse_alpha("pi_K^(-1)", ctx)
