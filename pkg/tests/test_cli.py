import json
import shutil
import subprocess

import pytest

from designforge.cli import build_parser, main
from designforge.kernel import read_design


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_construct_and_verify(tmp_path, capsys):
    x = str(tmp_path / "x.design")
    code, out, _ = run(["construct", "cross-polytope", "--d", "3", "--out", x], capsys)
    assert code == 0 and len(read_design(x)) == 6
    manifest = json.loads((tmp_path / "x.design.manifest.json").read_text())
    assert manifest["subcommand"] == "construct" and manifest["flags"]["d"] == 3
    assert set(manifest["outputs"]) == {x}
    code, out, _ = run(["verify", x, "--t", "4", "--mode", "exact"], capsys)
    assert code == 1 and "worst_residual: 2/15" in out
    code, out, _ = run(["verify", x, "--t", "3", "--mode", "exact"], capsys)
    assert code == 0 and "result: PASS" in out


def test_bound(capsys):
    assert run(["bound", "delsarte", "--d", "3", "--t", "5"], capsys)[1].strip() == "12"
    assert run(["bound", "lp", "--d", "4", "--t", "1", "--eps", "1"], capsys)[1].strip() == "3"
    assert run(["bound", "tensor", "--d", "100", "--t", "1", "--eps", "0.1"], capsys)[1].strip() == "50"
    assert "gaussian: 10" in run(["bound", "dim", "--d", "3", "--t", "2"], capsys)[1]


def test_moments_and_quad(capsys):
    code, out, _ = run(["moments", "sphere", "--alpha", "2,2,0"], capsys)
    assert "exact: 1/15" in out
    code, out, _ = run(["moments", "gaussian", "--alpha", "2"], capsys)
    assert "exact: 1/2*pi^(-1)" in out
    code, out, _ = run(["moments", "radial", "--d", "3", "--k", "1"], capsys)
    assert "exact: 2*pi^(-1)" in out
    code, out, _ = run(["quad", "radial", "--d", "3", "--t", "3"], capsys)
    assert code == 0 and len(out.split("\n")) == 3
    code, out, _ = run(["quad", "search1d", "--t", "3", "--q", "2", "--seed", "0"], capsys)
    assert code == 0 and len(out.split()) == 2


def test_seed_is_mandatory(tmp_path, capsys):
    code, _, err = run(["construct", "product", "--d", "4", "--t", "3", "--q", "2", "--out", str(tmp_path / "p")], capsys)
    assert code == 2 and "--seed" in err
    code, _, err = run(["approx", "tensor", "--d", "4", "--t", "1", "--eps", "0.5", "--out", str(tmp_path / "a")], capsys)
    assert code == 2 and "--seed" in err


def test_usage_errors(capsys):
    assert run(["bogus"], capsys)[0] == 2
    code, _, err = run(["verify", "missing.design", "--t", "2"], capsys)
    assert code == 2
    code, _, err = run(["bound", "delsarte", "--d", "3", "--t", "two"], capsys)
    assert code == 2 and "--t" in err
    # abbreviated flags are not accepted
    assert run(["bound", "delsarte", "--d", "3", "--t", "5", "--ep", "1"], capsys)[0] == 2


def test_deterministic_outputs(tmp_path, capsys):
    outs = []
    for i in range(2):
        p = tmp_path / f"run{i}"
        p.mkdir()
        argv = ["construct", "product", "--d", "6", "--t", "3", "--q", "2", "--seed", "4",
                "--out", str(p / "p.design"), "--array-out", str(p / "p.array")]
        assert run(argv, capsys)[0] == 0
        outs.append(((p / "p.design").read_bytes(), (p / "p.array").read_bytes(),
                     json.loads((p / "p.design.manifest.json").read_text())["outputs"]))
    assert outs[0][:2] == outs[1][:2]
    assert sorted(outs[0][2].values()) == sorted(outs[1][2].values())


def test_twise_cli(tmp_path, capsys):
    arr = str(tmp_path / "a.array")
    assert run(["twise", "construct", "--q", "3", "--d", "5", "--t", "2", "--seed", "0", "--out", arr], capsys)[0] == 0
    assert run(["twise", "verify", arr, "--t", "2"], capsys)[0] == 0
    code, out, _ = run(["twise", "verify", arr, "--t", "3"], capsys)
    assert code == 1 and "pattern" in out


def test_signed_cli(tmp_path, capsys):
    orbit, mat = str(tmp_path / "s.orbit"), str(tmp_path / "s.design")
    argv = ["construct", "signed", "--d", "4", "--t", "4", "--seed", "0", "--measure", "sphere",
            "--out", orbit, "--materialize", mat]
    assert run(argv, capsys)[0] == 0
    assert run(["verify", orbit, "--t", "4", "--mode", "exact"], capsys)[0] == 0
    assert run(["verify", mat, "--t", "4", "--mode", "exact"], capsys)[0] == 0
    assert run(["verify", orbit, "--t", "4", "--mode", "float"], capsys)[0] == 0
    assert run(["construct", "signed", "--d", "4", "--t", "3", "--seed", "0", "--out", orbit], capsys)[0] == 2


def test_convert_project_certify(tmp_path, capsys):
    x, g, s, p = (str(tmp_path / n) for n in ("x.design", "g.design", "s.design", "p.design"))
    run(["construct", "cross-polytope", "--d", "5", "--out", x], capsys)
    assert run(["convert", "s2g", x, "--t", "3", "--out", g], capsys)[0] == 0
    assert run(["convert", "g2s", g, "--t", "3", "--out", s], capsys)[0] == 0
    assert run(["verify", s, "--t", "3"], capsys)[0] == 0
    assert run(["project", x, "--k", "3", "--t", "3", "--out", p], capsys)[0] == 0
    assert read_design(p).dimension == 3
    manifest = json.loads((tmp_path / "p.design.manifest.json").read_text())
    assert set(manifest["inputs"]) == {x}
    code, out, _ = run(["certify", x, "--mode", "l2", "--t", "3"], capsys)
    assert code == 0 and "pair_sum: 0.0" in out
    code, out, _ = run(["certify", x, "--mode", "tensor", "--t", "1"], capsys)
    assert "strength 2: 0.0" in out
    assert run(["convert", "s2g", x, "--t", "4", "--out", g], capsys)[0] == 2


def test_approx_cli(tmp_path, capsys):
    a = str(tmp_path / "a.design")
    code, out, _ = run(["approx", "tensor", "--d", "16", "--t", "1", "--eps", "0.1", "--seed", "0", "--out", a], capsys)
    assert code == 0 and len(read_design(a)) == 100
    code, _, _ = run(["approx", "l2", "--d", "3", "--t", "2", "--eps", "0.5", "--seed", "0", "--out", a], capsys)
    assert code == 0 and len(read_design(a)) == 32


def test_manifest_flag_for_print_only(tmp_path, capsys):
    m = tmp_path / "m.json"
    run(["bound", "delsarte", "--d", "3", "--t", "5", "--manifest", str(m)], capsys)
    assert json.loads(m.read_text())["subcommand"] == "bound"


def test_every_subcommand_has_help(capsys):
    parser = build_parser()
    sub = next(a for a in parser._actions if a.dest == "command")
    for name, p in sub.choices.items():
        text = p.format_help()
        assert p.description and "--manifest" in text, name


@pytest.mark.skipif(shutil.which("designforge") is None, reason="console script not installed")
def test_console_script():
    res = subprocess.run(["designforge", "bound", "delsarte", "--d", "4", "--t", "4"], capture_output=True, text=True)
    assert res.returncode == 0 and res.stdout.strip() == "14"
