import json

import numpy as np
import pytest

from cgolab import cli
from cgolab.symtensor import SymTensor, identity2, tensor_product

FAST_CGO = """
d = 3
m = 2
N = 16
h = [0.25, 0.125, 0.0625, 0.03125]
case = "a"
slope_slack = 10.0
alias_tol = 1.0
[[bumps]]
order = 0
amplitude = 0.1
sigma = 0.35
"""

FAST_AVG = """
d = 2
N = 16
kmax = 4.0
h = [0.25, 0.125, 0.0625]
n_f = 2
n_mc = 200
"""


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


def test_dim_check(capsys):
    code, out, _ = run(capsys, "dim-check", "--d", "3", "--kmax", "5")
    doc = json.loads(out)
    assert code == 0 and doc["passed"]
    assert doc["report"]["rows"][2]["sym_dim"] == 6


def test_tensor_verify_small(capsys):
    code, out, _ = run(capsys, "tensor-verify", "--seed", "7", "--draws", "2")
    doc = json.loads(out)
    assert code == 0
    assert doc["report"]["id3_closed_form"] == ["C(k+n,n)*n!^2*2^n/(2n)!/C(k+2n,2n)"]


def test_decompose_random(capsys):
    code, out, _ = run(capsys, "decompose", "--d", "3", "--k", "3")
    assert code == 0 and json.loads(out)["report"]["kernel_dim"] == json.loads(out)["report"]["structured_dim"]


def test_decompose_input(tmp_path, capsys):
    rng = np.random.default_rng(0)
    xi = np.array([1.0, 2.0, -1.0])
    A = tensor_product(SymTensor(3, 1, xi), SymTensor.random(3, 2, rng)) + tensor_product(identity2(3), SymTensor.random(3, 1, rng))
    good = write(tmp_path, "A.json", A.to_json())
    code, out, _ = run(capsys, "decompose", "--input", good, "--xi", "1,2,-1")
    assert code == 0 and json.loads(out)["report"]["decomposition"]["residual"] < 1e-10
    e1 = SymTensor(3, 1, [1, 0, 0])
    bad = write(tmp_path, "B.json", tensor_product(e1, e1).to_json())
    code, _, err = run(capsys, "decompose", "--input", bad, "--xi", "0,0,1")
    assert code == 1 and "FAIL: structure_holds" in err
    assert run(capsys, "decompose", "--input", good)[0] == 2
    assert run(capsys, "decompose", "--input", str(tmp_path / "missing.json"), "--xi", "0,0,1")[0] == 2


def test_recover_small(tmp_path, capsys):
    cfg = write(tmp_path, "r.toml", "d = 3\nR = 1\nkmax = 2\npieces_sets = 2\n")
    code, out, _ = run(capsys, "recover", "--config", cfg)
    doc = json.loads(out)
    assert code == 0
    assert [r["value_dim"] for r in doc["report"]["rows"]] == [0, 0, 1]


def test_recover_equality_fails_beyond_first_order(tmp_path, capsys):
    cfg = write(tmp_path, "r.toml", 'd = 3\nR = 1\nkmin = 3\ncheck = "equality"\npieces_sets = 0\n')
    code, _, err = run(capsys, "recover", "--config", cfg)
    assert code == 1 and "FAIL: value_equals_prediction[k=3]" in err


def test_cgo_csv(tmp_path, capsys):
    cfg = write(tmp_path, "c.toml", FAST_CGO)
    code, out, _ = run(capsys, "cgo", "--config", cfg)
    lines = out.strip().splitlines()
    assert code == 0
    assert lines[0] == "h,x_norm_psi,residual,contraction_factor" and len(lines) == 5


def test_cgo_names_first_failure(tmp_path, capsys):
    cfg = write(tmp_path, "c.toml", FAST_CGO.replace("alias_tol = 1.0", "alias_tol = 1e-300"))
    code, _, err = run(capsys, "cgo", "--config", cfg)
    assert code == 1 and "FAIL: aliasing[h=0.25]" in err


def test_avg_csv(tmp_path, capsys):
    cfg = write(tmp_path, "a.toml", FAST_AVG)
    code, out, _ = run(capsys, "avg", "--config", cfg)
    assert code == 0 and out.splitlines()[0] == "f,h,mc_ratio,mc_stderr"


@pytest.mark.parametrize(
    "sub,text",
    [
        ("dim-check", "bogus = 1\n"),
        ("dim-check", "d = 'three'\n"),
        ("dim-check", "d = [\n"),
        ("cgo", "case = 'b'\nm = 2\n"),
        ("cgo", "s = 1.2\n"),
        ("cgo", "h = [0.5, -0.1]\n"),
        ("cgo", "[[bumps]]\norder = 1\n"),
        ("avg", "lam = 1.0\ns = 0.1\n"),
        ("recover", "R = 1\nkmax = 4\n"),
        ("decompose", "d = 3\nxi = [1.0, 0.0]\n"),
    ],
)
def test_config_errors_exit_2(tmp_path, capsys, sub, text):
    cfg = write(tmp_path, "bad.toml", text)
    code, out, err = run(capsys, sub, "--config", cfg)
    assert code == 2 and out == "" and "config error" in err


def test_missing_config_file(capsys, tmp_path):
    assert run(capsys, "dim-check", "--config", str(tmp_path / "none.toml"))[0] == 2


def test_report_dir(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv(cli.REPORT_DIR_ENV, str(tmp_path / "out"))
    code, out, _ = run(capsys, "dim-check", "--emit", "csv")
    assert code == 0 and out == ""
    text = (tmp_path / "out" / "dim-check.csv").read_text()
    assert text.startswith("k,sym_dim,")


def test_byte_identical_reruns(tmp_path, capsys):
    cfg = write(tmp_path, "a.toml", FAST_AVG)
    first = run(capsys, "avg", "--config", cfg, "--seed", "3")[1]
    second = run(capsys, "avg", "--config", cfg, "--seed", "3")[1]
    other = run(capsys, "avg", "--config", cfg, "--seed", "4")[1]
    assert first == second and first != other


def test_case_window():
    assert cli.case_window("a", 2, 1.75, 0.5) == 0
    assert cli.case_window("b", 3, 2.0, 0.0) == 1
    with pytest.raises(cli.ConfigError):
        cli.case_window("a", 2, 2.0, 0.5)
    with pytest.raises(cli.ConfigError):
        cli.case_window("a", 2, 1.75, 0.9)
