import json
import subprocess
import sys

import pytest

from linweb.cli import run


def call(capsys, *argv):
    code = run(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_entails_exit_codes(capsys):
    assert call(capsys, "entails", "x&(y|z)", "(x&y)|z")[0] == 0
    assert call(capsys, "entails", "x|y", "x&y")[0] == 1


def test_trivial_lists_variables(capsys):
    code, out, _ = call(capsys, "trivial", "x&y", "x|y")
    assert code == 0
    assert "x" in out and "y" in out
    assert call(capsys, "trivial", "x&(y|z)", "(x&y)|z")[0] == 1


def test_derive_one_medial_step(capsys):
    code, out, _ = call(capsys, "derive", "--rules", "sm", "(w&x)|(y&z)", "(w|y)&(x|z)")
    assert code == 0 and "medial" in out and "length 1" in out


def test_derive_json_feeds_chains_and_flows(capsys, tmp_path):
    code, out, _ = call(capsys, "derive", "--json", "(w&x)|(y&z)", "(w|y)&(x|z)")
    assert code == 0
    path = tmp_path / "d.json"
    path.write_text(out)
    assert json.loads(out)["steps"][0]["rule"] == "medial"
    assert call(capsys, "chains", f"@{path}")[0] == 0
    code, out, _ = call(capsys, "flow", "extract", "--json", f"@{path}")
    assert code == 0
    flow = tmp_path / "f.json"
    flow.write_text(out)
    assert call(capsys, "flow", "loops", f"@{flow}")[0] == 1


def test_derive_unreachable(capsys):
    code, out, _ = call(capsys, "derive", "x|y", "x&y")
    assert code == 1 and "exhausted" in out


def test_families(capsys):
    code, out, _ = call(capsys, "minterms", "((v|w)&x)|(y&z)")
    assert code == 0 and out.split("\n")[:3] == ["{v, x}", "{w, x}", "{y, z}"]
    code, out, _ = call(capsys, "maxterms", "--method", "clique", "--json", "((v|w)&x)|(y&z)")
    assert sorted(map(tuple, json.loads(out)["sets"])) == [("v", "w", "y"), ("v", "w", "z"), ("x", "y"), ("x", "z")]


def test_web_outputs(capsys):
    code, out, _ = call(capsys, "web", "--json", "((v|w)&x)|(y&z)")
    data = json.loads(out)
    assert (data["e_and"], data["e_or"]) == (3, 7)
    code, out, _ = call(capsys, "web", "--dot", "x&y")
    assert out.startswith("graph web {")


def test_readonce(capsys):
    assert call(capsys, "readonce", "x&(y|z)")[0] == 0
    assert call(capsys, "readonce", "--minterms", "x y;y z;x z", "--ground", "x,y,z")[0] == 1


def test_enumerate(capsys):
    code, out, _ = call(capsys, "enumerate", "--count", "abcd")
    assert code == 0 and out.strip() == "52"


def test_misc_commands(capsys):
    assert call(capsys, "sound", "x&(y|z)", "(x&y)|z")[0] == 0
    assert call(capsys, "medialpre", "(w&x)|(y&z)", "(w|y)&(x|z)")[0] == 0
    assert call(capsys, "minimal", "x&(y|z)", "(x&y)|z")[0] == 0
    assert call(capsys, "reduce", "x|~x")[0] == 0
    assert call(capsys, "detriv", "x&(y1|y2)", "x|(y1&y2)")[0] == 0
    g1, g2 = "v,w,x,y,z:rgggrggrgr", "v,w,x,y,z:rggrrggrgr"
    assert call(capsys, "graph", "rel-and", g1, g2)[0] == 0
    assert call(capsys, "graph", "rel-or", g1, g2)[0] == 1


@pytest.mark.parametrize(
    "argv",
    [
        ["web", "x&("],
        ["entails", "x", "~(y)"],
        ["derive", "--rules", "nosuchrule", "x", "y"],
        ["chains", "@/nonexistent/file.json"],
    ],
)
def test_errors_exit_2(capsys, argv):
    code, _, err = call(capsys, *argv)
    assert code == 2 and err.startswith("error:")


def test_budget_env(capsys, monkeypatch):
    monkeypatch.setenv("LINWEB_BUDGET", "0")
    code, out, _ = call(capsys, "derive", "x&(y|z)", "(x&y)|z")
    assert code == 1
    monkeypatch.setenv("LINWEB_BUDGET", "lots")
    assert call(capsys, "derive", "x&(y|z)", "(x&y)|z")[0] == 2


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "linweb", "entails", "x&(y|z)", "(x&y)|z"], capture_output=True, text=True
    )
    assert proc.returncode == 0 and proc.stdout.strip() == "entails"
