import json
import math

from .cli import main
from .gaussian import GaussianScenario, dump_scenario

FM_INPUT = """\
# two split rates
R1 - R_10n - R_11n = 0
R_10n <= {A}
R_11n <= {B}
-R_10n <= 0
-R_11n <= 0
"""


def test_templates_list(capsys):
    assert main(["templates", "list"]) == 0
    out = capsys.readouterr().out.splitlines()
    assert "SUP_REGION (sup)" in out
    assert "BIN_DEC2" in out


def test_templates_dump(capsys):
    assert main(["templates", "dump", "sup"]) == 0
    out = capsys.readouterr().out
    assert "[c9] 2*R1 + R2 <=" in out
    assert "@union-redundant" in out
    assert main(["templates", "dump", "HK_DEC1", "--fm-input"]) == 2


def test_fm(tmp_path, capsys):
    path = tmp_path / "in.txt"
    path.write_text(FM_INPUT)
    assert main(["fm", str(path), "--eliminate", "R_10n,R_11n"]) == 0
    assert "R1 <= {A} + {B}" in capsys.readouterr().out.splitlines()
    assert main(["fm", str(path), "--eliminate", "R_99"]) == 2


def test_fm_errors(tmp_path):
    path = tmp_path / "bad.txt"
    path.write_text("R1 <= 1\nR1 <= 3/0\n")
    assert main(["fm", str(path)]) == 3
    assert main(["fm", str(tmp_path / "missing.txt")]) == 3
    empty = tmp_path / "empty.txt"
    empty.write_text("R1 - R_10n = 0\nR_10n - R1 <= -2\n")
    assert main(["fm", str(empty), "--eliminate", "R_10n"]) == 2


def test_usage_errors():
    assert main(["region", "--bogus"]) == 2
    assert main(["frobnicate"]) == 2
    assert main(["verify", "nope"]) == 2
    assert main(["sweep", "--symmetric", "6", "2", "1", "--resolution", "x"]) == 2


def test_verify(tmp_path):
    out = tmp_path / "report.json"
    assert main(["verify", "theorem2-fm", "--out", str(out)]) == 0
    reports = json.loads(out.read_text())
    assert reports[0]["id"] == "theorem2-fm"
    assert reports[0]["passed"]


def test_region_split(tmp_path):
    scn = tmp_path / "scn.json"
    dump_scenario(GaussianScenario(1, 1, 1, 1, 0, 0, 3, 3), str(scn))
    split = tmp_path / "split.json"
    split.write_text(json.dumps({"var_11n": 3.0}))
    out = tmp_path / "region.json"
    args = ["region", "--scenario", str(scn), "--split", str(split), "--format", "json", "--out", str(out)]
    assert main(args) == 0
    region = json.loads(out.read_text())
    assert abs(region["metrics"]["max_r1"] - 2.0) < 1e-9
    assert abs(region["metrics"]["max_r2"]) < 1e-9
    assert region["template"] == "SUP_REGION"
    split.write_text(json.dumps({"var_11n": 4.0}))
    assert main(args) == 2


def test_sweep_csv(capsys):
    assert main(["sweep", "--symmetric", "6", "2", "1", "--template", "hk", "--resolution", "3", "--refine", "0"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "R1,R2"
    r1 = float(lines[1].split(",")[0])
    assert abs(r1 - math.log2(2.5)) < 1e-9
