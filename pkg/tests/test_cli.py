import csv
import json

import pytest

from hilldirac import banddata
from hilldirac.cli import (
    EXIT_FAIL, EXIT_INPUT, EXIT_NUMERIC, EXIT_OK, ConfigError, main, parse_config,
)
from hilldirac.pipeline import StageError

DIRAC_CONST = """
[operator]
kind = "dirac"

[potential.q1]
cos = [1.0]

[compute]
n_max = 6
"""

HILL = """
[operator]
kind = "hill"

[potential]
cos = [0.0, 0.5]
sin = [0.0, 0.2]

[compute]
n_max = 6
"""

FREE = """
[operator]
kind = "hill"

[compute]
n_max = 4
"""


@pytest.fixture
def write(tmp_path):
    def _w(name, text):
        p = tmp_path / name
        p.write_text(text)
        return str(p)
    return _w


def test_compute_deterministic(write, tmp_path):
    cfg = write("c.toml", DIRAC_CONST)
    a, b = str(tmp_path / "a.json"), str(tmp_path / "b.json")
    assert main(["compute", "--config", cfg, "--out", a]) == EXIT_OK
    assert main(["compute", "--config", cfg, "--out", b]) == EXIT_OK
    assert open(a, "rb").read() == open(b, "rb").read()
    doc = banddata.load(open(a).read())
    assert [r["n"] for r in doc["gaps"]] == [0]
    assert doc["gaps"][0]["height"]["value"] == pytest.approx(1.0, abs=1e-7)
    assert doc["config"]["operator"]["kind"] == "dirac"


def test_free_config_gives_empty_gaps(write, tmp_path):
    out = str(tmp_path / "f.json")
    assert main(["compute", "--config", write("f.toml", FREE), "--out", out]) == EXIT_OK
    assert banddata.load(open(out).read())["gaps"] == []


def test_verify_from_bands_and_config(write, tmp_path):
    cfg = write("c.toml", DIRAC_CONST)
    bands = str(tmp_path / "b.json")
    main(["compute", "--config", cfg, "--out", bands])
    r1, r2 = str(tmp_path / "r1.csv"), str(tmp_path / "r2.csv")
    assert main(["verify", "--bands", bands, "--report", r1]) == EXIT_OK
    assert main(["verify", "--config", cfg, "--report", r2]) == EXIT_OK
    assert open(r1).read() == open(r2).read()
    rows = list(csv.DictReader(open(r1)))
    assert rows and all(r["verdict"] != "FAIL" for r in rows)
    mirror = json.load(open(str(tmp_path / "r1.json")))
    assert mirror["summary"]["FAIL"] == 0 and len(mirror["checks"]) == len(rows)


def test_verify_select(write, tmp_path):
    cfg = write("c.toml", DIRAC_CONST + '\n[verify]\nselect = ["TD1"]\n')
    rep = str(tmp_path / "r.csv")
    assert main(["verify", "--config", cfg, "--report", rep]) == EXIT_OK
    assert {r["id"][:3] for r in csv.DictReader(open(rep))} == {"TD1"}


def test_corrupted_band_data(write, tmp_path):
    bad = write("bad.json", '{"schema": "hilldirac.banddata", ')
    assert main(["verify", "--bands", bad, "--report", str(tmp_path / "r.csv")]) == EXIT_INPUT


def test_config_errors(write, tmp_path, capsys):
    out = str(tmp_path / "x.json")
    assert main(["compute", "--config", write("b.toml", "[operator\nkind='hill'\n"),
                 "--out", out]) == EXIT_INPUT
    assert "line 1" in capsys.readouterr().err
    for text in ('[operator]\nkind = "x"\n', HILL + "\n[extra]\n", HILL.replace("n_max = 6", "n_max = 0"),
                 HILL.replace("sin = [0.0, 0.2]", 'sin = ["a"]'),
                 '[operator]\nkind = "hill"\n[potential]\ncos = [0.3, 1.0]\n'):
        with pytest.raises(ConfigError):
            parse_config(text)
    assert main(["compute", "--config", str(tmp_path / "missing.toml"), "--out", out]) == EXIT_INPUT
    assert main(["compute"]) == 2


def test_exit_codes_for_fail_and_numeric(write, tmp_path, monkeypatch):
    import hilldirac.cli as cli
    cfg = write("c.toml", DIRAC_CONST)
    bands = str(tmp_path / "b.json")
    main(["compute", "--config", cfg, "--out", bands])
    doc = banddata.load(open(bands).read())
    doc["gaps"][0]["M"]["value"] = 1e6  # violates T5-1a
    open(bands, "w").write(banddata.dump(doc))
    assert main(["verify", "--bands", bands, "--report", str(tmp_path / "r.csv")]) == EXIT_FAIL

    def boom(*a, **k):
        raise StageError("bands", RuntimeError("edge pairing failure"))
    monkeypatch.setattr(cli, "run", boom)
    assert main(["compute", "--config", cfg, "--out", bands]) == EXIT_NUMERIC


def test_sweep(write, tmp_path):
    cfg = write("h.toml", HILL)
    out = tmp_path / "s.csv"
    assert main(["sweep", "--config", cfg, "--param", "amp", "--values", "0.25,0.5,1.0",
                 "--out", str(out)]) == EXIT_OK
    rows = list(csv.DictReader(open(out)))
    assert [float(v) for v in dict.fromkeys(r["value"] for r in rows)] == [0.25, 0.5, 1.0]
    gaps = list(csv.DictReader(open(tmp_path / "s_gaps.csv")))
    g1 = [float(r["width"]) for r in gaps if r["n"] == "1"]
    assert len(g1) == 3 and g1[0] < g1[1] < g1[2]
    assert main(["sweep", "--config", cfg, "--param", "amp", "--values", "",
                 "--out", str(out)]) == EXIT_INPUT
    assert main(["sweep", "--config", cfg, "--param", "bogus", "--values", "1",
                 "--out", str(out)]) == EXIT_INPUT
