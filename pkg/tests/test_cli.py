import json
import subprocess
import sys

import numpy as np
import pytest

from lutldpc.cli import main
from lutldpc.ldpc import regular_36, serialize_alist, ParityCheckMatrix


def run(*argv):
    try:
        return main([str(a) for a in argv])
    except SystemExit as exc:
        return exc.code


@pytest.fixture
def work(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    return tmp_path


@pytest.fixture
def toy_design(work):
    assert run("design", "--code", "3-6-96", "--snr-db", 3.0, "--iters", 3, "--out", "d.json") == 0
    return work / "d.json"


def test_design_writes_artifact_and_manifest(toy_design, capsys):
    man = json.loads((toy_design.parent / "d.json.manifest.json").read_text())
    assert man["subcommand"] == "design" and man["tool"] == "lutldpc"
    assert man["config"]["profile"] == {"d_v": 3, "d_c": 6, "rate": "1/2"}
    assert man["outputs"]["d.json"] == man["artifact_sha256"]


def test_design_usage_and_data_errors(work):
    assert run("design", "--code", "3-6-96", "--q-msg", 1) == 1
    assert run("design", "--code", "nope") == 1
    assert run("design", "--code", "3-6-96", "--tree-shape", "(c c") == 2
    h = ParityCheckMatrix.from_column_supports(2, [[0, 1], [0], [1]])
    (work / "irr.alist").write_text(serialize_alist(h))
    assert run("design", "--alist", "irr.alist") == 2
    (work / "bad.alist").write_text("3 2\nx\n")
    assert run("design", "--alist", "bad.alist") == 2
    assert run("design", "--alist", "missing.alist") == 2
    assert run() == 1
    assert run("frobnicate") == 1


def test_simulate_float_and_manifest(work, capsys):
    assert run("simulate", "--code", "3-6-96", "--decoder", "float", "--snr-list", "2,3",
               "--target-errors", 5, "--max-frames", 300, "--out", "f.csv") == 0
    lines = (work / "f.csv").read_text().splitlines()
    assert lines[0] == "ebn0_db,fer" and len(lines) == 3
    man = json.loads((work / "f.csv.manifest.json").read_text())
    assert man["seed"] == 0 and man["workers"] == 1 and len(man["timings"]) == 2
    assert man["config"]["decoder"]["variant"] == "float_ms"


def test_simulate_lut_with_designed_artifact(toy_design, work):
    args = ["simulate", "--code", "3-6-96", "--artifact", "d.json", "--snr-list", "3",
            "--target-errors", 5, "--max-frames", 200, "--extended", "--out", "l.csv"]
    assert run(*args) == 0
    assert (work / "l.csv").read_text().startswith("ebn0_db,frames,frame_errors")
    man = json.loads((work / "l.csv.manifest.json").read_text())
    assert "artifact" in man["inputs"]
    assert run(*args, "--iters", 4) == 2
    assert run(*args, "--q-msg", 4) == 2


def test_simulate_usage_errors(work):
    base = ["simulate", "--code", "3-6-96", "--decoder", "float", "--max-frames", 10]
    assert run(*base, "--snr-list", "abc") == 1
    assert run(*base, "--workers", 0) == 1
    assert run(*base, "--target-errors", 0) == 1
    assert run("simulate", "--code", "3-6-96") == 1   # lut needs an artifact here


def test_simulate_fixed_default_scale(work):
    assert run("simulate", "--code", "3-6-96", "--decoder", "fixed", "--snr-list", "3",
               "--max-frames", 64, "--out", "x.csv") == 0
    man = json.loads((work / "x.csv.manifest.json").read_text())
    dec = man["config"]["decoder"]
    assert (dec["q_ch"], dec["q_msg"]) == (5, 5) and dec["fixed_scale"] > 0


def _write(path, values):
    path.write_text("".join(f"{v}\n" for v in values))


def test_decode_float_shipped(work, capsys):
    _write(work / "llr.txt", [4.0] * 2047 + [-1.0])
    assert run("decode", "--decoder", "float", "--llr-file", "llr.txt") == 0
    bits = (work / "bits.txt").read_text().split()
    assert len(bits) == 2048 and set(bits) == {"0"}
    assert "syndrome satisfied" in capsys.readouterr().err
    man = json.loads((work / "bits.txt.manifest.json").read_text())
    assert man["syndrome_ok"] is True


def test_decode_lut_noiseless_labels(work):
    _write(work / "lab.txt", [15] * 2048)
    assert run("decode", "--llr-file", "lab.txt", "--input", "channel") == 0
    assert set((work / "bits.txt").read_text().split()) == {"0"}
    _write(work / "lab.txt", [0] * 2048)
    assert run("decode", "--llr-file", "lab.txt", "--input", "channel") == 0
    assert set((work / "bits.txt").read_text().split()) == {"1"}


def test_decode_data_errors(work):
    _write(work / "short.txt", [1.0] * 2047)
    assert run("decode", "--decoder", "float", "--llr-file", "short.txt") == 2
    _write(work / "lab.txt", [16] * 2048)
    assert run("decode", "--llr-file", "lab.txt", "--input", "channel") == 2
    _write(work / "even.txt", [2] * 2048)
    assert run("decode", "--decoder", "fixed", "--llr-file", "even.txt", "--input",
               "channel") == 2
    _write(work / "txt.txt", ["a"] * 2048)
    assert run("decode", "--decoder", "float", "--llr-file", "txt.txt") == 2
    assert run("decode", "--decoder", "float", "--llr-file", "nofile.txt") == 2


def test_decode_toy_with_alist(work, toy_design):
    (work / "toy.alist").write_text(serialize_alist(regular_36(96)))
    _write(work / "llr.txt", [3.0] * 96)
    assert run("decode", "--alist", "toy.alist", "--artifact", "d.json",
               "--llr-file", "llr.txt") == 0


def test_pipeline_report(work, capsys):
    assert run("pipeline-report", "--json", "r.json") == 0
    out = capsys.readouterr().out
    assert "407,552" in out and "647,168" in out and "1665" in out and "1014" in out
    assert "12.30" in out and "20.20" in out
    rep = json.loads((work / "r.json").read_text())
    assert [r["variant"] for r in rep] == ["lut", "adder_ms"]
    assert run("pipeline-report", "--freq-ghz", 0) == 1
    assert run("pipeline-report", "--n", -5) == 1
    assert run("pipeline-report", "--variant", "lut", "--q-msg", 4) == 0


def test_console_script_entry():
    out = subprocess.run([sys.executable, "-m", "lutldpc", "--version"], capture_output=True,
                         text=True)
    assert out.returncode == 0 and out.stdout.startswith("lutldpc ")
