import io
import json
import subprocess
import sys

import pytest

from crystals.cli import run
from crystals.core import from_json


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run([str(a) for a in argv], out, err)
    return code, out.getvalue(), err.getvalue()


@pytest.fixture
def k111(tmp_path):
    path = tmp_path / "k.json"
    assert call("gen", "--family", "A", "--c", "1,1,1", "--out", path)[0] == 0
    return path


def test_gen_then_stats(k111):
    code, out, _ = call("stats", k111)
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "vertices=64 edges=102"
    assert lines[1:4] == ["color1=34", "color2=34", "color3=34"]
    assert lines[4].startswith("seconds=")


def test_gen_single_vertex():
    code, out, _ = call("gen", "--family", "A", "--c", "0")
    obj = json.loads(out)
    assert code == 0 and obj["vertices"] == 1 and obj["edges"] == []


def test_assemble_then_iso(k111, tmp_path):
    other = tmp_path / "k2.json"
    code, _, err = call("assemble", "--c", "1,1,1", "--out", other)
    assert code == 0
    stats = json.loads(err)
    assert stats["templates"] > 0 and stats["peak_vertices"] >= 64
    assert call("iso", k111, other)[0] == 0
    assert other.read_text() == k111.read_text()


def test_iso_failure(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    call("gen", "--c", "1,0", "--out", a)
    call("gen", "--c", "0,1", "--out", b)
    code, out, _ = call("iso", a, b)
    assert code == 2 and out.strip() == "not isomorphic"


def test_worm_and_sail():
    code, out, _ = call("worm", "--c", "1,0")
    assert code == 0 and json.loads(out)["vertices"] == 5
    code, out, _ = call("sail", "--c", "1,2")
    assert code == 0 and json.loads(out)["vertices"] == 15
    assert call("sail", "--c", "1,2,3")[0] == 1


def test_extract_infers_parity(k111, tmp_path):
    code, out, _ = call("extract", k111)
    obj = json.loads(out)
    assert code == 0 and obj["family"] == "B" and obj["vertices"] == 16
    code, _, err = call("extract", "--kind", "C", k111)
    assert code == 1 and "B-extract" in err


def test_extract_non_palindromic(tmp_path):
    path = tmp_path / "k.json"
    call("gen", "--c", "1,2,3", "--out", path)
    assert call("extract", path)[0] == 1


def test_annotated_descriptions():
    code, out, _ = call("gen", "--family", "C", "--c", "1,0", "--annotate-descriptions")
    obj = json.loads(out)
    assert code == 0 and obj["vertices"] == 4
    assert obj["descriptions"][0] == [0, 0, 0, 0]
    assert len(obj["descriptions"]) == 4
    assert call("gen", "--family", "A", "--c", "1", "--annotate-descriptions")[0] == 1


def test_verify_exit_codes(k111, tmp_path):
    code, out, _ = call("verify", k111)
    assert code == 0 and json.loads(out)["summary"] is True
    broken = json.loads(k111.read_text())
    broken["edges"] = broken["edges"][1:]
    path = tmp_path / "broken.json"
    path.write_text(json.dumps(broken))
    code, out, _ = call("verify", path)
    assert code == 2 and json.loads(out)["summary"] is False
    code, out, _ = call("gen", "--family", "B", "--c", "2,1")
    bpath = tmp_path / "b.json"
    bpath.write_text(out)
    assert call("verify", bpath)[0] == 0
    assert call("verify", "--family", "C", bpath)[0] == 2


def test_export_dot(k111):
    code, out, _ = call("export", k111, "--format", "dot")
    assert code == 0 and out.startswith("digraph crystal {")
    assert out.count("->") == 102


def test_domain_errors():
    assert call("gen", "--c", "1,-1")[0] == 1
    assert call("gen", "--c", "a,b")[0] == 1
    assert call("gen")[0] == 1
    assert call("frobnicate")[0] == 1
    assert call("stats", "/nonexistent.json")[0] == 1
    assert call("gen", "--c", "1", "--threads", "0")[0] == 1


def test_resource_cap(monkeypatch):
    monkeypatch.setenv("CRYSTAL_MAX_VERTICES", "50")
    code, _, err = call("gen", "--c", "2,2,2")
    assert code == 3 and "vertices" in err


def test_output_is_byte_stable_across_threads():
    outs = {call("gen", "--family", "B", "--c", "1,1", "--threads", t)[1] for t in (1, 4)}
    outs.add(call("gen", "--family", "B", "--c", "1,1")[1])
    assert len(outs) == 1
    assert from_json(outs.pop()).c == (1, 1)


def test_console_script_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "crystals.cli", "stats", "--c", "1,1,1"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout.splitlines()[0] == "vertices=64 edges=102"
