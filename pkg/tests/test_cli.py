import io
import json
import shutil
import subprocess
import sys

import pytest

from cgindex.cli import main
from cgindex.config import parse_config

from conftest import S2_CONFIG

CFG = str(S2_CONFIG)


def run(capsysbinary, *argv):
    code = main(list(argv))
    out, err = capsysbinary.readouterr()
    return code, out, err.decode()


def test_betti_csv(capsysbinary):
    code, out, _ = run(capsysbinary, "betti", "--d", "2", "--n", "1", "--max-k", "6", "--output", "csv")
    assert code == 0
    assert out.decode().splitlines() == ["degree,betti", "1,1", "3,2", "5,2"]


def test_betti_rejects_bad_class(capsysbinary):
    code, _, err = run(capsysbinary, "betti", "--d", "3", "--n", "2", "--max-k", "6")
    assert code == 3 and "error" in err


def test_json_is_byte_stable(capsysbinary):
    first = run(capsysbinary, "audit", CFG, "--m0", "1", "--output", "json")[1]
    second = run(capsysbinary, "audit", CFG, "--m0", "1", "--output", "json")[1]
    assert first == second


def test_audit_json(capsysbinary):
    code, out, _ = run(capsysbinary, "audit", CFG, "--m0", "1", "--output", "json")
    data = json.loads(out)
    assert code == 0
    assert data["q_expected"] == 2 and data["verdict"] == "pass"
    assert data["tuple"]["N"] == 17


def test_cij_text_and_pair(capsysbinary):
    code, out, _ = run(capsysbinary, "cij", CFG, "--epsilon", "3/100", "--m0", "1", "--pair",
                       "--output", "json")
    data = json.loads(out)
    assert code == 0
    assert data["tuple"]["N"] == 17
    assert [g["m"] for g in data["tuple"]["geodesics"]] == [12, 5]
    assert data["paired_tuple"]["N"] == 24 and data["paired_error"] is None


def test_cij_exhaustion_and_bad_epsilon(capsysbinary):
    assert run(capsysbinary, "cij", CFG, "--m0", "1", "--max-N", "16")[0] == 4
    assert run(capsysbinary, "cij", CFG, "--m0", "1", "--pair", "--max-N", "20")[0] == 4
    with pytest.raises(SystemExit) as exc:
        main(["cij", CFG, "--epsilon", "3/0"])
    assert exc.value.code == 2
    # decimal strings are exact rationals too
    assert run(capsysbinary, "cij", CFG, "--epsilon", "0.03", "--m0", "1")[0] == 0


def test_iterate_and_classify(capsysbinary):
    code, out, _ = run(capsysbinary, "iterate", CFG, "--max-m", "25", "--geodesic", "c1",
                       "--output", "csv")
    rows = out.decode().splitlines()
    assert code == 0 and rows[0].startswith("geodesic,m")
    assert any(r.startswith("c1,24,33") for r in rows)
    assert run(capsysbinary, "iterate", CFG, "--geodesic", "nope")[0] == 3
    code, out, _ = run(capsysbinary, "classify", CFG, "--output", "json")
    assert code == 0 and "c2" in out.decode()


def test_resonance_exit_codes(capsysbinary, tmp_path):
    assert run(capsysbinary, "resonance", CFG)[0] == 0
    broken = tmp_path / "one.cfg"
    broken.write_text(S2_CONFIG.read_text().split("[[geodesic]]\nname = \"c2\"")[0])
    assert len(parse_config(broken.read_text()).geodesics) == 1
    assert run(capsysbinary, "resonance", str(broken))[0] == 2


def test_morse(capsysbinary, tmp_path):
    code, out, _ = run(capsysbinary, "morse", CFG, "--max-p", "41", "--output", "json")
    assert code == 0 and json.loads(out)["identity"]["passed"]
    empty = tmp_path / "empty.cfg"
    empty.write_text("[manifold]\nd = 2\nn = 1\n[field]\nradicand = 2\n")
    code, out, _ = run(capsysbinary, "morse", str(empty), "--max-p", "5", "--output", "csv")
    assert code == 2
    assert out.decode().splitlines() == ["degree,geodesic,m"]


def test_config_errors(capsysbinary, tmp_path):
    bad = tmp_path / "bad.cfg"
    bad.write_text(S2_CONFIG.read_text().replace('b = "1/2"', 'b = 0.5'))
    code, _, err = run(capsysbinary, "resonance", str(bad))
    assert code == 3 and "floating" in err
    assert run(capsysbinary, "classify", str(tmp_path / "missing.cfg"))[0] == 3


def test_stdin(capsysbinary, monkeypatch):
    monkeypatch.setattr("sys.stdin", io.StringIO(S2_CONFIG.read_text()))
    code, out, _ = run(capsysbinary, "resonance", "-", "--output", "json")
    assert code == 0 and json.loads(out)["passed"]


def test_synthesize_round_trip(capsysbinary, tmp_path):
    code, out, _ = run(capsysbinary, "synthesize", "--d", "3", "--n", "1", "--seed", "0")
    assert code == 0
    path = tmp_path / "s3.cfg"
    path.write_bytes(out)
    assert len(parse_config(out.decode()).geodesics) == 4
    assert run(capsysbinary, "audit", str(path), "--epsilon", "1/20")[0] == 0
    assert run(capsysbinary, "synthesize", "--d", "2", "--n", "1", "--attempts", "0")[0] == 4


def test_audit_exit_codes(capsysbinary, tmp_path):
    hyp = tmp_path / "hyp.cfg"
    hyp.write_text('[manifold]\nd = 2\nn = 1\n[field]\nradicand = 2\n[[geodesic]]\nname = "h"\n'
                   'initial_index = 1\nblocks = [{ type = "H", sign = "+" }]\n')
    assert run(capsysbinary, "audit", str(hyp))[0] == 3
    assert run(capsysbinary, "audit", CFG, "--m0", "1", "--max-N", "16")[0] == 4


@pytest.mark.skipif(shutil.which("cgindex") is None, reason="console script not installed")
def test_console_script():
    proc = subprocess.run(["cgindex", "betti", "--d", "2", "--n", "1", "--max-k", "6", "--output", "csv"],
                          capture_output=True, check=False)
    assert proc.returncode == 0 and proc.stdout.startswith(b"degree,betti")
    proc = subprocess.run([sys.executable, "-m", "cgindex.cli", "resonance", CFG],
                          capture_output=True, check=False)
    assert proc.returncode == 0
