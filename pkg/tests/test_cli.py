from __future__ import annotations

import json
import subprocess
import sys

import pytest

from sym2gw.cli import ResultEnvelope, main, resolve_cache_path, run_invariant
from sym2gw.wdvv_engine import FINGERPRINT


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def cache(tmp_path):
    return str(tmp_path / "cache.txt")


def test_invariant_examples(capsys, cache):
    code, out, _ = run(capsys, "invariant", "--degree", "1", "a^4, a^2", "--cache", cache)
    assert code == 0 and out.strip() == "<a^4, a^2>_1 = 6"
    code, out, _ = run(capsys, "invariant", "-d", "1", "g2, g2, g, g", "--cache", cache)
    assert code == 0 and out.strip().endswith("= -1/2")
    code, out, _ = run(capsys, "invariant", "-d", "5", "1, a, a^2", "--cache", cache, "--json")
    env = json.loads(out)
    assert env["result"] == {"value": "0", "reason": "unit axiom", "terms": 1}


@pytest.mark.parametrize(
    "expr, degree, reason",
    [("a^4, g1", 1, "parity"), ("a^3, a^3", 0, "dimension"), ("0*a, a", 1, "zero insertion")],
)
def test_zero_results_carry_reasons(capsys, cache, expr, degree, reason):
    code, out, _ = run(capsys, "invariant", "-d", str(degree), expr, "--cache", cache, "--json")
    assert code == 0
    result = json.loads(out)["result"]
    assert result["value"] == "0" and result["reason"] == reason


def test_json_envelope_round_trips(capsys, cache):
    code, out, _ = run(capsys, "invariant", "-d", "1", "g2, g2, g, g", "--json", "--cache", cache)
    env = ResultEnvelope.from_json(out)
    assert env.verb == "invariant"
    assert env.inputs == {"expression": "g2, g2, g, g", "degree": 1}
    assert env.result["value"] == "-1/2"
    assert env.provenance == {"1|6,6,8,8": "computed"}
    assert env.fingerprint == FINGERPRINT
    assert env.to_json() == out.strip()
    assert "timing" not in json.loads(out)


def test_provenance_reports_cache_hits(capsys, cache):
    run(capsys, "invariant", "-d", "1", "g2, g2, g, g", "--cache", cache)
    _, out, _ = run(capsys, "invariant", "-d", "1", "g2, g2, g, g", "--cache", cache, "--json")
    assert json.loads(out)["provenance"] == {"1|6,6,8,8": "cache"}


def test_timing_is_opt_in(capsys, cache):
    _, out, _ = run(capsys, "invariant", "-d", "1", "a^4, a^2", "--cache", cache, "--json", "--timing")
    assert "seconds" in json.loads(out)["timing"]


def test_no_floats_in_output(capsys, cache):
    _, out, _ = run(capsys, "invariant", "-d", "1", "1/3*g2, g2, g, g", "--cache", cache, "--json")
    assert json.loads(out)["result"]["value"] == "-1/6"
    _, out, _ = run(capsys, "ring", "--show", "pairing", "--cache", cache)
    assert "." not in out


def test_parse_errors_are_usage_errors(capsys, cache):
    code, _, err = run(capsys, "invariant", "-d", "1", "a^4, a^", "--cache", cache)
    assert code == 2 and "position 7" in err


def test_unstable_query_is_a_usage_error(capsys, cache):
    code, _, err = run(capsys, "invariant", "-d", "0", "a, a^2", "--cache", cache)
    assert code == 2 and "unstable" in err


@pytest.mark.parametrize(
    "argv",
    [["bogus"], ["ring", "--frobnicate"], ["invariant", "a"], ["crc", "check"], [],
     ["export", "--what", "tables", "--out", "x"], ["ring", "--show", "products", "--eval", "a"]],
)
def test_bad_command_lines_exit_2(capsys, argv):
    code, _, _ = run(capsys, *argv)
    assert code == 2


def test_ring_views(capsys, cache):
    code, out, _ = run(capsys, "ring", "--cache", cache)
    assert code == 0 and "a*g = 2*g1" in out and "g*g = a^2 - b" in out
    code, out, _ = run(capsys, "ring", "--show", "relations", "--json", "--cache", cache)
    assert code == 0 and all(r["vanishes"] for r in json.loads(out)["result"])
    code, out, _ = run(capsys, "ring", "--eval", "(a^2 - 2*b)^2", "--cache", cache)
    assert "integral: 1" in out
    code, out, _ = run(capsys, "ring", "--eval", "T2^4", "--json", "--cache", cache)
    assert json.loads(out)["result"] == {"class": "12*T1^2*T2^2", "ring": "hilbert", "integral": "3"}


def test_hyperelliptic_verb(capsys, cache):
    code, out, _ = run(capsys, "hyperelliptic", "--degree", "1", "--max-genus", "1", "--json", "--cache", cache)
    assert code == 0
    rows = json.loads(out)["result"]["rows"]
    assert [r["E"] for r in rows] == ["0", "0"]
    code, _, _ = run(capsys, "hyperelliptic", "--degree", "0", "--max-genus", "1", "--cache", cache)
    assert code == 2


def test_crc_verb(capsys, cache):
    code, out, _ = run(capsys, "crc", "verify", "--max-genus", "2", "--json", "--cache", cache)
    assert code == 0
    assert all(r["status"] == "pass" for r in json.loads(out)["result"])


def test_export(capsys, tmp_path, cache):
    out_path = tmp_path / "table.json"
    code, out, _ = run(capsys, "export", "--what", "invariants", "--out", str(out_path), "--cache", cache)
    assert code == 0
    data = json.loads(out_path.read_text())
    assert data["fingerprint"] == FINGERPRINT
    values = {row["key"]: row["value"] for row in data["invariants"]}
    assert values["1|2,5"] == "6"
    assert values["1|6,6,8,8"] == "-1/2"
    assert values["0|6,6,6,7"] == "-3/4"
    first = out_path.read_bytes()
    run(capsys, "export", "--what", "invariants", "--out", str(out_path), "--cache", cache)
    assert out_path.read_bytes() == first


def test_cache_location_precedence(monkeypatch, tmp_path):
    monkeypatch.delenv("SYM2GW_CACHE", raising=False)
    assert resolve_cache_path(None).name == "invariants.cache"
    monkeypatch.setenv("SYM2GW_CACHE", str(tmp_path / "env.cache"))
    assert resolve_cache_path(None) == tmp_path / "env.cache"
    assert resolve_cache_path(str(tmp_path / "flag.cache")) == tmp_path / "flag.cache"


def test_environment_variable_selects_cache(capsys, monkeypatch, tmp_path):
    monkeypatch.setenv("SYM2GW_CACHE", str(tmp_path / "env.cache"))
    monkeypatch.chdir(tmp_path)
    run(capsys, "invariant", "-d", "1", "g2, g2, g, g")
    assert (tmp_path / "env.cache").exists()
    assert not (tmp_path / ".sym2gw").exists()


def test_corrupted_cache_is_rejected_and_rewritten(capsys, caplog, tmp_path):
    path = tmp_path / "cache.txt"
    path.write_text("# sym2gw invariant cache\n# format: 1\n# fingerprint: deadbeef\n# levels:\n1|6,6,8,8 = 7\n")
    code, out, err = run(capsys, "invariant", "-d", "1", "g2, g2, g, g", "--cache", str(path))
    assert code == 0 and out.strip().endswith("= -1/2")
    assert "fingerprint mismatch" in caplog.text
    assert "1|6,6,8,8 = -1/2" in path.read_text()


def test_run_invariant_api():
    env = run_invariant("g2, g2, g, g, g, g", 1)
    assert env.result["value"] == "1/2"


def test_module_entry_point(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "sym2gw", "invariant", "-d", "1", "a^4, a^2", "--cache", str(tmp_path / "c")],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0 and proc.stdout.strip() == "<a^4, a^2>_1 = 6"
    proc = subprocess.run([sys.executable, "-m", "sym2gw", "nope"], capture_output=True, text=True, check=False)
    assert proc.returncode == 2
