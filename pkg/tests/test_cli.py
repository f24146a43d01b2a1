import io
import json
import subprocess
import sys

from jfun.cli import run


def call(*argv):
    out = io.StringIO()
    code = run(list(argv), out)
    return code, out.getvalue()


def test_coeff_plain_and_json():
    assert call("coeff", "1") == (0, "196884\n")
    code, text = call("coeff", "2", "--json")
    payload = json.loads(text)
    assert code == 0 and set(payload) == {"n", "digits", "value", "method", "elapsed_ms"}
    assert payload["value"] == "21493760" and payload["digits"] == 8
    assert call("coeff", "10", "--hex")[1].strip() == format(22567393309593600, "x")
    assert call("coeff", "600", "--method", "hybrid", "--mmin", "4096")[0] == 0


def test_usage_errors():
    assert call("coeff", "-5")[0] == 2
    assert call("coeff", "abc")[0] == 2
    assert call("frobnicate")[0] == 2
    assert call("coeff", "3", "--bogus")[0] == 2
    assert call("search", "10", "5")[0] == 2
    assert call("residue", "3")[0] == 2


def test_residue_series_congruence():
    assert call("residue", "2", "--mod", "65536") == (0, "63488\n")
    code, text = call("series", "3", "--mod", "1000")
    assert text.splitlines() == ["-1 1", "0 744", "1 884", "2 760", "3 970"]
    assert call("congruence", "457871")[1] == "none\n"
    assert call("congruence", "2")[1].startswith("63488 mod 65536")
    payload = json.loads(call("congruence", "100", "--json")[1])
    assert payload["modulus"] == str(2**19 * 5**4)


def test_kloosterman_and_bound():
    code, text = call("kloosterman", "1", "1", "3")
    mid, rad = text.split()
    assert abs(float(mid) + 1) < 1e-15 and float(rad) < 1e-15
    code, text = call("bound", "1", "5")
    assert code == 0 and 1000 < float(text) < 3000


def test_profile_and_search(tmp_path):
    out = tmp_path / "p.csv"
    assert call("profile", "10", "--nmax", "5", "--out", str(out))[0] == 0
    assert out.read_text().startswith("N,actual_error,bound\n")
    code, text = call("search", "0", "71", "--jobs", "1", "--resume", str(tmp_path / "c.jsonl"))
    assert code == 0 and json.loads(text)["n"] == 71


def test_verify_and_compute_error(tmp_path):
    assert call("verify", "50")[0] == 0
    bad = tmp_path / "bad.jsonl"
    bad.write_text("not json\n")
    assert call("search", "0", "3", "--resume", str(bad))[0] == 1


def test_module_entry_stdout_is_payload_only():
    proc = subprocess.run(
        [sys.executable, "-m", "jfun", "-v", "coeff", "1000"],
        capture_output=True,
        text=True,
        check=True,
    )
    assert proc.stdout.strip().isdigit() and len(proc.stdout.strip()) == 171


def test_jobs_env_fallback(monkeypatch):
    from jfun.cli import _default_jobs

    monkeypatch.setenv("JFUN_THREADS", "3")
    assert _default_jobs() == 3
    monkeypatch.setenv("JFUN_THREADS", "zero")
    assert _default_jobs() >= 1
