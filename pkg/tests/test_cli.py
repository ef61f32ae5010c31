import subprocess
import sys

import pytest

from goldbach_ap.cli import main
from goldbach_ap.lfun import ingest_zero_table
from goldbach_ap.characters import character


@pytest.fixture(autouse=True)
def no_env_cache(monkeypatch):
    monkeypatch.delenv("GOLDBACH_CACHE_DIR", raising=False)


def _body(text):
    return [ln for ln in text.splitlines() if not ln.startswith("#")]


def test_sieve_csv_header(tmp_path):
    out = tmp_path / "sieve.csv"
    assert main(["sieve", "--limit", "10000", "--samples", "5", "--out", str(out)]) == 0
    lines = out.read_text(encoding="utf-8").splitlines()
    assert lines[0].startswith("# goldbach-ap ")
    assert "# command: sieve" in lines
    assert any(ln.startswith("# limit=") for ln in lines)
    body = _body(out.read_text())
    assert body[0] == "x,psi,psi_minus_x"
    assert len(body) == 6


def test_stdout_output(capsys):
    assert main(["sieve", "--limit", "1000", "--samples", "3"]) == 0
    assert "x,psi,psi_minus_x" in capsys.readouterr().out


def test_zeros_output_is_ingestible(tmp_path):
    out = tmp_path / "z.txt"
    assert main(["zeros", "--modulus", "1", "--char-index", "0", "--height", "50", "--out", str(out)]) == 0
    zs = ingest_zero_table(out, character(1, 0), recertify=True)
    assert len(zs) == 10
    assert abs(zs.ordinates[0] - 14.134725141734693) < 1e-9


@pytest.mark.parametrize(
    "argv",
    [
        ["theorem", "--q1", "3", "--a1", "3", "--q2", "4", "--a2", "3"],
        ["theorem", "--q1", "3", "--a1", "1", "--q2", "4", "--a2", "3", "--height", "2e4"],
        ["theorem", "--q1", "3", "--a1", "1", "--q2", "4", "--a2", "3", "--xmax", "2e7"],
        ["zeros", "--modulus", "6", "--char-index", "1"],
        ["audit"],
        ["no-such-command"],
    ],
)
def test_invalid_config_exit_2(argv, tmp_path):
    assert main(argv + ["--out", str(tmp_path / "x.csv")] if argv[0] != "no-such-command" else argv) == 2


def test_io_failure_exit_4(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    assert main(["sieve", "--limit", "1000", "--samples", "3", "--out", str(blocker / "out.csv")]) == 4


def test_red_flag_exit_3(tmp_path):
    out = tmp_path / "ms.csv"
    code = main(["mean-square", "--modulus", "1", "--N", "200", "--xi", "0.5", "--ratio-limit", "1e-6",
                 "--out", str(out)])
    assert code == 3
    assert len(_body(out.read_text())) == 2  # the report is still written


def test_audit_exit_0(tmp_path):
    out = tmp_path / "a.csv"
    assert main(["audit", "--q", "12", "--c1", "0.1", "--grid", "2000", "--out", str(out)]) == 0


def test_env_overrides_cache_dir(tmp_path, monkeypatch):
    env_dir, flag_dir = tmp_path / "env", tmp_path / "flag"
    monkeypatch.setenv("GOLDBACH_CACHE_DIR", str(env_dir))
    assert main(["sieve", "--limit", "2000", "--samples", "3", "--cache-dir", str(flag_dir),
                 "--out", str(tmp_path / "s.csv")]) == 0
    assert (env_dir / "mangoldt.bin").exists()
    assert not flag_dir.exists()


def test_short_sieve_cache_is_replaced(tmp_path, caplog):
    cache = tmp_path / "c"
    main(["sieve", "--limit", "1000", "--samples", "3", "--cache-dir", str(cache), "--out", str(tmp_path / "a")])
    size = (cache / "mangoldt.bin").stat().st_size
    with caplog.at_level("INFO"):
        main(["sieve", "--limit", "5000", "--samples", "3", "--cache-dir", str(cache), "--out", str(tmp_path / "b")])
    assert (cache / "mangoldt.bin").stat().st_size > size
    assert "recomputing" in caplog.text


def test_theorem_rows_and_rerun_identical(tmp_path):
    argv = ["theorem", "--q1", "3", "--a1", "1", "--q2", "4", "--a2", "3", "--xmax", "20000",
            "--samples", "6", "--height", "100", "--cache-dir", str(tmp_path / "cache")]
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(argv + ["--out", str(a)]) == 0
    assert main(argv + ["--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    body = _body(a.read_text())
    assert body[0].startswith("X,q1,a1,q2,a2,lhs")
    assert len(body) == 7


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "goldbach_ap", "--version"], capture_output=True, text=True)
    assert r.returncode == 0 and "0.1.0" in r.stdout
