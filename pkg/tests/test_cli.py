import json
import subprocess
import sys

import pytest

from c3recursion import cli
from c3recursion.cache import ENV_VAR, ResultCache, cache_key, default_cache_dir


@pytest.fixture(autouse=True)
def cache_dir(tmp_path, monkeypatch):
    d = tmp_path / "cache"
    monkeypatch.setenv(ENV_VAR, str(d))
    return d


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_fg_csv_rows(capsys):
    code, out, _ = run(capsys, "fg", "--genus", "2..3", "--framing", "1", "--format", "csv")
    assert code == 0
    assert out.splitlines() == ["genus,framing,value,matches", "2,1,1/5760,true", "3,1,-1/1451520,true"]


def test_fg_symbolic_json(capsys):
    code, out, _ = run(capsys, "fg", "--genus", "2", "--framing", "symbolic", "--format", "json")
    assert code == 0
    assert json.loads(out) == [{"genus": 2, "framing": "symbolic", "value": "1/5760", "matches_faber_pandharipande": True}]


@pytest.mark.parametrize("argv", [
    ("fg", "--genus", "1", "--framing", "1"),
    ("fg", "--genus", "2", "--framing", "0"),
    ("fg", "--genus", "2", "--framing", "-1"),
    ("fg", "--genus", "2", "--framing", "banana"),
    ("fg", "--genus", "3..2"),
    ("wgn", "--genus", "0", "--n-points", "1"),
    ("wgn", "--genus", "0", "--n-points", "2"),
    ("verify", "--suite", "bogus"),
])
def test_invalid_input_exit_2(capsys, argv):
    code, out, err = run(capsys, *argv)
    assert code == 2
    assert out == "" and "error" in err


def test_argparse_errors_exit_2(capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main(["fg", "--format", "xml"])
    assert exc.value.code == 2


def test_wgn_tables(capsys):
    code, out, _ = run(capsys, "wgn", "--genus", "1", "--n-points", "1", "--framing", "symbolic", "--format", "json")
    assert code == 0
    data = json.loads(out)
    assert data["basis"] == "zeta"
    assert data["entries"] == [{"b": [0], "coeff": "(f^2 + f + 1)/24"}, {"b": [1], "coeff": "(-f^2 - f)/24"}]
    code, out, _ = run(capsys, "wgn", "--genus", "0", "--n-points", "3", "--framing", "symbolic", "--format", "json")
    assert json.loads(out)["entries"] == [{"b": [0, 0, 0], "coeff": "1"}]


def test_verify_exit_codes(capsys):
    code, out, _ = run(capsys, "verify", "--suite", "fp", "--genus-max", "3", "--framing", "2")
    assert code == 0 and "suite fp (2): pass" in out


def test_verify_failure_exit_1(capsys, monkeypatch):
    from c3recursion import verify

    def broken(*a, **k):
        r = verify.VerificationReport("fp", "1")
        r.add("fp.g2", "forced", False, "F_2 = 0")
        return r

    monkeypatch.setattr(cli, "run_suite", broken)
    code, out, _ = run(capsys, "verify", "--suite", "fp", "--format", "json")
    assert code == 1
    assert json.loads(out)["status"] == "fail"


def test_precision_failure_exit_3(capsys, monkeypatch):
    from c3recursion.errors import PrecisionError

    def short(*a, **k):
        raise PrecisionError("short")

    monkeypatch.setattr(cli, "solve_free_energy", short)
    code, _, err = run(capsys, "fg", "--genus", "2", "--no-cache")
    assert code == 3 and "precision" in err


def test_warm_cache_is_byte_identical(capsys, cache_dir):
    argv = ("fg", "--genus", "2..4", "--framing", "symbolic", "--format", "csv")
    cold = run(capsys, *argv)
    files = sorted(p.name for p in cache_dir.rglob("*.json"))
    assert len(files) == 3
    warm = run(capsys, *argv)
    assert cold == warm
    nocache = run(capsys, *argv, "--no-cache")
    assert nocache == cold
    w_cold = run(capsys, "wgn", "--genus", "2", "--n-points", "2", "--framing", "3")
    w_warm = run(capsys, "wgn", "--genus", "2", "--n-points", "2", "--framing", "3")
    assert w_cold == w_warm


def test_cache_dir_flag_overrides_env(capsys, tmp_path, cache_dir):
    other = tmp_path / "other"
    run(capsys, "fg", "--genus", "2", "--cache-dir", str(other))
    assert list(other.rglob("*.json")) and not cache_dir.exists()


def test_out_file(capsys, tmp_path):
    target = tmp_path / "fg.csv"
    code, out, _ = run(capsys, "fg", "--genus", "2", "--format", "csv", "--out", str(target))
    assert code == 0 and out == ""
    assert target.read_text().splitlines()[1] == "2,1,1/5760,true"


def test_cache_store(tmp_path):
    cache = ResultCache(tmp_path)
    key = cache_key("v", "free_energy", 2, 1, "1", 20)
    assert cache.get(key) is None
    cache.put(key, {"x": 1})
    assert cache.get(key).payload == {"x": 1}
    assert not list(tmp_path.rglob(".tmp-*"))
    assert cache_key("v2", "free_energy", 2, 1, "1", 20) != key


def test_default_cache_dir_env(monkeypatch, tmp_path):
    monkeypatch.setenv(ENV_VAR, str(tmp_path))
    assert default_cache_dir() == tmp_path
    monkeypatch.delenv(ENV_VAR)
    assert default_cache_dir().name == "c3recursion"


def test_parse_genus():
    assert cli.parse_genus("2..5") == (2, 5)
    assert cli.parse_genus("4") == (4, 4)
    with pytest.raises(cli.InputError):
        cli.parse_genus("two")


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "c3recursion", "fg", "--genus", "2", "--format", "csv", "--no-cache"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout.splitlines()[-1] == "2,1,1/5760,true"
