import csv
import io
import json
import math

import pytest

from lmoment import cli
from lmoment.cli import (ConfigError, Row, RunConfig, main, parse_config_text, parse_q_list, parse_shifts,
                         stencil_radius, worker_count)


@pytest.fixture(autouse=True)
def no_thread_env(monkeypatch):
    for var in cli.THREAD_VARS:
        monkeypatch.delenv(var, raising=False)


def run(tmp_path, *argv, name="out.csv"):
    out = tmp_path / name
    code = main([*argv, "--out", str(out)])
    if code in (2, 3):
        return code, None, None
    return code, out.read_bytes(), json.loads((tmp_path / (name + ".json")).read_text())


def test_q_list_forms():
    assert parse_q_list("5,7, 11") == [5, 7, 11]
    assert parse_q_list("10..30") == [11, 13, 17, 19, 23, 29]
    assert parse_q_list("10..30:3") == [11, 17, 29]
    assert parse_q_list("") == []
    with pytest.raises(ConfigError):
        parse_q_list("10..30:9")
    with pytest.raises(ConfigError):
        parse_q_list("a,b")


def test_shift_and_stencil_parsing():
    sh = parse_shifts("0.01+0.02i, -0.03, 0.01j, 0.04")
    assert sh.alpha == 0.01 + 0.02j and sh.delta == 0.04
    assert parse_shifts(" ") is None
    with pytest.raises(ConfigError):
        parse_shifts("0.1,0.2")
    assert stencil_radius("0.5/logq", 101) == pytest.approx(0.5 / math.log(101))
    assert stencil_radius("0.07", 101) == 0.07
    with pytest.raises(ConfigError):
        stencil_radius("wide", 101)


def test_config_text():
    d = parse_config_text("# comment\nq = 101\n\nseed=3  # trailing\ncache-dir=/tmp/x\n")
    assert d == {"q": "101", "seed": 3, "cache_dir": "/tmp/x"}
    with pytest.raises(ConfigError):
        parse_config_text("colour=blue")
    with pytest.raises(ConfigError):
        parse_config_text("seed=three")
    with pytest.raises(ConfigError):
        parse_config_text("just words")


def test_run_id_ignores_volatile_fields():
    a = RunConfig(command="moment", q="13")
    b = RunConfig(command="moment", q="13", threads=8, out="x.csv", cache_dir="/c")
    c = RunConfig(command="moment", q="13", seed=1)
    assert a.run_id() == b.run_id() != c.run_id()
    assert len(a.run_id()) == 12


def test_worker_count_env(monkeypatch):
    assert worker_count(RunConfig(threads=3)) == 3
    monkeypatch.setenv("LMOOMENT_THREADS", "5")
    assert worker_count(RunConfig(threads=3)) == 5
    monkeypatch.setenv("LMOMENT_THREADS", "2")
    assert worker_count(RunConfig(threads=3)) == 2
    monkeypatch.setenv("LMOMENT_THREADS", "many")
    with pytest.raises(ConfigError):
        worker_count(RunConfig())


def test_row_verdicts():
    assert Row("s", "x", 1.0, 1.0 + 1e-9, 1e-8, "rel").verdict is True
    assert Row("s", "x", 1.0, 2.0, 1e-8, "abs").verdict is False
    assert Row("s", "x", 0.5, tolerance=1.0, mode="le").verdict is True
    assert Row("s", "x", math.nan, tolerance=1.0, mode="le").verdict is False
    r = Row("s", "x", 3.0)
    assert r.verdict is None and math.isnan(r.abs_dev)


def test_conjecture_output_shape(tmp_path):
    code, data, summary = run(tmp_path, "conjecture", "--q", "101", "--shifts", "0.05+0.02j,-0.03,0.01j,0.04-0.01j")
    assert code == 0
    assert b"\r" not in data
    rows = list(csv.DictReader(io.StringIO(data.decode())))
    assert list(rows[0]) == cli.HEADER
    assert [r["subject"] for r in rows][:7] == [f"term{k}" for k in range(1, 7)] + ["six_term_total"]
    assert rows[-1]["pass"] == "true"
    assert summary["fail"] == 0 and summary["run_id"] == rows[0]["run_id"]


def test_config_file_and_flag_precedence(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("q=211\nparity=odd\n")
    code, data, _ = run(tmp_path, "conjecture", "--config", str(cfg), "--q", "101")
    rows = list(csv.DictReader(io.StringIO(data.decode())))
    assert code == 0 and rows[0]["q"] == "101" and rows[0]["parity"] == "odd"


@pytest.mark.parametrize("argv", [
    ["conjecture", "--q", "101", "--q-list", "5,7"],
    ["conjecture", "--q", "1..x"],
    ["fit-c4", "--q-list", "101,103,107"],
    ["conjecture", "--q", "101", "--stencil", "wide"],
])
def test_config_errors_exit_2(tmp_path, argv):
    assert run(tmp_path, *argv)[0] == 2


def test_bad_config_file_exit_2(tmp_path):
    assert run(tmp_path, "conjecture", "--config", str(tmp_path / "missing.cfg"))[0] == 2


def test_domain_error_exit_3(tmp_path):
    assert run(tmp_path, "moment", "--q", "15")[0] == 3
    assert run(tmp_path, "conjecture", "--q", "101", "--shifts", "0.01,0.02,-0.01,0.05")[0] == 3


def test_failing_check_exit_1(tmp_path):
    code, _, summary = run(tmp_path, "conjecture", "--q", "101", "--tol", "1e-30")
    assert code == 1 and summary["fail"] == 1


def test_thread_count_does_not_change_bytes(tmp_path, monkeypatch):
    argv = ["expsum-scan", "--q-list", "101,211"]
    _, one, s1 = run(tmp_path, *argv, name="a.csv")
    monkeypatch.setenv("LMOMENT_THREADS", "4")
    _, four, s4 = run(tmp_path, *argv, name="b.csv")
    monkeypatch.delenv("LMOMENT_THREADS")
    monkeypatch.setenv("LMOOMENT_THREADS", "3")
    _, three, _ = run(tmp_path, *argv, name="c.csv")
    assert one == four == three
    assert s1 == s4


def test_cache_cold_and_warm_identical(tmp_path):
    cache = tmp_path / "cache"
    argv = ["moment", "--q", "13", "--shifts", "0.05+0.02j,-0.03,0.01j,0.04-0.01j", "--cache-dir", str(cache)]
    _, cold, _ = run(tmp_path, *argv, name="cold.csv")
    n_files = len(list(cache.glob("*.npy")))
    _, warm, _ = run(tmp_path, *argv, name="warm.csv")
    assert n_files > 0 and len(list(cache.glob("*.npy"))) == n_files
    assert cold == warm
    _, none, _ = run(tmp_path, *argv[:-2], name="none.csv")
    assert none == cold


def test_summary_to_stderr_without_out(capsys):
    assert main(["conjecture", "--q", "101"]) == 0
    out, err = capsys.readouterr()
    assert out.startswith(",".join(cli.HEADER))
    assert json.loads(err)["command"] == "conjecture"
