import os
import shutil
import subprocess
import sys

import pytest

from bxsynth.cli import (
    EXIT_ERROR, EXIT_NOSOLUTION, EXIT_OK, EXIT_TIMEOUT, Session, main, run_benchmark,
)
from bxsynth.config import Config
from bxsynth.surface import parse_spec

from conftest import corpus_path

FLIP = corpus_path("flip")


def test_synth_ok(capsys):
    assert main(["synth", FLIP, "--timeout", "60"]) == EXIT_OK
    out, err = capsys.readouterr()
    spec = parse_spec(out, "out.bxs")
    assert spec.entry is not None
    assert err.startswith("# ") and "sketches" in err


def test_synth_all(capsys):
    assert main(["synth", FLIP, "--timeout", "60", "--all", "2"]) == EXIT_OK
    out, _ = capsys.readouterr()
    assert 1 <= out.count("#entry") <= 2


def test_synth_timeout(capsys):
    assert main(["synth", FLIP, "--timeout", "0"]) == EXIT_TIMEOUT
    assert capsys.readouterr().out.strip() == "TIMEOUT"


def test_synth_nosolution(capsys):
    code = main(["synth", corpus_path("append_boundary"), "--timeout", "120"])
    assert code == EXIT_NOSOLUTION
    assert capsys.readouterr().out.strip() == "NO SOLUTION"


def test_synth_errors(tmp_path, capsys):
    assert main(["synth", str(tmp_path / "missing.bxs")]) == EXIT_ERROR
    bad = tmp_path / "bad.bxs"
    bad.write_text("f : Int -> Bool\nf x = x\n#entry f\n#example put 1 True = 2\n")
    assert main(["synth", str(bad)]) == EXIT_ERROR
    assert "bad.bxs:2:1" in capsys.readouterr().err


def test_trace_dump(capsys):
    assert main(["synth", corpus_path("append"), "--timeout", "60", "--trace-dump"]) == EXIT_OK
    assert len(capsys.readouterr().err.splitlines()) > 1


@pytest.fixture
def session():
    with open(corpus_path("appendBc", reference=True), encoding="utf-8") as fh:
        return Session(parse_spec(fh.read(), "appendBc.bxs"))


def test_repl_get_put(session):
    assert session.handle(':get appendBc_closed "apple"') == '"apple;"'
    assert session.handle(':put appendBc_closed "apple" "plum;"') == '"plum"'
    assert session.handle(':put appendBc_closed "apple" "pineapple;"') == '"pineapple"'
    assert session.handle(':put appendBc_closed "apple" "apple."').startswith("Error: LiftMismatch")


def test_repl_misc(session):
    assert session.handle(":get id 3") == "3"
    assert session.handle(":get length \"abc\"") == "S (S (S Z))"
    assert session.handle(":put length \"abc\" 2").startswith("Error:")
    assert session.handle(":frob").startswith("Error: unknown command")
    assert session.handle(":get").startswith("Error:")
    assert ":put" in session.handle(":help")
    assert session.handle("") == ""
    assert session.handle(":q") is None


def test_repl_subprocess():
    exe = shutil.which("bxsynth")
    cmd = [exe] if exe else [sys.executable, "-m", "bxsynth.cli"]
    r = subprocess.run(cmd + ["repl", corpus_path("appendBc", reference=True)],
                       input=':get appendBc_closed "ab"\n:q\n', capture_output=True, text=True, timeout=60)
    assert r.returncode == 0
    assert r.stdout.strip() == '"ab;"'


def test_run_benchmark_row():
    row = run_benchmark(FLIP, Config(seconds=60))
    assert row["outcome"] == "Yes" and row["class"] == "1" and row["expect"] == "yes"


def test_bench_tsv(tmp_path, capsys):
    report = tmp_path / "r.tsv"
    code = main(["bench", os.path.dirname(FLIP), str(report), "--only", "flip,append", "--timeout", "60"])
    assert code == EXIT_OK
    lines = report.read_text().splitlines()
    assert lines[0] == "name\tclass\toutcome\tseconds"
    assert sorted(l.split("\t")[0] for l in lines[1:]) == ["append", "flip"]
    assert all(l.split("\t")[2] == "Yes" for l in lines[1:])


def test_bench_empty_corpus(tmp_path, capsys):
    assert main(["bench", str(tmp_path)]) == EXIT_OK
    assert capsys.readouterr().out == "name\tclass\toutcome\tseconds\n"


def test_bench_unexpected_outcome(tmp_path, capsys):
    src = open(corpus_path("append_boundary"), encoding="utf-8").read()
    (tmp_path / "ab.bxs").write_text(src.replace("#expect fail", "#expect yes"))
    assert main(["bench", str(tmp_path), "--timeout", "60"]) == EXIT_ERROR
    assert "unexpected" in capsys.readouterr().err
