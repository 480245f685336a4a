import subprocess
import sys

import pytest

from unlrdf.cli import EXIT_INCONSISTENT, EXIT_IO, EXIT_OK, EXIT_SYNTAX, EXIT_VALIDATION, main
from unlrdf.quadstore import canonical_equal, load_trig, load_turtle
from conftest import GOLDEN, VOLUME_PATH, fixture_path, fixture_text

R1, R2 = str(fixture_path("R1.unl")), str(fixture_path("R2.unl"))


def run(argv, environ=None):
    return main(argv, {} if environ is None else environ)


def write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return str(path)


def test_parse_fixture(capsys):
    assert run(["parse", R2]) == EXIT_OK
    assert "mod:01(state(icl>attribute), broadcast(icl>message))" in capsys.readouterr().out


def test_parse_empty_file(tmp_path, capsys):
    assert run(["parse", write(tmp_path, "e.unl", "")]) == EXIT_OK
    assert capsys.readouterr().out == ""


def test_parse_truncated_input(tmp_path, capsys):
    path = write(tmp_path, "t.unl", fixture_text("R2.unl")[:200])
    assert run(["parse", path]) == EXIT_SYNTAX
    err = capsys.readouterr().err
    assert err.startswith("syntax error: ") and ":" in err


def test_parse_invalid_document(tmp_path, capsys):
    assert run(["parse", write(tmp_path, "v.unl", "[S:A]{unl}agt(a, b){/unl}[/S]")]) == EXIT_VALIDATION
    assert "entry" in capsys.readouterr().err


def test_strict_mode_rejects_unknown_relation(tmp_path):
    path = write(tmp_path, "s.unl", "[S:A]{unl}zzz(a.@entry, b){/unl}[/S]")
    assert run(["parse", path]) == EXIT_OK
    assert run(["parse", "--strict", path]) == EXIT_VALIDATION


def test_serialize_named_graphs(capsys):
    assert run(["serialize", "--mode", "named-graphs", "--counter-base", "9", R2]) == EXIT_OK
    out = capsys.readouterr().out
    assert out == (GOLDEN / "R2_named_graphs.trig").read_text()
    assert "example:UNL_Scope_00000017 {" in out


def test_serialize_reified(tmp_path):
    out = tmp_path / "r2.ttl"
    assert run(["serialize", "--counter-base", "9", R2, "-o", str(out)]) == EXIT_OK
    text = out.read_text()
    assert "unl:has_scope example:UNL_Scope_00000017" in text
    assert text == (GOLDEN / "R2_reified.ttl").read_text()


def test_serialize_with_volume(capsys):
    assert run(["serialize", "--volume", str(VOLUME_PATH), R2]) == EXIT_OK
    assert '"202004223698"' in capsys.readouterr().out


def test_serialize_empty(tmp_path, capsys):
    assert run(["serialize", write(tmp_path, "e.unl", "")]) == EXIT_OK
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines and all(line.startswith("@prefix") for line in lines)


def test_convert_round_trip(tmp_path):
    named = tmp_path / "n.trig"
    reified = tmp_path / "r.ttl"
    back = tmp_path / "b.trig"
    assert run(["serialize", "--mode", "named-graphs", R2, "-o", str(named)]) == EXIT_OK
    assert run(["convert", str(named), "--to", "reified", "-o", str(reified)]) == EXIT_OK
    assert run(["convert", str(reified), "--to", "named-graphs", "-o", str(back)]) == EXIT_OK
    assert back.read_text() == named.read_text()
    assert not load_turtle(reified.read_text()).has_named_graphs()


def test_extract_either_encoding(tmp_path):
    outputs = []
    for mode in ("named-graphs", "reified"):
        rdf = [tmp_path / f"{n}.{mode}" for n in ("r1", "r2")]
        assert run(["serialize", "--mode", mode, R1, "-o", str(rdf[0])]) == EXIT_OK
        assert run(["serialize", "--mode", mode, "--counter-base", "9", R2, "-o", str(rdf[1])]) == EXIT_OK
        out = tmp_path / f"ax.{mode}.ttl"
        report = tmp_path / f"ax.{mode}.txt"
        assert run(["extract", *map(str, rdf), "-o", str(out), "--report", str(report)]) == EXIT_OK
        outputs.append(out.read_text())
        assert report.read_text().startswith("CARD example:state(icl--attribute) 2\n")
    assert outputs[0] == outputs[1] == (GOLDEN / "axioms_R1_R2.ttl").read_text()


def test_extract_nothing(tmp_path, capsys):
    assert run(["extract", write(tmp_path, "e.ttl", "")]) == EXIT_OK
    assert run(["extract"]) == EXIT_OK


def test_check_axiom_file(tmp_path, capsys):
    axioms = str(GOLDEN / "axioms_R1_R2.ttl")
    assert run(["check", axioms]) == EXIT_INCONSISTENT
    assert 'VIOLATION EnumerationViolation example:channel(icl--radiowave)_00000014 "broadcast(icl>message)"' \
        in capsys.readouterr().out
    fixed = (GOLDEN / "axioms_R1_R2.ttl").read_text().replace('"broadcast(icl>message)"', '"traffic(icl>communication)"')
    assert run(["check", write(tmp_path, "ok.ttl", fixed)]) == EXIT_OK
    assert "No inconsistency found." in capsys.readouterr().out


def test_check_document_rdf(tmp_path):
    rdf = [str(tmp_path / "r1.ttl"), str(tmp_path / "r2.ttl")]
    run(["serialize", R1, "-o", rdf[0]])
    run(["serialize", "--counter-base", "9", R2, "-o", rdf[1]])
    assert run(["check", rdf[0]]) == EXIT_OK
    assert run(["check", rdf[1]]) == EXIT_OK


def test_pipeline(tmp_path, capsys):
    out1, out2 = tmp_path / "a", tmp_path / "b"
    assert run(["pipeline", R1, R2, "--out", str(out1)]) == EXIT_INCONSISTENT
    stdout = capsys.readouterr().out
    assert stdout.count("EnumerationViolation") == 1 and "broadcast(icl>message)" in stdout
    assert sorted(p.name for p in out1.iterdir()) == ["R1.trig", "R2.trig", "axioms.ttl", "report.txt"]
    assert (out1 / "report.txt").read_text() == (GOLDEN / "report_R1_R2.txt").read_text()
    assert run(["pipeline", R1, R2, "--out", str(out2)]) == EXIT_INCONSISTENT
    for f in out1.iterdir():
        assert f.read_bytes() == (out2 / f.name).read_bytes()
    r2 = load_trig((out1 / "R2.trig").read_text())
    assert canonical_equal(r2, load_turtle((GOLDEN / "R2_reified.ttl").read_text()))


def test_pipeline_consistent_input(tmp_path):
    assert run(["pipeline", R1, "--out", str(tmp_path)]) == EXIT_OK
    assert "No inconsistency found." in (tmp_path / "report.txt").read_text()


def test_missing_file_is_io_error(tmp_path, capsys):
    assert run(["parse", str(tmp_path / "nope.unl")]) == EXIT_IO
    assert "I/O error" in capsys.readouterr().err


def test_bad_turtle_is_syntax_error(tmp_path):
    assert run(["check", write(tmp_path, "bad.ttl", "@prefix x: <a> .\nx:s x:p")]) == EXIT_SYNTAX


def test_environment_overrides(tmp_path, capsys):
    env = {"UNLRDF_MODE": "named-graphs", "UNLRDF_COUNTER_BASE": "9"}
    assert run(["serialize", R2], env) == EXIT_OK
    assert "example:UNL_Scope_00000017 {" in capsys.readouterr().out
    assert run(["serialize", "--mode", "reified", R2], env) == EXIT_OK
    assert "example:UNL_Scope_00000017 {" not in capsys.readouterr().out
    out = tmp_path / "env-out"
    assert run(["pipeline", R1], {"UNLRDF_OUT": str(out)}) == EXIT_OK
    assert (out / "R1.trig").exists()


def test_bad_flag_exits_with_usage():
    with pytest.raises(SystemExit) as info:
        run(["serialize", "--mode", "nonsense", R2])
    assert info.value.code == 2


def test_console_module_runs():
    done = subprocess.run([sys.executable, "-m", "unlrdf.cli", "parse", R1], capture_output=True, text=True)
    assert done.returncode == 0 and "qua(" in done.stdout
