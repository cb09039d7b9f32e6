import io
import json
from fractions import Fraction

import pytest

from budgetlogic.cli import main
from budgetlogic.labelled import check_labelled_proof
from budgetlogic.parser import proof_from_json, proof_to_json
from budgetlogic.prover import prove_labelled
from budgetlogic.parser import parse_sequent


def run(capsys, *argv):
    status = main(list(argv))
    out = capsys.readouterr()
    return status, out.out, out.err


def test_cost_riddle_prints_three(capsys):
    status, out, _ = run(capsys, "cost", "!p[1](w + b) |- (w*w)+(b*b)")
    assert status == 0
    assert out.split()[0] == "3"
    # structured mode carries the exact value plus the minimality flag
    status, out, _ = run(capsys, "--format", "structured", "cost",
                         "!p[1](w + b) |- (w*w)+(b*b)")
    assert json.loads(out)["cost"] == "3"


def test_prove_exit_codes(capsys):
    status, out, _ = run(capsys, "prove", "p & q |- p")
    assert status == 0
    status, out, _ = run(capsys, "prove", "p |- q")
    assert status == 1
    assert "refuted" in out


def test_usage_error_is_two(capsys):
    assert main(["cost"]) == 2            # missing sequent
    assert main(["frobnicate"]) == 2      # unknown subcommand


def test_parse_error_is_two(capsys):
    status, _, err = run(capsys, "cost", "p |-")
    assert status == 2
    status, _, err = run(capsys, "cost", "p |- !p[1]p")
    assert status == 2


def test_structured_spectrum_round_trips(capsys, kc):
    status, out, _ = run(capsys, "--format", "structured", "spectrum",
                         "!p[1]p, !s[0.8]p, !s[0.8]p |- p * p", "--bound", "3")
    assert status == 0
    doc = json.loads(out)
    assert doc["values"] == ["1.6", "1.8", "2", "2.6", "2.8", "3"]
    assert [kc.parse_value(v) for v in doc["values"]][0] == Fraction(8, 5)


def test_cost_equals_spectrum_minimum(capsys):
    seqtext = "!p[1]p, !s[0.8]p, !s[0.8]p |- p * p"
    status, out, _ = run(capsys, "--format", "structured", "cost", seqtext)
    cost_doc = json.loads(out)
    status, out, _ = run(capsys, "--format", "structured", "spectrum",
                         seqtext, "--bound", "100")
    spec_doc = json.loads(out)
    assert cost_doc["cost"] == spec_doc["values"][0]


def test_check_semiring_all_pass(capsys):
    status, out, _ = run(capsys, "check-semiring", "--semiring", "prob",
                         "--samples", "300")
    assert status == 0
    assert "FAIL" not in out


def test_labelled_prove_via_cli(capsys):
    status, _, _ = run(capsys, "prove", "!p[1](w + b) |-[3] (w*w)+(b*b)")
    assert status == 0
    status, _, _ = run(capsys, "prove", "!p[1](w + b) |-[2] (w*w)+(b*b)")
    assert status == 1


def test_encode_ts(tmp_path, capsys):
    f = tmp_path / "chain.ts"
    f.write_text("states: a b c\ntrans: a -> b : 1.5\ntrans: b -> c : 1\n"
                 "start: a\nend: c\n")
    status, out, _ = run(capsys, "encode-ts", str(f), "--budget", "2.5")
    assert status == 0
    status, out, _ = run(capsys, "encode-ts", str(f), "--budget", "2")
    assert status == 1


def test_cut_command(tmp_path, capsys, kc):
    a = prove_labelled(parse_sequent("!p[2]p |-[2] p", kc), kc).proof
    b = prove_labelled(parse_sequent("p, !p[3]q |-[3] p * q", kc), kc).proof
    f1, f2 = tmp_path / "a.proof", tmp_path / "b.proof"
    f1.write_text(proof_to_json(a, kc))
    f2.write_text(proof_to_json(b, kc))
    status, out, _ = run(capsys, "cut", str(f1), str(f2))
    assert status == 0
    lpf, _, _ = proof_from_json(out)
    assert check_labelled_proof(lpf, kc)
    assert lpf.conclusion.label == Fraction(5)


def test_max_semiring_flag(capsys):
    status, out, _ = run(capsys, "--semiring", "max", "cost",
                         "!s[1]t1, !s[2]t2 |- t1 * t2")
    assert status == 0
    assert out.strip() == "2"


def test_play_as_defender_against_engine(monkeypatch, capsys):
    # human answers every choice adversarially (alternating picks); the
    # engine must still win from budget 3
    monkeypatch.setattr("sys.stdin", io.StringIO("0\n1\n0\n1\n0\n1\n"))
    status, out, _ = run(capsys, "play", "!p[1](w + b) |- (w*w)+(b*b)",
                         "--budget", "3", "--role", "II")
    assert status == 0
    assert "defended" in out


def test_play_as_defender_engine_refuses_hopeless(monkeypatch, capsys):
    monkeypatch.setattr("sys.stdin", io.StringIO(""))
    status, _, _ = run(capsys, "play", "!p[1](w + b) |- (w*w)+(b*b)",
                       "--budget", "2", "--role", "II")
    assert status == 1


def test_play_as_prover_stuck_immediately(monkeypatch, capsys):
    monkeypatch.setattr("sys.stdin", io.StringIO(""))
    status, out, _ = run(capsys, "play", "p |- q", "--budget", "1",
                         "--role", "I")
    assert status == 1
    assert "stuck" in out


def test_play_eof_aborts_with_trace(monkeypatch, capsys):
    monkeypatch.setattr("sys.stdin", io.StringIO(""))
    status, out, _ = run(capsys, "play", "p & q |- p & q", "--budget", "0",
                         "--role", "I")
    assert status == 1
    assert "aborted" in out


def test_play_as_prover_win(monkeypatch, capsys):
    # p |- p is already initial: immediate win, no prompts needed
    monkeypatch.setattr("sys.stdin", io.StringIO(""))
    status, out, _ = run(capsys, "play", "p |- p", "--budget", "0", "--role", "I")
    assert status == 0
    assert "defended" in out
