"""Command-line surface: dispatch, exit codes, reproducible payloads."""

import importlib.resources as res

import pytest

from rlemkit.cli import main

FIXTURES = res.files("rlemkit") / "fixtures"


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


def payload(out):
    return {line.split(": ", 1)[0]: line.split(": ", 1)[1]
            for line in out.strip().splitlines() if ": " in line}


def test_census_k2(capsys):
    code, out = run_cli(capsys, "census", "-k", "2", "--format", "records")
    assert code == 0
    got = payload(out)
    assert got["classes"] == "8"
    assert got["nondegenerate"] == "4"
    assert got["nondegenerate_serials"] == "2 3 4 17"


def test_show_identity(capsys):
    code, out = run_cli(capsys, "show", "2-0", "--format", "records")
    assert code == 0
    assert "perm=0,1,2,3" in out
    assert "=>" not in out        # identity never changes state


def test_equiv_re_and_289(capsys):
    code, out = run_cli(capsys, "equiv", "rlem k=4 perm=7,3,5,1,6,0,4,2",
                        "4-289", "--format", "records")
    assert code == 0
    assert payload(out)["equivalent"] == "yes"


def test_equiv_failure_exit_code(capsys):
    code, out = run_cli(capsys, "equiv", "2-3", "2-4")
    assert code == 1


def test_classify(capsys):
    code, out = run_cli(capsys, "classify", "3-6", "--format", "records")
    assert code == 0
    assert payload(out)["classification"] == "eq-to-2-2"


def test_rtm_run(capsys):
    code, out = run_cli(capsys, "rtm-run", str(FIXTURES / "parity.rtm"),
                        "--input", "11", "--format", "records")
    assert code == 0
    assert payload(out)["result"] == "Accept"


def test_rtm_check(capsys):
    code, out = run_cli(capsys, "rtm-check", str(FIXTURES / "parity.rtm"),
                        "--format", "records")
    assert code == 0
    assert payload(out)["reversible"] == "yes"


def test_run_single_rotary(capsys):
    code, out = run_cli(capsys, "run", str(FIXTURES / "rotary.ckt"),
                        "--inputs", "n", "--format", "records")
    assert code == 0
    got = payload(out)
    assert got["outputs"] == "wp"
    assert got["final_states"] == "re=1"


def test_search_and_verify_flow(capsys, tmp_path):
    code, out = run_cli(capsys, "search", "--target", "3-10",
                        "--parts", "2-3,2-4", "--max-elems", "3",
                        "--save", str(tmp_path), "--format", "records")
    assert code == 0
    got = payload(out)
    assert got["result"] == "found"
    saved = got["saved"]
    code, out = run_cli(capsys, "verify", saved, "--target", "3-10",
                        "--format", "records")
    assert code == 0
    assert payload(out)["verified"] == "yes"


def test_search_exhausted_exit(capsys, tmp_path):
    code, out = run_cli(capsys, "search", "--target", "2-3",
                        "--parts", "2-2", "--max-elems", "2",
                        "--save", str(tmp_path), "--format", "records")
    assert code == 1
    assert payload(out)["result"] == "exhausted(2)"


def test_synth_rsm(capsys, tmp_path):
    out_path = tmp_path / "m0.ckt"
    code, out = run_cli(capsys, "synth-rsm", str(FIXTURES / "m0.rsm"),
                        "-o", str(out_path), "--format", "records")
    assert code == 0
    got = payload(out)
    assert got["elements"] == "9"
    assert got["verified"] == "yes"
    assert out_path.exists()


def test_refute_certificate(capsys, tmp_path):
    ckt = tmp_path / "one.ckt"
    ckt.write_text("""\
# state 0 e1=0
# state 1 e1=1
in a
in b
out s
out t
elem e1 2-2 init=0
wire a -> e1.in0
wire b -> e1.in1
wire e1.out0 -> s
wire e1.out1 -> t
""")
    code, out = run_cli(capsys, "refute", str(ckt), "--target", "2-3",
                        "--format", "records")
    assert code == 0
    got = payload(out)
    assert got["result"] == "refuted"
    assert got["budget"] == "1"
    assert got["witness_inputs"] == "bbbbbb"
    assert "divergence_from_state_0" in got
    assert "divergence_from_state_1" in got


def test_hierarchy_queries(capsys):
    code, out = run_cli(capsys, "hierarchy", "--simulates", "2-2", "2-17",
                        "--format", "records")
    assert code == 0
    assert payload(out)["verdict"] == "no"
    code, out = run_cli(capsys, "hierarchy", "--universal", "2-17",
                        "--format", "records")
    assert payload(out)["verdict"] == "unknown"
    code, out = run_cli(capsys, "hierarchy", "--universal", "3-10",
                        "--format", "records")
    assert payload(out)["verdict"] == "yes"


def test_roundtrip_fixtures(capsys):
    for name in ("parity.rtm", "rotary.ckt", "m0.rsm"):
        code, out = run_cli(capsys, "roundtrip", str(FIXTURES / name),
                            "--format", "records")
        assert code == 0, out
        assert payload(out)["roundtrip"] == "ok"


def test_roundtrip_catches_duplicate_endpoint(capsys, tmp_path):
    bad = tmp_path / "bad.ckt"
    bad.write_text("in a\nin b\nout s\nout t\n"
                   "elem e1 2-2 init=0\n"
                   "wire a -> e1.in0\nwire b -> e1.in0\n")
    code, out = run_cli(capsys, "roundtrip", str(bad), "--format", "records")
    assert code == 1
    assert "failed" in payload(out)["roundtrip"]


def test_payload_reproducible(capsys):
    _, out1 = run_cli(capsys, "census", "-k", "3", "--format", "records")
    _, out2 = run_cli(capsys, "census", "-k", "3", "--format", "records")
    assert out1 == out2


def test_unknown_command_usage_error(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 2


def test_rtm_compile_cross_validate(capsys, tmp_path):
    out_path = tmp_path / "parity.ckt"
    code, out = run_cli(capsys, "rtm-compile", str(FIXTURES / "parity.rtm"),
                        "--window", "4", "--cross-validate", ",1,11",
                        "-o", str(out_path), "--format", "records")
    assert code == 0
    got = payload(out)
    assert got["all_agree"] == "yes"
    assert got["valid"] == "yes"
    assert out_path.exists()
