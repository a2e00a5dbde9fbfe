import json

import pytest

from stp12.cli import main
from stp12.io import parse_stp

P3_TEXT = """\
SECTION Graph
Nodes 3
Edges 2
E 1 2 1
E 2 3 1
END
SECTION Terminals
Terminals 2
T 1
T 3
END
EOF
"""


@pytest.fixture()
def p3_file(tmp_path):
    path = tmp_path / "p3.stp"
    path.write_text(P3_TEXT)
    return path


def test_solve_six_phase_on_p3(p3_file, capsys):
    assert main(["solve", "--alg", "six-phase", str(p3_file)]) == 0
    out = capsys.readouterr().out
    assert "six-phase: cost 2" in out


def test_solve_all_algorithms_agree_on_p3(p3_file, tmp_path, capsys):
    out_path = tmp_path / "solve.json"
    assert main(["solve", str(p3_file), "--witness", "--out", str(out_path)]) == 0
    payload = json.loads(out_path.read_text())
    costs = {alg: entry["cost"] for alg, entry in payload["solve"][0]["results"].items()}
    assert costs == {"rs": 2, "six-phase": 2, "exact": 2}


def test_solve_exact_refuses_over_cap(tmp_path, capsys):
    lines = ["SECTION Graph", "Nodes 25", "Edges 0", "END",
             "SECTION Terminals", "Terminals 1", "T 1", "END", "EOF"]
    path = tmp_path / "big.stp"
    path.write_text("\n".join(lines) + "\n")
    assert main(["solve", "--alg", "exact", str(path)]) == 3
    assert "refused" in capsys.readouterr().err


def test_parse_error_exits_two(tmp_path, capsys):
    path = tmp_path / "bad.stp"
    path.write_text("SECTION Graph\nNodes 2\nEdges 1\nE 1 2 7\nEND\nEOF\n")
    assert main(["solve", str(path)]) == 2
    assert "line 4" in capsys.readouterr().err


def test_finishing_mode_dominance(p3_file, tmp_path):
    costs = {}
    for mode in ("cheapest", "strict-paper"):
        out_path = tmp_path / f"{mode}.json"
        assert main(["solve", str(p3_file), "--alg", "rs",
                     "--finishing", mode, "--out", str(out_path)]) == 0
        payload = json.loads(out_path.read_text())
        costs[mode] = payload["solve"][0]["results"]["rs"]["cost"]
    assert costs["cheapest"] <= costs["strict-paper"]


def test_gen_then_solve_round_trip(tmp_path, capsys):
    out = tmp_path / "gen.stp"
    assert main(["gen", "--family", "star-cluster", "--param", "k=4",
                 "--param", "m=1", "--out", str(out)]) == 0
    inst = parse_stp(out.read_text())
    assert inst.node_count == 5
    assert main(["solve", "--alg", "rs", str(out)]) == 0
    assert "cost 4" in capsys.readouterr().out


def test_gen_rejects_bad_params(tmp_path, capsys):
    out = tmp_path / "x.stp"
    assert main(["gen", "--family", "random-gnp", "--param", "n=5",
                 "--param", "p=3/2", "--param", "r=1", "--out", str(out)]) == 2


def test_compare_reports_ratios_and_max(tmp_path):
    out_path = tmp_path / "report.json"
    code = main([
        "compare", "--family", "bp-adversarial", "--param", "depth=4",
        "--out", str(out_path),
    ])
    assert code == 0
    payload = json.loads(out_path.read_text())
    assert payload["schema_version"] == 1
    report = payload["reports"][0]
    assert report["opt_cost"] == 11
    assert report["algorithm_costs"]["rs/cheapest"] == 14
    assert report["ratios"]["rs/cheapest"] == {"num": 14, "den": 11}
    assert payload["max_ratios"]["rs/cheapest"] == {"num": 14, "den": 11}
    assert payload["violations"] == []


def test_compare_skips_over_cap_instances(tmp_path):
    out_path = tmp_path / "report.json"
    code = main([
        "compare", "--family", "random-gnp", "--param", "n=30",
        "--param", "p=1/10", "--param", "r=3", "--out", str(out_path),
    ])
    assert code == 0
    payload = json.loads(out_path.read_text())
    assert payload["reports"][0]["skipped"]


def test_compare_identical_runs_are_byte_identical(tmp_path):
    args = ["compare", "--family", "random-gnp", "--param", "n=9",
            "--param", "p=2/5", "--param", "r=4", "--count", "5", "--seed", "11"]
    first = tmp_path / "a.json"
    second = tmp_path / "b.json"
    assert main(args + ["--out", str(first)]) == 0
    assert main(args + ["--out", str(second)]) == 0
    assert first.read_bytes() == second.read_bytes()


def test_audit_path3_trace_empty(p3_file, tmp_path, capsys):
    out_path = tmp_path / "audit.json"
    assert main(["audit", str(p3_file), "--mode", "s3", "--out", str(out_path)]) == 0
    payload = json.loads(out_path.read_text())
    entry = payload["audit"][0]
    assert entry["trace"] == [] or all(s["kind"] == "path" for s in entry["trace"])


def test_audit_comet_gadget_s4_keeps_comet(tmp_path):
    gen_path = tmp_path / "comet.stp"
    assert main(["gen", "--family", "comet-chain", "--param", "a=1",
                 "--param", "b=3", "--param", "count=1", "--out", str(gen_path)]) == 0
    out_path = tmp_path / "audit.json"
    assert main(["audit", str(gen_path), "--mode", "s4", "--out", str(out_path)]) == 0
    payload = json.loads(out_path.read_text())
    assert "comet(1,3)" in payload["audit"][0]["classification"]


def test_audit_long_path_optimum(tmp_path):
    # optimum of two far terminals joined through two Steiner nodes is the
    # direct non-edge, so the audit trace is already normal
    lines = ["SECTION Graph", "Nodes 4", "Edges 3",
             "E 1 2 1", "E 2 3 1", "E 3 4 1", "END",
             "SECTION Terminals", "Terminals 2", "T 1", "T 4", "END", "EOF"]
    path = tmp_path / "path4.stp"
    path.write_text("\n".join(lines) + "\n")
    out_path = tmp_path / "audit.json"
    assert main(["audit", str(path), "--mode", "s3", "--out", str(out_path)]) == 0
    payload = json.loads(out_path.read_text())
    entry = payload["audit"][0]
    assert entry["classification"] in ({}, {"terminal-edge": 1})
