import json
from pathlib import Path

from causalmc.cli import main

MODELS = Path(__file__).resolve().parents[1] / "models"
MICRO = str(MODELS / "microservice.model")
EX1 = str(MODELS / "ex1.model")


def test_check_true_exit_zero(capsys):
    assert main(["check", MICRO, "f2", "<theta1> [] ! phi_fail"]) == 0
    assert "check: true" in capsys.readouterr().out


def test_check_false_exit_one(capsys):
    assert main(["check", MICRO, "f2", "<theta3> [] ! phi_fail"]) == 1


def test_parse_error_exit_two(tmp_path, capsys):
    bad = tmp_path / "bad.model"
    bad.write_text("component a {", encoding="utf-8")
    assert main(["check", str(bad), "f", "true"]) == 2


def test_cap_exceeded_exit_three(capsys):
    assert main(["check", MICRO, "f1", "<>+ phi_fail", "--max-states", "3"]) == 3


def test_unknown_name_exit_two(capsys):
    assert main(["check", MICRO, "f2", "<missing> true"]) == 2


def test_cause_report_file(tmp_path):
    out = tmp_path / "report.json"
    code = main(
        ["cause", MICRO, "--from", "f1", "--to", "f2", "--effect", "FrontEnd", "--report", str(out)]
    )
    assert code == 0
    payload = json.loads(out.read_text())
    assert payload["witnesses"]["certificates"][0]["cause_set"] == ["UserDB"]


def test_strict_flag_changes_cause_verdict(tmp_path):
    code = main(["cause", MICRO, "--from", "f1", "--to", "f2", "--effect", "FrontEnd", "--strict-ac1"])
    assert code == 1


def test_chain_with_projection_dot(tmp_path):
    dot = tmp_path / "proj.dot"
    code = main(
        [
            "chain", MICRO, "--from", "f1", "--to", "f2",
            "--effect", "FrontEnd", "--max-len", "2", "--dot", str(dot),
        ]
    )
    assert code == 0
    assert dot.read_text().startswith("digraph")


def test_bisim_subcommand(capsys):
    assert main(["bisim", EX1, "start", EX1, "start"]) == 0


def test_decompose_subcommand():
    assert main(["decompose", EX1, "--left", "c1", "c2", "--right", "c2", "c3"]) == 0
    assert (
        main(
            [
                "decompose", MICRO,
                "--left", "Auth", "UserDB", "Logger",
                "--right", "ProfileSvc", "FrontEnd", "Logger",
            ]
        )
        == 1
    )


def test_recover_mincost_utility(capsys, tmp_path):
    out = tmp_path / "r.json"
    assert main(["recover", MICRO, "f2", "phi_fail", "--report", str(out)]) == 0
    assert json.loads(out.read_text())["witnesses"]["qualifying"] == ["theta1", "theta2"]
    assert main(["mincost", MICRO, "f2", "phi_fail", "--report", str(out)]) == 0
    assert json.loads(out.read_text())["witnesses"]["chosen"] == "theta2"
    assert main(["utility", MICRO, "f2", "phi_fail", "--report", str(out)]) == 0
    assert json.loads(out.read_text())["witnesses"]["chosen"] == "theta2"


def test_export_dot_variants(tmp_path):
    out = tmp_path / "v.dot"
    assert main(["export-dot", EX1, "--variants", "-o", str(out)]) == 0
    assert "theta_reset" in out.read_text()


def test_export_dot_reachable(tmp_path):
    out = tmp_path / "t.dot"
    assert main(["export-dot", MICRO, "--reachable-from", "f1", "-o", str(out)]) == 0
    text = out.read_text()
    assert text.startswith("digraph") and "->" in text


def test_export_hp(tmp_path):
    out = tmp_path / "hp.json"
    assert main(["export-hp", MICRO, "--init", "f1", "-o", str(out)]) == 0
    payload = json.loads(out.read_text())
    assert payload["acyclic"] is False
    assert {v["name"] for v in payload["variables"]} == {
        "Auth", "UserDB", "ProfileSvc", "Logger", "FrontEnd",
    }


def test_run_subcommand(capsys):
    assert main(["run", EX1]) == 0
    out = capsys.readouterr().out
    assert out.count("\n") == 3


def test_sync_flag_overrides_mode(capsys):
    # synchronous step from f1 fires the request-arrival and fault rules together
    assert main(["check", MICRO, "f1", "<> (p[FrontEnd=serving] & p[UserDB=dbError])", "--sync"]) == 0


def test_inline_configuration_literal():
    lit = "(Auth=idle, UserDB=idle, ProfileSvc=idle, Logger=idle, FrontEnd=idle)"
    assert main(["check", MICRO, lit, "<>+ phi_fail"]) == 0


def test_self_loops_flag(capsys):
    # a configuration with a rule fixpoint gains a self-loop under the flag
    lit = "(c1=b11, c2=b21, c3=b31)"
    assert main(["check", EX1, lit, "<> p[c1=b11]", "--self-loops"]) == 0
    assert main(["check", EX1, lit, "<> p[c1=b11]"]) == 1


def test_allow_trivial_split_flag():
    phi = "((p[c1=b12] & p[c3=b31])) * ((p[c2=b22]))"
    lit = "(c1=b12, c2=b22, c3=b31)"
    assert main(["check", EX1, lit, phi, "--allow-trivial-split"]) == 0
