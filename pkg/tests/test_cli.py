"""Command-line interface behaviour and exit codes."""

from __future__ import annotations

import json

import pytest
from click.testing import CliRunner

from conftest import FIXTURES
from ptacl.cli import main


@pytest.fixture
def runner() -> CliRunner:
    return CliRunner()


def fx(name: str) -> str:
    return str(FIXTURES / name)


class TestEval:
    def test_nested_policy_denies(self, runner):
        result = runner.invoke(
            main, ["eval", fx("nested_deny_by_default.ptp"), fx("nested_probe.ptq"), "--resolve"]
        )
        assert "decisions: {0_P}" in result.output
        assert "resolved: deny" in result.output
        assert result.exit_code == 1

    def test_chinese_wall_allows_employee(self, runner):
        result = runner.invoke(
            main, ["eval", fx("chinese_wall.ptp"), fx("cw_employee_a.ptq"), "--resolve"]
        )
        assert result.exit_code == 0
        assert "decisions: {1_P}" in result.output
        assert "resolved: allow" in result.output

    def test_multivalued_output_canonical_order(self, runner):
        result = runner.invoke(
            main, ["eval", fx("chinese_wall.ptp"), fx("cw_confidential_only.ptq"), "--resolve"]
        )
        assert "decisions: {1_P,0_P}" in result.output
        assert result.exit_code == 1

    def test_exit_zero_without_resolve(self, runner):
        result = runner.invoke(
            main, ["eval", fx("nested_deny_by_default.ptp"), fx("nested_probe.ptq")]
        )
        assert result.exit_code == 0
        assert "resolved" not in result.output

    def test_null_policy_on_empty_request(self, runner, tmp_path):
        policy = tmp_path / "p.ptp"
        policy.write_text("{ null ? allow }\n")
        request = tmp_path / "q.ptq"
        request.write_text("")
        result = runner.invoke(main, ["eval", str(policy), str(request), "--resolve"])
        assert result.exit_code == 0
        assert "decisions: {1_P}" in result.output

    def test_trace_shows_target_values(self, runner):
        result = runner.invoke(
            main, ["eval", fx("nested_deny_by_default.ptp"), fx("nested_probe.ptq"), "--trace"]
        )
        assert "dbd -> {0_P}" in result.output
        assert "[1_T]" in result.output and "[⊥_T]" in result.output

    def test_json_output(self, runner):
        result = runner.invoke(
            main,
            ["eval", fx("chinese_wall.ptp"), fx("cw_both_employers.ptq"), "--resolve", "--json"],
        )
        payload = json.loads(result.output)
        assert payload == {"decisions": ["deny"], "resolved": "deny"}

    def test_parse_error_exits_2_with_span(self, runner, tmp_path):
        bad = tmp_path / "bad.ptp"
        bad.write_text("allow and_cup deny or_cup allow\n")
        result = runner.invoke(main, ["eval", str(bad), fx("nested_probe.ptq")])
        assert result.exit_code == 2
        assert "parentheses" in result.stderr

    def test_missing_file_exits_2(self, runner):
        result = runner.invoke(main, ["eval", "no-such.ptp", fx("nested_probe.ptq")])
        assert result.exit_code == 2


class TestAnalyze:
    def test_optional_target(self, runner):
        result = runner.invoke(main, ["analyze", fx("optional_match.ptt")])
        assert result.exit_code == 0
        assert "weak: yes" in result.output
        assert "strong (all-or-nothing): no" in result.output
        assert "counterexample" in result.output

    def test_acl_interface_target(self, runner):
        result = runner.invoke(main, ["analyze", fx("acl_interface.ptt")])
        assert "weak: yes" in result.output
        assert "strong (all-or-nothing): no" in result.output

    def test_attack_policy_has_no_guarantee(self, runner):
        result = runner.invoke(main, ["analyze", fx("value_hiding_attack.ptp")])
        assert result.exit_code == 0
        assert "unconditional guarantee: none" in result.output
        assert "set-inclusion (all-or-nothing): yes" in result.output

    def test_allow_stable_policy(self, runner):
        result = runner.invoke(main, ["analyze", fx("allow_stable.ptp")])
        assert "allow-stability: yes" in result.output

    def test_json_output(self, runner):
        result = runner.invoke(main, ["analyze", fx("value_hiding_attack.ptp"), "--json"])
        payload = json.loads(result.output)
        assert payload["kind"] == "policy"
        assert payload["class"]["set_inclusion_all_or_nothing"] is True
        assert payload["unconditional"] == []

    def test_budget_exceeded_exits_3(self, runner, tmp_path):
        wide = tmp_path / "wide.ptt"
        atoms = " and ".join(f"(n{i} = 1)" for i in range(8))
        wide.write_text(atoms + "\n")
        result = runner.invoke(main, ["analyze", str(wide)])
        assert result.exit_code == 3
        assert "--limit 16" in result.stderr

    def test_budget_can_be_raised(self, runner, tmp_path):
        wide = tmp_path / "wide.ptt"
        atoms = " and ".join(f"(n{i} = 1)" for i in range(7))
        wide.write_text(atoms + "\n")
        result = runner.invoke(main, ["analyze", str(wide), "--limit", "14"])
        assert result.exit_code == 0


class TestHiding:
    def test_attack_found_exits_4(self, runner):
        result = runner.invoke(
            main, ["hiding", fx("value_hiding_attack.ptp"), fx("vh_full.ptq")]
        )
        assert result.exit_code == 4
        assert "witnesses: 1" in result.output
        assert "hide [role = intern]" in result.output

    def test_all_or_nothing_mode_is_safe(self, runner):
        result = runner.invoke(
            main,
            ["hiding", fx("value_hiding_attack.ptp"), fx("vh_full.ptq"), "--mode", "all-or-nothing"],
        )
        assert result.exit_code == 0
        assert "witnesses: 0" in result.output

    def test_chinese_wall_minimal_witness_first(self, runner):
        result = runner.invoke(
            main, ["hiding", fx("chinese_wall.ptp"), fx("cw_both_employers.ptq"), "--json"]
        )
        assert result.exit_code == 4
        payload = json.loads(result.output)
        assert payload["witnesses"][0]["hidden"] == [["employer", "B"]]

    def test_guaranteed_policy_clean(self, runner, tmp_path):
        request = tmp_path / "q.ptq"
        request.write_text("a = 1\nb = 2\n")
        result = runner.invoke(main, ["hiding", fx("allow_stable.ptp"), str(request)])
        assert result.exit_code == 0

    def test_budget_exceeded_exits_3(self, runner, tmp_path):
        request = tmp_path / "big.ptq"
        request.write_text("".join(f"n{i} = 1\n" for i in range(13)))
        result = runner.invoke(main, ["hiding", fx("value_hiding_attack.ptp"), str(request)])
        assert result.exit_code == 3
