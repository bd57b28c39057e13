"""CLI exit codes and output discipline (stdout machine-readable, stderr noise)."""

import json
import subprocess
import sys

import pytest
from click.testing import CliRunner

import outcomedl as odl
from outcomedl.cli import main


@pytest.fixture()
def runner():
    return CliRunner()


@pytest.fixture()
def fixture_file(tmp_path):
    def write(name):
        p = tmp_path / f"{name}.dft"
        p.write_text(odl.fixture_source(name), encoding="utf-8")
        return str(p)

    return write


class TestCompute:
    def test_json_output(self, runner, fixture_file):
        result = runner.invoke(main, ["compute", fixture_file("example3"), "--format", "json"])
        assert result.exit_code == 0
        data = json.loads(result.stdout)
        assert data["modes"]["SI"]["plus"] == ["b3", "b4"]

    def test_mode_filter(self, runner, fixture_file):
        result = runner.invoke(
            main, ["compute", fixture_file("example3"), "--format", "json", "--modes", "SI"]
        )
        assert set(json.loads(result.stdout)["modes"]) == {"SI"}

    def test_reference_engine_flag(self, runner, fixture_file):
        result = runner.invoke(
            main,
            ["compute", fixture_file("example3"), "--engine", "reference", "--format", "json"],
        )
        assert result.exit_code == 0
        assert json.loads(result.stdout)["modes"]["G"]["plus"] == ["b1", "b4"]

    def test_empty_theory(self, runner, fixture_file):
        result = runner.invoke(main, ["compute", fixture_file("empty")])
        assert result.exit_code == 0

    def test_parse_error_exit_2_errors_on_stderr(self, runner, tmp_path):
        p = tmp_path / "broken.dft"
        p.write_text("rule broken", encoding="utf-8")
        result = runner.invoke(main, ["compute", str(p), "--format", "json"])
        assert result.exit_code == 2
        assert result.stdout == ""
        assert "expected" in result.stderr

    def test_missing_file_exit_2(self, runner):
        result = runner.invoke(main, ["compute", "no_such_file.dft"])
        assert result.exit_code == 2

    def test_json_stdout_is_pure(self, runner, tmp_path):
        p = tmp_path / "warn.dft"
        p.write_text("fact p.\nfact ~p.", encoding="utf-8")
        result = runner.invoke(main, ["compute", str(p), "--format", "json"])
        assert result.exit_code == 0
        json.loads(result.stdout)  # parses despite the warning
        assert "warning" in result.stderr


class TestCheck:
    def test_consistent_exit_0(self, runner, fixture_file):
        result = runner.invoke(main, ["check", fixture_file("alice_jsick")])
        assert result.exit_code == 0

    def test_complementary_facts_exit_1(self, runner, tmp_path):
        p = tmp_path / "bad.dft"
        p.write_text("fact p.\nfact ~p.", encoding="utf-8")
        result = runner.invoke(main, ["check", str(p)])
        assert result.exit_code == 1
        assert "complementary-facts" in result.stdout

    def test_cycle_exit_1(self, runner, tmp_path):
        p = tmp_path / "cycle.dft"
        p.write_text("rule r: => a.\nrule s: => b.\nr > s.\ns > r.", encoding="utf-8")
        result = runner.invoke(main, ["check", str(p)])
        assert result.exit_code == 1

    def test_parse_error_exit_2(self, runner, tmp_path):
        p = tmp_path / "broken.dft"
        p.write_text("garbage here", encoding="utf-8")
        result = runner.invoke(main, ["check", str(p)])
        assert result.exit_code == 2


class TestDiff:
    def test_every_fixture_equivalent(self, runner, fixture_file):
        for name in odl.fixture_names():
            result = runner.invoke(main, ["diff", fixture_file(name)])
            assert result.exit_code == 0, name

    def test_parse_error_exit_2(self, runner, tmp_path):
        p = tmp_path / "broken.dft"
        p.write_text("rule", encoding="utf-8")
        assert runner.invoke(main, ["diff", str(p)]).exit_code == 2


class TestGen:
    def test_deterministic(self, runner, tmp_path):
        a = runner.invoke(main, ["gen", "--size", "400", "--seed", "7"])
        b = runner.invoke(main, ["gen", "--size", "400", "--seed", "7"])
        assert a.exit_code == 0 and a.stdout == b.stdout

    def test_output_checks_clean(self, runner, tmp_path):
        out = tmp_path / "gen.dft"
        result = runner.invoke(main, ["gen", "--size", "400", "--seed", "3", "--out", str(out)])
        assert result.exit_code == 0
        assert runner.invoke(main, ["check", str(out)]).exit_code == 0

    def test_size_within_tolerance(self, runner, tmp_path):
        from outcomedl.core import theory_size
        from outcomedl.textio import parse_theory

        result = runner.invoke(main, ["gen", "--size", "500", "--seed", "2"])
        size = theory_size(parse_theory(result.stdout))
        assert abs(size - 500) <= 50

    def test_bad_size_exit_2(self, runner):
        assert runner.invoke(main, ["gen", "--size", "0"]).exit_code == 2


class TestBench:
    def test_smoke_small_sizes(self, runner):
        result = runner.invoke(
            main, ["bench", "--sizes", "200,800,2000", "--repeats", "1"]
        )
        assert result.exit_code in (0, 1)  # tiny sizes are timing-noisy
        data = json.loads(result.stdout)
        assert len(data["points"]) == 3

    def test_bad_sizes_exit_2(self, runner):
        assert runner.invoke(main, ["bench", "--sizes", "haha"]).exit_code == 2
        assert runner.invoke(main, ["bench", "--sizes", "100,200", "--repeats", "1"]).exit_code == 2


def test_console_script_end_to_end(tmp_path):
    """The installed entry point works as a subprocess."""
    p = tmp_path / "example3.dft"
    p.write_text(odl.fixture_source("example3"), encoding="utf-8")
    proc = subprocess.run(
        [sys.executable, "-m", "outcomedl.cli", "compute", str(p), "--format", "json"],
        capture_output=True,
        text=True,
        timeout=120,
    )
    assert proc.returncode == 0, proc.stderr
    assert json.loads(proc.stdout)["modes"]["SI"]["plus"] == ["b3", "b4"]
