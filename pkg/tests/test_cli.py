import io
import itertools
import math
import random
import statistics

import pytest

from helpers import blocks_equivalent, output_table
from plcsynth.bench import (
    InsufficientSamples, bench_run, magnet_rule, scenario, signal_light_rule,
    stats,
)
from plcsynth.blocks import Lang
from plcsynth.cli import (
    EXIT_OK, EXIT_USAGE, EXIT_VIOLATED, ProjectLayout, load_block, run,
)
from plcsynth.constraints import SchemaError
from plcsynth.engine import SynthConfig

AND_XML = """<?xml version="1.0" encoding="UTF-8"?>
<constraintList block="AndGate" mode="generate">
  <interface>
    <var name="a" dir="in" type="BOOL"/>
    <var name="b" dir="in" type="BOOL"/>
    <var name="y" dir="out" type="BOOL"/>
  </interface>
  <truthTable>
    <row in="a=1;b=1" out="y=1"/>
    <row in="a=0" out="y=0"/>
    <row in="b=0" out="y=0"/>
  </truthTable>
</constraintList>
"""

IMPL_XML = """<?xml version="1.0" encoding="UTF-8"?>
<constraintList block="AndGate" mode="verify">
  <interface>
    <var name="a" dir="in" type="BOOL"/>
    <var name="b" dir="in" type="BOOL"/>
    <var name="y" dir="out" type="BOOL"/>
  </interface>
  <assertion expr="a OR NOT y"/>
</constraintList>
"""

OR_ST = """FUNCTION_BLOCK AndGate
VAR_INPUT
  a : BOOL;
  b : BOOL;
END_VAR
VAR_OUTPUT
  y : BOOL;
END_VAR
BEGIN
  y := a OR b;
END_FUNCTION_BLOCK
"""

CONFLICT_XML = """<?xml version="1.0" encoding="UTF-8"?>
<constraintList block="Bad" mode="generate">
  <interface>
    <var name="a" dir="in" type="BOOL"/>
    <var name="y" dir="out" type="BOOL"/>
  </interface>
  <truthTable>
    <row in="a=0" out="y=0"/>
    <row in="a=0" out="y=1"/>
  </truthTable>
</constraintList>
"""


def invoke(*argv):
    out = io.StringIO()
    code = run(list(argv), out)
    return code, out.getvalue()


@pytest.fixture
def project(tmp_path):
    (tmp_path / "and.xml").write_text(AND_XML)
    (tmp_path / "impl.xml").write_text(IMPL_XML)
    (tmp_path / "or.st").write_text(OR_ST)
    (tmp_path / "conflict.xml").write_text(CONFLICT_XML)
    return tmp_path


class TestSynth:
    def test_synth_writes_equivalent_block(self, project):
        out_path = project / "and.st"
        code, text = invoke("synth", "--constraints", str(project / "and.xml"),
                            "--out", str(out_path), "--seed", "1")
        assert code == EXIT_OK
        assert str(out_path) in text
        block = load_block(out_path)
        assert output_table(block, "y") == {
            bits: bits[0] and bits[1]
            for bits in itertools.product((False, True), repeat=2)}

    def test_synth_il_output(self, project):
        out_path = project / "and.il"
        code, _ = invoke("synth", "--constraints", str(project / "and.xml"),
                         "--out", str(out_path), "--lang", "il")
        assert code == EXIT_OK
        block = load_block(out_path)
        assert block.lang is Lang.IL

    def test_conflicting_rows_exit_1(self, project):
        code, text = invoke("synth", "--constraints",
                            str(project / "conflict.xml"))
        assert code == EXIT_VIOLATED
        assert "unsatisfiable" in text

    def test_missing_file_exit_2(self, project):
        code, text = invoke("synth", "--constraints", str(project / "nope.xml"))
        assert code == EXIT_USAGE

    def test_bad_usage_exit_2(self):
        code, _ = invoke("synth")
        assert code == EXIT_USAGE

    def test_unknown_command_exit_2(self):
        code, _ = invoke("frobnicate")
        assert code == EXIT_USAGE


class TestVerifyCli:
    def test_verified_exit_0(self, project):
        invoke("synth", "--constraints", str(project / "and.xml"),
               "--out", str(project / "and.st"))
        code, text = invoke("verify", "--block", str(project / "and.st"),
                            "--constraints", str(project / "and.xml"))
        assert code == EXIT_OK
        assert "Verified" in text

    def test_violated_prints_counterexample(self, project):
        code, text = invoke("verify", "--block", str(project / "or.st"),
                            "--constraints", str(project / "impl.xml"))
        assert code == EXIT_VIOLATED
        lines = text.splitlines()
        assert lines[0] == "cycle 0: a=0 b=1"
        assert lines[1].startswith("violated: ")

    def test_schema_error_exit_2(self, project):
        bad = project / "bad.xml"
        bad.write_text(AND_XML.replace("truthTable", "truthtable"))
        code, text = invoke("verify", "--block", str(project / "or.st"),
                            "--constraints", str(bad))
        assert code == EXIT_USAGE
        assert "error" in text


class TestRepairSimplifyExtend:
    def test_repair_roundtrip(self, project):
        out_path = project / "fixed.st"
        code, _ = invoke("repair", "--block", str(project / "or.st"),
                         "--constraints", str(project / "and.xml"),
                         "--out", str(out_path))
        assert code == EXIT_OK
        block = load_block(out_path)
        assert output_table(block, "y") == {
            bits: bits[0] and bits[1]
            for bits in itertools.product((False, True), repeat=2)}

    def test_simplify_default_output_path(self, project):
        redundant = project / "red.st"
        redundant.write_text(OR_ST.replace("a OR b", "a AND b OR a AND NOT b"))
        code, text = invoke("simplify", "--block", str(redundant))
        assert code == EXIT_OK
        produced = project / "red.simplified.st"
        assert produced.exists()
        assert "y := a;" in produced.read_text()

    def test_extend(self, project):
        extra = project / "extra.xml"
        extra.write_text(AND_XML.replace(
            'mode="generate"', 'mode="extend"').replace(
            '<row in="a=1;b=1" out="y=1"/>\n    <row in="a=0" out="y=0"/>\n    <row in="b=0" out="y=0"/>',
            '<row in="a=1;b=1" out="y=0"/>'))
        code, _ = invoke("extend", "--block", str(project / "or.st"),
                         "--constraints", str(extra),
                         "--out", str(project / "ext.st"))
        assert code == EXIT_OK
        block = load_block(project / "ext.st")
        table = output_table(block, "y")
        assert table[(True, True)] is False
        assert table[(True, False)] is True
        assert table[(False, True)] is True

    def test_translate_roundtrip(self, project):
        code, _ = invoke("translate", "--block", str(project / "or.st"),
                         "--to", "il", "--out", str(project / "or.il"))
        assert code == EXIT_OK
        il_block = load_block(project / "or.il")
        st_block = load_block(project / "or.st")
        assert blocks_equivalent(st_block, il_block)


class TestDeterminism:
    def test_synth_twice_byte_identical(self, project):
        first = project / "a1.st"
        second = project / "a2.st"
        for path in (first, second):
            code, _ = invoke("synth", "--constraints", str(project / "and.xml"),
                             "--out", str(path), "--seed", "9")
            assert code == EXIT_OK
        assert first.read_bytes() == second.read_bytes()

    def test_repair_twice_byte_identical(self, project):
        first = project / "r1.st"
        second = project / "r2.st"
        for path in (first, second):
            invoke("repair", "--block", str(project / "or.st"),
                   "--constraints", str(project / "and.xml"),
                   "--out", str(path), "--seed", "4")
        assert first.read_bytes() == second.read_bytes()

    def test_translate_twice_byte_identical(self, project):
        first = project / "t1.il"
        second = project / "t2.il"
        for path in (first, second):
            invoke("translate", "--block", str(project / "or.st"),
                   "--to", "il", "--out", str(path))
        assert first.read_bytes() == second.read_bytes()


class TestCheck:
    def test_consistent_exit_0(self, project):
        code, text = invoke("check", "--constraints", str(project / "and.xml"))
        assert code == EXIT_OK
        assert "consistent" in text

    def test_conflict_reported(self, project):
        code, text = invoke("check", "--constraints",
                            str(project / "conflict.xml"))
        assert code == EXIT_VIOLATED
        assert "constraints 0 and 1" in text
        assert "a=0" in text


class TestProjectLayout:
    def test_scan_and_validate(self, tmp_path):
        (tmp_path / "blocks").mkdir()
        (tmp_path / "constraints").mkdir()
        (tmp_path / "blocks" / "or.st").write_text(OR_ST)
        (tmp_path / "constraints" / "and.xml").write_text(AND_XML)
        layout = ProjectLayout.scan(tmp_path)
        assert set(layout.blocks) == {"AndGate"}
        assert layout.constraint_lists[0].block_name == "AndGate"

    def test_duplicate_block_names_rejected(self, tmp_path):
        (tmp_path / "blocks").mkdir()
        (tmp_path / "constraints").mkdir()
        (tmp_path / "blocks" / "one.st").write_text(OR_ST)
        (tmp_path / "blocks" / "two.st").write_text(OR_ST)
        with pytest.raises(SchemaError):
            ProjectLayout.scan(tmp_path)

    def test_unresolved_constraint_list_rejected(self, tmp_path):
        (tmp_path / "blocks").mkdir()
        (tmp_path / "constraints").mkdir()
        (tmp_path / "constraints" / "and.xml").write_text(AND_XML)
        with pytest.raises(SchemaError):
            ProjectLayout.scan(tmp_path)


class TestStats:
    def test_milliseconds_example_exact(self):
        result = stats([128.0, 130.0, 126.0])
        assert result.mean == 128.0
        assert result.stddev == 2.0

    def test_equal_samples_zero_spread(self):
        assert stats([42.0, 42.0]).stddev == 0.0

    def test_two_samples(self):
        result = stats([1.0, 3.0])
        assert result.mean == 2.0
        assert result.stddev == pytest.approx(math.sqrt(2), rel=1e-12)

    def test_insufficient_samples(self):
        with pytest.raises(InsufficientSamples):
            stats([1.0])

    def test_matches_textbook_oracle(self):
        rng = random.Random(8)
        for _ in range(100):
            samples = [rng.uniform(0.1, 500.0) for _ in range(rng.randint(2, 12))]
            got = stats(samples)
            assert got.mean == pytest.approx(statistics.fmean(samples), rel=1e-12)
            assert got.stddev == pytest.approx(statistics.stdev(samples), rel=1e-9)


class TestBenchScenarios:
    def test_magnet_rule_out_of_range_occupied(self):
        assert magnet_rule([False, False, True, True], 3) is True
        assert magnet_rule([False, False, True, False], 3) is False
        assert magnet_rule([True, True, False, False], 1) is True
        assert magnet_rule([False, True, False, False], 1) is True  # s3 vacant

    def test_signal_light_rule(self):
        assert signal_light_rule([False] * 8) is False
        assert signal_light_rule([False] * 7 + [True]) is True

    def test_scenario_shapes(self):
        row = scenario("row")
        assert len(row.interface.inputs) == 4
        assert len(row.interface.outputs) == 3
        light = scenario("signal-light")
        assert len(light.interface.inputs) == 8
        assert len(light.interface.outputs) == 1

    def test_magnet_bench_validates(self):
        report = bench_run(scenario("magnet"), 3, SynthConfig(seed=2))
        assert report.stats.n == 3
        assert all(t > 0 for t in report.stats.samples)
        assert set(report.per_component) == {"m2"}

    def test_row_bench_three_calls_per_repeat(self):
        report = bench_run(scenario("row"), 2, SynthConfig(seed=2))
        assert set(report.per_component) == {"m1", "m2", "m3"}
        for result in report.results:
            assert len(result.per_output) == 3

    def test_repeat_minimum(self):
        with pytest.raises(InsufficientSamples):
            bench_run(scenario("magnet"), 1)

    def test_bench_cli_output(self):
        code, text = invoke("bench", "--scenario", "magnet", "--repeat", "2",
                            "--seed", "3")
        assert code == EXIT_OK
        assert "scenario: magnet" in text
        assert "mean" in text and "stddev" in text

    def test_bench_single_repeat_usage_error(self):
        code, text = invoke("bench", "--scenario", "magnet", "--repeat", "1")
        assert code == EXIT_USAGE
        assert "error" in text

    def test_size_bound_exit_3(self, project):
        parity = AND_XML.replace(
            '<row in="a=1;b=1" out="y=1"/>\n    <row in="a=0" out="y=0"/>\n    <row in="b=0" out="y=0"/>',
            '<row in="a=0;b=0" out="y=0"/>\n    <row in="a=0;b=1" out="y=1"/>\n'
            '    <row in="a=1;b=0" out="y=1"/>\n    <row in="a=1;b=1" out="y=0"/>')
        path = project / "parity.xml"
        path.write_text(parity)
        code, text = invoke("synth", "--constraints", str(path),
                            "--max-slots", "0")
        assert code == EXIT_USAGE  # max_slots < 1 is a config error
        code, text = invoke("synth", "--constraints", str(path), "--out",
                            str(project / "p.st"))
        assert code == EXIT_OK
