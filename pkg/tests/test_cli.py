import json
import sys

import pytest

from shlrkit import commands, main
from shlrkit.errors import ArgumentError, ComputationError, ShlrError


@pytest.fixture
def run(model_path, tmpdir):
    """Run the command line on a bundled model; returns the exit code and the written report."""

    def _run(command, model, *extra):
        output_file = str(tmpdir.join(f"{command}-{model}.out"))
        args = main.create_arg_parser().parse_args([command, model_path(model), *extra, "--output-file", output_file])
        code = main.main(args)
        with open(output_file, "r", encoding="utf-8") as fh:
            return code, fh.read()

    return _run


def test_check_d2_passes_for_a_lie_algebra(run):
    code, text = run("check-d2", "lie3")
    report = json.loads(text)
    assert code == 0
    assert report["command"] == "check-d2"
    assert report["verdicts"]["square_zero"] is True
    assert report["witnesses"]["bracket_defects"] == {}
    assert report["config"]["weight_cutoff"] == 4


def test_check_d2_fails_without_jacobi(run):
    code, text = run("check-d2", "nonjacobi")
    report = json.loads(text)
    assert code == 1
    assert report["verdicts"]["square_zero"] is False
    assert report["witnesses"]["square_zero"]["weight"] == 2
    assert report["verdicts"]["brackets_agree"] is True


def test_identity_is_a_weak_equivalence(run):
    code, text = run("weq", "morphisms", "id")
    report = json.loads(text)
    assert code == 0
    assert report["verdicts"]["weak_equivalence"] is True
    assert report["inputs"]["objects"] == ["id"]


def test_cylinder_at_weight_zero_has_no_obstructions(run):
    code, text = run("cylinder", "lie2", "--weight-cutoff", "0")
    report = json.loads(text)
    assert code == 0
    assert report["obstruction_log"] == []
    assert report["verdicts"]["fold"] is True


def test_reports_are_deterministic(run):
    first = run("ce", "lie2")
    second = run("ce", "lie2")
    assert first == second


def test_text_output(run):
    code, text = run("ce", "lie2", "--output", "text")
    assert code == 0
    assert "command: ce" in text.splitlines()


def test_inputs_are_canonical_text(run):
    _, text = run("lift", "morphisms", "p", "N")
    report = json.loads(text)
    assert report["inputs"]["model"].startswith("algebra B {")
    assert "module g" not in report["inputs"]["model"]
    assert report["verdicts"]["pushes_back"] is True


def test_environment_is_overridden_by_flags(run, monkeypatch):
    monkeypatch.setenv("SHLRKIT_WEIGHT_CUTOFF", "1")
    _, text = run("ce", "lie2")
    assert json.loads(text)["config"]["weight_cutoff"] == 1
    _, text = run("ce", "lie2", "--weight-cutoff", "2")
    assert json.loads(text)["config"]["weight_cutoff"] == 2


def test_bad_environment_is_an_argument_error(run, monkeypatch):
    monkeypatch.setenv("SHLRKIT_DEGREE_WINDOW", "two")
    with pytest.raises(ArgumentError):
        run("ce", "lie2")


def test_missing_object_is_an_argument_error(run):
    with pytest.raises(ArgumentError) as info:
        run("weq", "lie3")
    assert info.value.exit_code == 2


def test_cli_exit_codes(model_path, monkeypatch, tmpdir):
    output_file = str(tmpdir.join("report.json"))
    monkeypatch.setattr(sys, "argv", ["shlrkit", "weq", model_path("lie3"), "--output-file", output_file])
    with pytest.raises(SystemExit) as info:
        main.cli()
    assert info.value.code == 2
    monkeypatch.setattr(sys, "argv", ["shlrkit", "check-d2", model_path("nonjacobi"), "--output-file", output_file])
    with pytest.raises(SystemExit) as info:
        main.cli()
    assert info.value.code == 1


def test_high_powers_in_a_model(tmpdir):
    model = tmpdir.join("powers.shlr")
    model.write("algebra A {\n    x : 0;\n    y : -1;\n    d y = x^1500;\n}\n")
    output_file = str(tmpdir.join("powers.json"))
    args = main.create_arg_parser().parse_args(["cohomology", str(model), "--output-file", output_file])
    assert main.main(args) == 0
    with open(output_file, "r", encoding="utf-8") as fh:
        report = json.load(fh)
    assert report["verdicts"]["base_complete"] is True


def test_internal_failures_exit_with_code_two(model_path, monkeypatch, tmpdir):
    def explode(self, report, target):
        raise RecursionError("maximum recursion depth exceeded")

    monkeypatch.setattr(commands.Ce, "execute", explode)
    args = main.create_arg_parser().parse_args(["ce", model_path("lie2")])
    with pytest.raises(ComputationError) as info:
        main.main(args)
    assert info.value.exit_code == 2
    output_file = str(tmpdir.join("report.json"))
    monkeypatch.setattr(sys, "argv", ["shlrkit", "ce", model_path("lie2"), "--output-file", output_file])
    with pytest.raises(SystemExit) as info:
        main.cli()
    assert info.value.code == 2


def test_bad_flags_are_rejected_by_argparse(model_path):
    parser = main.create_arg_parser()
    with pytest.raises(SystemExit):
        parser.parse_args(["ce", model_path("lie2"), "--degree-window", "3"])
    with pytest.raises(SystemExit):
        parser.parse_args(["frobnicate", model_path("lie2")])


def test_errors_share_a_base_class():
    assert issubclass(ArgumentError, ShlrError)
