import os
from fractions import Fraction

import pytest

import shlrkit
from shlrkit.dsl import build_model, format_expression, parse_expression, parse_model, print_model
from shlrkit.dsl.model import AlgebraDecl, BracketsDecl, ConfigDecl, MapDecl, ModuleDecl
from shlrkit.errors import ModelError, NameResolutionError, UndeclaredNameError

MODELS_DIR = os.path.join(os.path.dirname(shlrkit.__file__), "models")
BUNDLED = sorted(name[: -len(".shlr")] for name in os.listdir(MODELS_DIR) if name.endswith(".shlr"))


def test_parse_expression():
    expr = parse_expression("2*x*y - 1/2*z^2")
    assert expr == (
        (Fraction(2), (("x", 1), ("y", 1))),
        (Fraction(-1, 2), (("z", 2),)),
    )
    assert format_expression(expr) == "2*x*y - 1/2*z^2"


def test_expressions_collect_terms():
    assert parse_expression("x - x") == ()
    assert format_expression(parse_expression("x - x")) == "0"
    assert format_expression(parse_expression("-(x + 1)*y")) == "-x*y - y"
    assert format_expression(parse_expression("x*x*y")) == "x^2*y"
    # factor order is kept; signs are applied only inside an algebra
    assert format_expression(parse_expression("y*x")) == "y*x"


def test_parse_declarations(model_path):
    with open(model_path("morphisms"), "r", encoding="utf-8") as fh:
        model = parse_model(fh.read())
    kinds = [type(d) for d in model.declarations]
    assert kinds == [ConfigDecl, AlgebraDecl, AlgebraDecl, ModuleDecl, BracketsDecl, ModuleDecl, MapDecl] + [
        MapDecl
    ] * 3
    assert model.config.weight_cutoff == 2
    module = model.find("g")
    assert module.base == "k"
    assert module.shift == 1
    brackets = model.find("lie2")
    assert brackets.brackets[0].word == ("e1", "e2")
    assert model.find("p").images[0].expr == ()


def test_anchor_entries(model_path):
    with open(model_path("algebroid"), "r", encoding="utf-8") as fh:
        model = parse_model(fh.read())
    anchor = model.find("algebroid").anchors[0]
    assert anchor.word == ("e1",)
    assert anchor.target == "x"
    assert format_expression(anchor.expr) == "x"


@pytest.mark.parametrize("name", BUNDLED)
def test_bundled_models_are_canonical(model_path, name):
    with open(model_path(name), "r", encoding="utf-8") as fh:
        text = fh.read()
    model = parse_model(text)
    assert print_model(model) == text
    assert parse_model(print_model(model)) == model


def test_syntax_error_position():
    with pytest.raises(ModelError) as info:
        parse_model("algebra A {\n  x 0;\n}\n")
    assert info.value.line == 2
    assert info.value.column == 5


def test_unexpected_character():
    with pytest.raises(ModelError) as info:
        parse_model("algebra A {\n  x : 0 @\n}\n")
    assert info.value.line == 2
    assert info.value.column == 9


def test_unexpected_end_of_input():
    with pytest.raises(ModelError) as info:
        parse_model("algebra A {\n  x : 0;\n")
    assert info.value.line is None


def test_positive_algebra_degree():
    with pytest.raises(ModelError, match="positive degree"):
        parse_model("algebra A {\n  x : 1;\n}\n")


def test_undeclared_names():
    with pytest.raises(UndeclaredNameError) as info:
        parse_model("algebra A {\n  x : 0;\n  d y = x;\n}\n")
    assert (info.value.line, info.value.column) == (3, 5)
    with pytest.raises(UndeclaredNameError):
        parse_model("module M over B {\n  m : 0;\n}\n")
    with pytest.raises(UndeclaredNameError):
        parse_model("module g over k shift 1 {\n  e : 0;\n}\n\nbrackets b on g {\n  [e, f] = e;\n}\n")
    with pytest.raises(UndeclaredNameError):
        parse_model("algebra A {\n  x : 0;\n}\n\nmap p : A -> B {\n}\n")
    # undeclared names are also name-resolution errors
    with pytest.raises(NameResolutionError):
        parse_model("algebra A {\n  x : 0;\n  d x = z;\n}\n")


def test_duplicates():
    with pytest.raises(ModelError, match="duplicate declaration"):
        parse_model("algebra A {\n}\n\nalgebra A {\n}\n")
    with pytest.raises(ModelError, match="duplicate generator"):
        parse_model("algebra A {\n  x : 0;\n  x : -1;\n}\n")
    with pytest.raises(ModelError, match="duplicate config key"):
        parse_model("config {\n  seed = 1;\n  seed = 2;\n}\n")
    with pytest.raises(ModelError, match="unknown config key"):
        parse_model("config {\n  speed = 1;\n}\n")


def test_build_objects(load_model):
    _, objects = load_model("morphisms")
    assert objects.kind("p") == "map"
    assert objects.kind("lie2") == "pair"
    assert objects.kind("k") == "algebra"
    assert objects.last("pair", "module") == "N"
    assert objects.pair("N").module == objects.modules["N"]
    assert objects.ce("A").algebra.names == ["y", "w"]
    with pytest.raises(NameResolutionError):
        objects.kind("q")


def test_module_degrees_subtract_the_shift(load_model):
    _, objects = load_model("lie2")
    assert objects.modules["g"].degree("e1") == -1
    assert objects.ce("lie2").algebra.generator("e1").degree == 1


def test_build_reports_rejected_declarations():
    model = parse_model("algebra A {\n  y : -1;\n  x : 0;\n  d y = x;\n}\n")
    with pytest.raises(ModelError) as info:
        build_model(model)
    assert info.value.line == 1


def test_one_argument_brackets_are_rejected():
    model = parse_model("module g over k shift 1 {\n  e : 0;\n}\n\nbrackets b on g {\n  [e] = e;\n}\n")
    with pytest.raises(ModelError, match="one-argument"):
        build_model(model)
