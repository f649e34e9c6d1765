import pytest

from shlrkit.dgca import CellModule, SemiFreeDgca
from shlrkit.errors import ArgumentError, InvalidComplexError
from shlrkit.shlr import (
    Multiderivation,
    SHLRPair,
    ce_from_pair,
    check_multider_leibniz,
    dualize_multider,
    legal_words,
    multider_square,
    pair_from_ce,
    reconstruct_multider,
    sort_word,
)
from shlrkit.weighted import square_zero_check


@pytest.fixture
def g2():
    """Two generators of module degree -1: a Lie algebra shifted into odd degree."""
    return CellModule(SemiFreeDgca.ground(), [("e1", -1), ("e2", -1)], name="g")


@pytest.fixture
def lie2(g2):
    layer = Multiderivation(g2, 1, {("e1", "e2"): "e2"})
    return SHLRPair(g2, [layer], cutoff=4, shift=1, name="lie2")


def test_legal_words(g2):
    assert legal_words(g2, 2) == [("e1", "e2")]
    assert legal_words(g2, 3) == []
    assert legal_words(g2, 0) == [()]


def test_sort_word(g2):
    assert sort_word(g2, ("e2", "e1")) == (-1, ("e1", "e2"))
    assert sort_word(g2, ("e1", "e2")) == (1, ("e1", "e2"))
    assert sort_word(g2, ("e1", "e1")) is None
    with pytest.raises(ArgumentError):
        sort_word(g2, ("x",))


def test_bracket_is_graded_antisymmetric(lie2):
    layer = lie2.layer(1)
    e2 = lie2.module.algebra.gen("e2")
    assert layer.bracket(("e1", "e2")) == e2
    assert layer.bracket(("e2", "e1")) == -e2
    assert layer.bracket(("e1", "e1")).is_zero()


def test_multiderivation_rejects_bad_tables(g2):
    with pytest.raises(ArgumentError):
        Multiderivation(g2, 1, {("e1",): "e2"})
    with pytest.raises(ArgumentError):
        Multiderivation(g2, 1, {("e1", "e2"): "e2", ("e2", "e1"): "e2"})
    with pytest.raises(ArgumentError):
        Multiderivation(g2, -1)


def test_pair_rejects_bad_layers(g2):
    with pytest.raises(ArgumentError):
        SHLRPair(g2, [Multiderivation(g2, 2)], cutoff=1)
    with pytest.raises(ArgumentError):
        SHLRPair(g2, [Multiderivation(g2, 1), Multiderivation(g2, 1)])


def test_ce_differential(lie2):
    X = ce_from_pair(lie2)
    e1, e2 = X.algebra.gen("e1"), X.algebra.gen("e2")
    assert X.dual_names == ["e1", "e2"]
    assert X.algebra.generator("e1").degree == 1
    assert X.differential("e1").is_zero()
    assert X.differential("e2") == -(e1 * e2)
    assert square_zero_check(X).passed


def test_ce_at_weight_zero_drops_brackets(lie2):
    X = ce_from_pair(lie2, max_weight=0)
    assert X.differential("e2").is_zero()
    assert X.algebra.names == ["e1", "e2"]


def test_brackets_round_trip(lie2):
    X = ce_from_pair(lie2)
    assert reconstruct_multider(X.d, lie2.module, 1) == lie2.layer(1)
    recovered = pair_from_ce(X)
    assert recovered.module == lie2.module
    assert recovered.layer(1) == lie2.layer(1)
    assert recovered.layer(2).is_zero()
    assert recovered.shift == 1


def test_dualize_multider_matches_ce(lie2):
    X = ce_from_pair(lie2)
    D = dualize_multider(lie2.layer(1), X.algebra)
    assert D.value("e2") == X.differential("e2")


def test_reconstruct_needs_room(lie2):
    X = ce_from_pair(lie2, max_weight=1)
    with pytest.raises(ArgumentError):
        reconstruct_multider(X.d, lie2.module, 1)


def test_so3_satisfies_jacobi(load_model):
    _, objects = load_model("lie3")
    pair = objects.pair("so3")
    for k in range(pair.cutoff + 1):
        assert multider_square(pair, k).is_zero()
    assert square_zero_check(ce_from_pair(pair)).passed


def test_jacobi_failure_is_found_at_weight_two(load_model):
    _, objects = load_model("nonjacobi")
    pair = objects.pair("nonjacobi")
    assert multider_square(pair, 0).is_zero()
    assert multider_square(pair, 1).is_zero()
    defect = multider_square(pair, 2)
    assert not defect.is_zero()
    assert defect.first()[0] == "bracket"
    e1, e2, e3 = (pair.module.algebra.gen(n) for n in ("e1", "e2", "e3"))
    bracket = pair.evaluate_bracket
    jacobiator = (
        bracket([bracket([e1, e2]), e3]) - bracket([bracket([e1, e3]), e2]) + bracket([bracket([e2, e3]), e1])
    )
    assert jacobiator == -e3
    assert defect.brackets[("e1", "e2", "e3")] in (jacobiator, -jacobiator)
    report = square_zero_check(ce_from_pair(pair, validate=False))
    assert not report.passed
    assert report.weight == 2
    with pytest.raises(InvalidComplexError):
        ce_from_pair(pair)


def test_multider_square_range(lie2):
    with pytest.raises(ArgumentError):
        multider_square(lie2, 5)


def test_so3_round_trip(load_model):
    _, objects = load_model("lie3")
    pair = objects.pair("so3")
    recovered = pair_from_ce(ce_from_pair(pair))
    assert recovered.layer(1) == pair.layer(1)


def test_evaluate_bracket_is_bilinear(lie2):
    A = lie2.module.algebra
    e1, e2 = A.gen("e1"), A.gen("e2")
    assert lie2.evaluate_bracket([e1, e2]) == e2
    assert lie2.evaluate_bracket([e1 * 2, e2 * 3]) == e2 * 6
    assert lie2.evaluate_bracket([e2, e1]) == -e2
    with pytest.raises(ArgumentError):
        lie2.evaluate_bracket([])


def test_leibniz_sampling_over_ground(lie2):
    assert check_multider_leibniz(lie2, 1).passed


def test_leibniz_sampling_with_an_anchor(load_model):
    _, objects = load_model("algebroid")
    pair = objects.pair("algebroid")
    A = pair.module.algebra
    x, e1, e2 = A.gen("x"), A.gen("e1"), A.gen("e2")
    # x²·[e1, e2] + x·ρ(e1)(x)·e2
    assert pair.evaluate_bracket([x * e1, x * e2]) == x**2 * e2 * 2
    assert pair.evaluate_bracket([x * e2, e1]) == -(x * e2 * 2)
    report = check_multider_leibniz(pair, 1, trials=50)
    assert report.passed
    assert report.trials == 50
