import pytest

from shlrkit.dgca import SemiFreeDgca
from shlrkit.errors import ArgumentError, InvalidComplexError
from shlrkit.weighted import (
    FatCdga,
    FatMorphism,
    check_fat_morphism,
    compose_fat_morphisms,
    identity_morphism,
    initial_object,
    linear_part_of_differential,
    linear_part_of_morphism,
    square_zero_check,
)


@pytest.fixture
def lie2():
    """CE algebra of the two-dimensional non-abelian Lie algebra."""
    return FatCdga(SemiFreeDgca.ground(), [("t1", 1), ("t2", 1)], {"t2": "t1*t2"}, max_weight=2, name="lie2")


@pytest.fixture
def over_line():
    A = SemiFreeDgca([("x", 0)], name="A")
    return FatCdga(A, [("s", 0), ("t", 1)], {"s": "x*t"}, max_weight=2, name="X")


def test_components(lie2):
    t1, t2 = lie2.algebra.gen("t1"), lie2.algebra.gen("t2")
    assert lie2.dual_names == ["t1", "t2"]
    assert lie2.component(1).value("t2") == t1 * t2
    assert lie2.component(0).value("t2").is_zero()
    assert lie2.d(t1 * t2).is_zero()


def test_square_zero(lie2):
    report = square_zero_check(lie2)
    assert report.passed
    assert report.through_weight == 2


def test_square_zero_failure_is_located():
    X = FatCdga(SemiFreeDgca.ground(), [("a", 1), ("b", 1), ("c", 2)], {"a": "c", "c": "a*c"}, max_weight=2)
    report = square_zero_check(X)
    assert not report.passed
    assert report.weight == 1
    assert report.generator == "a"
    assert report.degree == 3


def test_square_zero_beyond_cutoff_is_invisible():
    X = FatCdga(SemiFreeDgca.ground(), [("a", 1), ("b", 1), ("c", 2)], {"a": "c", "c": "a*c"}, max_weight=1)
    assert X.differential("c").is_zero()
    assert square_zero_check(X).passed


def test_fat_cdga_rejects_bad_input(over_line):
    A = over_line.base
    with pytest.raises(InvalidComplexError):
        FatCdga(A, [("t", 1)], {"x": "x"}, max_weight=1)
    with pytest.raises(ArgumentError):
        FatCdga(A, [("t", 1)], {"z": "t"}, max_weight=1)
    with pytest.raises(ArgumentError):
        FatCdga(A, [("x", 1)], max_weight=1)
    with pytest.raises(ArgumentError):
        FatCdga(A, [("t", 1)], max_weight=-1)


def test_linear_part(over_line):
    dual = linear_part_of_differential(over_line)
    assert dual.names == ["s", "t"]
    assert dual.differential("s") == dual.algebra.gen("x") * dual.algebra.gen("t")


def test_projection(over_line):
    down = over_line.projection()
    x = over_line.algebra.gen("x")
    assert down(x * over_line.algebra.gen("t")).is_zero()
    assert down(x) == over_line.base.algebra.gen("x")


def test_identity_morphism(lie2):
    identity = identity_morphism(lie2)
    assert check_fat_morphism(identity).passed
    composite = compose_fat_morphisms(identity, identity)
    assert composite.image("t2") == lie2.algebra.gen("t2")
    assert linear_part_of_morphism(identity).is_identity()


def test_broken_morphism_is_reported(lie2):
    t2 = lie2.algebra.gen("t2")
    g = FatMorphism(lie2, lie2, {"t1": t2, "t2": t2})
    report = check_fat_morphism(g)
    assert not report.passed
    assert report.generator == "t1"
    assert report.reason == "differentials do not intertwine"


def test_cutoffs_must_agree(lie2):
    with pytest.raises(ArgumentError):
        FatMorphism(lie2, initial_object(1))


def test_initial_object_maps_everywhere(lie2):
    k = initial_object(2)
    assert k.algebra.names == []
    assert check_fat_morphism(FatMorphism(k, lie2)).passed


def test_renamed(lie2):
    renamed = lie2.renamed("_1")
    assert renamed.dual_names == ["t1_1", "t2_1"]
    assert renamed.differential("t2_1") == renamed.algebra.gen("t1_1") * renamed.algebra.gen("t2_1")
    assert renamed.name == "lie2_1"
