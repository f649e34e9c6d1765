import pytest

from shlrkit.dgca import (
    CellModule,
    DgcaMorphism,
    SemiFreeDgca,
    base_change,
    check_leibniz,
    compose_maps,
    dualize_cell,
    identity_map,
    lift_differential,
    normal_form,
    primal_of,
    truncated_chain_map,
    truncated_complex,
)
from shlrkit.algebra import DerivationOverMorphism
from shlrkit.errors import ArgumentError, InvalidComplexError, NameResolutionError, WindowTooSmallError
from shlrkit.linalg import WINDOW_INCOMPLETE, DegreeWindow, cohomology_dims, cone


@pytest.fixture
def koszul():
    """k[x, y] with d y = x, a resolution of the ground field."""
    return SemiFreeDgca([("x", 0), ("y", -1)], {"y": "x"}, name="K")


@pytest.fixture
def line():
    return SemiFreeDgca([("x", 0)], name="A")


@pytest.fixture
def dgmodule(line):
    return CellModule(line, [("m1", 0), ("m2", -1)], {"m2": "x*m1"}, name="M")


def test_normal_form_forms(koszul):
    x, y = koszul.algebra.gen("x"), koszul.algebra.gen("y")
    assert normal_form(koszul.algebra, "2*x*y - x^2") == x * y * 2 - x ** 2
    assert normal_form(koszul.algebra, [(3, [("x", 2)]), (1, ["y"])]) == x ** 2 * 3 + y
    assert normal_form(koszul.algebra, 5) == 5


def test_semifree_dgca(koszul):
    assert koszul.names == ["x", "y"]
    assert koszul.differential("y") == koszul.algebra.gen("x")
    assert koszul.differential("x").is_zero()
    assert koszul.d(koszul.algebra.gen("x") * koszul.algebra.gen("y")) == koszul.algebra.gen("x") ** 2


def test_semifree_dgca_rejects_bad_input():
    with pytest.raises(ArgumentError):
        SemiFreeDgca([("x", 1)])
    with pytest.raises(InvalidComplexError):
        SemiFreeDgca([("y", -1), ("x", 0)], {"y": "x^2"})
    with pytest.raises(InvalidComplexError):
        SemiFreeDgca([("x", 0), ("y", -1), ("z", -2)], {"y": "x", "z": "y"})


def test_ground_field():
    k = SemiFreeDgca.ground()
    assert k.names == []
    assert k == SemiFreeDgca.ground()


def test_renamed(koszul):
    renamed = koszul.renamed({"x": "u"})
    assert renamed.names == ["u", "y"]
    assert renamed.differential("y") == renamed.algebra.gen("u")


def test_cell_module(dgmodule):
    A = dgmodule.algebra
    assert dgmodule.names == ["m1", "m2"]
    assert dgmodule.degree("m2") == -1
    coefficients = dgmodule.coefficients(dgmodule.differential("m2"))
    assert list(coefficients) == ["m1"]
    assert dgmodule.combine(coefficients) == A.gen("x") * A.gen("m1")


def test_cell_module_rejects_bad_input(line):
    with pytest.raises(InvalidComplexError):
        CellModule(line, [("m1", -1), ("m2", 0)], {"m1": "x*m2"})
    with pytest.raises(ArgumentError):
        CellModule(line, [("x", 0)])
    with pytest.raises(ArgumentError):
        CellModule(line, [("m1", 0), ("m2", -1)], {"m2": "x"})


def test_dual_of_cell_module(dgmodule):
    dual = dualize_cell(dgmodule)
    D = dual.algebra
    assert dual.degree("m1") == 0
    assert dual.degree("m2") == 1
    assert dual.differential("m1") == -(D.gen("x") * D.gen("m2"))
    assert dual.differential("m2").is_zero()
    assert primal_of(dual) == dgmodule


def test_dgca_morphisms(koszul):
    k = SemiFreeDgca.ground()
    augmentation = DgcaMorphism(koszul, k, {"x": 0, "y": 0})
    assert augmentation.check().passed
    broken = DgcaMorphism(koszul, koszul, {"y": 0})
    report = broken.check()
    assert not report.passed
    assert report.generator == "y"
    assert compose_maps(augmentation, identity_map(koszul)).image("x").is_zero()


def test_morphism_rejects_unknown_generator(koszul):
    with pytest.raises(NameResolutionError):
        DgcaMorphism(koszul, koszul, {"z": 0})


def test_base_change(dgmodule, line):
    k = SemiFreeDgca.ground()
    evaluation = DgcaMorphism(line, k, {"x": 0})
    fibre = base_change(evaluation, dgmodule)
    assert fibre.base == k
    assert fibre.differential("m2").is_zero()


def test_lift_differential():
    B = SemiFreeDgca([("y", 0)], name="B")
    A = SemiFreeDgca([("y", 0), ("w", 0)], name="A")
    p = DgcaMorphism(A, B, {"w": 0})
    N = CellModule(B, [("n1", 0), ("n2", -1)], {"n2": "y*n1"}, name="N")
    lifted = lift_differential(p, N)
    assert lifted.base == A
    assert lifted.differential("n2") == lifted.algebra.gen("y") * lifted.algebra.gen("n1")
    assert base_change(p, lifted) == N


def test_lift_fails_without_room():
    B = SemiFreeDgca([("y", 0)], name="B")
    A = SemiFreeDgca([("y", 0), ("w", 0)], name="A")
    p = DgcaMorphism(A, B, {"w": 0})
    N = CellModule(B, [("n1", 0), ("n2", -1)], {"n2": "y^3*n1"})
    with pytest.raises(WindowTooSmallError):
        lift_differential(p, N, max_length=2)


def test_leibniz_check(koszul):
    assert check_leibniz(koszul.d).passed
    A = koszul.algebra
    x = A.gen("x")
    broken = DerivationOverMorphism(A, A, 1, {"y": x}, tabulated={(1, 1): A.zero()})
    report = check_leibniz(broken)
    assert not report.passed
    assert report.witness


def test_truncated_complex_of_resolution(koszul):
    C = truncated_complex(koszul.algebra, koszul.d, DegreeWindow(-2, 1), max_length=2)
    assert C.dim(0) == 3
    assert C.dim(-1) == 2
    dims = cohomology_dims(C)
    assert dims[-1] == 0
    assert dims[0] == 1


def test_truncated_chain_map_of_identity(koszul):
    C = truncated_complex(koszul.algebra, koszul.d, DegreeWindow(-2, 1), max_length=2)
    maps = truncated_chain_map(lambda e: e, C, C)
    assert maps.escapes == set()
    for n in C.window.degrees():
        assert maps.matrices[n].to_dense() == [[1 if i == j else 0 for j in range(C.dim(n))] for i in range(C.dim(n))]


def test_truncation_keeps_only_bounded_chains():
    A = SemiFreeDgca([("x", 0), ("y", -1)], {"y": "x^2"})
    C = truncated_complex(A.algebra, A.d, DegreeWindow(-2, 1), max_length=3)
    assert C.dim(-1) == 2
    assert C.dim(0) == 4
    dims = cohomology_dims(C)
    assert dims[-1] == 0
    assert dims[0] == 2
    for n in (-1, 0):
        for chain in C.chains[n]:
            assert all(A.algebra.monomial_length(m) <= 3 for m, _ in A.d(chain).items())


def test_chain_maps_that_leave_the_truncation():
    line = SemiFreeDgca([("x", 0)])
    square = DgcaMorphism(line, line, {"x": "x^2"})
    C = truncated_complex(line.algebra, line.d, DegreeWindow(-2, 2), max_length=2)
    maps = truncated_chain_map(square.map, C, C)
    assert maps.escapes == {0}
    K = cone(C, C, maps.matrices, DegreeWindow(-1, 1), maps.escapes)
    assert cohomology_dims(K)[0] == WINDOW_INCOMPLETE
    assert not K.complete_interior()
