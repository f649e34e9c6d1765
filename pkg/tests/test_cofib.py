import pytest

from shlrkit.cofib import (
    INCONCLUSIVE,
    FactorizationConfig,
    base_cylinder,
    coproduct,
    cylinder_ce,
    der_hom_naturality,
    der_hom_transport,
    fold_morphism,
    is_cofibration,
    is_weak_equivalence,
    module_map_commutes,
    path_endpoints,
    path_evaluation,
    path_inclusion,
    path_module,
    pushout_along_cofibration,
    same_morphism,
)
from shlrkit.dgca import CellModule, DgcaMorphism, SemiFreeDgca, base_change, dualize_cell, identity_map, primal_of
from shlrkit.errors import ArgumentError, NotCofibrationError
from shlrkit.linalg import DegreeWindow
from shlrkit.weighted import (
    FatCdga,
    FatMorphism,
    check_fat_morphism,
    compose_fat_morphisms,
    identity_morphism,
    initial_object,
    linear_part_of_differential,
    square_zero_check,
)


def lie2_at(weight):
    return FatCdga(SemiFreeDgca.ground(), [("t1", 1), ("t2", 1)], {"t2": "t1*t2"}, max_weight=weight, name="lie2")


@pytest.fixture
def lie2():
    return lie2_at(2)


@pytest.fixture
def koszul():
    return SemiFreeDgca([("x", 0), ("y", -1)], {"y": "x"}, name="K")


@pytest.fixture
def dgmodule():
    A = SemiFreeDgca([("x", 0)], name="A")
    return CellModule(A, [("m1", 0), ("m2", -1)], {"m2": "x*m1"}, name="M")


def test_cofibrations(lie2):
    assert is_cofibration(identity_morphism(lie2))
    assert is_cofibration(FatMorphism(initial_object(2), lie2))
    assert not is_cofibration(fold_morphism(lie2))


def test_coproduct(lie2):
    P, in_1, in_2 = coproduct(lie2, lie2)
    assert P.dual_names == ["t1", "t2", "t1_2", "t2_2"]
    assert P.differential("t2_2") == P.algebra.gen("t1_2") * P.algebra.gen("t2_2")
    assert square_zero_check(P).passed
    for inclusion in (in_1, in_2):
        assert check_fat_morphism(inclusion).passed
        assert is_cofibration(inclusion)
    with pytest.raises(ArgumentError):
        coproduct(lie2, lie2_at(1))


def test_fold_is_a_morphism(lie2):
    fold = fold_morphism(lie2)
    assert check_fat_morphism(fold).passed
    assert fold.image("t2_1") == lie2.algebra.gen("t2")


def test_pushout_of_initial_maps_is_the_coproduct(lie2):
    k = initial_object(2)
    f = FatMorphism(k, lie2)
    g = FatMorphism(k, lie2)
    P, gamma, phi = pushout_along_cofibration(f, g)
    assert P.dual_names == ["t1_2", "t2_2", "t1", "t2"]
    assert square_zero_check(P).passed
    assert check_fat_morphism(gamma).passed
    assert check_fat_morphism(phi).passed
    assert same_morphism(compose_fat_morphisms(gamma, f), compose_fat_morphisms(phi, g))


def test_pushout_needs_a_cofibration(lie2):
    t2 = lie2.algebra.gen("t2")
    g = FatMorphism(lie2, lie2, {"t1": t2, "t2": t2})
    with pytest.raises(NotCofibrationError):
        pushout_along_cofibration(identity_morphism(lie2), g)
    with pytest.raises(ArgumentError):
        pushout_along_cofibration(FatMorphism(initial_object(2), lie2), identity_morphism(lie2))


def test_two_out_of_three(lie2):
    identity = identity_morphism(lie2)
    assert is_weak_equivalence(identity).passed
    assert is_weak_equivalence(compose_fat_morphisms(identity, identity)).passed
    broken = is_weak_equivalence(FatMorphism(initial_object(2), lie2))
    assert broken.verdict is False
    assert [p.part for p in broken.parts] == ["base", "linear"]
    assert broken.parts[0].verdict is True


def test_resolution_is_a_weak_equivalence(koszul):
    augmentation = DgcaMorphism(koszul, SemiFreeDgca.ground(), {"x": 0, "y": 0})
    assert is_weak_equivalence(augmentation).verdict is True
    line = SemiFreeDgca([("x", 0)])
    assert is_weak_equivalence(DgcaMorphism(line, SemiFreeDgca.ground(), {"x": 0})).verdict is False


def test_small_window_is_inconclusive(koszul):
    augmentation = DgcaMorphism(koszul, SemiFreeDgca.ground(), {"x": 0, "y": 0})
    cfg = FactorizationConfig(window=DegreeWindow(-1, 1))
    assert is_weak_equivalence(augmentation, cfg).verdict == INCONCLUSIVE


def test_base_cylinder(koszul):
    base = base_cylinder(koszul)
    cyl = base.cylinder.algebra
    assert base.cylinder.names == ["x_0", "y_0", "x_1", "y_1", "x_s", "y_s"]
    assert base.cylinder.differential("x_s") == cyl.gen("x_0") - cyl.gen("x_1")
    assert base.corrections["y"] == cyl.gen("x_s")
    assert base.inclusion.check().passed
    assert base.projection.check().passed
    assert base.endpoint(0).check().passed


def test_path_module(dgmodule):
    path = path_module(dgmodule)
    P = path.algebra
    assert path.names == ["m1_I", "m2_I", "m1_0", "m2_0", "m1_1", "m2_1"]
    assert path.degree("m2_I") == 0
    assert path.differential("m2_0") == P.gen("x") * P.gen("m1_0") - P.gen("m2_I")
    assert path.differential("m2_I") == -(P.gen("x") * P.gen("m1_I"))
    assert module_map_commutes(path_inclusion(dgmodule, path), dgmodule, path)
    for endpoint in (0, 1):
        assert module_map_commutes(path_evaluation(dgmodule, path, endpoint), path, dgmodule)
    ends, projection = path_endpoints(dgmodule, path)
    assert ends.names == ["m1_0", "m2_0", "m1_1", "m2_1"]
    assert module_map_commutes(projection, path, ends)


def test_cylinder_at_weight_zero():
    witness = cylinder_ce(lie2_at(0))
    assert witness.obstruction_log == []
    assert witness.C.dual_names == ["t1_I", "t2_I", "t1_0", "t2_0", "t1_1", "t2_1"]
    assert [p.part for p in witness.weak_equivalence.parts] == ["base"]
    assert witness.checks["square_zero"] is True
    assert witness.checks["i_cofibration"] is True
    assert witness.checks["fold"] is True
    assert witness.passed


def test_cylinder_logs_each_weight():
    witness = cylinder_ce(lie2_at(1))
    assert [step.weight for step in witness.obstruction_log] == [1]
    assert witness.obstruction_log[0].obstruction == {}


def test_cylinder_rejects_other_cutoff(lie2):
    with pytest.raises(ArgumentError):
        cylinder_ce(lie2, FactorizationConfig(max_weight=3))


def cylinder_input(name, load_model):
    """A fat cdga cut at weight 3 and the truncation it is certified with."""
    if name == "dgmodule":
        _, objects = load_model("dgmodule")
        return objects.ce("M"), FactorizationConfig.from_settings(objects.settings)
    cfg = FactorizationConfig(window=DegreeWindow(-6, 2))
    if name == "abelian":
        return FatCdga(SemiFreeDgca.ground(), [("t", 1)], {}, max_weight=3, name="abelian"), cfg
    return lie2_at(3), cfg


@pytest.mark.parametrize("name", ["abelian", "lie2", "dgmodule"])
def test_cylinder_certificates_through_weight_three(name, load_model):
    X, cfg = cylinder_input(name, load_model)
    witness = cylinder_ce(X, cfg)
    assert [step.weight for step in witness.obstruction_log] == [1, 2, 3]
    for check, verdict in witness.checks.items():
        assert verdict is True, check
    assert witness.weak_equivalence.verdict is True
    assert [p.part for p in witness.weak_equivalence.parts] == ["base", "linear"]
    C = witness.C
    for end in ("_0", "_1"):
        inclusion = FatMorphism(X, C, {n: C.algebra.gen(f"{n}{end}") for n in X.algebra.names})
        assert check_fat_morphism(inclusion).passed
        assert is_weak_equivalence(inclusion, cfg).verdict is True


@pytest.mark.parametrize("name", ["abelian", "lie2", "dgmodule"])
def test_cylinder_linear_part_is_a_lifted_path_module(name, load_model):
    X, cfg = cylinder_input(name, load_model)
    witness = cylinder_ce(X, cfg)
    M = primal_of(linear_part_of_differential(X))
    linear = linear_part_of_differential(witness.C)
    assert linear == dualize_cell(witness.path)
    assert base_change(witness.base.projection, linear) == dualize_cell(path_module(M))
    if not X.base_names:
        assert witness.path == path_module(M)


@pytest.fixture
def surjection():
    B = SemiFreeDgca([("y", 0)], name="B")
    A = SemiFreeDgca([("y", 0), ("w", 0)], name="A")
    N = CellModule(B, [("n1", 0), ("n2", -1)], {"n2": "y*n1"}, name="N")
    return DgcaMorphism(A, B, {"w": 0}), N


def test_der_hom_transport(surjection):
    p, N = surjection
    witness = der_hom_transport(p, N)
    assert all(witness.bijective.values())
    assert witness.dims_left == witness.dims_right
    assert witness.dims_left[0] == 8
    for n in witness.certified:
        assert witness.cohomology_left[n] == witness.cohomology_right[n]
    assert witness.passed


def test_der_hom_naturality(surjection):
    p, N = surjection
    report = der_hom_naturality(p, identity_map(p.target), N)
    assert report.left_chain_map
    assert report.right_chain_map
    assert report.commutes
    assert report.passed
