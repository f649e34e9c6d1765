"""Seeded randomized checks of the bracket/CE correspondence and weak equivalences."""

import random

import pytest

from shlrkit.cofib import (
    coproduct,
    der_hom_naturality,
    der_hom_transport,
    is_weak_equivalence,
    pushout_along_cofibration,
    same_morphism,
)
from shlrkit.dgca import CellModule, DgcaMorphism, SemiFreeDgca, compose_maps
from shlrkit.errors import InvalidComplexError
from shlrkit.shlr import (
    Multiderivation,
    SHLRPair,
    ce_from_pair,
    legal_words,
    multider_square,
    pair_from_ce,
    word_degree,
)
from shlrkit.weighted import FatCdga, FatMorphism, check_fat_morphism, compose_fat_morphisms, square_zero_check

ROUND_TRIPS = 100
TRANSPORT_DATASETS = 50
COMPOSABLE_PAIRS = 50
PUSHOUTS = 10
DER_HOM_INSTANCES = 10


def random_layer(rng, module, weight, spread=2):
    """Random brackets and anchors of one weight, with every degree constraint met."""
    base_names = module.base.names
    brackets = {}
    for word in legal_words(module, weight + 1):
        target = 1 + word_degree(module, word)
        terms = []
        for g in module.module_generators:
            if g.degree != target:
                continue
            terms.append((rng.randint(-spread, spread), [g.name]))
            for x in base_names:
                terms.append((rng.randint(-spread, spread), [x, g.name]))
        if terms:
            brackets[word] = terms
    anchors = {}
    for word in legal_words(module, weight):
        if 1 + word_degree(module, word) != 0:
            continue
        anchors[word] = {
            x: [(rng.randint(-spread, spread), []), (rng.randint(-spread, spread), [x])] for x in base_names
        }
    return Multiderivation(module, weight, brackets, anchors)


@pytest.fixture
def anchored_module():
    A = SemiFreeDgca([("x", 0)], name="A")
    return CellModule(A, [("a", -1), ("b", 0)], name="M")


@pytest.fixture
def graded_module():
    return CellModule(SemiFreeDgca.ground(), [("a", -1), ("b", -1), ("c", -2)], name="L")


@pytest.mark.parametrize("seed", range(ROUND_TRIPS))
def test_duality_round_trip(anchored_module, seed):
    rng = random.Random(seed)
    layers = [random_layer(rng, anchored_module, weight) for weight in (1, 2)]
    pair = SHLRPair(anchored_module, layers, cutoff=3, shift=1, name="random")
    X = ce_from_pair(pair, validate=False)
    recovered = pair_from_ce(X)
    for weight in (1, 2):
        assert recovered.layer(weight) == pair.layer(weight)
    assert recovered.layer(3).is_zero()
    assert ce_from_pair(recovered, validate=False) == X


@pytest.mark.parametrize("seed", range(TRANSPORT_DATASETS))
def test_square_zero_transport(graded_module, seed):
    rng = random.Random(seed)
    pair = SHLRPair(graded_module, [random_layer(rng, graded_module, 1, spread=1)], cutoff=3, shift=1)
    bracket_side = all(multider_square(pair, k).is_zero() for k in range(pair.cutoff + 1))
    ce_side = square_zero_check(ce_from_pair(pair, validate=False)).passed
    assert bracket_side == ce_side


def test_transport_sees_valid_data(graded_module):
    pair = SHLRPair(graded_module, [Multiderivation(graded_module, 1, {("a", "b"): "b"})], cutoff=3, shift=1)
    assert all(multider_square(pair, k).is_zero() for k in range(4))
    assert square_zero_check(ce_from_pair(pair)).passed


@pytest.fixture
def line_module():
    """Two odd generators over k[x], so weight-1 anchors are vector fields on the line."""
    A = SemiFreeDgca([("x", 0)], name="A")
    return CellModule(A, [("a", -1), ("b", -1)], name="L")


def anchored_layer(rng, module, kind):
    """A random layer, an action of ``[a, b] = c·b`` by ``a ↦ c'·x∂x``, or one anchoring ``b`` instead."""
    if kind == "random":
        return random_layer(rng, module, 1, spread=1)
    c, c_prime = rng.randint(1, 3), rng.choice([-2, -1, 1, 2])
    brackets = {("a", "b"): [(c, ["b"])]}
    if kind == "action":
        anchors = {("a",): {"x": [(c_prime, ["x"])]}}
    else:
        # ρ[a, b] = c·c'∂x while [ρa, ρb] = 0
        anchors = {("b",): {"x": [(c_prime, [])]}}
    return Multiderivation(module, 1, brackets, anchors)


@pytest.mark.parametrize("seed", range(TRANSPORT_DATASETS))
def test_square_zero_transport_with_anchors(line_module, seed):
    rng = random.Random(seed)
    kind = ("random", "action", "broken")[seed % 3]
    pair = SHLRPair(line_module, [anchored_layer(rng, line_module, kind)], cutoff=3, shift=1)
    bracket_side = all(multider_square(pair, k).is_zero() for k in range(pair.cutoff + 1))
    ce_side = square_zero_check(ce_from_pair(pair, validate=False)).passed
    assert bracket_side == ce_side
    if kind == "action":
        assert ce_side
        ce_from_pair(pair)
    elif kind == "broken":
        assert not bracket_side
        with pytest.raises(InvalidComplexError):
            ce_from_pair(pair)
    elif not ce_side:
        with pytest.raises(InvalidComplexError):
            ce_from_pair(pair)


@pytest.mark.parametrize("seed", range(COMPOSABLE_PAIRS))
def test_two_out_of_three_for_scalings(seed):
    rng = random.Random(seed)
    line = SemiFreeDgca([("x", 0)], name="A")
    f = DgcaMorphism(line, line, {"x": f"{rng.randint(0, 2)}*x"})
    g = DgcaMorphism(line, line, {"x": f"{rng.randint(0, 2)}*x"})
    verdicts = [is_weak_equivalence(h).verdict for h in (f, g, compose_maps(g, f))]
    assert verdicts != [True, True, False]
    assert verdicts[2] is (verdicts[0] is True and verdicts[1] is True)


def abelian_over_line():
    return FatCdga(SemiFreeDgca([("x", 0)], name="A"), [("t1", 1), ("t2", 1)], {}, max_weight=2, name="ab")


def random_triangular(rng, X):
    """``x ↦ s·x``, ``t1 ↦ a·t1 + b·t2``, ``t2 ↦ c·t2 + e·x·t1·t2``; a weak equivalence iff ``s·a·c ≠ 0``."""
    s, a, b, c, e = (rng.randint(0, 2) for _ in range(5))
    images = {"x": f"{s}*x", "t1": f"{a}*t1 + {b}*t2", "t2": f"{c}*t2 + {e}*x*t1*t2"}
    return FatMorphism(X, X, images), s * a * c != 0


@pytest.mark.parametrize("seed", range(COMPOSABLE_PAIRS))
def test_two_out_of_three_for_fat_morphisms(seed):
    rng = random.Random(seed)
    X = abelian_over_line()
    (f, f_invertible), (g, g_invertible) = random_triangular(rng, X), random_triangular(rng, X)
    h = compose_fat_morphisms(g, f)
    assert check_fat_morphism(h).passed
    verdicts = [is_weak_equivalence(m) for m in (f, g, h)]
    assert [v.verdict for v in verdicts] != [True, True, False]
    assert [part.part for part in verdicts[2].parts] == ["base", "linear"]
    assert verdicts[0].verdict is f_invertible
    assert verdicts[1].verdict is g_invertible
    assert verdicts[2].verdict is (f_invertible and g_invertible)


def lie2():
    return FatCdga(SemiFreeDgca.ground(), [("t1", 1), ("t2", 1)], {"t2": "t1*t2"}, max_weight=2, name="lie2")


def anchored_lie2():
    line = SemiFreeDgca([("x", 0)], name="A")
    return FatCdga(line, [("t1", 1), ("t2", 1)], {"x": "x*t1", "t2": "t1*t2"}, max_weight=2, name="anchored")


def with_contractible_pair(X):
    """``X`` with one attached cell pair ``d u = v``."""
    differential = {n: X.differential(n) for n in X.algebra.names if not X.differential(n).is_zero()}
    differential["u"] = "v"
    generators = [(t.name, t.degree) for t in X.dual_generators] + [("u", 0), ("v", 1)]
    return FatCdga(X.base, generators, differential, X.max_weight, name="Z")


def pushout_span(rng, family):
    """A morphism ``f`` out of ``X`` together with ``X``."""
    if family == "abelian":
        X = abelian_over_line()
        f, _ = random_triangular(rng, X)
        return X, f
    if family == "anchored":
        X = anchored_lie2()
        # d(x·t1·t2) = 0, so the weight-2 term keeps this a chain map
        images = {"t2": f"{rng.randint(0, 3)}*t2 + {rng.randint(0, 2)}*x*t1*t2"}
        return X, FatMorphism(X, X, images, name="f")
    X = lie2()
    if family == "scaling":
        return X, FatMorphism(X, X, {"t2": f"{rng.randint(0, 3)}*t2"}, name="f")
    _, in_1, in_2 = coproduct(X, X)
    return X, (in_1 if family == "in_1" else in_2)


@pytest.mark.parametrize("seed", range(PUSHOUTS))
def test_pushout_of_an_acyclic_cofibration(seed):
    rng = random.Random(seed)
    family = ("scaling", "in_1", "in_2", "abelian", "anchored")[seed % 5]
    X, f = pushout_span(rng, family)
    Z = with_contractible_pair(X)
    g = FatMorphism(X, Z, name="g")
    assert is_weak_equivalence(g).verdict is True
    assert check_fat_morphism(f).passed
    P, gamma, phi = pushout_along_cofibration(f, g)
    assert square_zero_check(P).passed
    assert check_fat_morphism(phi).passed
    assert same_morphism(compose_fat_morphisms(gamma, f), compose_fat_morphisms(phi, g))
    assert is_weak_equivalence(gamma).verdict is True


def random_surjection(rng):
    """``p: k[y, w] -> k[y]`` with ``w ↦ c·y`` and a module of rank 2 or 3 over ``k[y]``."""
    B = SemiFreeDgca([("y", 0)], name="B")
    A = SemiFreeDgca([("y", 0), ("w", 0)], name="A")
    p = DgcaMorphism(A, B, {"w": f"{rng.randint(0, 2)}*y"})
    generators = [("n1", 0), ("n2", -1)]
    differential = {"n2": f"{rng.randint(1, 2)}*y*n1" if rng.random() < 0.5 else f"{rng.randint(1, 2)}*n1"}
    if rng.random() < 0.5:
        generators.append(("n3", -1))
        differential["n3"] = f"{rng.randint(0, 2)}*y*n1"
    return p, CellModule(B, generators, differential, name="N")


@pytest.mark.parametrize("seed", range(DER_HOM_INSTANCES))
def test_der_hom_on_random_surjections(seed):
    rng = random.Random(seed)
    p, N = random_surjection(rng)
    witness = der_hom_transport(p, N)
    assert all(witness.bijective.values())
    assert witness.dims_left == witness.dims_right
    for n in witness.certified:
        assert witness.cohomology_left[n] == witness.cohomology_right[n]
    assert witness.passed
    q = DgcaMorphism(p.target, p.target, {"y": f"{rng.randint(1, 3)}*y"})
    assert der_hom_naturality(p, q, N).passed
