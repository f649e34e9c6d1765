"""Semi-free dg commutative algebras, cell modules and their duals."""

import logging
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Sequence, Set, Tuple, Union

from shlrkit import config
from shlrkit.algebra import (
    AlgebraMap,
    DerivationOverMorphism,
    Element,
    Generator,
    GradedAlgebra,
    Monomial,
    compose_maps as compose_algebra_maps,
    solve_combination,
)
from shlrkit.errors import ArgumentError, InvalidComplexError, WindowTooSmallError
from shlrkit.linalg import DegreeWindow, FiniteComplex, RationalMatrix, free_kernel_basis

logger = logging.getLogger(__name__)

Expression = Union[Element, str, int, Fraction, Sequence]
GeneratorSpec = Sequence[Tuple[str, int]]


def normal_form(algebra: GradedAlgebra, expression: Expression) -> Element:
    """Normal form of an expression in ``algebra``.

    ``expression`` may be an ``Element``, a scalar, expression text such as
    ``"2*x*y - 1/2*z^2"``, or a list of ``(coefficient, [(name, exponent), ...])``
    terms whose factors are multiplied in the order given.
    """
    if isinstance(expression, Element):
        return algebra.transport(expression)
    if isinstance(expression, (int, Fraction)):
        return algebra.scalar(expression)
    if isinstance(expression, str):
        from shlrkit.dsl.parser import parse_expression

        expression = parse_expression(expression)
    result = algebra.zero()
    for coefficient, factors in expression:
        term = algebra.scalar(coefficient)
        for factor in factors:
            name, exponent = factor if isinstance(factor, tuple) else (factor, 1)
            term = term * algebra.gen(name) ** exponent
        result = result + term
    return result


def _check_order(algebra: GradedAlgebra, values: Mapping[str, Element], names: Sequence[str], rising: bool):
    position = {name: k for k, name in enumerate(names)}
    for name, value in values.items():
        if name not in position:
            continue
        for i in value.mentions():
            other = algebra.generators[i].name
            if other not in position:
                continue
            if (rising and position[other] <= position[name]) or (
                not rising and position[other] >= position[name]
            ):
                order = "later" if rising else "earlier"
                raise InvalidComplexError(
                    f"differential of {name!r} mentions {other!r}; only {order} generators are allowed"
                )


def _check_square_zero(d: DerivationOverMorphism, names: Sequence[str]) -> None:
    for name in names:
        square = d(d.value(name))
        if not square.is_zero():
            raise InvalidComplexError(f"d^2({name}) = {square} is not zero")


class SemiFreeDgca:
    """Semi-free dgca ``(S(V), d)`` on generators of non-positive degree.

    Args:
        generators: ``(name, degree)`` pairs in order.
        differential: ``name -> d(name)``; missing generators are closed.
        name: Label used in reports.

    Raises:
        ArgumentError: If a generator has positive degree.
        InvalidComplexError: If ``d`` is not triangular or ``d^2 != 0``.
    """

    def __init__(
        self,
        generators: GeneratorSpec = (),
        differential: Optional[Mapping[str, Expression]] = None,
        name: str = "",
    ):
        self.name = name
        gens = []
        for gen_name, degree in generators:
            if degree > 0:
                raise ArgumentError(f"generator {gen_name!r} has positive degree {degree}")
            gens.append(Generator(gen_name, degree, 0))
        self.algebra = GradedAlgebra(gens)
        values = {}
        for gen_name, expression in (differential or {}).items():
            self.algebra.generator(gen_name)
            values[gen_name] = normal_form(self.algebra, expression)
        _check_order(self.algebra, values, self.names, rising=False)
        self.d = DerivationOverMorphism(self.algebra, self.algebra, 1, values)
        _check_square_zero(self.d, self.names)

    @classmethod
    def ground(cls) -> "SemiFreeDgca":
        """The ground field with no generators."""
        return cls((), {}, name="k")

    @property
    def names(self) -> List[str]:
        return self.algebra.names

    @property
    def generators(self) -> Tuple[Generator, ...]:
        return self.algebra.generators

    def differential(self, name: str) -> Element:
        return self.d.value(name)

    def renamed(self, rename: Mapping[str, str]) -> "SemiFreeDgca":
        target = GradedAlgebra([Generator(rename.get(g.name, g.name), g.degree, 0) for g in self.generators])
        relabel = AlgebraMap(
            self.algebra, target, {g.name: target.gen(rename.get(g.name, g.name)) for g in self.generators}
        )
        return SemiFreeDgca(
            [(rename.get(g.name, g.name), g.degree) for g in self.generators],
            {rename.get(n, n): relabel(self.differential(n)) for n in self.names},
            name=self.name,
        )

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, SemiFreeDgca)
            and self.algebra == other.algebra
            and all(self.differential(n) == other.differential(n) for n in self.names)
        )

    __hash__ = None


class _FreeModule:
    """Free graded module over a semi-free dgca, stored inside ``A[m]`` cut at weight 1."""

    rising = False

    def __init__(
        self,
        base: SemiFreeDgca,
        generators: GeneratorSpec,
        differential: Optional[Mapping[str, Expression]] = None,
        name: str = "",
    ):
        self.base = base
        self.name = name
        self.module_generators = tuple(Generator(n, d, 1) for n, d in generators)
        for g in self.module_generators:
            if g.name in base.algebra.index:
                raise ArgumentError(f"module generator {g.name!r} clashes with a base generator")
        self.algebra = GradedAlgebra(base.generators + self.module_generators, max_weight=1)
        values = {x: self.algebra.transport(base.differential(x)) for x in base.names}
        for gen_name, expression in (differential or {}).items():
            if gen_name not in self.names:
                raise ArgumentError(f"{gen_name!r} is not a module generator")
            value = normal_form(self.algebra, expression)
            if any(w != 1 for w in value.weights()):
                raise ArgumentError(f"differential of {gen_name!r} must be linear in module generators")
            values[gen_name] = value
        _check_order(self.algebra, values, self.names, rising=self.rising)
        self.d = DerivationOverMorphism(self.algebra, self.algebra, 1, values)
        _check_square_zero(self.d, self.names)

    @property
    def names(self) -> List[str]:
        return [g.name for g in self.module_generators]

    def degree(self, name: str) -> int:
        return self.algebra.generator(name).degree

    def differential(self, name: str) -> Element:
        return self.d.value(name)

    def coefficients(self, element: Element) -> Dict[str, Element]:
        """Split a module element into ``generator -> base coefficient``."""
        nb = len(self.base.generators)
        split: Dict[str, Dict[Monomial, Fraction]] = {}
        for m, c in element.terms.items():
            if self.algebra.monomial_weight(m) != 1:
                raise ArgumentError(f"{element} is not a module element")
            j = next(i for i in range(nb, len(m)) if m[i])
            split.setdefault(self.algebra.generators[j].name, {})[m[:nb]] = c
        return {name: self.base.algebra.element(terms) for name, terms in split.items()}

    def combine(self, coefficients: Mapping[str, Element]) -> Element:
        out = self.algebra.zero()
        for name, coefficient in coefficients.items():
            out = out + self.algebra.transport(coefficient) * self.algebra.gen(name)
        return out

    def __eq__(self, other) -> bool:
        return (
            type(self) is type(other)
            and self.algebra == other.algebra
            and all(self.differential(n) == other.differential(n) for n in self.names)
        )

    __hash__ = None


class CellModule(_FreeModule):
    """Cell module: ``d`` of each generator involves only earlier generators."""


class DualCellModule(_FreeModule):
    """Dual cell module: ``d`` of each generator involves only later generators."""

    rising = True


def _flip(degree_t: int, degree_e: int, degree_r: int) -> int:
    sign = -1 if (degree_t * degree_e) % 2 else 1
    return -sign if degree_r % 2 == 0 else sign


def dualize_cell(module: CellModule) -> DualCellModule:
    """Dual of a cell module with dual generators named like the primal ones.

    The dual generator of ``e`` has degree ``-|e|``. If ``d e_i = Σ_r a_ir e_r``
    then ``ι_{e_i}(d θ_r) = -(-1)^{|e_r|} a_ir``.
    """
    gens = [(g.name, -g.degree) for g in module.module_generators]
    dual = GradedAlgebra(module.base.generators + tuple(Generator(n, d, 1) for n, d in gens), max_weight=1)
    values = {name: dual.zero() for name, _ in gens}
    for e_i in module.module_generators:
        for r_name, a in module.coefficients(module.differential(e_i.name)).items():
            e_r = module.degree(r_name)
            for t, c in a.terms.items():
                sign = _flip(module.base.algebra.monomial_degree(t), e_i.degree, e_r)
                term = dual.transport(module.base.algebra.monomial(t, c * sign)) * dual.gen(e_i.name)
                values[r_name] = values[r_name] + term
    return DualCellModule(module.base, gens, values, name=module.name)


def primal_of(dual: DualCellModule) -> CellModule:
    """Inverse of :func:`dualize_cell`."""
    gens = [(g.name, -g.degree) for g in dual.module_generators]
    primal = GradedAlgebra(dual.base.generators + tuple(Generator(n, d, 1) for n, d in gens), max_weight=1)
    values = {name: primal.zero() for name, _ in gens}
    for theta_r in dual.module_generators:
        e_r = -theta_r.degree
        for i_name, q in dual.coefficients(dual.differential(theta_r.name)).items():
            e_i = -dual.degree(i_name)
            for t, c in q.terms.items():
                sign = _flip(dual.base.algebra.monomial_degree(t), e_i, e_r)
                term = primal.transport(dual.base.algebra.monomial(t, c * sign)) * primal.gen(theta_r.name)
                values[i_name] = values[i_name] + term
    return CellModule(dual.base, gens, values, name=dual.name)


def extend_map(f: AlgebraMap, source: GradedAlgebra, target: GradedAlgebra, extra=None) -> AlgebraMap:
    """Extend ``f`` to larger algebras, sending other generators by name unless given in ``extra``."""
    overrides = {name: image for name, image in f.images.items()}
    overrides.update(extra or {})
    return AlgebraMap.by_name(source, target, overrides)


def base_change(
    f: Union["DgcaMorphism", AlgebraMap],
    module: _FreeModule,
    target_base: Optional[SemiFreeDgca] = None,
) -> _FreeModule:
    """Push the coefficients of ``module`` forward along ``f``."""
    if isinstance(f, DgcaMorphism):
        target_base = target_base or f.target
        f = f.map
    if target_base is None:
        raise ArgumentError("a target base is required for a bare algebra map")
    if f.target.generators != target_base.algebra.generators:
        raise ArgumentError("base map does not land in the target base")
    gens = [(g.name, g.degree) for g in module.module_generators]
    target_algebra = GradedAlgebra(
        target_base.generators + tuple(Generator(n, d, 1) for n, d in gens), max_weight=1
    )
    F = extend_map(f, module.algebra, target_algebra)
    values = {name: F(module.differential(name)) for name in module.names}
    return type(module)(target_base, gens, values, name=module.name)


class DgcaMorphism:
    """A map of semi-free dgcas given by generator images.

    Args:
        source: Domain dgca.
        target: Codomain dgca.
        images: ``generator -> image``; missing generators go to the
            same-named target generator, or to zero.
        name: Label used in reports.
    """

    def __init__(
        self,
        source: SemiFreeDgca,
        target: SemiFreeDgca,
        images: Optional[Mapping[str, Expression]] = None,
        name: str = "",
    ):
        self.source = source
        self.target = target
        self.name = name
        resolved = {n: normal_form(target.algebra, e) for n, e in (images or {}).items()}
        for n in resolved:
            source.algebra.generator(n)
        self.map = AlgebraMap.by_name(source.algebra, target.algebra, resolved)

    def image(self, name: str) -> Element:
        return self.map.image(name)

    def __call__(self, element: Element) -> Element:
        return self.map(element)

    def check(self) -> "MapCheck":
        return check_dgca_map(self)


def identity_map(dgca: SemiFreeDgca) -> DgcaMorphism:
    return DgcaMorphism(dgca, dgca, {}, name="id")


def compose_maps(g: DgcaMorphism, f: DgcaMorphism) -> DgcaMorphism:
    """The composite ``g ∘ f`` of dgca morphisms."""
    if f.target != g.source:
        raise ArgumentError("maps are not composable")
    composite = compose_algebra_maps(g.map, f.map)
    return DgcaMorphism(f.source, g.target, composite.images)


@dataclass
class MapCheck:
    passed: bool
    generator: Optional[str] = None
    witness: Optional[str] = None


def check_dgca_map(
    f: Union[DgcaMorphism, AlgebraMap],
    source: Optional[SemiFreeDgca] = None,
    target: Optional[SemiFreeDgca] = None,
) -> MapCheck:
    """Check ``f ∘ d = d ∘ f`` on every generator of ``source``.

    A bare ``AlgebraMap`` needs its source and target dgcas spelled out.
    """
    if isinstance(f, DgcaMorphism):
        f, source, target = f.map, f.source, f.target
    if source is None or target is None:
        raise ArgumentError("source and target dgcas are required for a bare algebra map")
    for name in source.names:
        defect = f(source.differential(name)) - target.d(f.image(name))
        if not defect.is_zero():
            return MapCheck(False, name, str(defect))
    return MapCheck(True)


@dataclass
class LeibnizReport:
    passed: bool
    trials: int
    witness: Optional[str] = None


def _sample_pool(algebra: GradedAlgebra, length: int = 2) -> List[Monomial]:
    top = algebra.max_weight if algebra.max_weight is not None else 2
    if all(g.weight == 0 for g in algebra.generators):
        top = 0
    pool = []
    for w in range(top + 1):
        pool.extend(algebra.monomials(weight=w, max_length=length))
    return [m for m in pool if any(m)]


def check_leibniz(
    D: DerivationOverMorphism,
    trials: int = config.DEFAULT_LEIBNIZ_TRIALS,
    rng: Optional[random.Random] = None,
) -> LeibnizReport:
    """Verify the twisted Leibniz rule on tabulated products and random monomial pairs."""
    rng = rng or random.Random(config.DEFAULT_SEED)
    source = D.source
    push = D.along or AlgebraMap.identity(source)
    sign_of = lambda u: -1 if (D.degree * source.monomial_degree(u)) % 2 else 1

    def defect(u: Monomial, v: Monomial) -> Element:
        product = source.monomial(u) * source.monomial(v)
        expected = D(source.monomial(u)) * push.apply_monomial(v) + push.apply_monomial(u) * D(
            source.monomial(v)
        ) * sign_of(u)
        return D(product) - expected

    pairs: List[Tuple[Monomial, Monomial]] = []
    for m in D.tabulated:
        first = next(i for i, e in enumerate(m) if e)
        head = tuple(1 if i == first else 0 for i in range(len(m)))
        pairs.append((head, tuple(e - h for e, h in zip(m, head))))
    pool = _sample_pool(source)
    if pool:
        pairs.extend((rng.choice(pool), rng.choice(pool)) for _ in range(trials))
    for u, v in pairs:
        if source.multiply_monomials(u, v) is None:
            continue
        bad = defect(u, v)
        if not bad.is_zero():
            witness = f"D({source.format_monomial(u)} * {source.format_monomial(v)}) off by {bad}"
            return LeibnizReport(False, len(pairs), witness)
    return LeibnizReport(True, len(pairs))


def lift_differential(
    p: DgcaMorphism,
    module: CellModule,
    max_length: int = config.DEFAULT_BASE_LENGTH,
    max_unknowns: int = config.DEFAULT_MAX_SOLVE_DIM,
) -> CellModule:
    """Lift the differential of a cell module along a surjection ``p: A -> B``.

    The lifted module has the same generators over ``A`` and is pushed back
    onto ``module`` by ``p``. Generators are solved in order, each as an exact
    linear system in the coefficients of the earlier generators.

    Raises:
        WindowTooSmallError: If no lift exists within the base length bound.
    """
    source = p.source
    if p.target.algebra.generators != module.base.algebra.generators:
        raise ArgumentError("the module does not live over the target of the map")
    gens = [(g.name, g.degree) for g in module.module_generators]
    lifted = GradedAlgebra(source.generators + tuple(Generator(n, d, 1) for n, d in gens), max_weight=1)
    P = extend_map(p.map, lifted, module.algebra)
    values = {x: lifted.transport(source.differential(x)) for x in source.names}
    for i, (name, degree) in enumerate(gens):
        d_partial = DerivationOverMorphism(lifted, lifted, 1, values)
        contributions = []
        candidates = []
        for earlier, earlier_degree in gens[:i]:
            for t in source.algebra.monomials(degree=degree + 1 - earlier_degree, max_length=max_length):
                candidate = lifted.transport(source.algebra.monomial(t)) * lifted.gen(earlier)
                candidates.append(candidate)
                contributions.append([P(candidate), d_partial(candidate)])
        targets = [module.differential(name), lifted.zero()]
        solution = solve_combination(contributions, targets, max_unknowns)
        if solution is None:
            raise WindowTooSmallError(f"no lift for the differential of {name!r}", degree=degree + 1)
        value = lifted.zero()
        for u, candidate in zip(solution, candidates):
            if u:
                value = value + candidate * u
        values[name] = value
        logger.debug(f"lifted d({name}) = {value}")
    return CellModule(source, gens, {name: values[name] for name, _ in gens}, name=module.name)


@dataclass
class TruncatedComplex(FiniteComplex):
    """A :class:`FiniteComplex` whose basis vectors are chains of an algebra.

    ``chains[n][k]`` is the element behind the label ``bases[n][k]``, a
    monomial. Each chain has coefficient 1 at its own label and 0 at every
    other label of its degree.
    """

    chains: Dict[int, List[Element]] = field(default_factory=dict)

    def coordinates(self, degree: int, element: Element) -> Dict[int, Fraction]:
        index = {m: k for k, m in enumerate(self.bases.get(degree, []))}
        out = {}
        for m, c in element.terms.items():
            k = index.get(m)
            if k is not None:
                out[k] = c
        return out

    def rebuild(self, degree: int, coordinates: Mapping[int, Fraction], algebra: GradedAlgebra) -> Element:
        out = algebra.zero()
        chains = self.chains.get(degree, [])
        for k, c in coordinates.items():
            out = out + chains[k] * c
        return out


def truncated_complex(
    algebra: GradedAlgebra,
    differential,
    window: DegreeWindow,
    max_length: int,
    weights: Optional[Sequence[int]] = None,
) -> TruncatedComplex:
    """Subcomplex of chains of bounded base length whose differential stays bounded.

    In each degree the chains are the combinations of kept monomials (base
    length at most ``N`` and weight in ``weights``) whose differential again
    has only kept terms. This is closed under ``d``, so the cohomology is that
    of an honest subcomplex.

    Args:
        algebra: Ambient algebra.
        differential: Callable acting on elements of ``algebra``.
        window: Degrees to represent.
        max_length: Base length bound ``N``.
        weights: Weights to include; defaults to every weight up to the cutoff.
    """
    if weights is None:
        top = algebra.max_weight if algebra.max_weight is not None else 0
        weights = range(top + 1)
    allowed = set(weights)

    def kept(m: Monomial) -> bool:
        return algebra.monomial_length(m) <= max_length and algebra.monomial_weight(m) in allowed

    everything = []
    for w in sorted(allowed):
        everything.extend(algebra.monomials(weight=w, max_length=max_length))
    by_degree: Dict[int, List[Monomial]] = {}
    for m in everything:
        by_degree.setdefault(algebra.monomial_degree(m), []).append(m)
    support = (min(by_degree), max(by_degree)) if by_degree else None

    bases: Dict[int, List[Monomial]] = {}
    chains: Dict[int, List[Element]] = {}
    images: Dict[int, List[Element]] = {}
    for n in window.degrees():
        monomials = by_degree.get(n, [])
        values = [differential(algebra.monomial(m)) for m in monomials]
        overflow: Dict[Monomial, int] = {}
        entries = {}
        for col, value in enumerate(values):
            for m, c in value.terms.items():
                if kept(m):
                    continue
                row = overflow.setdefault(m, len(overflow))
                entries[(row, col)] = c
        bases[n], chains[n], images[n] = [], [], []
        for free, vector in free_kernel_basis(RationalMatrix(len(overflow), len(monomials), entries)):
            chain, image = algebra.zero(), algebra.zero()
            for col, c in enumerate(vector):
                if c:
                    chain = chain + algebra.monomial(monomials[col], c)
                    image = image + values[col] * c
            bases[n].append(monomials[free])
            chains[n].append(chain)
            images[n].append(image)
        if overflow:
            logger.debug(f"degree {n}: {len(bases[n])} of {len(monomials)} chains stay bounded")

    C = TruncatedComplex(window, bases, {}, support, chains=chains)
    for n in window.degrees():
        if n + 1 not in bases:
            continue
        entries = {}
        for col, image in enumerate(images[n]):
            for row, c in C.coordinates(n + 1, image).items():
                entries[(row, col)] = c
        C.differentials[n] = RationalMatrix(len(bases[n + 1]), len(bases[n]), entries)
    return C


@dataclass
class TruncatedChainMap:
    """Matrices of a map between truncated complexes.

    ``escapes`` lists the degrees where some chain is sent outside the
    target's truncation; the matrices there only see part of the image.
    """

    matrices: Dict[int, RationalMatrix]
    escapes: Set[int]


def truncated_chain_map(f, source: TruncatedComplex, target: TruncatedComplex) -> TruncatedChainMap:
    """Apply an algebra map to the chains of ``source`` and read coordinates in ``target``."""
    matrices = {}
    escapes = set()
    for n in source.window.degrees():
        entries = {}
        for col, chain in enumerate(source.chains.get(n, [])):
            image = f(chain)
            coordinates = target.coordinates(n, image)
            if target.rebuild(n, coordinates, image.algebra) != image:
                escapes.add(n)
            for row, c in coordinates.items():
                entries[(row, col)] = c
        matrices[n] = RationalMatrix(target.dim(n), source.dim(n), entries)
    if escapes:
        logger.debug(f"chain map leaves the truncation in degrees {sorted(escapes)}")
    return TruncatedChainMap(matrices, escapes)
