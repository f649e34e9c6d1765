"""Fat cdgas: weight-truncated formal symmetric algebras over a base dgca.

A ``FatCdga`` is ``A[θ₁, …, θ_r]`` cut off above weight ``W``, where ``A`` is a
semi-free base and the ``θ`` are dual generators of weight 1. Its
differential splits into components ``d⁰, d¹, …`` where ``dⁿ`` raises weight
by exactly ``n``.
"""

import logging
from dataclasses import dataclass
from typing import Dict, List, Mapping, Optional

from shlrkit.algebra import AlgebraMap, DerivationOverMorphism, Element, Generator, GradedAlgebra, compose_maps
from shlrkit.dgca import (
    DualCellModule,
    Expression,
    GeneratorSpec,
    SemiFreeDgca,
    base_change,
    check_dgca_map,
    normal_form,
)
from shlrkit.errors import ArgumentError, InvalidComplexError

logger = logging.getLogger(__name__)


class FatCdga:
    """Weight-truncated formal symmetric algebra with a differential.

    Args:
        base: The base dgca ``A``.
        generators: Dual generators as ``(name, degree)``.
        differential: Values of ``d`` on dual generators and, optionally, on
            base generators. A base generator's value must restrict to the
            base differential in weight 0; its higher-weight parts are the
            anchor components.
        max_weight: The cutoff ``W``.
        shift: Offset between module degrees and the degrees of the bracket
            algebra they came from; carried for reports only.
        name: Label used in reports.

    Raises:
        InvalidComplexError: If a value has a weight-0 part on a dual
            generator or disagrees with the base differential.
    """

    def __init__(
        self,
        base: SemiFreeDgca,
        generators: GeneratorSpec,
        differential: Optional[Mapping[str, Expression]] = None,
        max_weight: int = 0,
        shift: int = 0,
        name: str = "",
    ):
        if max_weight < 0:
            raise ArgumentError(f"weight cutoff must be nonnegative, got {max_weight}")
        self.base = base
        self.max_weight = max_weight
        self.shift = shift
        self.name = name
        self.dual_generators = tuple(Generator(n, d, 1) for n, d in generators)
        for g in self.dual_generators:
            if g.name in base.algebra.index:
                raise ArgumentError(f"dual generator {g.name!r} clashes with a base generator")
        self.algebra = GradedAlgebra(base.generators + self.dual_generators, max_weight)
        values = {x: self.algebra.transport(base.differential(x)) for x in base.names}
        for gen_name, expression in (differential or {}).items():
            value = normal_form(self.algebra, expression)
            if gen_name in base.algebra.index:
                if value.weight_part(0) != values[gen_name]:
                    raise InvalidComplexError(
                        f"weight-0 part of d({gen_name}) must equal the base differential"
                    )
            elif gen_name in self.dual_names:
                if not value.weight_part(0).is_zero():
                    raise InvalidComplexError(f"d({gen_name}) has a weight-0 part")
            else:
                raise ArgumentError(f"{gen_name!r} is not a generator")
            values[gen_name] = value
        self.d = DerivationOverMorphism(self.algebra, self.algebra, 1, values)
        self._components: Dict[int, DerivationOverMorphism] = {}

    @property
    def dual_names(self) -> List[str]:
        return [g.name for g in self.dual_generators]

    @property
    def base_names(self) -> List[str]:
        return self.base.names

    def differential(self, name: str) -> Element:
        return self.d.value(name)

    def component(self, n: int) -> DerivationOverMorphism:
        """The weight-raising-by-``n`` component ``dⁿ``."""
        if n not in self._components:
            values = {
                g.name: self.d.value(g.name).weight_part(g.weight + n) for g in self.algebra.generators
            }
            self._components[n] = DerivationOverMorphism(self.algebra, self.algebra, 1, values)
        return self._components[n]

    def projection(self) -> AlgebraMap:
        """The map to the base killing every dual generator."""
        return AlgebraMap.by_name(self.algebra, self.base.algebra)

    def renamed(self, suffix: str) -> "FatCdga":
        rename = {g.name: f"{g.name}{suffix}" for g in self.algebra.generators}
        return self.relabeled(rename, name=f"{self.name}{suffix}")

    def relabeled(self, rename: Mapping[str, str], name: Optional[str] = None) -> "FatCdga":
        """Copy with generators renamed by ``rename``; unmapped names are kept."""
        new = {g.name: rename.get(g.name, g.name) for g in self.algebra.generators}
        base = self.base.renamed(new)
        target = GradedAlgebra(
            base.generators + tuple(Generator(new[g.name], g.degree, 1) for g in self.dual_generators),
            self.max_weight,
        )
        relabel = AlgebraMap(self.algebra, target, {n: target.gen(new[n]) for n in self.algebra.names})
        values = {new[n]: relabel(self.differential(n)) for n in self.algebra.names}
        return FatCdga(
            base,
            [(new[g.name], g.degree) for g in self.dual_generators],
            values,
            self.max_weight,
            self.shift,
            name=self.name if name is None else name,
        )

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, FatCdga)
            and self.algebra == other.algebra
            and all(self.differential(n) == other.differential(n) for n in self.algebra.names)
        )

    __hash__ = None


@dataclass
class SquareZeroReport:
    passed: bool
    through_weight: int
    weight: Optional[int] = None
    degree: Optional[int] = None
    generator: Optional[str] = None
    witness: Optional[str] = None


def square_zero_check(X: FatCdga, through: Optional[int] = None) -> SquareZeroReport:
    """Check ``Σ_{i+j=k} dⁱ dʲ = 0`` on every generator for ``k`` up to ``through``.

    The weight-``k`` equation on a dual generator lives in weight ``k + 1``
    and is only visible for ``k < W``.
    """
    through = X.max_weight if through is None else min(through, X.max_weight)
    squares = {g.name: X.d(X.d.value(g.name)) for g in X.algebra.generators}
    for k in range(through + 1):
        for g in X.algebra.generators:
            if g.weight + k > X.max_weight:
                continue
            defect = squares[g.name].weight_part(g.weight + k)
            if not defect.is_zero():
                logger.debug(f"d^2 fails on {g.name} at weight {k}: {defect}")
                return SquareZeroReport(False, through, k, g.degree + 2, g.name, str(defect))
    return SquareZeroReport(True, through)


class FatMorphism:
    """Morphism of fat cdgas given by images of all source generators.

    Args:
        source: Domain.
        target: Codomain.
        images: ``generator -> image``. Base generators without an image
            follow ``base_map``; other missing generators go to the
            same-named target generator, or to zero.
        base_map: The map ``f₀`` of bases; derived from the weight-0 parts of
            the base images when omitted.
        name: Label used in reports.
    """

    def __init__(
        self,
        source: FatCdga,
        target: FatCdga,
        images: Optional[Mapping[str, Expression]] = None,
        base_map: Optional[AlgebraMap] = None,
        name: str = "",
    ):
        if source.max_weight != target.max_weight:
            raise ArgumentError(
                f"weight cutoffs differ: {source.max_weight} and {target.max_weight}"
            )
        self.source = source
        self.target = target
        self.name = name
        images = dict(images or {})
        resolved = {}
        for g in source.algebra.generators:
            if g.name in images:
                resolved[g.name] = normal_form(target.algebra, images[g.name])
            elif base_map is not None and g.weight == 0:
                resolved[g.name] = target.algebra.transport(base_map.image(g.name))
            elif g.name in target.algebra.index:
                resolved[g.name] = target.algebra.gen(g.name)
            else:
                resolved[g.name] = target.algebra.zero()
        self.map = AlgebraMap(source.algebra, target.algebra, resolved)
        if base_map is None:
            down = target.projection()
            base_map = AlgebraMap(
                source.base.algebra,
                target.base.algebra,
                {x: down(resolved[x]) for x in source.base_names},
            )
        self.base_map = base_map

    def image(self, name: str) -> Element:
        return self.map.image(name)

    def __call__(self, element: Element) -> Element:
        return self.map(element)

    def component(self, n: int) -> Dict[str, Element]:
        """Weight-raising-by-``n`` parts of the generator images."""
        return {
            g.name: self.image(g.name).weight_part(g.weight + n) for g in self.source.algebra.generators
        }


@dataclass
class MorphismReport:
    passed: bool
    through_weight: int
    reason: Optional[str] = None
    generator: Optional[str] = None
    witness: Optional[str] = None


def check_fat_morphism(g: FatMorphism) -> MorphismReport:
    """Check projection compatibility and ``d ∘ g = g ∘ d`` through the cutoff."""
    W = g.source.max_weight
    for theta in g.source.dual_names:
        low = g.image(theta).weight_part(0)
        if not low.is_zero():
            return MorphismReport(False, W, "dual generator has a weight-0 image", theta, str(low))
    for x in g.source.base_names:
        low = g.image(x).weight_part(0)
        expected = g.target.algebra.transport(g.base_map.image(x))
        if low != expected:
            return MorphismReport(False, W, "projection does not commute", x, str(low - expected))
    base = check_dgca_map(g.base_map, g.source.base, g.target.base)
    if not base.passed:
        return MorphismReport(False, W, "base map does not intertwine", base.generator, base.witness)
    for gen in g.source.algebra.generators:
        defect = g.target.d(g.image(gen.name)) - g(g.source.differential(gen.name))
        if not defect.is_zero():
            return MorphismReport(False, W, "differentials do not intertwine", gen.name, str(defect))
    return MorphismReport(True, W)


def compose_fat_morphisms(g: FatMorphism, h: FatMorphism) -> FatMorphism:
    """The composite ``g ∘ h``."""
    if h.target.algebra != g.source.algebra:
        raise ArgumentError("morphisms are not composable: bases or generators differ")
    images = {name: g(image) for name, image in h.map.images.items()}
    return FatMorphism(h.source, g.target, images, compose_maps(g.base_map, h.base_map))


def identity_morphism(X: FatCdga) -> FatMorphism:
    return FatMorphism(X, X, {}, name=f"id_{X.name}" if X.name else "id")


def initial_object(max_weight: int = 0) -> FatCdga:
    """The pair ``(k, k)``: no base and no dual generators."""
    return FatCdga(SemiFreeDgca.ground(), [], {}, max_weight, name="k")


def linear_part_of_differential(X: FatCdga) -> DualCellModule:
    """The weight-0 component on dual generators as a dual cell module over the base.

    Raises:
        InvalidComplexError: If the linear part breaks the rising condition
            or does not square to zero.
    """
    values = {theta: X.differential(theta).weight_part(1) for theta in X.dual_names}
    return DualCellModule(X.base, [(g.name, g.degree) for g in X.dual_generators], values, name=X.name)


@dataclass
class LinearPart:
    """Map of dual cell modules over the target base induced by a morphism."""

    source: DualCellModule
    target: DualCellModule
    images: Dict[str, Element]

    def as_map(self) -> AlgebraMap:
        return AlgebraMap.by_name(self.source.algebra, self.target.algebra, self.images)

    def commutes(self) -> bool:
        phi = self.as_map()
        return all(
            self.target.d(phi(self.source.algebra.gen(n))) == phi(self.source.differential(n))
            for n in self.source.names
        )

    def is_identity(self) -> bool:
        return self.source == self.target and all(
            self.images[n] == self.target.algebra.gen(n) for n in self.source.names
        )


def linear_part_of_morphism(g: FatMorphism) -> LinearPart:
    """Weight-1 parts of the dual-generator images, after base change along ``f₀``."""
    source = base_change(g.base_map, linear_part_of_differential(g.source), g.target.base)
    target = linear_part_of_differential(g.target)
    images = {theta: target.algebra.transport(g.image(theta).weight_part(1)) for theta in g.source.dual_names}
    return LinearPart(source, target, images)
