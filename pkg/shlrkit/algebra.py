"""Free graded-commutative algebras with weights, their maps and derivations.

Every algebra in shlrkit is a ``GradedAlgebra``: a free graded-commutative
algebra over the rationals on finitely many generators. Each generator has a
cohomological degree and a weight (0 for base generators, 1 for module or
dual generators). An optional weight cutoff kills every product of larger
weight, which is how formal power series are truncated.

Monomials are stored as exponent tuples in generator order. Odd generators
appear at most once, and the Koszul sign of sorting a product is absorbed
into the coefficient.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

from shlrkit.errors import ArgumentError, NameResolutionError
from shlrkit.linalg import RationalMatrix, solve

logger = logging.getLogger(__name__)

Monomial = Tuple[int, ...]
Scalar = Union[int, Fraction]


@dataclass(frozen=True)
class Generator:
    """A homogeneous free generator.

    Args:
        name: Identifier used in expressions and reports.
        degree: Cohomological degree.
        weight: 0 for base generators, 1 for module and dual generators.
    """

    name: str
    degree: int
    weight: int = 0

    @property
    def odd(self) -> bool:
        return self.degree % 2 == 1


class GradedAlgebra:
    """Free graded-commutative algebra on an ordered list of generators.

    Args:
        generators: Generators in their fixed order.
        max_weight: Products of weight above this vanish; ``None`` for no cutoff.

    Raises:
        ArgumentError: If two generators share a name.
    """

    def __init__(self, generators: Sequence[Generator], max_weight: Optional[int] = None):
        self.generators: Tuple[Generator, ...] = tuple(generators)
        self.index: Dict[str, int] = {}
        for i, g in enumerate(self.generators):
            if g.name in self.index:
                raise ArgumentError(f"duplicate generator name {g.name!r}")
            self.index[g.name] = i
        self.max_weight = max_weight
        self._odd = tuple(g.odd for g in self.generators)
        self._degrees = tuple(g.degree for g in self.generators)
        self._weights = tuple(g.weight for g in self.generators)

    def __len__(self) -> int:
        return len(self.generators)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, GradedAlgebra)
            and self.generators == other.generators
            and self.max_weight == other.max_weight
        )

    def __hash__(self) -> int:
        return hash((self.generators, self.max_weight))

    def __repr__(self) -> str:
        names = ", ".join(f"{g.name}:{g.degree}" for g in self.generators)
        return f"GradedAlgebra([{names}], max_weight={self.max_weight})"

    @property
    def names(self) -> List[str]:
        return [g.name for g in self.generators]

    def generator(self, name: str) -> Generator:
        try:
            return self.generators[self.index[name]]
        except KeyError:
            raise NameResolutionError(f"unknown generator {name!r}") from None

    def with_max_weight(self, max_weight: Optional[int]) -> "GradedAlgebra":
        return GradedAlgebra(self.generators, max_weight)

    # monomials

    @property
    def unit(self) -> Monomial:
        return (0,) * len(self.generators)

    def monomial_degree(self, m: Monomial) -> int:
        return sum(e * d for e, d in zip(m, self._degrees))

    def monomial_weight(self, m: Monomial) -> int:
        return sum(e * w for e, w in zip(m, self._weights))

    def monomial_length(self, m: Monomial) -> int:
        """Number of base (weight-0) generator factors."""
        return sum(e for e, w in zip(m, self._weights) if w == 0)

    def factors(self, m: Monomial) -> List[int]:
        """Generator indices of ``m`` with multiplicity, in order."""
        out = []
        for i, e in enumerate(m):
            out.extend([i] * e)
        return out

    def multiply_monomials(self, u: Monomial, v: Monomial) -> Optional[Tuple[int, Monomial]]:
        """Return ``(sign, w)`` with ``u·v = sign·w``, or ``None`` if the product vanishes."""
        parity = 0
        odd_u_after = 0
        for i in range(len(u) - 1, -1, -1):
            if not self._odd[i]:
                continue
            if u[i] and v[i]:
                return None
            if v[i]:
                parity += odd_u_after
            if u[i]:
                odd_u_after += 1
        w = tuple(a + b for a, b in zip(u, v))
        if self.max_weight is not None and self.monomial_weight(w) > self.max_weight:
            return None
        return (-1 if parity % 2 else 1), w

    def sort_key(self, m: Monomial):
        return (self.monomial_weight(m), sum(m), tuple(-e for e in m))

    def format_monomial(self, m: Monomial) -> str:
        parts = []
        for g, e in zip(self.generators, m):
            if e == 1:
                parts.append(g.name)
            elif e > 1:
                parts.append(f"{g.name}^{e}")
        return "*".join(parts) if parts else "1"

    def monomials(
        self,
        degree: Optional[int] = None,
        weight: Optional[int] = None,
        max_length: Optional[int] = None,
        allowed: Optional[Callable[[int], bool]] = None,
    ) -> List[Monomial]:
        """Enumerate monomials by degree, exact weight and base length.

        Args:
            degree: Keep only this degree, if given.
            weight: Exact weight; defaults to every weight up to the cutoff.
            max_length: Bound on the number of base generator factors.
            allowed: Predicate on generator indices; others get exponent 0.

        Raises:
            ArgumentError: If the enumeration would be infinite.
        """
        weight_cap = weight if weight is not None else self.max_weight
        if weight_cap is None and any(w > 0 for w in self._weights):
            raise ArgumentError("monomial enumeration needs a weight bound")
        if max_length is None and any(w == 0 for w in self._weights):
            raise ArgumentError("monomial enumeration needs a base length bound")
        n = len(self.generators)
        found: List[Monomial] = []
        exps = [0] * n

        def walk(i: int, weight_left: int, length_left: int, deg: int) -> None:
            if i == n:
                if weight is not None and weight_left != 0:
                    return
                if degree is not None and deg != degree:
                    return
                found.append(tuple(exps))
                return
            if allowed is not None and not allowed(i):
                walk(i + 1, weight_left, length_left, deg)
                return
            w = self._weights[i]
            cap = weight_left if w > 0 else length_left
            if w > 1:
                cap = weight_left // w
            if self._odd[i]:
                cap = min(cap, 1)
            for e in range(cap + 1):
                exps[i] = e
                walk(
                    i + 1,
                    weight_left - e * w,
                    length_left - (e if w == 0 else 0),
                    deg + e * self._degrees[i],
                )
            exps[i] = 0

        walk(0, weight_cap or 0, max_length or 0, 0)
        found.sort(key=self.sort_key)
        return found

    # elements

    def element(self, terms: Mapping[Monomial, Scalar]) -> "Element":
        return Element(self, terms)

    def zero(self) -> "Element":
        return Element(self, {})

    def one(self) -> "Element":
        return self.scalar(1)

    def scalar(self, value: Scalar) -> "Element":
        return Element(self, {self.unit: Fraction(value)})

    def monomial(self, m: Monomial, coefficient: Scalar = 1) -> "Element":
        return Element(self, {m: Fraction(coefficient)})

    def gen(self, name: str) -> "Element":
        i = self.index.get(name)
        if i is None:
            raise NameResolutionError(f"unknown generator {name!r}")
        m = [0] * len(self.generators)
        m[i] = 1
        return Element(self, {tuple(m): Fraction(1)})

    def product(self, names: Iterable[str], coefficient: Scalar = 1) -> "Element":
        result = self.scalar(coefficient)
        for name in names:
            result = result * self.gen(name)
        return result

    def transport(self, element: "Element") -> "Element":
        """Re-express ``element`` in this algebra, matching generators by name."""
        if element.algebra == self:
            return element
        positions = []
        for g in element.algebra.generators:
            i = self.index.get(g.name)
            if i is None:
                positions.append(None)
                continue
            if self.generators[i].degree != g.degree:
                raise ArgumentError(f"generator {g.name!r} changes degree under transport")
            positions.append(i)
        out: Dict[Monomial, Fraction] = {}
        for m, c in element.terms.items():
            new = [0] * len(self.generators)
            for j, e in enumerate(m):
                if e == 0:
                    continue
                if positions[j] is None:
                    raise NameResolutionError(
                        f"generator {element.algebra.generators[j].name!r} not present in target"
                    )
                new[positions[j]] = e
            w = tuple(new)
            if self.max_weight is not None and self.monomial_weight(w) > self.max_weight:
                continue
            # both orders list shared generators in the same relative order
            sign = 1
            if positions != sorted(p for p in positions if p is not None) or None in positions:
                sign = _reorder_sign(self, element.algebra, m, positions)
            out[w] = out.get(w, Fraction(0)) + sign * c
        return Element(self, out)


def _reorder_sign(target: GradedAlgebra, source: GradedAlgebra, m: Monomial, positions) -> int:
    odd_positions = [positions[j] for j, e in enumerate(m) if e and source.generators[j].odd]
    inversions = sum(
        1
        for a in range(len(odd_positions))
        for b in range(a + 1, len(odd_positions))
        if odd_positions[a] > odd_positions[b]
    )
    return -1 if inversions % 2 else 1


class Element:
    """A rational linear combination of normal-form monomials.

    Args:
        algebra: The ambient algebra.
        terms: ``monomial -> coefficient``; zero coefficients and monomials
            above the weight cutoff are dropped.
    """

    __slots__ = ("algebra", "terms")

    def __init__(self, algebra: GradedAlgebra, terms: Mapping[Monomial, Scalar]):
        self.algebra = algebra
        cleaned = {}
        for m, c in terms.items():
            c = Fraction(c)
            if c == 0:
                continue
            if algebra.max_weight is not None and algebra.monomial_weight(m) > algebra.max_weight:
                continue
            cleaned[m] = c
        self.terms: Dict[Monomial, Fraction] = cleaned

    def _coerce(self, other) -> "Element":
        if isinstance(other, Element):
            if other.algebra != self.algebra:
                raise ArgumentError("cannot combine elements of different algebras")
            return other
        if isinstance(other, (int, Fraction)):
            return self.algebra.scalar(other)
        return NotImplemented

    def __add__(self, other) -> "Element":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out.get(m, Fraction(0)) + c
        return Element(self.algebra, out)

    __radd__ = __add__

    def __neg__(self) -> "Element":
        return Element(self.algebra, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other) -> "Element":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other) -> "Element":
        return (-self) + other

    def __mul__(self, other) -> "Element":
        if isinstance(other, (int, Fraction)):
            factor = Fraction(other)
            return Element(self.algebra, {m: c * factor for m, c in self.terms.items()})
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out: Dict[Monomial, Fraction] = {}
        for u, a in self.terms.items():
            for v, b in other.terms.items():
                product = self.algebra.multiply_monomials(u, v)
                if product is None:
                    continue
                sign, w = product
                out[w] = out.get(w, Fraction(0)) + sign * a * b
        return Element(self.algebra, out)

    def __rmul__(self, other) -> "Element":
        if isinstance(other, (int, Fraction)):
            return self * other
        return NotImplemented

    def __pow__(self, exponent: int) -> "Element":
        result = self.algebra.one()
        for _ in range(exponent):
            result = result * self
        return result

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = self.algebra.scalar(other)
        if not isinstance(other, Element):
            return NotImplemented
        return self.algebra.generators == other.algebra.generators and self.terms == other.terms

    __hash__ = None

    def is_zero(self) -> bool:
        return not self.terms

    def coefficient(self, m: Monomial) -> Fraction:
        return self.terms.get(m, Fraction(0))

    def constant(self) -> Fraction:
        return self.coefficient(self.algebra.unit)

    def items(self) -> List[Tuple[Monomial, Fraction]]:
        return sorted(self.terms.items(), key=lambda kv: self.algebra.sort_key(kv[0]))

    def degrees(self) -> List[int]:
        return sorted({self.algebra.monomial_degree(m) for m in self.terms})

    def degree(self) -> Optional[int]:
        """Degree of a homogeneous element, ``None`` for zero."""
        degrees = self.degrees()
        if not degrees:
            return None
        if len(degrees) > 1:
            raise ArgumentError(f"element {self} is not homogeneous")
        return degrees[0]

    def weight_part(self, weight: int) -> "Element":
        return Element(
            self.algebra,
            {m: c for m, c in self.terms.items() if self.algebra.monomial_weight(m) == weight},
        )

    def weights(self) -> List[int]:
        return sorted({self.algebra.monomial_weight(m) for m in self.terms})

    def mentions(self) -> List[int]:
        """Indices of generators occurring in some monomial."""
        used = set()
        for m in self.terms:
            used.update(i for i, e in enumerate(m) if e)
        return sorted(used)

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        pieces = []
        for k, (m, c) in enumerate(self.items()):
            sign = "-" if c < 0 else "+"
            c = abs(c)
            body = self.algebra.format_monomial(m)
            if body == "1":
                body = _format_fraction(c)
            elif c != 1:
                body = f"{_format_fraction(c)}*{body}"
            if k == 0:
                pieces.append(body if sign == "+" else f"-{body}")
            else:
                pieces.append(f" {sign} {body}")
        return "".join(pieces)

    def __repr__(self) -> str:
        return f"Element({self})"


def _format_fraction(value: Fraction) -> str:
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


class AlgebraMap:
    """Degree-preserving algebra morphism given by generator images.

    Args:
        source: Domain algebra.
        target: Codomain algebra.
        images: ``generator name -> image``; images are transported into
            ``target`` by name.

    Raises:
        ArgumentError: If an image is missing or has the wrong degree.
    """

    def __init__(self, source: GradedAlgebra, target: GradedAlgebra, images: Mapping[str, Element]):
        self.source = source
        self.target = target
        self.images: Dict[str, Element] = {}
        for g in source.generators:
            if g.name not in images:
                raise ArgumentError(f"no image given for generator {g.name!r}")
            image = target.transport(images[g.name])
            if not image.is_zero() and image.degree() != g.degree:
                raise ArgumentError(
                    f"image of {g.name!r} has degree {image.degree()}, expected {g.degree}"
                )
            self.images[g.name] = image
        self._cache: Dict[Monomial, Element] = {}

    @classmethod
    def by_name(
        cls,
        source: GradedAlgebra,
        target: GradedAlgebra,
        overrides: Optional[Mapping[str, Element]] = None,
    ) -> "AlgebraMap":
        """Send each generator to the same-named target generator, or to zero if absent."""
        overrides = dict(overrides or {})
        images = {}
        for g in source.generators:
            if g.name in overrides:
                images[g.name] = overrides[g.name]
            elif g.name in target.index:
                images[g.name] = target.gen(g.name)
            else:
                images[g.name] = target.zero()
        return cls(source, target, images)

    @classmethod
    def identity(cls, algebra: GradedAlgebra) -> "AlgebraMap":
        return cls.by_name(algebra, algebra)

    def image(self, name: str) -> Element:
        return self.images[name]

    def apply_monomial(self, m: Monomial) -> Element:
        cached = self._cache.get(m)
        if cached is not None:
            return cached
        result = self.target.one()
        for i in self.source.factors(m):
            result = result * self.images[self.source.generators[i].name]
        self._cache[m] = result
        return result

    def __call__(self, element: Element) -> Element:
        if element.algebra.generators != self.source.generators:
            element = self.source.transport(element)
        out = self.target.zero()
        for m, c in element.terms.items():
            out = out + self.apply_monomial(m) * c
        return out

    def is_identity(self) -> bool:
        return self.source == self.target and all(
            self.images[g.name] == self.target.gen(g.name) for g in self.source.generators
        )


def compose_maps(g: AlgebraMap, f: AlgebraMap) -> AlgebraMap:
    """The composite ``g ∘ f``."""
    if f.target.generators != g.source.generators:
        raise ArgumentError("maps are not composable")
    return AlgebraMap(f.source, g.target, {name: g(image) for name, image in f.images.items()})


class DerivationOverMorphism:
    """A derivation ``D: source -> target`` over an algebra map ``F``.

    ``D(u·v) = D(u)·F(v) + (-1)^(p|u|) F(u)·D(v)`` where ``p`` is the degree
    of ``D``. Values are given on generators; ``tabulated`` values on chosen
    products override the Leibniz expansion, which is how hand-entered data
    can disagree with the rule.

    Args:
        source: Domain algebra.
        target: Codomain algebra.
        degree: Degree ``p`` of the derivation.
        values: ``generator name -> value``; missing generators map to zero.
        along: The map ``F``; ``None`` means the identity of ``source``.
        tabulated: Optional ``monomial -> value`` overrides.
    """

    def __init__(
        self,
        source: GradedAlgebra,
        target: GradedAlgebra,
        degree: int,
        values: Mapping[str, Element],
        along: Optional[AlgebraMap] = None,
        tabulated: Optional[Mapping[Monomial, Element]] = None,
    ):
        if along is None:
            if source.generators != target.generators:
                raise ArgumentError("a derivation without a base map must act on one algebra")
        elif along.source.generators != source.generators or along.target.generators != target.generators:
            raise ArgumentError("base map does not match the derivation's algebras")
        self.source = source
        self.target = target
        self.degree = degree
        self.along = along
        self.values: Dict[str, Element] = {}
        for g in source.generators:
            value = values.get(g.name)
            value = target.zero() if value is None else target.transport(value)
            if not value.is_zero() and value.degree() != g.degree + degree:
                raise ArgumentError(
                    f"value on {g.name!r} has degree {value.degree()}, expected {g.degree + degree}"
                )
            self.values[g.name] = value
        self.tabulated = {m: target.transport(v) for m, v in (tabulated or {}).items()}
        self._cache: Dict[Monomial, Element] = {}

    def _push(self, m: Monomial) -> Element:
        if self.along is None:
            return self.target.monomial(m)
        return self.along.apply_monomial(m)

    def apply_monomial(self, m: Monomial) -> Element:
        # peel off the first factor until a known value is reached, then
        # rebuild the Leibniz expansion from the inside out
        chain: List[Tuple[Monomial, int]] = []
        current = m
        while True:
            cached = self._cache.get(current)
            if cached is not None:
                value = cached
                break
            if current in self.tabulated:
                value = self.tabulated[current]
                break
            if not any(current):
                value = self.target.zero()
                break
            first = next(i for i, e in enumerate(current) if e)
            chain.append((current, first))
            current = tuple(e - 1 if i == first else e for i, e in enumerate(current))
        self._cache[current] = value
        pushed = self._push(current)
        for mono, first in reversed(chain):
            g = self.source.generators[first]
            head = self._push(tuple(1 if i == first else 0 for i in range(len(mono))))
            result = self.values[g.name] * pushed
            if not value.is_zero():
                sign = -1 if (self.degree * g.degree) % 2 else 1
                result = result + head * value * sign
            pushed = head * pushed if self.along is not None else self.target.monomial(mono)
            value = result
            self._cache[mono] = value
        return value

    def __call__(self, element: Element) -> Element:
        if element.algebra.generators != self.source.generators:
            element = self.source.transport(element)
        out = self.target.zero()
        for m, c in element.terms.items():
            out = out + self.apply_monomial(m) * c
        return out

    def value(self, name: str) -> Element:
        return self.values[name]


def contraction(algebra: GradedAlgebra, name: str) -> DerivationOverMorphism:
    """Left partial derivative with respect to the generator ``name``."""
    g = algebra.generator(name)
    return DerivationOverMorphism(algebra, algebra, -g.degree, {name: algebra.one()})


def contract(algebra: GradedAlgebra, word: Sequence[str], element: Element) -> Element:
    """Apply ``ι_{w₁} ∘ … ∘ ι_{w_n}`` to ``element`` (the last letter acts first)."""
    result = element
    for name in reversed(word):
        result = contraction(algebra, name)(result)
        if result.is_zero():
            break
    return result


def solve_combination(
    contributions: Sequence[Sequence[Element]],
    targets: Sequence[Element],
    max_unknowns: Optional[int] = None,
) -> Optional[List[Fraction]]:
    """Find coefficients ``u`` with ``Σ_k u_k · contributions[k][c] = targets[c]`` for all ``c``.

    Each constraint ``c`` compares elements of one algebra; different
    constraints may live in different algebras.

    Args:
        contributions: ``contributions[k][c]`` is the effect of unknown ``k``
            on constraint ``c``.
        targets: Required value of each constraint.
        max_unknowns: Refuse systems with more unknowns than this.

    Returns:
        The deterministic echelon solution, or ``None`` if inconsistent.
    """
    if max_unknowns is not None and len(contributions) > max_unknowns:
        raise ArgumentError(f"{len(contributions)} unknowns exceed the limit of {max_unknowns}")
    rows: Dict[Tuple[int, Monomial], int] = {}

    def row(c: int, m: Monomial) -> int:
        key = (c, m)
        if key not in rows:
            rows[key] = len(rows)
        return rows[key]

    entries: Dict[Tuple[int, int], Fraction] = {}
    for k, column in enumerate(contributions):
        for c, element in enumerate(column):
            for m, value in element.terms.items():
                r = row(c, m)
                entries[(r, k)] = entries.get((r, k), Fraction(0)) + value
    rhs_terms = []
    for c, element in enumerate(targets):
        for m, value in element.terms.items():
            rhs_terms.append((row(c, m), value))
    b = [Fraction(0)] * len(rows)
    for r, value in rhs_terms:
        b[r] += value
    if not contributions:
        return [] if all(v == 0 for v in b) else None
    matrix = RationalMatrix(len(rows), len(contributions), entries)
    logger.debug(f"exact solve: {len(contributions)} unknowns, {len(rows)} equations")
    return solve(matrix, b)
