"""Multiderivations, SHLR pairs and their Chevalley–Eilenberg complexes.

Bracket data and CE differentials determine each other through contractions.
For a word ``x = (x₁, …, x_n)`` of module generators write
``ι_x = ι_{x₁} ∘ … ∘ ι_{x_n}``. Then a weight-``l`` component ``D`` of a CE
differential and the multiderivation ``(X, σ)`` it encodes satisfy

    X(x)_r  = -(-1)^{|m_r|} · ι_x(D θ_r)      for words of length l + 1,
    σ(x)(a) = ι_x(D a)                        for words of length l.

Tables are stored on sorted words; other orders follow by graded symmetry in
the module degrees.
"""

import itertools
import logging
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from shlrkit import config
from shlrkit.algebra import DerivationOverMorphism, Element, Generator, GradedAlgebra, contract
from shlrkit.dgca import CellModule, Expression, LeibnizReport, normal_form, primal_of
from shlrkit.errors import ArgumentError, InvalidComplexError
from shlrkit.signs import Permutation, koszul_sign, split_by, unshuffles
from shlrkit.weighted import FatCdga, linear_part_of_differential, square_zero_check

logger = logging.getLogger(__name__)

Word = Tuple[str, ...]


def _parity(n: int) -> int:
    return -1 if n % 2 else 1


def legal_words(module: CellModule, length: int) -> List[Word]:
    """Sorted words of module generators with no repeated odd letter."""
    words = []
    for combo in itertools.combinations_with_replacement(module.module_generators, length):
        names = [g.name for g in combo]
        if any(g.odd and names.count(g.name) > 1 for g in combo):
            continue
        words.append(tuple(names))
    return words


def sort_word(module: CellModule, word: Sequence[str]) -> Optional[Tuple[int, Word]]:
    """Return ``(ε, sorted word)`` with ``f(word) = ε f(sorted)`` for graded-symmetric ``f``.

    Returns ``None`` when an odd letter repeats, where every such ``f`` vanishes.
    """
    position = {name: k for k, name in enumerate(module.names)}
    for name in word:
        if name not in position:
            raise ArgumentError(f"{name!r} is not a module generator")
    order = sorted(range(len(word)), key=lambda i: (position[word[i]], i))
    ordered = tuple(word[i] for i in order)
    for a, b in zip(ordered, ordered[1:]):
        if a == b and module.degree(a) % 2:
            return None
    rank = {i: k for k, i in enumerate(order)}
    sigma = Permutation(tuple(rank[i] + 1 for i in range(len(word))))
    degrees = [module.degree(n) for n in ordered]
    return koszul_sign(degrees, sigma), ordered


def word_degree(module: CellModule, word: Sequence[str]) -> int:
    return sum(module.degree(n) for n in word)


class Multiderivation:
    """Weight-``l`` bracket and anchor over the identity of a module.

    Args:
        module: The cell module ``M`` over the base ``A``.
        weight: ``l``; brackets take ``l + 1`` arguments, anchors ``l``.
        brackets: ``word -> module element`` of degree ``1 + Σ|x_i|``.
        anchors: ``word -> {base generator -> base element}``.

    Raises:
        ArgumentError: On wrong word lengths, wrong degrees or conflicting entries.
    """

    def __init__(
        self,
        module: CellModule,
        weight: int,
        brackets: Optional[Mapping[Sequence[str], Expression]] = None,
        anchors: Optional[Mapping[Sequence[str], Mapping[str, Expression]]] = None,
    ):
        if weight < 0:
            raise ArgumentError(f"weight must be nonnegative, got {weight}")
        self.module = module
        self.weight = weight
        self.base = module.base
        self._brackets: Dict[Word, Element] = {}
        self._anchors: Dict[Word, Dict[str, Element]] = {}
        self._anchor_derivations: Dict[Word, DerivationOverMorphism] = {}
        for word, expression in (brackets or {}).items():
            word = tuple(word)
            if len(word) != weight + 1:
                raise ArgumentError(f"bracket {list(word)} needs {weight + 1} arguments")
            value = normal_form(module.algebra, expression)
            self._store(self._brackets, word, value, 1 + word_degree(module, word), "bracket")
        for word, values in (anchors or {}).items():
            word = tuple(word)
            if len(word) != weight:
                raise ArgumentError(f"anchor {list(word)} needs {weight} arguments")
            for x, expression in values.items():
                value = normal_form(self.base.algebra, expression)
                expected = 1 + word_degree(module, word) + self.base.algebra.generator(x).degree
                self._store_anchor(word, x, value, expected)

    def _store(self, table, word, value, expected_degree, kind):
        if not value.is_zero() and value.degree() != expected_degree:
            raise ArgumentError(f"{kind} on {list(word)} has degree {value.degree()}, expected {expected_degree}")
        ordered = sort_word(self.module, word)
        if ordered is None:
            if not value.is_zero():
                raise ArgumentError(f"{kind} on {list(word)} must vanish: an odd argument repeats")
            return None
        sign, key = ordered
        value = value * sign
        if key in table and table[key] != value:
            raise ArgumentError(f"conflicting {kind} values on {list(key)}")
        table[key] = value
        return key

    def _store_anchor(self, word, x, value, expected_degree):
        if not value.is_zero() and value.degree() != expected_degree:
            raise ArgumentError(
                f"anchor on {list(word)} at {x!r} has degree {value.degree()}, expected {expected_degree}"
            )
        ordered = sort_word(self.module, word)
        if ordered is None:
            if not value.is_zero():
                raise ArgumentError(f"anchor on {list(word)} must vanish: an odd argument repeats")
            return None
        sign, key = ordered
        slot = self._anchors.setdefault(key, {})
        value = value * sign
        if x in slot and slot[x] != value:
            raise ArgumentError(f"conflicting anchor values on {list(key)} at {x!r}")
        slot[x] = value
        return key

    @classmethod
    def from_module(cls, module: CellModule) -> "Multiderivation":
        """The weight-0 layer: the module and base differentials."""
        brackets = {(m,): module.differential(m) for m in module.names}
        anchors = {(): {x: module.base.differential(x) for x in module.base.names}}
        return cls(module, 0, brackets, anchors)

    def bracket_table(self) -> Dict[Word, Element]:
        return {w: v for w, v in self._brackets.items() if not v.is_zero()}

    def anchor_table(self) -> Dict[Word, Dict[str, Element]]:
        out = {}
        for w, values in self._anchors.items():
            kept = {x: v for x, v in values.items() if not v.is_zero()}
            if kept:
                out[w] = kept
        return out

    def is_zero(self) -> bool:
        return not self.bracket_table() and not self.anchor_table()

    def bracket(self, word: Sequence[str]) -> Element:
        """``X(word)`` as a module element, for words in any order."""
        ordered = sort_word(self.module, word)
        if ordered is None or len(word) != self.weight + 1:
            return self.module.algebra.zero()
        sign, key = ordered
        return self._brackets.get(key, self.module.algebra.zero()) * sign

    def contraction_table(self, word: Sequence[str]) -> Dict[str, Element]:
        """``r -> ι_word(D θ_r)``, the bracket read in contraction coordinates."""
        if len(word) != self.weight + 1:
            return {}
        out = {}
        for r, value in self.module.coefficients(self.bracket(word)).items():
            out[r] = value * (-_parity(self.module.degree(r)))
        return out

    def anchor(self, word: Sequence[str], x: str) -> Element:
        ordered = sort_word(self.module, word)
        if ordered is None or len(word) != self.weight:
            return self.base.algebra.zero()
        sign, key = ordered
        return self._anchors.get(key, {}).get(x, self.base.algebra.zero()) * sign

    def anchor_derivation(self, word: Sequence[str]) -> Optional[DerivationOverMorphism]:
        """The derivation ``σ(word)`` of the base, or ``None`` if it vanishes."""
        ordered = sort_word(self.module, word)
        if ordered is None or len(word) != self.weight:
            return None
        sign, key = ordered
        values = self._anchors.get(key)
        if not values or all(v.is_zero() for v in values.values()):
            return None
        cache_key = key + (("-",) if sign < 0 else ())
        if cache_key not in self._anchor_derivations:
            self._anchor_derivations[cache_key] = DerivationOverMorphism(
                self.base.algebra,
                self.base.algebra,
                1 + word_degree(self.module, word),
                {x: v * sign for x, v in values.items()},
            )
        return self._anchor_derivations[cache_key]

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Multiderivation)
            and self.weight == other.weight
            and self.module == other.module
            and self.bracket_table() == other.bracket_table()
            and self.anchor_table() == other.anchor_table()
        )

    __hash__ = None


class SHLRPair:
    """A base, a cell module and a family of multiderivations of weights ``0..K``.

    The weight-0 layer is always the module and base differential. Higher
    layers are given explicitly.

    Args:
        module: The cell module.
        multiderivations: Layers of weight at least 1.
        cutoff: ``K``, the largest weight represented.
        shift: Offset between module degrees and bracket-algebra degrees.
        name: Label used in reports.
    """

    def __init__(
        self,
        module: CellModule,
        multiderivations: Sequence[Multiderivation] = (),
        cutoff: int = config.DEFAULT_WEIGHT_CUTOFF,
        shift: int = 0,
        name: str = "",
    ):
        self.module = module
        self.base = module.base
        self.cutoff = cutoff
        self.shift = shift
        self.name = name
        self.layers: Dict[int, Multiderivation] = {0: Multiderivation.from_module(module)}
        for layer in multiderivations:
            if layer.module != module:
                raise ArgumentError("all multiderivations must act on the pair's module")
            if layer.weight == 0:
                raise ArgumentError("the weight-0 layer is the module differential")
            if layer.weight in self.layers:
                raise ArgumentError(f"weight {layer.weight} is given twice")
            if layer.weight > cutoff:
                raise ArgumentError(f"weight {layer.weight} exceeds the cutoff {cutoff}")
            self.layers[layer.weight] = layer

    def layer(self, weight: int) -> Multiderivation:
        if weight not in self.layers:
            self.layers[weight] = Multiderivation(self.module, weight)
        return self.layers[weight]

    def evaluate_bracket(self, word: Sequence[str]) -> Element:
        return evaluate_bracket(self, word)


@dataclass
class SquareDefect:
    """Defects of the square-zero equations at one total weight."""

    weight: int
    brackets: Dict[Word, Element] = field(default_factory=dict)
    anchors: Dict[Word, Dict[str, Element]] = field(default_factory=dict)

    def is_zero(self) -> bool:
        return not self.brackets and not self.anchors

    def first(self) -> Optional[Tuple[str, Word, str]]:
        for word, value in self.brackets.items():
            return ("bracket", word, str(value))
        for word, values in self.anchors.items():
            for x, value in values.items():
                return ("anchor", word, f"{x}: {value}")
        return None


def multider_square(pair: SHLRPair, k: int) -> SquareDefect:
    """Evaluate ``Σ_{i+j=k} 𝕏_i ∘ 𝕏_j`` on every generator word.

    The bracket defect is reported on words of length ``k + 1`` as a module
    element; for a Lie algebra at ``k = 2`` it is the Jacobiator. The anchor
    defect is reported on words of length ``k`` per base generator.

    Raises:
        ArgumentError: If ``k`` exceeds the pair's cutoff.
    """
    if k < 0 or k > pair.cutoff:
        raise ArgumentError(f"weight {k} is outside 0..{pair.cutoff}")
    module = pair.module
    base = pair.base.algebra
    degree = {n: module.degree(n) for n in module.names}
    defect = SquareDefect(k)

    for word in legal_words(module, k + 1):
        degrees = [degree[x] for x in word]
        total: Dict[str, Element] = {}

        def add(m: str, value: Element) -> None:
            total[m] = total.get(m, base.zero()) + value

        for i in range(k + 1):
            j = k - i
            outer, inner = pair.layer(i), pair.layer(j)
            for sigma in unshuffles(i, j + 1):
                head, rest = split_by(word, sigma, i)
                rho = outer.anchor_derivation(head)
                if rho is None:
                    continue
                sign = koszul_sign(degrees, sigma) * _parity(sum(degree[x] for x in rest))
                for m, value in inner.contraction_table(rest).items():
                    add(m, rho(value) * sign)
            for sigma in unshuffles(i + 1, j):
                head, rest = split_by(word, sigma, i + 1)
                first = outer.contraction_table(head)
                if not first:
                    continue
                eps = koszul_sign(degrees, sigma)
                rest_degree = sum(degree[x] for x in rest)
                for r, t in first.items():
                    sign = eps * _parity((degree[r] + 1) * rest_degree)
                    for m, value in inner.contraction_table(tuple(rest) + (r,)).items():
                        add(m, t * value * sign)
        shown = {m: v * _parity(degree[m]) for m, v in total.items() if not v.is_zero()}
        if shown:
            defect.brackets[word] = module.combine(shown)

    for word in legal_words(module, k):
        degrees = [degree[x] for x in word]
        found: Dict[str, Element] = {}
        for x in pair.base.names:
            value = base.zero()
            for i in range(k + 1):
                j = k - i
                outer, inner = pair.layer(i), pair.layer(j)
                for sigma in unshuffles(i, j):
                    head, rest = split_by(word, sigma, i)
                    rho = outer.anchor_derivation(head)
                    if rho is None:
                        continue
                    sign = koszul_sign(degrees, sigma) * _parity(sum(degree[y] for y in rest))
                    value = value + rho(inner.anchor(rest, x)) * sign
                if j < 1:
                    continue
                for sigma in unshuffles(i + 1, j - 1):
                    head, rest = split_by(word, sigma, i + 1)
                    first = outer.contraction_table(head)
                    if not first:
                        continue
                    eps = koszul_sign(degrees, sigma)
                    rest_degree = sum(degree[y] for y in rest)
                    for r, t in first.items():
                        sign = eps * _parity((degree[r] + 1) * rest_degree)
                        value = value + t * inner.anchor(tuple(rest) + (r,), x) * sign
            if not value.is_zero():
                found[x] = value
        if found:
            defect.anchors[word] = found
    return defect


def ce_algebra(module: CellModule, max_weight: int) -> GradedAlgebra:
    """``A[θ]`` on the duals of the module generators, cut at ``max_weight``."""
    duals = tuple(Generator(g.name, -g.degree, 1) for g in module.module_generators)
    return GradedAlgebra(module.base.generators + duals, max_weight)


def dualize_multider(layer: Multiderivation, algebra: GradedAlgebra) -> DerivationOverMorphism:
    """The weight-``l`` derivation on ``algebra`` encoding ``layer``.

    ``algebra`` is the CE algebra of the layer's module. Each table entry
    ``T`` on a sorted word ``μ`` contributes ``(-1)^{|t||μ|} t/c_μ · θ^μ`` for
    every term ``t`` of ``T``, where ``c_μ = ι_μ θ^μ``.
    """
    module = layer.module
    base = module.base.algebra
    values = {g.name: algebra.zero() for g in algebra.generators}

    def spread(word: Word, table: Mapping[str, Element]) -> None:
        theta = algebra.product(word)
        if theta.is_zero():
            return
        c = contract(algebra, word, theta).constant()
        mu = word_degree(module, word)
        for target, entry in table.items():
            for t, coefficient in entry.terms.items():
                sign = _parity(base.monomial_degree(t) * mu)
                values[target] = values[target] + (
                    algebra.transport(base.monomial(t, coefficient * sign / c)) * theta
                )

    for word in legal_words(module, layer.weight + 1):
        spread(word, layer.contraction_table(word))
    for word in legal_words(module, layer.weight):
        spread(word, {x: layer.anchor(word, x) for x in module.base.names})
    return DerivationOverMorphism(algebra, algebra, 1, values)


def _read_layer(D: DerivationOverMorphism, module: CellModule, weight: int, brackets: bool) -> Multiderivation:
    algebra = D.source
    base = module.base.algebra
    bracket_values = {}
    if brackets:
        for word in legal_words(module, weight + 1):
            coefficients = {}
            for r in module.names:
                t = base.transport(contract(algebra, word, D.value(r)).weight_part(0))
                if not t.is_zero():
                    coefficients[r] = t * (-_parity(module.degree(r)))
            if coefficients:
                bracket_values[word] = module.combine(coefficients)
    anchors = {}
    for word in legal_words(module, weight):
        values = {}
        for x in module.base.names:
            t = base.transport(contract(algebra, word, D.value(x)).weight_part(0))
            if not t.is_zero():
                values[x] = t
        if values:
            anchors[word] = values
    return Multiderivation(module, weight, bracket_values, anchors)


def reconstruct_multider(D: DerivationOverMorphism, module: CellModule, weight: int) -> Multiderivation:
    """Read the weight-``weight`` brackets and anchors off a CE derivation by contraction.

    Raises:
        ArgumentError: If the algebra's cutoff cannot hold weight ``weight + 1``.
    """
    cutoff = D.source.max_weight
    if cutoff is not None and cutoff < weight + 1:
        raise ArgumentError(f"weight cutoff {cutoff} is too small to read brackets of weight {weight}")
    return _read_layer(D, module, weight, brackets=True)


def ce_from_pair(pair: SHLRPair, max_weight: Optional[int] = None, validate: bool = True) -> FatCdga:
    """The Chevalley–Eilenberg fat cdga of ``pair``.

    Brackets of weight ``l`` only survive when ``l + 1 <= W``.

    Raises:
        InvalidComplexError: If ``validate`` and the result fails to square to
            zero, naming the first failing weight.
    """
    W = pair.cutoff if max_weight is None else max_weight
    algebra = ce_algebra(pair.module, W)
    values = {g.name: algebra.zero() for g in algebra.generators}
    for weight in sorted(pair.layers):
        if weight > W:
            continue
        part = dualize_multider(pair.layers[weight], algebra)
        for name in values:
            values[name] = values[name] + part.value(name)
    duals = [(g.name, -g.degree) for g in pair.module.module_generators]
    X = FatCdga(pair.base, duals, values, W, pair.shift, name=pair.name)
    if validate:
        report = square_zero_check(X)
        if not report.passed:
            raise InvalidComplexError(
                f"brackets do not square to zero at weight {report.weight} on {report.generator}: "
                f"{report.witness}"
            )
    return X


def pair_from_ce(X: FatCdga) -> SHLRPair:
    """Recover the SHLR pair encoded by a CE fat cdga."""
    module = primal_of(linear_part_of_differential(X))
    layers = [
        _read_layer(X.d, module, weight, brackets=weight + 1 <= X.max_weight)
        for weight in range(1, X.max_weight + 1)
    ]
    return SHLRPair(module, layers, cutoff=X.max_weight, shift=X.shift, name=X.name)


Argument = Tuple[Element, str]


def _homogeneous_terms(element: Element) -> List[Element]:
    algebra = element.algebra
    return [algebra.monomial(m, c) for m, c in element.items()]


def _argument_degree(module: CellModule, argument: Argument) -> int:
    coefficient, name = argument
    return (coefficient.degree() or 0) + module.degree(name)


def _anchor_value(layer: Multiderivation, arguments: Sequence[Argument], a: Element) -> Element:
    """``σ(c₁m₁, …, c_k m_k)(a)``; the anchor is linear over the base in every slot."""
    module = layer.module
    base = module.base.algebra
    sign = 1
    prefix = base.one()
    for k in range(len(arguments) - 1, -1, -1):
        c = arguments[k][0]
        before = sum(_argument_degree(module, arguments[j]) for j in range(k))
        sign *= _parity((c.degree() or 0) * (1 + before))
        prefix = prefix * c
    rho = layer.anchor_derivation([name for _, name in arguments])
    if rho is None:
        return base.zero()
    return prefix * rho(a) * sign


def _extend(layer: Multiderivation, arguments: Sequence[Argument]) -> Element:
    """``X(c₁m₁, …, c_n m_n)`` by graded symmetry and the Leibniz rule in the last slot.

    Coefficients must be single terms.
    """
    module = layer.module
    A = module.algebra
    position = None
    for k in range(len(arguments) - 1, -1, -1):
        if arguments[k][0].is_zero() or arguments[k][0].mentions():
            position = k
            break
    if position is None:
        scale = Fraction(1)
        for c, _ in arguments:
            scale *= c.constant()
        return layer.bracket([name for _, name in arguments]) * scale
    moved = arguments[position]
    rest = list(arguments[:position]) + list(arguments[position + 1 :])
    after = sum(_argument_degree(module, arguments[j]) for j in range(position + 1, len(arguments)))
    sign = _parity(_argument_degree(module, moved) * after)
    c, name = moved
    if c.is_zero():
        return A.zero()
    rest_degree = sum(_argument_degree(module, r) for r in rest)
    unit = module.base.algebra.one()
    first = A.transport(c) * _extend(layer, rest + [(unit, name)]) * _parity((c.degree() or 0) * (1 + rest_degree))
    second = A.transport(_anchor_value(layer, rest, c)) * A.gen(name)
    return (first + second) * sign


def _split_argument(module: CellModule, element: Element) -> List[Argument]:
    out = []
    for name, coefficient in module.coefficients(element).items():
        out.extend((term, name) for term in _homogeneous_terms(coefficient))
    return out


def evaluate_bracket(pair: SHLRPair, arguments: Sequence[Expression]) -> Element:
    """Bracket of module elements with base coefficients.

    The bracket of generators is extended to coefficients by graded symmetry
    and the relative Leibniz rule
    ``X(z₁, …, a·m) = (-1)^{|a|(1+|z₁|+…)} a·X(z₁, …, m) + σ(z₁, …)(a)·m``.
    """
    module = pair.module
    elements = [normal_form(module.algebra, a) for a in arguments]
    if not elements:
        raise ArgumentError("a bracket needs at least one argument")
    layer = pair.layer(len(elements) - 1)
    result = module.algebra.zero()
    for choice in itertools.product(*[_split_argument(module, e) for e in elements]):
        result = result + _extend(layer, list(choice))
    return result


def _leibniz_expansion(layer: Multiderivation, arguments: Sequence[Argument]) -> Element:
    """``X(c₁m₁, …, c_n m_n)`` written out in one step.

    The result is ``±c₁⋯c_n·X(m₁, …, m_n)`` plus, for every slot ``i``,
    ``±(∏_{j≠i} c_j)·σ(m_j : j≠i)(c_i)·m_i``. Each sign is the Koszul sign of
    moving the coefficients out of ``X c₁ m₁ ⋯ c_n m_n`` with ``X`` odd.
    """
    module = layer.module
    A = module.algebra
    base = module.base.algebra
    degrees = [1]
    for c, name in arguments:
        degrees += [c.degree() or 0, module.degree(name)]
    n = len(arguments)

    def moved(order: List[int]) -> int:
        return koszul_sign(degrees, Permutation(tuple(order)))

    def coefficient(i: int) -> int:
        return 2 + 2 * i

    def generator(i: int) -> int:
        return 3 + 2 * i

    product = base.one()
    for c, _ in arguments:
        product = product * c
    order = [coefficient(i) for i in range(n)] + [1] + [generator(i) for i in range(n)]
    result = A.transport(product) * layer.bracket([name for _, name in arguments]) * moved(order)
    for i, (c, name) in enumerate(arguments):
        others = [j for j in range(n) if j != i]
        rho = layer.anchor_derivation([arguments[j][1] for j in others])
        if rho is None:
            continue
        prefix = base.one()
        for j in others:
            prefix = prefix * arguments[j][0]
        order = [coefficient(j) for j in others] + [1] + [generator(j) for j in others] + [coefficient(i), generator(i)]
        result = result + A.transport(prefix * rho(c)) * A.gen(name) * moved(order)
    return result


def check_multider_leibniz(
    pair: SHLRPair,
    weight: int,
    trials: int = config.DEFAULT_LEIBNIZ_TRIALS,
    seed: int = config.DEFAULT_SEED,
) -> LeibnizReport:
    """Sample the relative Leibniz law of one layer.

    Each trial draws arguments ``z_i = c_i·m_i`` whose coefficients are
    products of up to two base monomials, and compares the bracket built slot
    by slot with its one-step expansion into a base-linear term and one anchor
    term per slot.
    """
    rng = random.Random(seed)
    module = pair.module
    layer = pair.layer(weight)
    base = module.base.algebra
    pool = [base.monomial(m) for m in base.monomials(max_length=1)] if base.generators else [base.one()]
    if not module.names:
        return LeibnizReport(True, 0)
    for _ in range(trials):
        arguments = [(rng.choice(pool) * rng.choice(pool), rng.choice(module.names)) for _ in range(weight + 1)]
        actual = _extend(layer, arguments)
        expected = _leibniz_expansion(layer, arguments)
        if actual != expected:
            shown = ", ".join(f"{c}*{n}" for c, n in arguments)
            return LeibnizReport(False, trials, f"X({shown}) off by {actual - expected}")
    return LeibnizReport(True, trials)
