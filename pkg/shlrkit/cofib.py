"""Cofibrant objects of fat cdgas: cofibrations, weak equivalences and factorizations.

Verdicts are certified on finite truncations: base algebras are cut at a
base length, complexes at a degree window. A verdict is ``True`` only when
the truncation provably hides nothing.
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Tuple, Union

from tqdm import tqdm

from shlrkit import config
from shlrkit.algebra import (
    AlgebraMap,
    DerivationOverMorphism,
    Element,
    Generator,
    GradedAlgebra,
    Monomial,
    solve_combination,
)
from shlrkit.dgca import (
    CellModule,
    DgcaMorphism,
    SemiFreeDgca,
    base_change,
    compose_maps,
    dualize_cell,
    lift_differential,
    primal_of,
    truncated_chain_map,
    truncated_complex,
)
from shlrkit.errors import ArgumentError, NotCofibrationError, WindowTooSmallError
from shlrkit.linalg import DegreeWindow, FiniteComplex, RationalMatrix, cohomology_dims, cone, rank
from shlrkit.weighted import (
    FatCdga,
    FatMorphism,
    check_fat_morphism,
    compose_fat_morphisms,
    linear_part_of_differential,
    linear_part_of_morphism,
    square_zero_check,
)

logger = logging.getLogger(__name__)

INCONCLUSIVE = "inconclusive"

Verdict = Union[bool, str]
Morphism = Union[FatMorphism, DgcaMorphism]


@dataclass
class FactorizationConfig:
    """Truncation parameters shared by the certification routines.

    Args:
        window: Degrees in which cohomology is computed.
        max_weight: Weight cutoff; ``None`` means the cutoff of the input.
        base_length: Base filtration cutoff.
        max_solve_dim: Largest number of unknowns in one exact solve.
        progress: Show a progress bar over weights.
    """

    window: DegreeWindow = field(default_factory=lambda: DegreeWindow(*config.DEFAULT_DEGREE_WINDOW))
    max_weight: Optional[int] = None
    base_length: int = config.DEFAULT_BASE_LENGTH
    max_solve_dim: int = config.DEFAULT_MAX_SOLVE_DIM
    progress: bool = False
    logger: logging.Logger = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        self.logger = logging.getLogger(self.__class__.__name__)
        if self.base_length < 0:
            raise ArgumentError(f"base length must be nonnegative, got {self.base_length}")

    @classmethod
    def from_settings(cls, settings: config.Settings, progress: bool = False) -> "FactorizationConfig":
        return cls(
            window=DegreeWindow(*settings.degree_window),
            max_weight=settings.weight_cutoff,
            base_length=settings.base_length,
            max_solve_dim=settings.max_solve_dim,
            progress=progress,
        )


def _solve(contributions, targets, cfg: FactorizationConfig, what: str, weight=None, degree=None):
    if len(contributions) > cfg.max_solve_dim:
        raise WindowTooSmallError(
            f"{what}: {len(contributions)} unknowns exceed the solve limit {cfg.max_solve_dim}",
            weight=weight,
            degree=degree,
        )
    solution = solve_combination(contributions, targets)
    if solution is None:
        raise WindowTooSmallError(f"{what} has no solution", weight=weight, degree=degree)
    return solution


def _combine(candidates: List[Element], solution: List[Fraction], zero: Element) -> Element:
    out = zero
    for u, candidate in zip(solution, candidates):
        if u:
            out = out + candidate * u
    return out


def same_morphism(a: Morphism, b: Morphism) -> bool:
    """True if two morphisms have equal endpoints and equal generator images."""
    return (
        a.source.algebra == b.source.algebra
        and a.target.algebra == b.target.algebra
        and all(a.image(n) == b.image(n) for n in a.source.algebra.names)
    )


# weak equivalences


@dataclass
class PartVerdict:
    """Cone cohomology of one part of a morphism."""

    part: str
    verdict: Verdict
    cohomology: Dict[int, Union[int, str]]
    complete: bool


@dataclass
class WeqVerdict:
    verdict: Verdict
    parts: List[PartVerdict]

    @property
    def passed(self) -> bool:
        return self.verdict is True


def cone_verdict(
    part: str,
    source: GradedAlgebra,
    source_d,
    target: GradedAlgebra,
    target_d,
    f,
    cfg: FactorizationConfig,
    weights=None,
) -> PartVerdict:
    """Judge ``f`` by the cohomology of its mapping cone inside ``cfg.window``."""
    window = cfg.window
    wide = DegreeWindow(window.lo - 1, window.hi + 2)
    S = truncated_complex(source, source_d, wide, cfg.base_length, weights)
    T = truncated_complex(target, target_d, wide, cfg.base_length, weights)
    chain_map = truncated_chain_map(f, S, T)
    C = cone(S, T, chain_map.matrices, window, chain_map.escapes)
    dims = cohomology_dims(C)
    if any(isinstance(v, int) and v != 0 for v in dims.values()):
        verdict: Verdict = False
    elif C.complete_interior():
        verdict = True
    else:
        verdict = INCONCLUSIVE
    logger.debug(f"{part} cone cohomology {dims}: {verdict}")
    return PartVerdict(part, verdict, dims, C.complete_interior())


def _overall(parts: List[PartVerdict]) -> Verdict:
    if any(p.verdict is False for p in parts):
        return False
    if all(p.verdict is True for p in parts):
        return True
    return INCONCLUSIVE


def is_weak_equivalence(g: Morphism, cfg: Optional[FactorizationConfig] = None) -> WeqVerdict:
    """Decide whether ``g`` is a quasi-isomorphism on bases and on linear parts.

    Each part is judged by the cohomology of its mapping cone inside the
    window. A plain dgca morphism has only the base part.
    """
    cfg = cfg or FactorizationConfig()
    if isinstance(g, DgcaMorphism):
        base = cone_verdict("base", g.source.algebra, g.source.d, g.target.algebra, g.target.d, g.map, cfg)
        return WeqVerdict(_overall([base]), [base])
    f0 = g.base_map
    base = cone_verdict(
        "base", g.source.base.algebra, g.source.base.d, g.target.base.algebra, g.target.base.d, f0, cfg
    )
    parts = [base]
    # dual generators vanish at cutoff 0, leaving only the base
    if g.source.max_weight > 0:
        lin = linear_part_of_morphism(g)
        parts.append(
            cone_verdict(
                "linear", lin.source.algebra, lin.source.d, lin.target.algebra, lin.target.d, lin.as_map(), cfg, [1]
            )
        )
    return WeqVerdict(_overall(parts), parts)


# cofibrations


def _generator_targets(g: Morphism) -> Optional[Dict[str, str]]:
    targets = {}
    cutoff = g.source.algebra.max_weight
    for gen in g.source.algebra.generators:
        if cutoff is not None and gen.weight > cutoff:
            continue
        image = g.image(gen.name)
        if len(image.terms) != 1:
            return None
        ((m, c),) = image.terms.items()
        if c != 1 or sum(m) != 1:
            return None
        hit = g.target.algebra.generators[next(i for i, e in enumerate(m) if e)]
        if hit.weight != gen.weight:
            return None
        targets[gen.name] = hit.name
    if len(set(targets.values())) != len(targets):
        return None
    return targets


def is_cofibration(g: Morphism) -> bool:
    """True if ``g`` sends generators injectively onto target generators of the same kind."""
    return _generator_targets(g) is not None


# coproducts and pushouts


def _fresh(name: str, taken) -> str:
    k = 2
    while f"{name}_{k}" in taken:
        k += 1
    return f"{name}_{k}"


def _avoid(names: List[str], reserved) -> Dict[str, str]:
    taken = set(reserved) | set(names)
    rename = {}
    for name in names:
        if name in reserved:
            rename[name] = _fresh(name, taken)
            taken.add(rename[name])
        else:
            rename[name] = name
    return rename


def coproduct(X: FatCdga, Y: FatCdga) -> Tuple[FatCdga, FatMorphism, FatMorphism]:
    """Coproduct ``X ⊔ Y`` with its two inclusions.

    The base is the tensor product of the bases; dual generators of ``X``
    come before those of ``Y``. Generators of ``Y`` whose names occur in
    ``X`` get the first free suffix ``_2``, ``_3``, ...

    Raises:
        ArgumentError: If the weight cutoffs differ.
    """
    if X.max_weight != Y.max_weight:
        raise ArgumentError(f"weight cutoffs differ: {X.max_weight} and {Y.max_weight}")
    rename = _avoid(Y.algebra.names, set(X.algebra.names))
    Yr = Y.relabeled(rename)
    base = SemiFreeDgca(
        [(g.name, g.degree) for g in X.base.generators + Yr.base.generators],
        {**{n: X.base.differential(n) for n in X.base_names}, **{n: Yr.base.differential(n) for n in Yr.base_names}},
        name=f"{X.base.name}*{Y.base.name}",
    )
    values = {n: X.differential(n) for n in X.algebra.names}
    values.update({n: Yr.differential(n) for n in Yr.algebra.names})
    P = FatCdga(
        base,
        [(g.name, g.degree) for g in X.dual_generators + Yr.dual_generators],
        values,
        X.max_weight,
        X.shift,
        name=f"{X.name}+{Y.name}",
    )
    in_x = FatMorphism(X, P, {}, name="in_1")
    in_y = FatMorphism(Y, P, {n: P.algebra.gen(rename[n]) for n in Y.algebra.names}, name="in_2")
    return P, in_x, in_y


def fold_morphism(X: FatCdga) -> FatMorphism:
    """The fold map ``X_0 ⊔ X_1 -> X`` where ``X_k`` renames every generator with suffix ``_k``."""
    U, _, _ = coproduct(X.renamed("_0"), X.renamed("_1"))
    images = {f"{n}{k}": X.algebra.gen(n) for n in X.algebra.names for k in ("_0", "_1")}
    return FatMorphism(U, X, images, name="fold")


def pushout_along_cofibration(f: FatMorphism, g: FatMorphism) -> Tuple[FatCdga, FatMorphism, FatMorphism]:
    """Pushout of ``Y <-f- X -g-> Z`` along the cofibration ``g``.

    Returns ``(P, γ, φ)`` with ``γ: Y -> P`` the inclusion and ``φ: Z -> P``
    sending ``g(u)`` to ``f(u)`` and the remaining generators of ``Z`` to
    themselves. The formal generators of ``P`` are the new ones of ``Z``
    followed by those of ``Y``.

    Raises:
        ArgumentError: If ``f`` and ``g`` have different sources.
        NotCofibrationError: If ``g`` is not a cofibration.
    """
    if f.source != g.source:
        raise ArgumentError("pushout needs two morphisms out of the same object")
    hit = _generator_targets(g)
    if hit is None:
        raise NotCofibrationError(f"{g.name or 'morphism'} is not a cofibration")
    Y, Z = f.target, g.target
    if Y.max_weight != Z.max_weight:
        raise ArgumentError(f"weight cutoffs differ: {Y.max_weight} and {Z.max_weight}")
    preimage = {z: u for u, z in hit.items()}
    fresh = [n for n in Z.algebra.names if n not in preimage]
    rename = _avoid(fresh, set(Y.algebra.names))
    new_base = [g_ for g_ in Z.base.generators if g_.name in rename]
    new_duals = [g_ for g_ in Z.dual_generators if g_.name in rename]
    algebra = GradedAlgebra(
        Y.base.generators
        + tuple(Generator(rename[x.name], x.degree, 0) for x in new_base)
        + tuple(Generator(rename[t.name], t.degree, 1) for t in new_duals)
        + Y.dual_generators,
        Y.max_weight,
    )
    images = {}
    for z in Z.algebra.names:
        images[z] = algebra.transport(f.image(preimage[z])) if z in preimage else algebra.gen(rename[z])
    phi = AlgebraMap(Z.algebra, algebra, images)
    values = {n: algebra.transport(Y.differential(n)) for n in Y.algebra.names}
    values.update({rename[z]: phi(Z.differential(z)) for z in fresh})
    base = SemiFreeDgca(
        [(x.name, x.degree) for x in algebra.generators if x.weight == 0],
        {n: v.weight_part(0) for n, v in values.items() if algebra.generator(n).weight == 0},
        name=Y.base.name,
    )
    P = FatCdga(
        base,
        [(t.name, t.degree) for t in algebra.generators if t.weight == 1],
        values,
        Y.max_weight,
        Y.shift,
        name=f"{Y.name}+{Z.name}",
    )
    gamma = FatMorphism(Y, P, {}, name="gamma")
    phi_morphism = FatMorphism(Z, P, images, name="phi")
    logger.debug(f"pushout attaches {len(fresh)} generators to {Y.name or 'the target'}")
    return P, gamma, phi_morphism


# the base cylinder


@dataclass
class BaseCylinder:
    """The factorization ``A ⊗ A -> Cyl(A) -> A``.

    ``Cyl(A)`` has generators ``x_0``, ``x_1`` and ``x_s`` for each
    generator ``x`` of ``A``, with ``d x_s = x_0 - x_1 - h_x``.
    """

    base: SemiFreeDgca
    tensor: SemiFreeDgca
    cylinder: SemiFreeDgca
    inclusion: DgcaMorphism
    projection: DgcaMorphism
    corrections: Dict[str, Element]

    def endpoint(self, k: int) -> DgcaMorphism:
        """The inclusion ``A -> Cyl(A)`` onto the copy ``x_k``."""
        return DgcaMorphism(
            self.base, self.cylinder, {x: self.cylinder.algebra.gen(f"{x}_{k}") for x in self.base.names}
        )

    def s_names(self) -> List[str]:
        return [f"{x}_s" for x in self.base.names]


def tensor_square(A: SemiFreeDgca) -> SemiFreeDgca:
    """``A ⊗ A`` with the copies named ``x_0`` and ``x_1``."""
    copies = [A.renamed({x: f"{x}_{k}" for x in A.names}) for k in (0, 1)]
    return SemiFreeDgca(
        [(g.name, g.degree) for c in copies for g in c.generators],
        {n: c.differential(n) for c in copies for n in c.names},
        name=f"{A.name}*{A.name}",
    )


def base_cylinder(
    A: SemiFreeDgca,
    base_length: int = config.DEFAULT_BASE_LENGTH,
    max_solve_dim: int = config.DEFAULT_MAX_SOLVE_DIM,
) -> BaseCylinder:
    """Cylinder of a semi-free base, built generator by generator.

    Each correction ``h_x`` is solved exactly among monomials that contain
    an earlier ``s`` generator and have at most ``base_length`` factors.

    Raises:
        WindowTooSmallError: If some ``h_x`` does not exist within the bound.
    """
    tensor = tensor_square(A)
    gens = [(g.name, g.degree) for g in tensor.generators] + [(f"{g.name}_s", g.degree - 1) for g in A.generators]
    cyl = GradedAlgebra([Generator(n, d, 0) for n, d in gens])
    values = {n: cyl.transport(tensor.differential(n)) for n in tensor.names}
    cfg = FactorizationConfig(base_length=base_length, max_solve_dim=max_solve_dim)
    corrections = {}
    for a, g in enumerate(A.generators):
        earlier = {cyl.index[f"{h.name}_s"] for h in A.generators[:a]}
        allowed = lambda i: i in earlier or i < len(tensor.generators)
        d_partial = DerivationOverMorphism(cyl, cyl, 1, values)
        candidates = [
            cyl.monomial(m)
            for m in cyl.monomials(degree=g.degree, max_length=base_length, allowed=allowed)
            if any(m[i] for i in earlier)
        ]
        target = values[f"{g.name}_0"] - values[f"{g.name}_1"]
        solution = _solve([[d_partial(c)] for c in candidates], [target], cfg, f"correction of {g.name}_s", degree=g.degree)
        h = _combine(candidates, solution, cyl.zero())
        corrections[g.name] = h
        values[f"{g.name}_s"] = cyl.gen(f"{g.name}_0") - cyl.gen(f"{g.name}_1") - h
        logger.debug(f"d({g.name}_s) = {values[f'{g.name}_s']}")
    cylinder = SemiFreeDgca(gens, values, name=f"Cyl({A.name})")
    inclusion = DgcaMorphism(tensor, cylinder, {}, name="incl")
    images = {}
    for x in A.names:
        images.update({f"{x}_0": A.algebra.gen(x), f"{x}_1": A.algebra.gen(x), f"{x}_s": A.algebra.zero()})
    projection = DgcaMorphism(cylinder, A, images, name="proj")
    return BaseCylinder(A, tensor, cylinder, inclusion, projection, corrections)


# the path module


def path_module(M: CellModule) -> CellModule:
    """The cocone of the fold map ``M ⊕ M -> M``.

    Generators are ``m_I`` (degree ``|m| + 1``), then ``m_0`` and ``m_1``.
    For ``d m = Σ a_j m_j``::

        d m_0 = Σ a_j m_j_0 - m_I
        d m_1 = Σ a_j m_j_1 + m_I
        d m_I = -Σ (-1)^{|a_j|} a_j m_j_I
    """
    gens = (
        [(f"{n}_I", M.degree(n) + 1) for n in M.names]
        + [(f"{n}_0", M.degree(n)) for n in M.names]
        + [(f"{n}_1", M.degree(n)) for n in M.names]
    )
    algebra = GradedAlgebra(M.base.generators + tuple(Generator(n, d, 1) for n, d in gens), max_weight=1)
    values = {}
    for n in M.names:
        copies = {k: algebra.zero() for k in ("0", "1", "I")}
        for j, a in M.coefficients(M.differential(n)).items():
            a = algebra.transport(a)
            copies["0"] = copies["0"] + a * algebra.gen(f"{j}_0")
            copies["1"] = copies["1"] + a * algebra.gen(f"{j}_1")
            sign = -1 if a.degree() % 2 else 1
            copies["I"] = copies["I"] + a * algebra.gen(f"{j}_I") * sign
        values[f"{n}_0"] = copies["0"] - algebra.gen(f"{n}_I")
        values[f"{n}_1"] = copies["1"] + algebra.gen(f"{n}_I")
        values[f"{n}_I"] = -copies["I"]
    return CellModule(M.base, gens, values, name=f"Path({M.name})")


def path_inclusion(M: CellModule, path: CellModule) -> AlgebraMap:
    """The constant paths ``m -> m_0 + m_1``."""
    return AlgebraMap.by_name(
        M.algebra, path.algebra, {n: path.algebra.gen(f"{n}_0") + path.algebra.gen(f"{n}_1") for n in M.names}
    )


def path_evaluation(M: CellModule, path: CellModule, endpoint: int = 0) -> AlgebraMap:
    """Evaluation ``m_k -> m`` at one endpoint; every other generator goes to zero."""
    images = {f"{n}_{endpoint}": M.algebra.gen(n) for n in M.names}
    images.update({f"{n}_{k}": M.algebra.zero() for n in M.names for k in ("I", str(1 - endpoint))})
    return AlgebraMap.by_name(path.algebra, M.algebra, images)


def path_endpoints(M: CellModule, path: CellModule) -> Tuple[CellModule, AlgebraMap]:
    """``M ⊕ M`` and the projection of the path module onto it."""
    gens = [(f"{n}_{k}", M.degree(n)) for k in (0, 1) for n in M.names]
    algebra = GradedAlgebra(M.base.generators + tuple(Generator(n, d, 1) for n, d in gens), max_weight=1)
    forget = AlgebraMap.by_name(path.algebra, algebra)
    values = {name: forget(path.differential(name)) for name, _ in gens}
    sum_module = CellModule(M.base, gens, values, name=f"{M.name}+{M.name}")
    return sum_module, AlgebraMap.by_name(path.algebra, sum_module.algebra)


def module_map_commutes(f: AlgebraMap, source, target) -> bool:
    """True if ``f`` intertwines the differentials on every generator of ``source``."""
    return all(
        target.d(f.image(n)) == f(source.d.value(n)) for n in source.algebra.names
    )


# the cylinder of a CE complex


@dataclass
class ObstructionStep:
    """One weight of the cylinder construction.

    ``obstruction`` holds the nonzero parts of ``d²`` for the differential
    known so far; ``correction`` the solved new components.
    """

    weight: int
    unknowns: int
    obstruction: Dict[str, Element]
    correction: Dict[str, Element]


@dataclass
class CylinderWitness:
    """A factorization ``X ⊔ X -i-> C -p-> X`` of the fold map with its certificates.

    ``path`` is the cell module over ``Cyl(A)`` whose dual is the weight-0 part
    of ``C`` on dual generators.
    """

    source: FatCdga
    coproduct: FatCdga
    base: BaseCylinder
    C: FatCdga
    i: FatMorphism
    p: FatMorphism
    assembly: Dict[str, Element]
    obstruction_log: List[ObstructionStep]
    path: Optional[CellModule] = None
    weak_equivalence: Optional[WeqVerdict] = None
    checks: Dict[str, Verdict] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(v is True for v in self.checks.values())


def _component(algebra: GradedAlgebra, values: Mapping[str, Element], n: int) -> DerivationOverMorphism:
    return DerivationOverMorphism(
        algebra, algebra, 1, {g.name: values[g.name].weight_part(g.weight + n) for g in algebra.generators}
    )


def _kernel_coefficients(base: BaseCylinder, algebra: GradedAlgebra, degree: int, length: int) -> List[Element]:
    """Cylinder elements of one degree spanning the kernel of the projection."""
    cyl = base.cylinder.algebra
    s_index = {cyl.index[s] for s in base.s_names()}
    out = [cyl.monomial(m) for m in cyl.monomials(degree=degree, max_length=length) if any(m[i] for i in s_index)]
    if length > 0:
        plain = lambda i: i not in s_index
        for x in base.base.generators:
            diff = cyl.gen(f"{x.name}_0") - cyl.gen(f"{x.name}_1")
            for m in cyl.monomials(degree=degree - x.degree, max_length=length - 1, allowed=plain):
                out.append(cyl.monomial(m) * diff)
    return [algebra.transport(k) for k in out]


def _cylinder_projection(X: FatCdga, algebra: GradedAlgebra) -> Dict[str, Element]:
    images = {}
    for x in X.base_names:
        images.update({f"{x}_0": X.algebra.gen(x), f"{x}_1": X.algebra.gen(x), f"{x}_s": X.algebra.zero()})
    for t in X.dual_names:
        images.update({f"{t}_0": X.algebra.gen(t), f"{t}_1": X.algebra.gen(t), f"{t}_I": X.algebra.zero()})
    return images


def _fold_lift(M: CellModule, lifted: CellModule, base: BaseCylinder, cfg: FactorizationConfig) -> Dict[str, Element]:
    """A chain map ``φ`` from the endpoint copies of ``M`` to its lift over ``Cyl(A)``.

    ``φ(m_1)`` projects to ``m`` and ``φ(m_0)`` to ``-m``; the rest of each
    image has coefficients in the kernel of the projection. Generators are
    solved in cell order.
    """
    algebra = lifted.algebra
    phi: Dict[str, Element] = {}
    for k in (0, 1):
        endpoint = base.endpoint(k)
        for n in M.names:
            degree = M.degree(n)
            lead = algebra.gen(n) if k else -algebra.gen(n)
            target = algebra.zero()
            for j, a in M.coefficients(M.differential(n)).items():
                target = target + algebra.transport(endpoint(a)) * phi[f"{j}_{k}"]
            candidates = [
                c * algebra.gen(j)
                for j in M.names
                for c in _kernel_coefficients(base, algebra, degree - M.degree(j), cfg.base_length)
            ]
            solution = _solve(
                [[lifted.d(c)] for c in candidates],
                [target - lifted.d(lead)],
                cfg,
                f"fold lift of {n}_{k}",
                0,
                degree,
            )
            phi[f"{n}_{k}"] = lead + _combine(candidates, solution, algebra.zero())
    return phi


def _cocone(M: CellModule, lifted: CellModule, base: BaseCylinder, phi: Mapping[str, Element]) -> CellModule:
    """The cocone of ``φ`` over ``Cyl(A)``.

    Generators are ``m_I`` (degree ``|m| + 1``), then ``m_0`` and ``m_1``::

        d m_k = (d m)_k + s φ(m_k)
        d m_I = -s δ(m)

    with ``δ`` the lifted differential and ``s(b·j) = (-1)^{|b|} b·j_I``. Over
    the ground field this is :func:`path_module`.
    """
    cyl = base.cylinder
    gens = [(f"{n}_I", M.degree(n) + 1) for n in M.names] + [
        (f"{n}_{k}", M.degree(n)) for k in (0, 1) for n in M.names
    ]
    algebra = GradedAlgebra(cyl.generators + tuple(Generator(n, d, 1) for n, d in gens), max_weight=1)

    def suspend(element: Element) -> Element:
        out = algebra.zero()
        for j, b in lifted.coefficients(element).items():
            for t, c in b.terms.items():
                sign = -1 if cyl.algebra.monomial_degree(t) % 2 else 1
                out = out + algebra.transport(cyl.algebra.monomial(t, c * sign)) * algebra.gen(f"{j}_I")
        return out

    values = {}
    for n in M.names:
        values[f"{n}_I"] = -suspend(lifted.differential(n))
        for k in (0, 1):
            endpoint = base.endpoint(k)
            copy = algebra.zero()
            for j, a in M.coefficients(M.differential(n)).items():
                copy = copy + algebra.transport(endpoint(a)) * algebra.gen(f"{j}_{k}")
            values[f"{n}_{k}"] = copy + suspend(phi[f"{n}_{k}"])
    return CellModule(cyl, gens, values, name=f"Path({M.name})")


def cylinder_ce(X: FatCdga, cfg: Optional[FactorizationConfig] = None) -> CylinderWitness:
    """Factor the fold map of ``X`` as a cofibration followed by a weak equivalence.

    The cylinder ``C`` lives over ``Cyl(A)`` with dual generators ``θ_I``,
    ``θ_0`` and ``θ_1`` for each dual generator ``θ`` of ``X``. On the
    ``_0`` and ``_1`` copies its differential is that of ``X``. Weight 0 is
    the dual of a path module over ``Cyl(A)``: the linear part of ``X`` is
    lifted along ``Cyl(A) -> A``, the fold map of its endpoint copies is lifted
    to a chain map ``φ`` into it, and the path module is the cocone of ``φ``.
    Each higher weight is solved exactly so that ``d² = 0`` and the projection
    to ``X`` still intertwines.

    Raises:
        ArgumentError: If ``cfg`` asks for a different weight cutoff.
        InvalidComplexError: If the linear part of ``X`` is not a dual cell module.
        WindowTooSmallError: If some weight has no solution within the base length.
    """
    cfg = cfg or FactorizationConfig()
    if cfg.max_weight is not None and cfg.max_weight != X.max_weight:
        raise ArgumentError(f"input is cut at weight {X.max_weight}, not {cfg.max_weight}")
    W, L = X.max_weight, cfg.base_length
    M = primal_of(linear_part_of_differential(X))
    U, _, _ = coproduct(X.renamed("_0"), X.renamed("_1"))
    base = base_cylinder(X.base, L, cfg.max_solve_dim)
    cyl = base.cylinder.algebra
    duals = X.dual_generators
    gens = (
        [(f"{t.name}_I", t.degree - 1) for t in duals]
        + [(f"{t.name}_0", t.degree) for t in duals]
        + [(f"{t.name}_1", t.degree) for t in duals]
    )
    algebra = GradedAlgebra(cyl.generators + tuple(Generator(n, d, 1) for n, d in gens), W)
    values = {n: algebra.transport(base.cylinder.differential(n)) for n in base.cylinder.names}
    values.update({n: algebra.transport(U.differential(n)) for n in U.algebra.names})

    lifted = lift_differential(base.projection, M, L, cfg.max_solve_dim)
    path = _cocone(M, lifted, base, _fold_lift(M, lifted, base, cfg))
    dual = dualize_cell(path)
    assembly = {}
    for t in duals:
        name = f"{t.name}_I"
        values[name] = algebra.transport(dual.differential(name))
        assembly[name] = values[name]
        logger.debug(f"d0({name}) = {values[name]}")

    project = AlgebraMap(algebra, X.algebra, _cylinder_projection(X, algebra))
    unknown = set(base.s_names()) | {f"{t.name}_I" for t in duals}
    unknown_gens = [g for g in algebra.generators if g.name in unknown]
    log: List[ObstructionStep] = []
    if W > 0:
        logger.info("each weight is solved against the two-term fibre complex with differential [-, d0]")
    for n in tqdm(range(1, W + 1), desc="cylinder weights", disable=not cfg.progress):
        active = [g for g in unknown_gens if g.weight + n <= W]
        D = DerivationOverMorphism(algebra, algebra, 1, values)
        D0 = _component(algebra, values, 0)
        obstruction = {g.name: D(values[g.name]).weight_part(g.weight + n) for g in active}
        low = {g.name: D0.value(g.name) for g in active}
        mentioned = {name: set(value.mentions()) for name, value in low.items()}
        candidates: List[Tuple[str, Element]] = []
        contributions = []
        for g in active:
            k = algebra.index[g.name]
            for m in algebra.monomials(degree=g.degree + 1, weight=g.weight + n, max_length=L):
                c = algebra.monomial(m)
                delta = DerivationOverMorphism(algebra, algebra, 1, {g.name: c})
                column = []
                for h in active:
                    effect = delta(low[h.name]) if k in mentioned[h.name] else algebra.zero()
                    if h.name == g.name:
                        effect = effect + D0(c)
                    column.append(effect)
                column.extend(project(c) if h.name == g.name else X.algebra.zero() for h in active)
                candidates.append((g.name, c))
                contributions.append(column)
        targets = [-obstruction[h.name] for h in active] + [X.algebra.zero() for _ in active]
        failing = next((h for h in active if not obstruction[h.name].is_zero()), None)
        logger.debug(f"weight {n}: {len(candidates)} unknowns for {len(active)} generators")
        solution = _solve(
            contributions,
            targets,
            cfg,
            f"cylinder obstruction at weight {n}",
            n,
            None if failing is None else failing.degree + 2,
        )
        correction = {h.name: algebra.zero() for h in active}
        for (name, c), u in zip(candidates, solution):
            if u:
                correction[name] = correction[name] + c * u
        for name, value in correction.items():
            values[name] = values[name] + value
        log.append(
            ObstructionStep(
                n,
                len(candidates),
                {k: v for k, v in obstruction.items() if not v.is_zero()},
                {k: v for k, v in correction.items() if not v.is_zero()},
            )
        )

    C = FatCdga(base.cylinder, gens, {n: values[n] for n in algebra.names}, W, X.shift, name=f"Cyl({X.name})")
    i = FatMorphism(U, C, {}, name="i")
    p = FatMorphism(C, X, _cylinder_projection(X, algebra), name="p")
    weq = is_weak_equivalence(p, cfg)
    checks: Dict[str, Verdict] = {
        "square_zero": square_zero_check(C).passed,
        "i_morphism": check_fat_morphism(i).passed,
        "p_morphism": check_fat_morphism(p).passed,
        "i_cofibration": is_cofibration(i),
        "fold": same_morphism(compose_fat_morphisms(p, i), fold_morphism(X)),
        "weak_equivalence": weq.verdict,
    }
    logger.info(f"cylinder of {X.name or 'input'} through weight {W}: {checks}")
    return CylinderWitness(X, U, base, C, i, p, assembly, log, path, weq, checks)


# derivations into a dual module versus homs into derivations

Label = Tuple[str, str, Monomial]


def _parity(n: int) -> int:
    return -1 if n % 2 else 1


class _DerHomSides:
    """``Der_p(A, M^∨)`` and ``Hom_B(M, Der_p(A, B))`` with coefficients cut at a base length.

    Left labels ``(x, m, t)`` stand for the derivation ``x -> t·m^∨``; right
    labels ``(m, x, t)`` for the map sending ``m`` to the derivation ``x -> t``.
    """

    def __init__(self, p: DgcaMorphism, module: CellModule, base_length: int):
        if module.base.algebra.generators != p.target.algebra.generators:
            raise ArgumentError("the module does not live over the target of the map")
        self.p = p
        self.module = module
        self.dual = dualize_cell(module)
        B = p.target.algebra
        self.by_degree: Dict[int, List[Monomial]] = {}
        for t in B.monomials(max_length=base_length):
            self.by_degree.setdefault(B.monomial_degree(t), []).append(t)
        self.into_dual = AlgebraMap(
            p.source.algebra,
            self.dual.algebra,
            {x: self.dual.algebra.transport(p.image(x)) for x in p.source.names},
        )

    def labels(self, n: int, side: str) -> List[Label]:
        A, M = self.p.source, self.module
        if side == "left":
            return [
                (x.name, m, t)
                for x in A.generators
                for m in M.names
                for t in self.by_degree.get(x.degree + n + M.degree(m), [])
            ]
        return [
            (m, x.name, t)
            for m in M.names
            for x in A.generators
            for t in self.by_degree.get(x.degree + n + M.degree(m), [])
        ]

    def support(self) -> Optional[Tuple[int, int]]:
        degrees = [
            d - x.degree - self.module.degree(m)
            for d in self.by_degree
            for x in self.p.source.generators
            for m in self.module.names
        ]
        return (min(degrees), max(degrees)) if degrees else None

    def _left_d(self, n: int, label: Label) -> Dict[Label, Fraction]:
        x_b, m_i, t = label
        A, dual = self.p.source, self.dual
        value = dual.algebra.transport(self.p.target.algebra.monomial(t)) * dual.algebra.gen(m_i)
        phi = DerivationOverMorphism(A.algebra, dual.algebra, n, {x_b: value}, along=self.into_dual)
        out: Dict[Label, Fraction] = {}
        for x_c in A.names:
            image = phi(A.differential(x_c)) * -_parity(n)
            if x_c == x_b:
                image = image + dual.d(value)
            for m_k, beta in dual.coefficients(image).items():
                for t2, c in beta.terms.items():
                    out[(x_c, m_k, t2)] = out.get((x_c, m_k, t2), Fraction(0)) + c
        return out

    def _right_d(self, n: int, label: Label) -> Dict[Label, Fraction]:
        m_j, x_b, t = label
        A, B, M = self.p.source, self.p.target, self.module
        tb = B.algebra.monomial(t)
        e = n + M.degree(m_j)
        delta = DerivationOverMorphism(A.algebra, B.algebra, e, {x_b: tb}, along=self.p.map)
        out: Dict[Label, Fraction] = {}

        def add(m: str, x: str, element: Element) -> None:
            for t2, c in element.terms.items():
                out[(m, x, t2)] = out.get((m, x, t2), Fraction(0)) + c

        for x_c in A.names:
            image = delta(A.differential(x_c)) * -_parity(e)
            if x_c == x_b:
                image = image + B.d(tb)
            add(m_j, x_c, image)
        for m_l in M.names:
            c = M.coefficients(M.differential(m_l)).get(m_j)
            if c is None or c.is_zero():
                continue
            add(m_l, x_b, c * tb * (-_parity(n) * _parity(n * c.degree())))
        return out

    def complex(self, side: str, window: DegreeWindow) -> FiniteComplex:
        step = self._left_d if side == "left" else self._right_d
        bases = {n: self.labels(n, side) for n in window.degrees()}
        differentials = {}
        for n in window.degrees():
            if n + 1 not in bases:
                continue
            index = {label: r for r, label in enumerate(bases[n + 1])}
            entries = {}
            for col, label in enumerate(bases[n]):
                for key, c in step(n, label).items():
                    row = index.get(key)
                    if row is not None and c:
                        entries[(row, col)] = c
            differentials[n] = RationalMatrix(len(bases[n + 1]), len(bases[n]), entries)
        return FiniteComplex(window, bases, differentials, self.support())


def _natural_map(left: FiniteComplex, right: FiniteComplex, n: int) -> RationalMatrix:
    index = {label: r for r, label in enumerate(right.bases.get(n, []))}
    entries = {}
    for col, (x, m, t) in enumerate(left.bases.get(n, [])):
        row = index.get((m, x, t))
        if row is not None:
            entries[(row, col)] = Fraction(1)
    return RationalMatrix(right.dim(n), left.dim(n), entries)


@dataclass
class DerHomWitness:
    window: DegreeWindow
    dims_left: Dict[int, int]
    dims_right: Dict[int, int]
    bijective: Dict[int, bool]
    cohomology_left: Dict[int, Union[int, str]]
    cohomology_right: Dict[int, Union[int, str]]
    certified: List[int]
    passed: bool


def der_hom_transport(
    p: DgcaMorphism,
    M: CellModule,
    window: Optional[DegreeWindow] = None,
    base_length: int = config.DEFAULT_BASE_LENGTH,
) -> DerHomWitness:
    """Compare ``Der_p(A, M^∨)`` with ``Hom_B(M, Der_p(A, B))`` degree by degree.

    The natural map matches ``x -> t·m^∨`` with ``m -> (x -> t)``. It is
    certified bijective on bases by rank, and the two differentials are
    certified to have the same cohomology in every interior degree of the
    window. Boundary degrees are not certified.
    """
    window = window or DegreeWindow(*config.DEFAULT_DEGREE_WINDOW)
    sides = _DerHomSides(p, M, base_length)
    left = sides.complex("left", window)
    right = sides.complex("right", window)
    bijective = {}
    for n in window.degrees():
        natural = _natural_map(left, right, n)
        bijective[n] = left.dim(n) == right.dim(n) == rank(natural)
    h_left = cohomology_dims(left)
    h_right = cohomology_dims(right)
    certified = list(window.interior())
    passed = all(bijective.values()) and all(h_left[n] == h_right[n] for n in certified)
    logger.debug(f"Der-Hom cohomology {h_left} against {h_right}")
    return DerHomWitness(
        window,
        {n: left.dim(n) for n in window.degrees()},
        {n: right.dim(n) for n in window.degrees()},
        bijective,
        h_left,
        h_right,
        certified,
        passed,
    )


@dataclass
class NaturalityReport:
    left_chain_map: bool
    right_chain_map: bool
    commutes: bool

    @property
    def passed(self) -> bool:
        return self.left_chain_map and self.right_chain_map and self.commutes


def _push_coefficients(q: DgcaMorphism, source: FiniteComplex, target: FiniteComplex, n: int) -> RationalMatrix:
    index = {label: r for r, label in enumerate(target.bases.get(n, []))}
    entries = {}
    for col, (a, b, t) in enumerate(source.bases.get(n, [])):
        for t2, c in q.map.apply_monomial(t).terms.items():
            row = index.get((a, b, t2))
            if row is not None:
                entries[(row, col)] = entries.get((row, col), Fraction(0)) + c
    return RationalMatrix(target.dim(n), source.dim(n), entries)


def _is_chain_map(source: FiniteComplex, target: FiniteComplex, F: Dict[int, RationalMatrix]) -> bool:
    window = source.window
    for n in window.degrees():
        if n + 1 > window.hi:
            continue
        if (target.d(n) @ F[n]).to_dense() != (F[n + 1] @ source.d(n)).to_dense():
            return False
    return True


def der_hom_naturality(
    p: DgcaMorphism,
    q: DgcaMorphism,
    M: CellModule,
    window: Optional[DegreeWindow] = None,
    base_length: int = config.DEFAULT_BASE_LENGTH,
) -> NaturalityReport:
    """Check the Der–Hom comparison against a base map ``q: B -> B'``.

    Pushing coefficients along ``q`` must be a chain map on both sides, and
    the natural maps for ``(p, M)`` and ``(q∘p, q_*M)`` must commute with it.
    """
    window = window or DegreeWindow(*config.DEFAULT_DEGREE_WINDOW)
    src = _DerHomSides(p, M, base_length)
    tgt = _DerHomSides(compose_maps(q, p), base_change(q, M), base_length)
    complexes = {}
    pushes = {}
    for side in ("left", "right"):
        S, T = src.complex(side, window), tgt.complex(side, window)
        complexes[side] = (S, T)
        pushes[side] = {n: _push_coefficients(q, S, T, n) for n in window.degrees()}
    (left_src, left_tgt), (right_src, right_tgt) = complexes["left"], complexes["right"]
    left_chain = _is_chain_map(left_src, left_tgt, pushes["left"])
    right_chain = _is_chain_map(right_src, right_tgt, pushes["right"])
    commutes = True
    for n in window.degrees():
        via_left = _natural_map(left_tgt, right_tgt, n) @ pushes["left"][n]
        via_right = pushes["right"][n] @ _natural_map(left_src, right_src, n)
        if via_left.to_dense() != via_right.to_dense():
            commutes = False
    return NaturalityReport(left_chain, right_chain, commutes)
