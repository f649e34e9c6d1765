"""The commands of the ``shlrkit`` tool.

Each command reads named objects of a model file, runs one construction or
check, and fills a ``Report``. ``CommandFactory`` maps command names to
command classes.
"""

import logging
from dataclasses import dataclass, field
from typing import Any, ClassVar, Dict, List, Optional, Sequence, Tuple, Type

from shlrkit import config
from shlrkit.cofib import (
    FactorizationConfig,
    coproduct,
    cone_verdict,
    cylinder_ce,
    der_hom_naturality,
    der_hom_transport,
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
from shlrkit.dgca import (
    CellModule,
    base_change,
    check_dgca_map,
    dualize_cell,
    lift_differential,
    primal_of,
    truncated_complex,
)
from shlrkit.dsl.build import ModelObjects
from shlrkit.dsl.model import BracketsDecl, MapDecl, ModelFile, ModuleDecl
from shlrkit.dsl.parser import GROUND
from shlrkit.dsl.printer import print_model
from shlrkit.errors import ArgumentError, ComputationError, NameResolutionError, ShlrError
from shlrkit.linalg import DegreeWindow, cohomology_dims
from shlrkit.report import Report
from shlrkit.shlr import ce_from_pair, check_multider_leibniz, multider_square, pair_from_ce
from shlrkit.weighted import (
    FatMorphism,
    check_fat_morphism,
    compose_fat_morphisms,
    linear_part_of_differential,
    linear_part_of_morphism,
    square_zero_check,
)

PAIRS = ("pair", "module")


def _differentials(X) -> Dict[str, str]:
    return {name: str(X.differential(name)) for name in X.algebra.names}


def _morphism_report(g: FatMorphism) -> Dict[str, Any]:
    check = check_fat_morphism(g)
    return {
        "passed": check.passed,
        "reason": check.reason,
        "generator": check.generator,
        "witness": check.witness,
    }


def _weq_witness(verdict) -> Dict[str, Any]:
    return {
        part.part: {"verdict": part.verdict, "cohomology": part.cohomology, "complete": part.complete}
        for part in verdict.parts
    }


def _dependencies(model: ModelFile, names: Sequence[str]) -> List[str]:
    """``names`` and every declaration they refer to, in file order."""
    needed = set()
    stack = [n for n in names if n != GROUND]
    while stack:
        name = stack.pop()
        if name in needed:
            continue
        needed.add(name)
        decl = model.find(name)
        refs: List[str] = []
        if isinstance(decl, ModuleDecl):
            refs = [decl.base]
        elif isinstance(decl, BracketsDecl):
            refs = [decl.module]
        elif isinstance(decl, MapDecl):
            refs = [decl.source, decl.target]
        stack.extend(r for r in refs if r != GROUND)
    return [d.name for d in model.declarations if getattr(d, "name", None) in needed]


@dataclass
class Command:
    """Base class of commands.

    Subclasses set ``name`` and ``slots``: one tuple of accepted object kinds
    per positional object name. Slots listed in ``optional`` are only filled
    when given.
    """

    model: ModelFile
    objects: ModelObjects
    names: List[str] = field(default_factory=list)
    progress: bool = False
    logger: Any = field(init=False, repr=False)

    name: ClassVar[str] = ""
    slots: ClassVar[Tuple[Tuple[str, ...], ...]] = ()
    optional: ClassVar[int] = 0

    def __post_init__(self):
        self.logger = logging.getLogger(self.__class__.__name__)

    @property
    def settings(self) -> config.Settings:
        return self.objects.settings

    def factorization_config(self) -> FactorizationConfig:
        return FactorizationConfig.from_settings(self.settings, self.progress)

    def resolve(self) -> List[Optional[str]]:
        """Object names per slot, filling missing required slots with the last suitable declarations.

        Raises:
            ArgumentError: If too many names are given or a slot stays empty.
            NameResolutionError: If a name is unknown or of the wrong kind.
        """
        if len(self.names) > len(self.slots):
            raise ArgumentError(f"{self.name} takes at most {len(self.slots)} object names")
        chosen: List[Optional[str]] = list(self.names) + [None] * (len(self.slots) - len(self.names))
        required = len(self.slots) - self.optional
        for k in reversed(range(required)):
            if chosen[k] is not None:
                continue
            candidates = [n for kind, n in reversed(self.objects.order) if kind in self.slots[k]]
            fresh = [n for n in candidates if n not in chosen]
            if not candidates:
                raise ArgumentError(f"{self.name} needs a {' or '.join(self.slots[k])} declaration")
            chosen[k] = (fresh or candidates)[0]
        for k, n in enumerate(chosen):
            if n is None:
                continue
            kind = self.objects.kind(n)
            if kind not in self.slots[k]:
                raise NameResolutionError(f"{n!r} is a {kind}; {self.name} expects a {' or '.join(self.slots[k])}")
        return chosen

    def run(self) -> Report:
        names = self.resolve()
        given = [n for n in names if n is not None]
        self.logger.info(f"running {self.name} on {', '.join(given)}")
        text = print_model(ModelFile([self.model.find(n) for n in _dependencies(self.model, given)]))
        report = Report(self.name, self.settings.as_dict(), inputs={"objects": given, "model": text})
        self.execute(report, *names)
        return report

    def execute(self, report: Report, *names: Optional[str]) -> None:
        raise NotImplementedError()


class CheckD2(Command):
    """Square-zero check of a CE complex, with the bracket-side defects per weight."""

    name = "check-d2"
    slots = (("pair", "module", "algebra"),)

    def execute(self, report, target):
        if self.objects.kind(target) == "algebra":
            report.verdicts["square_zero"] = True
            report.witnesses["differential"] = _differentials(self.objects.algebras[target])
            return
        X = self.objects.ce(target, validate=False)
        check = square_zero_check(X)
        report.verdicts["square_zero"] = check.passed
        report.witnesses["square_zero"] = {
            "through_weight": check.through_weight,
            "weight": check.weight,
            "degree": check.degree,
            "generator": check.generator,
            "defect": check.witness,
        }
        pair = self.objects.pair(target)
        defects = {}
        for k in range(min(X.max_weight, pair.cutoff) + 1):
            defect = multider_square(pair, k)
            # brackets on W + 1 arguments do not survive in the CE complex
            if k == X.max_weight:
                defect.brackets = {}
            first = defect.first()
            if first is not None:
                kind, word, value = first
                defects[k] = {"kind": kind, "word": list(word), "value": value}
        report.witnesses["bracket_defects"] = defects
        report.verdicts["brackets_agree"] = (not defects) == check.passed
        for weight in sorted(pair.layers):
            if weight == 0 or weight > X.max_weight:
                continue
            leibniz = check_multider_leibniz(pair, weight, seed=self.settings.seed)
            report.verdicts[f"leibniz_{weight}"] = leibniz.passed
            if leibniz.witness:
                report.witnesses[f"leibniz_{weight}"] = leibniz.witness


class Ce(Command):
    """The CE fat cdga of a pair."""

    name = "ce"
    slots = (PAIRS,)

    def execute(self, report, target):
        X = self.objects.ce(target, validate=False)
        report.witnesses["generators"] = {g.name: g.degree for g in X.algebra.generators}
        report.witnesses["differential"] = _differentials(X)
        report.verdicts["square_zero"] = square_zero_check(X).passed


class ExtractBrackets(Command):
    """Read the brackets and anchors back off the CE differential."""

    name = "extract-brackets"
    slots = (PAIRS,)

    def execute(self, report, target):
        X = self.objects.ce(target, validate=False)
        pair = pair_from_ce(X)
        layers = {}
        for weight in sorted(pair.layers):
            layer = pair.layers[weight]
            layers[weight] = {
                "brackets": {", ".join(w): str(v) for w, v in layer.bracket_table().items()},
                "anchors": {
                    ", ".join(w): {x: str(v) for x, v in values.items()} for w, values in layer.anchor_table().items()
                },
            }
        report.witnesses["layers"] = layers
        report.verdicts["round_trip"] = ce_from_pair(pair, X.max_weight, validate=False) == X


class LinearPart(Command):
    """Linear part of a CE differential, or of a morphism."""

    name = "linear-part"
    slots = (("pair", "module", "morphism"),)

    def execute(self, report, target):
        if self.objects.kind(target) == "morphism":
            lin = linear_part_of_morphism(self.objects.morphisms[target])
            report.witnesses["images"] = {n: str(v) for n, v in lin.images.items()}
            report.verdicts["chain_map"] = lin.commutes()
            return
        dual = linear_part_of_differential(self.objects.ce(target))
        report.witnesses["differential"] = {n: str(dual.differential(n)) for n in dual.names}
        report.verdicts["dual_round_trip"] = dualize_cell(primal_of(dual)) == dual


class Cohomology(Command):
    """Cohomology of the base and of the module inside the degree window."""

    name = "cohomology"
    slots = (("pair", "module", "algebra"),)

    def execute(self, report, target):
        window = DegreeWindow(*self.settings.degree_window)
        L = self.settings.base_length
        if self.objects.kind(target) == "algebra":
            base, module = self.objects.algebras[target], None
        else:
            module = self.objects.pair(target).module
            base = module.base
        parts = {"base": truncated_complex(base.algebra, base.d, window, L, [0])}
        if module is not None:
            parts["module"] = truncated_complex(module.algebra, module.d, window, L, [1])
        for part, C in parts.items():
            report.witnesses[part] = {"cohomology": cohomology_dims(C), "complete": C.complete_interior()}
            report.verdicts[f"{part}_complete"] = C.complete_interior()


class Weq(Command):
    """Weak-equivalence verdict for a CE morphism or a dgca map."""

    name = "weq"
    slots = (("morphism", "map"),)

    def execute(self, report, target):
        g = self.objects.morphisms.get(target) or self.objects.maps[target]
        verdict = is_weak_equivalence(g, self.factorization_config())
        report.verdicts["weak_equivalence"] = verdict.verdict
        report.witnesses["parts"] = _weq_witness(verdict)


class Coproduct(Command):
    name = "coproduct"
    slots = (("pair", "module", "algebra"), ("pair", "module", "algebra"))

    def execute(self, report, left, right):
        P, in_1, in_2 = coproduct(self.objects.ce(left), self.objects.ce(right))
        report.witnesses["differential"] = _differentials(P)
        report.verdicts["square_zero"] = square_zero_check(P).passed
        for g in (in_1, in_2):
            report.witnesses[g.name] = _morphism_report(g)
            report.verdicts[f"{g.name}_morphism"] = check_fat_morphism(g).passed
            report.verdicts[f"{g.name}_cofibration"] = is_cofibration(g)


class Pushout(Command):
    """Pushout of ``Y <-f- X -g-> Z`` along the cofibration ``g``."""

    name = "pushout"
    slots = (("morphism",), ("morphism",))

    def execute(self, report, f_name, g_name):
        f, g = self.objects.morphisms[f_name], self.objects.morphisms[g_name]
        P, gamma, phi = pushout_along_cofibration(f, g)
        report.witnesses["differential"] = _differentials(P)
        report.verdicts["square_zero"] = square_zero_check(P).passed
        report.verdicts["gamma_morphism"] = check_fat_morphism(gamma).passed
        report.verdicts["phi_morphism"] = check_fat_morphism(phi).passed
        report.verdicts["square_commutes"] = same_morphism(
            compose_fat_morphisms(phi, g), compose_fat_morphisms(gamma, f)
        )
        cfg = self.factorization_config()
        g_weq = is_weak_equivalence(g, cfg)
        report.witnesses["g_weak_equivalence"] = g_weq.verdict
        if g_weq.passed:
            gamma_weq = is_weak_equivalence(gamma, cfg)
            report.verdicts["gamma_weak_equivalence"] = gamma_weq.verdict
            report.witnesses["gamma"] = _weq_witness(gamma_weq)


class Cylinder(Command):
    """Cylinder factorization of the fold map of a CE complex."""

    name = "cylinder"
    slots = (PAIRS,)

    def execute(self, report, target):
        witness = cylinder_ce(self.objects.ce(target), self.factorization_config())
        report.verdicts.update(witness.checks)
        report.witnesses["assembly"] = {n: str(v) for n, v in witness.assembly.items()}
        report.witnesses["base_corrections"] = {n: str(v) for n, v in witness.base.corrections.items()}
        report.witnesses["path"] = {n: str(witness.path.differential(n)) for n in witness.path.names}
        report.witnesses["differential"] = _differentials(witness.C)
        report.witnesses["weak_equivalence"] = _weq_witness(witness.weak_equivalence)
        report.obstruction_log = [
            {
                "weight": step.weight,
                "unknowns": step.unknowns,
                "obstruction": {n: str(v) for n, v in step.obstruction.items()},
                "correction": {n: str(v) for n, v in step.correction.items()},
            }
            for step in witness.obstruction_log
        ]


class Dualize(Command):
    """Dual of a cell module and the round trip back."""

    name = "dualize"
    slots = (("module", "pair"),)

    def execute(self, report, target):
        module = self.objects.pair(target).module
        dual = dualize_cell(module)
        report.witnesses["generators"] = {g.name: g.degree for g in dual.module_generators}
        report.witnesses["differential"] = {n: str(dual.differential(n)) for n in dual.names}
        report.verdicts["round_trip"] = primal_of(dual) == module


class Lift(Command):
    """Lift a cell module along a surjection of bases."""

    name = "lift"
    slots = (("map",), ("module",))

    def execute(self, report, p_name, module_name):
        p = self.objects.maps[p_name]
        module = self.objects.modules[module_name]
        report.verdicts["map"] = check_dgca_map(p).passed
        lifted = lift_differential(p, module, self.settings.base_length, self.settings.max_solve_dim)
        report.witnesses["differential"] = {n: str(lifted.differential(n)) for n in lifted.names}
        report.verdicts["pushes_back"] = base_change(p, lifted) == module


class Path(Command):
    """Path module of a cell module with its structure maps."""

    name = "path"
    slots = (("module", "pair"),)

    def execute(self, report, target):
        M: CellModule = self.objects.pair(target).module
        path = path_module(M)
        report.witnesses["generators"] = {g.name: g.degree for g in path.module_generators}
        report.witnesses["differential"] = {n: str(path.differential(n)) for n in path.names}
        inclusion = path_inclusion(M, path)
        report.verdicts["inclusion"] = module_map_commutes(inclusion, M, path)
        for k in (0, 1):
            report.verdicts[f"evaluation_{k}"] = module_map_commutes(path_evaluation(M, path, k), path, M)
        ends, projection = path_endpoints(M, path)
        report.verdicts["endpoints"] = module_map_commutes(projection, path, ends)
        cfg = self.factorization_config()
        part = cone_verdict("inclusion", M.algebra, M.d, path.algebra, path.d, inclusion, cfg, [1])
        report.verdicts["inclusion_weak_equivalence"] = part.verdict
        report.witnesses["inclusion"] = {"cohomology": part.cohomology, "complete": part.complete}


class DerHom(Command):
    """Compare derivations into a dual module with homs into derivations."""

    name = "der-hom"
    slots = (("map",), ("module",), ("map",))
    optional = 1

    def execute(self, report, p_name, module_name, q_name=None):
        p = self.objects.maps[p_name]
        module = self.objects.modules[module_name]
        window = DegreeWindow(*self.settings.degree_window)
        L = self.settings.base_length
        witness = der_hom_transport(p, module, window, L)
        report.verdicts["bijective"] = all(witness.bijective.values())
        report.verdicts["cohomology_agrees"] = witness.passed
        report.witnesses["dims"] = {"left": witness.dims_left, "right": witness.dims_right}
        report.witnesses["cohomology"] = {"left": witness.cohomology_left, "right": witness.cohomology_right}
        report.witnesses["certified_degrees"] = witness.certified
        if q_name is not None:
            naturality = der_hom_naturality(p, self.objects.maps[q_name], module, window, L)
            report.verdicts["naturality"] = naturality.passed
            report.witnesses["naturality"] = {
                "left_chain_map": naturality.left_chain_map,
                "right_chain_map": naturality.right_chain_map,
                "commutes": naturality.commutes,
            }


class CommandFactory:
    """Factory class for creating Command instances by name.

    Args:
        model: Parsed model file.
        objects: Objects built from ``model``.
        progress: Show progress bars.
    """

    command_classes: Dict[str, Type[Command]] = {
        cls.name: cls
        for cls in (
            CheckD2,
            Ce,
            ExtractBrackets,
            LinearPart,
            Cohomology,
            Weq,
            Coproduct,
            Pushout,
            Cylinder,
            Dualize,
            Lift,
            Path,
            DerHom,
        )
    }

    def __init__(self, model: ModelFile, objects: ModelObjects, progress: bool = False):
        self.model = model
        self.objects = objects
        self.progress = progress
        self.logger = logging.getLogger(__name__)

    @classmethod
    def names(cls) -> List[str]:
        return list(cls.command_classes)

    def create(self, command: str, names: Sequence[str] = ()) -> Command:
        """Creates the command called ``command`` acting on ``names``.

        Raises:
            ArgumentError: If no command has that name.
        """
        command_class = self.command_classes.get(command)
        if command_class is None:
            raise ArgumentError(f"unknown command {command!r}; choose from {', '.join(self.names())}")
        return command_class(self.model, self.objects, list(names), self.progress)


def run_command(
    command: str,
    model: ModelFile,
    objects: ModelObjects,
    names: Sequence[str] = (),
    progress: bool = False,
) -> Report:
    """Dispatch ``command`` on the objects of ``model`` and return its report.

    Raises:
        ComputationError: If the command fails with anything other than a ``ShlrError``.
    """
    runner = CommandFactory(model, objects, progress).create(command, names)
    try:
        return runner.run()
    except ShlrError:
        raise
    except Exception as e:
        runner.logger.debug(f"{command} failed", exc_info=True)
        raise ComputationError(f"{command} failed: {type(e).__name__}: {e}") from e
