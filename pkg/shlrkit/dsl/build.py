"""Turn a parsed model file into dgcas, modules, pairs and morphisms."""

import logging
from contextlib import contextmanager
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from shlrkit import config
from shlrkit.dgca import CellModule, DgcaMorphism, SemiFreeDgca
from shlrkit.dsl.model import (
    AlgebraDecl,
    BracketsDecl,
    MapDecl,
    ModelFile,
    ModuleDecl,
    Position,
)
from shlrkit.dsl.parser import GROUND
from shlrkit.errors import ModelError, NameResolutionError, ShlrError
from shlrkit.shlr import Multiderivation, SHLRPair, ce_from_pair
from shlrkit.weighted import FatCdga, FatMorphism


@contextmanager
def _at(position: Optional[Position]):
    """Re-raise core errors as model errors at ``position``."""
    try:
        yield
    except ModelError:
        raise
    except ShlrError as e:
        if position is None:
            raise ModelError(str(e)) from e
        raise ModelError(str(e), position.line, position.column) from e


@dataclass
class ModelObjects:
    """Objects declared in a model file, built at the effective settings."""

    settings: config.Settings
    algebras: Dict[str, SemiFreeDgca] = field(default_factory=dict)
    modules: Dict[str, CellModule] = field(default_factory=dict)
    shifts: Dict[str, int] = field(default_factory=dict)
    pairs: Dict[str, SHLRPair] = field(default_factory=dict)
    maps: Dict[str, DgcaMorphism] = field(default_factory=dict)
    morphisms: Dict[str, FatMorphism] = field(default_factory=dict)
    order: List[Tuple[str, str]] = field(default_factory=list)
    logger: logging.Logger = field(init=False, repr=False)
    _ce: Dict[Tuple[str, bool], FatCdga] = field(default_factory=dict, repr=False)

    def __post_init__(self):
        self.logger = logging.getLogger(self.__class__.__name__)

    def kind(self, name: str) -> str:
        for kind, declared in self.order:
            if declared == name:
                return kind
        if name == GROUND:
            return "algebra"
        raise NameResolutionError(f"no object named {name!r}")

    def last(self, *kinds: str) -> Optional[str]:
        """Name of the last declaration of one of ``kinds``."""
        for kind, name in reversed(self.order):
            if kind in kinds:
                return name
        return None

    def pair(self, name: str) -> SHLRPair:
        """The pair named ``name``; a bare module gives the pair with no brackets."""
        if name in self.pairs:
            return self.pairs[name]
        if name in self.modules:
            W = self.settings.weight_cutoff
            return SHLRPair(self.modules[name], [], cutoff=W, shift=self.shifts[name], name=name)
        raise NameResolutionError(f"{name!r} is not a module or a bracket declaration")

    def ce(self, name: str, validate: bool = True) -> FatCdga:
        """The CE fat cdga of a pair or module, or an algebra as a fat cdga with no dual generators."""
        key = (name, validate)
        if key not in self._ce:
            W = self.settings.weight_cutoff
            if name in self.algebras:
                self._ce[key] = FatCdga(self.algebras[name], [], {}, W, name=name)
            else:
                self._ce[key] = ce_from_pair(self.pair(name), W, validate=validate)
        return self._ce[key]


def _layers(decl: BracketsDecl, module: CellModule) -> List[Multiderivation]:
    brackets: Dict[int, dict] = {}
    anchors: Dict[int, dict] = {}
    for entry in decl.brackets:
        weight = len(entry.word) - 1
        if weight == 0:
            raise ModelError(
                "one-argument brackets are the module differential", entry.position.line, entry.position.column
            )
        table = brackets.setdefault(weight, {})
        if entry.word in table:
            raise ModelError(f"duplicate bracket {list(entry.word)}", entry.position.line, entry.position.column)
        table[entry.word] = entry.expr
    for entry in decl.anchors:
        slot = anchors.setdefault(len(entry.word), {}).setdefault(entry.word, {})
        if entry.target in slot:
            raise ModelError(
                f"duplicate anchor {list(entry.word)} at {entry.target!r}", entry.position.line, entry.position.column
            )
        slot[entry.target] = entry.expr
    layers = []
    for weight in sorted(set(brackets) | set(anchors)):
        with _at(decl.position):
            layers.append(Multiderivation(module, weight, brackets.get(weight), anchors.get(weight)))
    return layers


def build_model(model: ModelFile, settings: Optional[config.Settings] = None) -> ModelObjects:
    """Build every declaration of ``model``.

    Raises:
        ModelError: If a declaration is rejected by the algebra layer, for
            example a differential that does not square to zero.
    """
    settings = settings or config.resolve_settings(model_config=model.config, environ={})
    objects = ModelObjects(settings)
    objects.algebras[GROUND] = SemiFreeDgca.ground()
    W = settings.weight_cutoff
    for decl in model.declarations:
        if isinstance(decl, AlgebraDecl):
            with _at(decl.position):
                objects.algebras[decl.name] = SemiFreeDgca(
                    [(g.name, g.degree) for g in decl.generators],
                    {a.name: a.expr for a in decl.differentials},
                    name=decl.name,
                )
            objects.order.append(("algebra", decl.name))
        elif isinstance(decl, ModuleDecl):
            with _at(decl.position):
                objects.modules[decl.name] = CellModule(
                    objects.algebras[decl.base],
                    [(g.name, g.degree - decl.shift) for g in decl.generators],
                    {a.name: a.expr for a in decl.differentials},
                    name=decl.name,
                )
            objects.shifts[decl.name] = decl.shift
            objects.order.append(("module", decl.name))
        elif isinstance(decl, BracketsDecl):
            module = objects.modules[decl.module]
            layers = _layers(decl, module)
            cutoff = max([W] + [layer.weight for layer in layers])
            with _at(decl.position):
                objects.pairs[decl.name] = SHLRPair(
                    module, layers, cutoff=cutoff, shift=objects.shifts[decl.module], name=decl.name
                )
            objects.order.append(("pair", decl.name))
        elif isinstance(decl, MapDecl) and decl.kind == "map":
            with _at(decl.position):
                objects.maps[decl.name] = DgcaMorphism(
                    objects.algebras[decl.source],
                    objects.algebras[decl.target],
                    {a.name: a.expr for a in decl.images},
                    name=decl.name,
                )
            objects.order.append(("map", decl.name))
        elif isinstance(decl, MapDecl):
            with _at(decl.position):
                objects.morphisms[decl.name] = FatMorphism(
                    objects.ce(decl.source),
                    objects.ce(decl.target),
                    {a.name: a.expr for a in decl.images},
                    name=decl.name,
                )
            objects.order.append(("morphism", decl.name))
    objects.logger.debug(f"built {len(objects.order)} objects at weight cutoff {W}")
    return objects
