"""Pattern layer: terms extended with three kinds of variables.

Term variables (written ``$X``) stand for whole parallel sub-multisets,
sequence variables (``~x``) for element sub-sequences, element variables
(``?x``) for single elements. Term and sequence variables may bind the
empty value; element variables may not.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import lru_cache
from typing import Union

from .terms import Seq, Loop, Term


class VarKind(enum.Enum):
    TERM = "term"
    SEQ = "seq"
    ELEM = "elem"


_SIGIL = {VarKind.TERM: "$", VarKind.SEQ: "~", VarKind.ELEM: "?"}


@dataclass(frozen=True)
class Var:
    kind: VarKind
    name: str

    def __str__(self) -> str:
        return _SIGIL[self.kind] + self.name


@dataclass(frozen=True)
class ElemLit:
    """A concrete element inside a sequence pattern."""
    name: str


@dataclass(frozen=True)
class ElemVar:
    """Element variable occurrence inside a sequence pattern."""
    name: str


@dataclass(frozen=True)
class SeqVar:
    """Sequence variable occurrence inside a sequence pattern."""
    name: str


SeqAtom = Union[ElemLit, ElemVar, SeqVar]


@dataclass(frozen=True)
class PSeq:
    """Sequence pattern: a non-empty run of atoms."""
    atoms: tuple[SeqAtom, ...]


@dataclass(frozen=True)
class PLoop:
    """Loop pattern: membrane sequence pattern wrapping an inner pattern."""
    membrane: PSeq
    content: "Pattern"


@dataclass(frozen=True)
class PTermVar:
    """Term variable occurring as a parallel item."""
    name: str


PatternItem = Union[PSeq, PLoop, PTermVar]


@dataclass(frozen=True)
class Pattern:
    """A parallel multiset of pattern items. Ground terms are the special
    case with no variables."""
    items: tuple[PatternItem, ...]


# -- construction helpers ---------------------------------------------------

def lits(*names: str) -> PSeq:
    return PSeq(tuple(ElemLit(n) for n in names))


def tvar(name: str) -> PTermVar:
    return PTermVar(name)


def svar(name: str) -> SeqVar:
    return SeqVar(name)


def evar(name: str) -> ElemVar:
    return ElemVar(name)


def pat(*items: PatternItem) -> Pattern:
    return Pattern(tuple(items))


def term_to_pattern(t: Term) -> Pattern:
    items: list[PatternItem] = []
    for comp in t.components:
        if isinstance(comp, Seq):
            items.append(lits(*comp.elems))
        else:
            items.append(PLoop(lits(*comp.membrane),
                               term_to_pattern(comp.content)))
    return Pattern(tuple(items))


def pattern_to_term(p: Pattern) -> Term:
    """Convert a ground pattern back to a term; raises on variables."""
    comps: list[Union[Seq, Loop]] = []
    for item in p.items:
        if isinstance(item, PSeq):
            comps.append(Seq(_ground_names(item)))
        elif isinstance(item, PLoop):
            comps.append(Loop(_ground_names(item.membrane),
                              pattern_to_term(item.content)))
        else:
            raise ValueError(f"pattern is not ground: ${item.name}")
    return Term(comps)


def _ground_names(ps: PSeq) -> tuple[str, ...]:
    names = []
    for atom in ps.atoms:
        if not isinstance(atom, ElemLit):
            raise ValueError("pattern is not ground")
        names.append(atom.name)
    return tuple(names)


# -- variable inventory -----------------------------------------------------

def pattern_vars(p: Pattern) -> tuple[Var, ...]:
    """Variables of the pattern in first-occurrence order."""
    seen: dict[Var, None] = {}

    def seq_vars(ps: PSeq) -> None:
        for atom in ps.atoms:
            if isinstance(atom, ElemVar):
                seen.setdefault(Var(VarKind.ELEM, atom.name))
            elif isinstance(atom, SeqVar):
                seen.setdefault(Var(VarKind.SEQ, atom.name))

    def walk(pp: Pattern) -> None:
        for item in pp.items:
            if isinstance(item, PTermVar):
                seen.setdefault(Var(VarKind.TERM, item.name))
            elif isinstance(item, PSeq):
                seq_vars(item)
            else:
                seq_vars(item.membrane)
                walk(item.content)

    walk(p)
    return tuple(seen)


def is_ground(p: Pattern) -> bool:
    return not pattern_vars(p)


@lru_cache(maxsize=1024)
def seq_positioned_elem_vars(p: Pattern) -> frozenset[str]:
    """Element variables that sit inside a longer sequence or a membrane.

    Position-aware counting tags such occurrences seq(t); an element
    variable standing alone as a parallel item counts as a basic type.
    """
    out: set[str] = set()

    def scan(ps: PSeq, in_membrane: bool) -> None:
        longer = in_membrane or len(ps.atoms) > 1
        for atom in ps.atoms:
            if isinstance(atom, ElemVar) and longer:
                out.add(atom.name)

    def walk(pp: Pattern) -> None:
        for item in pp.items:
            if isinstance(item, PSeq):
                scan(item, False)
            elif isinstance(item, PLoop):
                scan(item.membrane, True)
                walk(item.content)

    walk(p)
    return frozenset(out)


def pattern_elements(p: Pattern) -> set[str]:
    """Concrete element names occurring anywhere in the pattern."""
    out: set[str] = set()

    def scan(ps: PSeq) -> None:
        for atom in ps.atoms:
            if isinstance(atom, ElemLit):
                out.add(atom.name)

    def walk(pp: Pattern) -> None:
        for item in pp.items:
            if isinstance(item, PSeq):
                scan(item)
            elif isinstance(item, PLoop):
                scan(item.membrane)
                walk(item.content)

    walk(p)
    return out
