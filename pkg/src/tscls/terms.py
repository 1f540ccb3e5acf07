"""Term algebra: element sequences, looping sequences and parallel multisets.

A term is a multiset of components; a component is either a flat element
sequence or a loop (a circular membrane sequence wrapping an inner term).
Structural congruence -- commutativity of parallel composition, neutrality
of the empty term, rotation of loop membranes -- is decided by reduction
to a canonical form: empty sequences are erased, membranes are stored in
their least rotation, and components are sorted by a total order (Seq
before Loop, then shortlex on element-name lists, loops further by
membrane then content).

All values are immutable; each node caches its sort key and hash at
construction so canonicalization and multiset operations stay cheap on
large states.
"""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass
from operator import attrgetter
from typing import Iterable, Iterator, Mapping, Optional, Union

from .errors import UnknownElementType, WellFormednessError

ELEMENT_NAME = re.compile(r"[A-Za-z][A-Za-z0-9_]*\Z")


def check_element_name(name: str) -> str:
    if name == "eps" or not ELEMENT_NAME.match(name):
        raise WellFormednessError(f"invalid element name {name!r}")
    return name


class Seq:
    """A flat, non-rotating element sequence used as a parallel component.

    ``elems`` is a tuple of element names; the empty tuple is the neutral
    sequence and is erased by canonicalization.
    """

    __slots__ = ("elems", "key", "_hash")

    def __init__(self, elems: Iterable[str] = ()):
        self.elems = tuple(elems)
        # shortlex component order: kind tag, length, then names
        self.key = (0, len(self.elems), self.elems)
        self._hash = hash(self.key)

    def __eq__(self, other: object) -> bool:
        return self is other or (isinstance(other, Seq)
                                 and self.elems == other.elems)

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        return f"Seq({'.'.join(self.elems) or 'eps'})"


class Loop:
    """A looping sequence: membrane (rotation-invariant) wrapping a term."""

    __slots__ = ("membrane", "content", "key", "_hash")

    def __init__(self, membrane: Iterable[str], content: "Term"):
        membrane = tuple(membrane)
        if not membrane and content.components:
            raise WellFormednessError(
                "loop with empty membrane and non-empty content")
        self.membrane = membrane
        self.content = content
        self.key = (1, (len(membrane), membrane), content.key)
        self._hash = hash(self.key)

    def __eq__(self, other: object) -> bool:
        if self is other:
            return True
        return (isinstance(other, Loop)
                and self.membrane == other.membrane
                and self.content == other.content)

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        return f"Loop(<{'.'.join(self.membrane)}>{self.content!r})"


Component = Union[Seq, Loop]


class Term:
    """A parallel multiset of components, kept as a tuple.

    The constructor does not normalize; use :func:`canonicalize` to obtain
    the congruence-class representative. Equality and hashing are raw
    structural, so two canonical terms compare equal exactly when they are
    congruent.
    """

    __slots__ = ("components", "key", "_hash", "_canonical", "_counter")

    def __init__(self, components: Iterable[Component] = ()):
        self.components = tuple(components)
        self.key = (2, len(self.components),
                    tuple([c.key for c in self.components]))
        self._hash = hash(self.key)
        self._canonical = False
        self._counter = None

    def is_empty(self) -> bool:
        return not self.components

    def __eq__(self, other: object) -> bool:
        return self is other or (isinstance(other, Term)
                                 and self.key == other.key)

    def __hash__(self) -> int:
        return self._hash

    def __iter__(self) -> Iterator[Component]:
        return iter(self.components)

    def __repr__(self) -> str:
        if not self.components:
            return "Term(eps)"
        return "Term(%s)" % " | ".join(repr(c) for c in self.components)


EMPTY = Term()


def par(*terms: Term) -> Term:
    """Parallel composition; flattens its arguments into one multiset."""
    comps: list[Component] = []
    for t in terms:
        comps.extend(t.components)
    return Term(comps)


def min_rotation(names: tuple[str, ...]) -> tuple[str, ...]:
    """Least rotation of a membrane under tuple comparison."""
    if len(names) < 2:
        return names
    # only rotations starting at a minimal element can win
    low = min(names)
    best = None
    for i, name in enumerate(names):
        if name == low:
            cand = names[i:] + names[:i]
            if best is None or cand < best:
                best = cand
    return names if best == names else best


_loop_cache: dict = {}


def canonicalize(t: Term) -> Term:
    """Reduce to the canonical congruence-class representative.

    Empty sequence components are erased, `<eps>[eps]` loops vanish,
    membranes take their least rotation, contents are canonicalized
    recursively and components are sorted by the total order. Idempotent;
    shares unchanged sub-structure with the input. Terms known to be
    canonical are flagged, so repeated calls cost nothing.
    """
    if t._canonical:
        return t
    out: list[Component] = []
    changed = False
    for comp in t.components:
        if isinstance(comp, Seq):
            if comp.elems:
                out.append(comp)
            else:
                changed = True
            continue
        content = canonicalize(comp.content)
        if not comp.membrane:
            # constructor guarantees the content is empty here
            changed = True
            continue
        mem = min_rotation(comp.membrane)
        if mem == comp.membrane and content is comp.content:
            out.append(comp)
        else:
            # rotated rebuilds of one loop repeat heavily; reuse them
            ck = (mem, content)
            cached = _loop_cache.get(ck)
            if cached is None:
                if len(_loop_cache) >= 4096:
                    _loop_cache.clear()
                cached = _loop_cache[ck] = Loop(mem, content)
            out.append(cached)
            changed = True
    ordered = sorted(out, key=attrgetter("key"))
    if not changed and ordered == list(t.components):
        t._canonical = True
        return t
    result = Term(ordered)
    result._canonical = True
    return result


def congruent(t1: Term, t2: Term) -> bool:
    """Structural congruence, decided on canonical forms."""
    return canonicalize(t1) == canonicalize(t2)


# ---------------------------------------------------------------------------
# typing


@dataclass(frozen=True)
class TypeName:
    """A basic type `t` or the sequence-position tag `seq(t)`."""

    base: str
    is_seq: bool = False

    def as_seq(self) -> "TypeName":
        return TypeName(self.base, True)

    def __str__(self) -> str:
        return f"seq({self.base})" if self.is_seq else self.base


class TypeEnv:
    """Typing environment: element name -> base type identifier.

    Elements without an explicit assignment default to ``t_<name>`` unless
    ``fill_defaults`` is disabled, in which case lookups raise
    :class:`UnknownElementType`. The assignment is treated as immutable;
    resolved type names are cached per element.
    """

    def __init__(self, assignment: Optional[Mapping[str, str]] = None,
                 fill_defaults: bool = True):
        self.assignment = dict(assignment or {})
        self.fill_defaults = fill_defaults
        self._basic: dict[str, TypeName] = {}
        self._seq: dict[str, TypeName] = {}

    def base(self, element: str) -> str:
        try:
            return self.assignment[element]
        except KeyError:
            if self.fill_defaults:
                return "t_" + element
            raise UnknownElementType(element) from None

    def basic(self, element: str) -> TypeName:
        tn = self._basic.get(element)
        if tn is None:
            tn = self._basic[element] = TypeName(self.base(element))
        return tn

    def seq(self, element: str) -> TypeName:
        tn = self._seq.get(element)
        if tn is None:
            tn = self._seq[element] = TypeName(self.base(element), True)
        return tn

    def __repr__(self) -> str:
        return f"TypeEnv({self.assignment!r}, fill_defaults={self.fill_defaults})"


TypeMultiset = Counter  # Counter[TypeName] with positive counts


def stype_of(elems: Iterable[str], env: TypeEnv) -> TypeMultiset:
    """Sequence typing: one seq-tagged type occurrence per element."""
    out: TypeMultiset = Counter()
    for name in elems:
        out[env.seq(name)] += 1
    return out


def type_of(t: Term, env: TypeEnv) -> TypeMultiset:
    """Multiset of typed element occurrences at the outermost level.

    A length-1 sequence contributes the basic type of its element; longer
    sequences contribute seq-tagged types; a loop contributes the sequence
    typing of its membrane (its content is a separate compartment and does
    not show through).
    """
    out: TypeMultiset = Counter()
    for comp in t.components:
        if isinstance(comp, Seq):
            if len(comp.elems) == 1:
                out[env.basic(comp.elems[0])] += 1
            else:
                for name in comp.elems:
                    out[env.seq(name)] += 1
        else:
            for name in comp.membrane:
                out[env.seq(name)] += 1
    return out


def term_elements(t: Term) -> set[str]:
    """Every element name occurring anywhere in the term."""
    out: set[str] = set()
    stack = [t]
    while stack:
        cur = stack.pop()
        for comp in cur.components:
            if isinstance(comp, Seq):
                out.update(comp.elems)
            else:
                out.update(comp.membrane)
                stack.append(comp.content)
    return out
