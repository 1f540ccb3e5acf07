"""Whole-compartment pattern matching, substitution and compartment paths.

A stochastic context hole covers one entire compartment, so a rule's
left-hand side must account for the complete content of the compartment
it fires in (term variables absorb the remainder explicitly). Matching
enumerates instantiations up to congruence: bindings are stored in
canonical form and symmetric choices among identical components collapse.
"""

from __future__ import annotations

from dataclasses import dataclass
from collections import Counter
from operator import attrgetter
from typing import Iterator, Mapping, Optional, Union

from .errors import SubstitutionError
from .patterns import (ElemLit, ElemVar, Pattern, PLoop, PSeq, PTermVar,
                       SeqVar, Var, VarKind, pattern_vars)
from .terms import Loop, Seq, Term, canonicalize

Path = tuple[int, ...]
Binding = Union[Term, tuple[str, ...], str]


@dataclass(frozen=True)
class Compartment:
    """One rewriting site: the root term or the content of some loop.

    ``path`` selects the loop chain leading here; each step is the index
    of a Loop among that level's Loop components in canonical order.
    """
    path: Path
    content: Term


class Instantiation:
    """Immutable variable assignment.

    Term variables bind canonical terms, sequence variables bind element
    name tuples (possibly empty), element variables bind single names.
    """

    __slots__ = ("_map", "_items", "_hash")

    def __init__(self, mapping: Mapping[Var, Binding]):
        items = tuple(sorted(mapping.items(),
                             key=lambda kv: (kv[0].kind.value, kv[0].name)))
        self._map = dict(items)
        self._items = items
        self._hash = hash(items)

    def __getitem__(self, var: Var) -> Binding:
        return self._map[var]

    def get(self, var: Var, default: Optional[Binding] = None):
        return self._map.get(var, default)

    def __contains__(self, var: Var) -> bool:
        return var in self._map

    def __len__(self) -> int:
        return len(self._map)

    def items(self) -> tuple[tuple[Var, Binding], ...]:
        return self._items

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Instantiation) and self._items == other._items

    def __hash__(self) -> int:
        return self._hash

    def sort_key(self):
        out = []
        for var, binding in self._items:
            if isinstance(binding, Term):
                bkey = ("T", binding.key)
            elif isinstance(binding, tuple):
                bkey = ("S", binding)
            else:
                bkey = ("E", binding)
            out.append((var.kind.value, var.name, bkey))
        return tuple(out)

    def __repr__(self) -> str:
        inner = ", ".join(f"{v}={b!r}" for v, b in self._items)
        return f"Instantiation({inner})"


# ---------------------------------------------------------------------------
# compartments and splicing


def compartments(state: Term) -> list[Compartment]:
    """All rewriting sites of a canonical state, in pre-order."""
    state = canonicalize(state)
    out: list[Compartment] = []

    def walk(path: Path, term: Term) -> None:
        out.append(Compartment(path, term))
        loop_index = 0
        for comp in term.components:
            if isinstance(comp, Loop):
                walk(path + (loop_index,), comp.content)
                loop_index += 1

    walk((), state)
    return out


def splice(state: Term, path: Path, new_content: Term) -> Term:
    """Replace the compartment at ``path`` and re-canonicalize."""
    if not path:
        return canonicalize(new_content)
    target, rest = path[0], path[1:]
    comps = list(state.components)
    loop_index = 0
    for i, comp in enumerate(comps):
        if isinstance(comp, Loop):
            if loop_index == target:
                comps[i] = Loop(comp.membrane,
                                splice(comp.content, rest, new_content))
                return canonicalize(Term(comps))
            loop_index += 1
    raise ValueError(f"no loop at path step {target}")


def path_text(path: Path) -> str:
    """Human-readable path: '/' for the root, '/0/1' for nested loops."""
    return "/" + "/".join(str(i) for i in path) if path else "/"


# ---------------------------------------------------------------------------
# substitution


def substitute(p: Pattern, inst: Instantiation) -> Term:
    """Apply an instantiation to a pattern; the result is canonical.

    Sequence bindings splice into their enclosing sequences, term bindings
    splice into the parallel multiset. Raises :class:`SubstitutionError`
    if the pattern uses a variable the instantiation does not bind.
    """
    if len(p.items) == 1 and isinstance(p.items[0], PTermVar):
        # a bare term variable passes its binding through unchanged
        t = _lookup(inst, Var(VarKind.TERM, p.items[0].name))
        return t if t._canonical else canonicalize(t)
    comps: list[Union[Seq, Loop]] = []
    for item in p.items:
        if isinstance(item, PTermVar):
            t = _lookup(inst, Var(VarKind.TERM, item.name))
            comps.extend(t.components)
        elif isinstance(item, PSeq):
            names = _seq_names(item, inst)
            if names:
                comps.append(Seq(names))
        else:
            membrane = _seq_names(item.membrane, inst)
            comps.append(Loop(membrane, substitute(item.content, inst)))
    return canonicalize(Term(comps))


def _lookup(inst: Instantiation, var: Var) -> Binding:
    try:
        return inst[var]
    except KeyError:
        raise SubstitutionError(f"unbound variable {var}") from None


def _seq_names(ps: PSeq, inst: Instantiation) -> tuple[str, ...]:
    names: list[str] = []
    for atom in ps.atoms:
        if isinstance(atom, ElemLit):
            names.append(atom.name)
        elif isinstance(atom, ElemVar):
            names.append(_lookup(inst, Var(VarKind.ELEM, atom.name)))
        else:
            names.extend(_lookup(inst, Var(VarKind.SEQ, atom.name)))
    return tuple(names)


# ---------------------------------------------------------------------------
# matching


def match_whole(lhs: Pattern, content: Term,
                seed: Optional[Instantiation] = None) -> frozenset[Instantiation]:
    """All instantiations making the pattern congruent to the whole content.

    ``seed`` pre-binds variables (used when matching proceeds under an
    enclosing binding). The result set is deduplicated up to congruence of
    bindings.
    """
    base = dict(seed.items()) if seed is not None else {}
    content = canonicalize(content)
    return frozenset(Instantiation(sigma)
                     for sigma in _match_pattern(lhs, content, base, {}))


def _match_pattern(p: Pattern, content: Term, sigma: dict[Var, Binding],
                   memo: Optional[dict] = None) -> Iterator[dict[Var, Binding]]:
    if memo is None:
        memo = {}
    slots: list[Union[PSeq, PLoop]] = []
    tvar_occurrences: list[str] = []
    for item in p.items:
        if isinstance(item, PTermVar):
            tvar_occurrences.append(item.name)
        else:
            slots.append(item)
    # sequence slots before loop slots: they fail fast without descending
    # into loop contents, and the explored assignment set is order-free
    slots.sort(key=lambda it: isinstance(it, PLoop))
    # the pristine multiset is cached on the term; each match mutates a
    # private copy (copying costs one dict copy, rebuilding costs a walk
    # over every component)
    cached = content._counter
    if cached is None:
        cached = content._counter = Counter(content.components)
    remaining = cached.copy()

    def go(i: int, sig: dict[Var, Binding]) -> Iterator[dict[Var, Binding]]:
        if i == len(slots):
            yield from _assign_term_vars(tvar_occurrences, remaining, sig,
                                         memo)
            return
        item = slots[i]
        if isinstance(item, PLoop):
            for comp in [c for c in remaining if isinstance(c, Loop)]:
                if remaining[comp] <= 0:
                    continue
                remaining[comp] -= 1
                for s2 in _match_loop(item, comp, sig, memo):
                    yield from go(i + 1, s2)
                remaining[comp] += 1
        else:
            # a sequence pattern may vanish entirely (every atom binds eps)
            for s2 in _match_atoms(item.atoms, (), sig):
                yield from go(i + 1, s2)
            for comp in [c for c in remaining if isinstance(c, Seq)]:
                if remaining[comp] <= 0:
                    continue
                remaining[comp] -= 1
                for s2 in _match_atoms(item.atoms, comp.elems, sig):
                    yield from go(i + 1, s2)
                remaining[comp] += 1

    yield from go(0, sigma)


def _match_loop(item: PLoop, comp: Loop, sigma: dict[Var, Binding],
                memo: Optional[dict] = None) -> Iterator[dict[Var, Binding]]:
    seen: set[tuple[str, ...]] = set()
    mem = comp.membrane
    # the content match depends only on the bindings of variables the
    # content pattern mentions, so rotations that agree on those replay
    # one cached set of content-side extensions
    inner_vars = pattern_vars(item.content)
    cache: dict[frozenset, list[dict[Var, Binding]]] = {}
    for shift in range(len(mem)):
        rot = mem[shift:] + mem[:shift]
        if rot in seen:
            continue
        seen.add(rot)
        for s1 in _match_atoms(item.membrane.atoms, rot, sigma):
            ck = frozenset((v, s1[v]) for v in inner_vars if v in s1)
            exts = cache.get(ck)
            if exts is None:
                exts = [{k: v for k, v in s2.items() if k not in s1}
                        for s2 in _match_pattern(item.content, comp.content,
                                                 s1, memo)]
                cache[ck] = exts
            for ext in exts:
                yield {**s1, **ext} if ext else s1


def _match_atoms(atoms: tuple, names: tuple[str, ...],
                 sigma: dict[Var, Binding]) -> Iterator[dict[Var, Binding]]:
    if not atoms:
        if not names:
            yield sigma
        return
    head, rest = atoms[0], atoms[1:]
    if isinstance(head, ElemLit):
        if names and names[0] == head.name:
            yield from _match_atoms(rest, names[1:], sigma)
    elif isinstance(head, ElemVar):
        var = Var(VarKind.ELEM, head.name)
        if var in sigma:
            if names and names[0] == sigma[var]:
                yield from _match_atoms(rest, names[1:], sigma)
        elif names:
            yield from _match_atoms(rest, names[1:], {**sigma, var: names[0]})
    else:
        var = Var(VarKind.SEQ, head.name)
        if var in sigma:
            bound = sigma[var]
            if names[:len(bound)] == bound:
                yield from _match_atoms(rest, names[len(bound):], sigma)
        elif not rest:
            # a trailing sequence variable must absorb the remainder
            yield {**sigma, var: names}
        else:
            for cut in range(len(names) + 1):
                yield from _match_atoms(rest, names[cut:],
                                        {**sigma, var: names[:cut]})


def _assign_term_vars(occurrences: list[str], remaining: Counter,
                      sigma: dict[Var, Binding],
                      memo: Optional[dict] = None) -> Iterator[dict[Var, Binding]]:
    """Distribute the leftover component multiset among term variables.

    Pre-bound variables consume their binding times their occurrence
    count; the rest is split across unbound variables in every way that
    respects occurrence multiplicities. Bindings come out canonical by
    construction: splits walk components in sorted order, so no re-sort
    is needed, and ``memo`` (scoped to one whole-compartment match)
    reuses the binding term when symmetric slot choices leave the same
    leftover behind.
    """
    occ = Counter(occurrences)
    leftover = Counter({c: n for c, n in remaining.items() if n > 0})
    unbound: list[str] = []
    for name in dict.fromkeys(occurrences):
        var = Var(VarKind.TERM, name)
        if var in sigma:
            binding = sigma[var]
            assert isinstance(binding, Term)
            for comp in binding.components:
                leftover[comp] -= occ[name]
                if leftover[comp] < 0:
                    return
        else:
            unbound.append(name)
    leftover = Counter({c: n for c, n in leftover.items() if n > 0})
    if not unbound:
        if not leftover:
            yield sigma
        return

    if len(unbound) == 1 and occ[unbound[0]] == 1:
        # the whole leftover goes to the one variable, in one way
        if memo is None:
            memo = {}
        key = tuple((id(c), n) for c, n in leftover.items())
        t = memo.get(key)
        if t is None:
            parts: list = []
            for c in sorted(leftover, key=attrgetter("key")):
                parts.extend([c] * leftover[c])
            t = Term(parts)
            t._canonical = True
            memo[key] = t
        sig2 = dict(sigma)
        sig2[Var(VarKind.TERM, unbound[0])] = t
        yield sig2
        return

    mults = [occ[name] for name in unbound]
    comps = sorted(leftover, key=attrgetter("key"))
    # chosen[j] accumulates the components assigned to unbound[j]
    chosen: list[list] = [[] for _ in unbound]

    def per_component(ci: int) -> Iterator[None]:
        if ci == len(comps):
            yield None
            return
        comp, total = comps[ci], leftover[comps[ci]]

        def split(j: int, left: int) -> Iterator[None]:
            if j == len(unbound) - 1:
                if left % mults[j] == 0:
                    take = left // mults[j]
                    chosen[j].extend([comp] * take)
                    yield from per_component(ci + 1)
                    del chosen[j][len(chosen[j]) - take:]
                return
            for take in range(left // mults[j] + 1):
                chosen[j].extend([comp] * take)
                yield from split(j + 1, left - take * mults[j])
                del chosen[j][len(chosen[j]) - take:]

        yield from split(0, total)

    for _ in per_component(0):
        sig2 = dict(sigma)
        for j, name in enumerate(unbound):
            t = Term(chosen[j])
            t._canonical = True
            sig2[Var(VarKind.TERM, name)] = t
        yield sig2
