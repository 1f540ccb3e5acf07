"""Typed rewrite rules, occurrence counting and the transition relation.

A rule rewrites one whole compartment. Its rate is computed by counting
typed element occurrences inside the variable bindings of the match, as
declared by the rule's count blocks, and feeding those counts to the rate
expression. Transitions with non-positive rates are dropped; congruent
outcomes of one rule at one site are merged.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Sequence

from . import rates
from .errors import RateEvalError
from .matching import (Compartment, Instantiation, compartments, match_whole,
                       path_text, splice, substitute)
from .patterns import (Pattern, Var, VarKind, pattern_vars,
                       seq_positioned_elem_vars)
from .rates import RateExpr
from .terms import Seq, Term, TypeEnv, TypeName, canonicalize

POSITIONAL = "positional"
LITERAL = "literal"


@dataclass(frozen=True)
class CountDecl:
    """Count block for one lhs variable: ordered (type, count-name) pairs."""
    var: Var
    entries: tuple[tuple[TypeName, str], ...]


CountSpec = tuple[CountDecl, ...]


@dataclass(frozen=True)
class RewriteRule:
    id: str
    lhs: Pattern
    rhs: Pattern
    rate: RateExpr
    counts: CountSpec = ()

    def count_names(self) -> tuple[str, ...]:
        return tuple(name for decl in self.counts for _, name in decl.entries)


def rule_violations(rule: RewriteRule,
                    consts: Mapping[str, float] = ()) -> list[str]:
    """Static checks; returns one message per violation."""
    out: list[str] = []
    lhs_vars = set(pattern_vars(rule.lhs))
    if not rule.lhs.items:
        out.append(f"rule {rule.id}: lhs is the empty term")
    for var in pattern_vars(rule.rhs):
        if var not in lhs_vars:
            out.append(f"rule {rule.id}: rhs variable {var} does not occur in lhs")
    seen_names: set[str] = set()
    for decl in rule.counts:
        if decl.var not in lhs_vars:
            out.append(f"rule {rule.id}: count block names {decl.var}"
                       " which does not occur in lhs")
        for _, name in decl.entries:
            if name in seen_names:
                out.append(f"rule {rule.id}: duplicate count variable '{name}'")
            seen_names.add(name)
            if name in consts:
                out.append(f"rule {rule.id}: count variable '{name}'"
                           " shadows a declared constant")
    known = seen_names | set(consts)
    for ident in sorted(rates.expr_names(rule.rate)):
        if ident not in known:
            out.append(f"rule {rule.id}: rate references undeclared name '{ident}'")
    return out


# ---------------------------------------------------------------------------
# typed occurrence counting


def _tally(tn: TypeName, wanted: dict[TypeName, list[str]],
           out: dict[str, int]) -> None:
    for name in wanted.get(tn, ()):
        out[name] += 1


def _count_in_term(t: Term, wanted: dict[TypeName, list[str]], env: TypeEnv,
                   out: dict[str, int]) -> None:
    # same clauses as terms.type_of, but tallying only the requested types;
    # the memos map element names straight to count-variable lists so large
    # bindings are walked with one dict probe per occurrence
    basic_names: dict[str, list[str]] = {}
    seq_names: dict[str, list[str]] = {}
    for comp in t.components:
        if isinstance(comp, Seq):
            if len(comp.elems) == 1:
                elem = comp.elems[0]
                targets = basic_names.get(elem)
                if targets is None:
                    targets = basic_names[elem] = wanted.get(env.basic(elem), [])
                for name in targets:
                    out[name] += 1
                continue
            elems = comp.elems
        else:
            elems = comp.membrane
        for elem in elems:
            targets = seq_names.get(elem)
            if targets is None:
                targets = seq_names[elem] = wanted.get(env.seq(elem), [])
            for name in targets:
                out[name] += 1


def _count_in_seq(names: Iterable[str], wanted: dict[TypeName, list[str]],
                  env: TypeEnv, out: dict[str, int]) -> None:
    for name in names:
        _tally(env.seq(name), wanted, out)


def count_types(inst: Instantiation, counts: CountSpec, env: TypeEnv,
                mode: str = POSITIONAL,
                seq_positioned: frozenset[str] = frozenset(),
                memo: Optional[dict] = None) -> dict[str, int]:
    """Evaluate every count declaration against the instantiation.

    Positional mode types a binding by the position its variable occupies:
    term bindings by their parallel typing, sequence bindings always with
    seq-tagged types, element bindings as basic types unless the variable
    sits inside a longer sequence or a membrane (``seq_positioned``).
    Literal mode types the bound value itself, so a length-1 sequence
    binding counts as a basic type and an element binding always does.

    ``memo`` caches term-binding walks across calls; congruent bindings
    under the same declaration reuse the counted totals.
    """
    out: dict[str, int] = {}
    for decl in counts:
        wanted: dict[TypeName, list[str]] = {}
        for tn, name in decl.entries:
            wanted.setdefault(tn, []).append(name)
            out[name] = 0
        binding = inst[decl.var]
        kind = decl.var.kind
        if kind is VarKind.TERM:
            if memo is None:
                _count_in_term(binding, wanted, env, out)
            else:
                mkey = (binding, id(decl))
                snap = memo.get(mkey)
                if snap is None:
                    snap = {name: 0 for _, name in decl.entries}
                    _count_in_term(binding, wanted, env, snap)
                    memo[mkey] = snap
                out.update(snap)
        elif kind is VarKind.SEQ:
            if mode != POSITIONAL and len(binding) == 1:
                _tally(env.basic(binding[0]), wanted, out)
            else:
                _count_in_seq(binding, wanted, env, out)
        else:
            if mode == POSITIONAL and decl.var.name in seq_positioned:
                _tally(env.seq(binding), wanted, out)
            else:
                _tally(env.basic(binding), wanted, out)
    return out


def eval_rate(rule: RewriteRule, counts: Mapping[str, int],
              consts: Mapping[str, float]) -> float:
    """Evaluate the rule's rate expression; errors carry the rule id."""
    try:
        return float(rates.evaluate(rule.rate, counts, consts))
    except RateEvalError as exc:
        raise RateEvalError(f"rule {rule.id}: {exc}") from None


# ---------------------------------------------------------------------------
# transitions


@dataclass(frozen=True)
class Transition:
    """One enabled rewrite: rule applied at a compartment, with its rate.

    ``counts`` is a diagnostic snapshot of the evaluated count variables;
    it does not take part in equality.
    """
    rule_id: str
    path: tuple[int, ...]
    target: Term
    rate: float
    counts: tuple[tuple[str, int], ...] = field(default=(), compare=False)


def transitions(state: Term, rules: Sequence[RewriteRule],
                env: Optional[TypeEnv] = None,
                consts: Optional[Mapping[str, float]] = None,
                mode: str = POSITIONAL) -> tuple[Transition, ...]:
    """Enumerate every enabled transition of the state.

    Matching is whole-compartment per rewriting site; rates come from
    typed counting; non-positive rates are dropped; duplicates by
    (rule, path, target, rate) are merged so symmetric matches appear
    once. The result is deterministically ordered (rule order in
    ``rules``, then path, then target).
    """
    env = env if env is not None else TypeEnv()
    consts = consts if consts is not None else {}
    state = canonicalize(state)
    rule_index = {rule.id: i for i, rule in enumerate(rules)}
    found: dict[tuple, Transition] = {}
    cmemo: dict = {}
    for comp in compartments(state):
        if comp.content.is_empty():
            continue  # an instantiated lhs is never the empty term
        for rule in rules:
            insts = match_whole(rule.lhs, comp.content)
            if not insts:
                continue
            seqpos = seq_positioned_elem_vars(rule.lhs)
            for inst in sorted(insts, key=Instantiation.sort_key):
                counts = count_types(inst, rule.counts, env, mode, seqpos,
                                     memo=cmemo)
                try:
                    rate = eval_rate(rule, counts, consts)
                except RateEvalError as exc:
                    raise RateEvalError(
                        f"{exc} (compartment {path_text(comp.path)})") from None
                if rate <= 0:
                    continue
                target = splice(state, comp.path, substitute(rule.rhs, inst))
                key = (rule.id, comp.path, target, rate)
                if key not in found:
                    found[key] = Transition(rule.id, comp.path, target, rate,
                                            tuple(sorted(counts.items())))
    return tuple(sorted(
        found.values(),
        key=lambda tr: (rule_index[tr.rule_id], tr.path, tr.target.key, tr.rate)))


def apply_transition(state: Term, tr: Transition) -> Term:
    """Successor state of a transition produced from ``state``."""
    return tr.target
