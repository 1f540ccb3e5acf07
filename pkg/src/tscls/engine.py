"""Stochastic simulation: exact SSA over the transition relation.

Each step recomputes the enabled transitions of the current state, draws
the waiting time by inverse CDF (dt = -ln(1-u)/R with R the total exit
rate), then selects a transition by cumulative-rate inversion with a
second uniform draw. The draw order (time first, selection second) and
the generator below are fixed, so a (model, seed) pair yields a
bit-identical trace everywhere.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Optional, Sequence

from .matching import Path, compartments
from .model import ModelFile, ObservableSpec, SimConfig
from .semantics import RewriteRule, Transition, transitions
from .terms import Seq, Term, TypeEnv, canonicalize

_MASK64 = (1 << 64) - 1
_MASK128 = (1 << 128) - 1


class Pcg64:
    """pcg64: the permuted congruential generator, setseq xsl-rr 128/64.

    128-bit LCG state (multiplier 0x2360ed051fc65da44385df649fccf645),
    64-bit output by xor-folding the halves and rotating by the top six
    state bits. Seeding follows the reference srandom sequence: state 0,
    odd increment from the stream id, step, add seed, step. Distinct
    stream ids give independent sequences for the same seed.
    """

    MULT = 0x2360ed051fc65da44385df649fccf645

    def __init__(self, seed: int, stream: int = 0):
        self._inc = (((stream & _MASK64) << 1) | 1) & _MASK128
        self._state = 0
        self._advance()
        self._state = (self._state + (seed & _MASK64)) & _MASK128
        self._advance()

    def _advance(self) -> None:
        self._state = (self._state * self.MULT + self._inc) & _MASK128

    def next_u64(self) -> int:
        self._advance()
        state = self._state
        xored = ((state >> 64) ^ state) & _MASK64
        rot = state >> 122
        return ((xored >> rot) | (xored << (64 - rot))) & _MASK64 if rot \
            else xored

    def random(self) -> float:
        """Uniform double in [0, 1) with 53 random bits."""
        return (self.next_u64() >> 11) * 2.0 ** -53


def step(state: Term, rules: Sequence[RewriteRule], env: TypeEnv,
         consts: Mapping[str, float], rng: Pcg64,
         mode: str = "positional") -> Optional[tuple[float, Transition]]:
    """One SSA step; None when no transition is enabled."""
    trs = transitions(state, rules, env, consts, mode)
    if not trs:
        return None
    return _draw(trs, rng)[:2]


def _draw(trs: tuple[Transition, ...], rng: Pcg64):
    total = sum(tr.rate for tr in trs)
    u_time = rng.random()
    dt = -math.log(1.0 - u_time) / total
    u_pick = rng.random() * total
    acc = 0.0
    chosen = trs[-1]
    for tr in trs:
        acc += tr.rate
        if u_pick < acc:
            chosen = tr
            break
    return dt, chosen, total


# ---------------------------------------------------------------------------
# observation


def observe(state: Term, spec: ObservableSpec):
    """Count bare parallel occurrences of the element.

    Global scope returns one integer summed over all compartments;
    per-compartment scope returns {path: count} for every compartment.
    """
    state = canonicalize(state)
    if spec.scope == "global":
        return _count_bare(state, spec.element)
    out: dict[Path, int] = {}
    for comp in compartments(state):
        n = 0
        for c in comp.content.components:
            if isinstance(c, Seq) and len(c.elems) == 1 \
                    and c.elems[0] == spec.element:
                n += 1
        out[comp.path] = n
    return out


def _count_bare(term: Term, element: str) -> int:
    n = 0
    for comp in term.components:
        if isinstance(comp, Seq):
            if len(comp.elems) == 1 and comp.elems[0] == element:
                n += 1
        else:
            n += _count_bare(comp.content, element)
    return n


def _count_all(term: Term, names: Sequence[str]) -> tuple[int, ...]:
    counts = dict.fromkeys(names, 0)

    def walk(t: Term) -> None:
        for comp in t.components:
            if isinstance(comp, Seq):
                if len(comp.elems) == 1 and comp.elems[0] in counts:
                    counts[comp.elems[0]] += 1
            else:
                walk(comp.content)

    walk(term)
    return tuple(counts[n] for n in names)


# ---------------------------------------------------------------------------
# traces


@dataclass(frozen=True)
class TraceEvent:
    """One applied transition; observables are counts after the event."""
    time: float
    step: int
    rule_id: str
    path: Path
    rate: float
    total_exit_rate: float
    observables: tuple[int, ...]


@dataclass(frozen=True)
class Sample:
    """Piecewise-constant observable counts at a grid time: the state in
    force is the last one at or before the sample time."""
    time: float
    step: int
    observables: tuple[int, ...]


@dataclass
class Trace:
    observable_names: tuple[str, ...]
    events: list[TraceEvent]
    samples: list[Sample]
    final_state: Term
    final_time: float
    halt_reason: str  # exhausted | tmax | max_steps

    @property
    def steps(self) -> int:
        return len(self.events)


HALT_EXHAUSTED = "exhausted"
HALT_TMAX = "tmax"
HALT_MAX_STEPS = "max_steps"


def simulate(model: ModelFile, cfg: SimConfig, stream: int = 0) -> Trace:
    """Run the SSA from the model's initial state under ``cfg``.

    Sampling uses the inclusive grid i*tmax/samples for i = 0..samples
    (collapsed when tmax is 0), recording the state in force at each grid
    time. Identical (model, cfg, stream) inputs give identical traces.
    """
    bad = cfg.violations()
    if bad:
        raise ValueError("; ".join(bad))
    env = model.type_env()
    names = tuple(o.element for o in model.observables)
    rng = Pcg64(cfg.seed, stream)
    state = canonicalize(model.init)
    clock = 0.0
    events: list[TraceEvent] = []
    samples: list[Sample] = []
    grid = _sample_grid(cfg.tmax, cfg.samples)
    gi = 0
    reason = HALT_MAX_STEPS
    while True:
        if len(events) >= cfg.max_steps:
            reason = HALT_MAX_STEPS
            break
        trs = transitions(state, model.rules, env, model.constants,
                          model.typing)
        if not trs:
            reason = HALT_EXHAUSTED
            break
        dt, chosen, total = _draw(trs, rng)
        if clock + dt > cfg.tmax:
            reason = HALT_TMAX
            break
        next_clock = clock + dt
        while gi < len(grid) and grid[gi] < next_clock:
            samples.append(Sample(grid[gi], len(events),
                                  _count_all(state, names)))
            gi += 1
        state = chosen.target
        clock = next_clock
        events.append(TraceEvent(clock, len(events) + 1, chosen.rule_id,
                                 chosen.path, chosen.rate, total,
                                 _count_all(state, names)))
    while gi < len(grid):
        samples.append(Sample(grid[gi], len(events), _count_all(state, names)))
        gi += 1
    final_time = cfg.tmax if reason == HALT_TMAX else clock
    return Trace(names, events, samples, state, final_time, reason)


def _sample_grid(tmax: float, samples: int) -> list[float]:
    grid: list[float] = []
    for i in range(samples + 1):
        t = i * tmax / samples
        if not grid or t > grid[-1]:
            grid.append(t)
    return grid
