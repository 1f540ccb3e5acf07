"""Model container: rules, constants, typing, initial state, run settings."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field

from .patterns import pattern_elements
from .semantics import LITERAL, POSITIONAL, RewriteRule, rule_violations
from .terms import Term, TypeEnv, term_elements


@dataclass(frozen=True)
class ObservableSpec:
    """What to report: bare parallel occurrences of one element, either
    summed over all compartments or broken down per compartment."""
    element: str
    scope: str = "global"  # or "per-compartment"


@dataclass(frozen=True)
class SimConfig:
    """Simulation settings. ``tmax`` may be 0 to record the initial state
    only; ``samples`` is the number of evenly spaced sampling intervals."""
    seed: int = 1
    tmax: float = 100.0
    max_steps: int = 1_000_000
    samples: int = 100

    def violations(self) -> list[str]:
        out = []
        if self.tmax < 0:
            out.append("tmax must be >= 0")
        if self.max_steps <= 0:
            out.append("max_steps must be positive")
        if self.samples <= 0:
            out.append("samples must be positive")
        return out


@dataclass
class ModelFile:
    """Everything a model file declares, ready for simulation."""
    name: str = ""
    constants: dict[str, float] = field(default_factory=dict)
    type_decls: dict[str, str] = field(default_factory=dict)
    rules: list[RewriteRule] = field(default_factory=list)
    init: Term = field(default_factory=Term)
    observables: list[ObservableSpec] = field(default_factory=list)
    run_defaults: dict = field(default_factory=dict)
    typing: str = POSITIONAL

    def type_env(self) -> TypeEnv:
        return TypeEnv(self.type_decls)

    def elements(self) -> set[str]:
        """Every element occurring in rules, the initial term or type
        declarations."""
        out = set(term_elements(self.init))
        out.update(self.type_decls)
        for rule in self.rules:
            out.update(pattern_elements(rule.lhs))
            out.update(pattern_elements(rule.rhs))
        return out

    def sim_config(self, **overrides) -> SimConfig:
        """Defaults, overlaid with the model's run block, overlaid with
        any non-None overrides."""
        merged = dataclasses.asdict(SimConfig())
        merged.update(self.run_defaults)
        merged.update({k: v for k, v in overrides.items() if v is not None})
        return SimConfig(**merged)


def validate_model(mf: ModelFile) -> list[str]:
    """All diagnostics for a parsed or constructed model."""
    out: list[str] = []
    if mf.typing not in (POSITIONAL, LITERAL):
        out.append(f"unknown typing mode '{mf.typing}'")
    seen_ids: set[str] = set()
    for rule in mf.rules:
        if rule.id in seen_ids:
            out.append(f"duplicate rule id '{rule.id}'")
        seen_ids.add(rule.id)
        out.extend(rule_violations(rule, mf.constants))
    known = mf.elements()
    for obs in mf.observables:
        if obs.element not in known:
            out.append(f"observable '{obs.element}' is not an element of the model")
    cfg = mf.sim_config()
    out.extend(cfg.violations())
    return out
