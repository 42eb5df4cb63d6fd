"""Successor state axioms compiled from the same effect rules.

Each fluent schema gets one axiom: after an applicable action, the fluent
holds iff some positive effect fired, or it already held and no negative
effect fired. Persistence therefore costs one action-identity test per
negative entry, which is what the recorded traces count.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Optional, Sequence

from .domain import Domain, Guard, Pat, match_args, solve_guard
from .errors import CrossModeSoundnessError
from .domain import ground_fluents
from .frames import (
    EFFECT_APPLICATION,
    EQUALITY_CHECK,
    INIT_LOOKUP,
    ProofTrace,
    TraceStep,
    _progression_states,
    applicable_actions,
    derive_frame_axioms,
    progress,
    regress_query,
)
from .state import WorldState, eval_fluent
from .terms import GroundAction, GroundFluent


class _InsufficientAxioms:
    """Distinguished outcome for queries touching actions outside the compiled set."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "insufficient-axioms"


INSUFFICIENT_AXIOMS = _InsufficientAxioms()


@dataclass(frozen=True)
class SSAEntry:
    action: Pat
    fluent: Pat
    condition: Guard = ()

    def __str__(self) -> str:
        s = f"{self.action} -> {self.fluent}"
        if self.condition:
            s += " if " + " & ".join(str(g) for g in self.condition)
        return s


@dataclass(frozen=True)
class SuccessorStateAxiom:
    fluent_schema: str
    gamma_plus: tuple[SSAEntry, ...]
    gamma_minus: tuple[SSAEntry, ...]


@dataclass(frozen=True)
class SSASet:
    domain: Domain
    axioms: dict[str, SuccessorStateAxiom]
    covered: frozenset[str]  # action schemas the axioms quantify over

    def __len__(self) -> int:
        return len(self.axioms)


def compile_ssa(domain: Domain,
                actions: Optional[Sequence[str]] = None) -> SSASet:
    """One successor state axiom per fluent schema.

    `actions` optionally restricts the axioms to a subset of action schemas;
    queries through other actions are answered `insufficient-axioms`.
    """
    covered = frozenset(actions) if actions is not None else frozenset(domain.actions)
    axioms = {}
    for schema in sorted(domain.fluents):
        plus = []
        minus = []
        for eff in domain.effects:
            if eff.fluent.schema != schema or eff.action.schema not in covered:
                continue
            entry = SSAEntry(action=eff.action, fluent=eff.fluent,
                             condition=eff.guard)
            (plus if eff.add else minus).append(entry)
        axioms[schema] = SuccessorStateAxiom(
            fluent_schema=schema, gamma_plus=tuple(plus), gamma_minus=tuple(minus))
    return SSASet(domain=domain, axioms=axioms, covered=covered)


def _entry_fires(domain: Domain, state: WorldState, entry: SSAEntry,
                 a: GroundAction, p: GroundFluent) -> bool:
    env = match_args(entry.action.args, a.args)
    if entry.action.schema != a.schema or env is None:
        return False
    env = match_args(entry.fluent.args, p.args, env)
    if env is None:
        return False
    return bool(solve_guard(domain, state, entry.condition, env))


def ssa_query(ssas: SSASet, init: WorldState, acts: Sequence[GroundAction],
              p: GroundFluent):
    """Evaluate p after `acts` through the successor state axioms.

    Returns (value, ProofTrace). Wherever persistence is used, the trace
    carries one equality check per negative entry of p's axiom.
    """
    domain = ssas.domain
    if any(a.schema not in ssas.covered for a in acts):
        return INSUFFICIENT_AXIOMS, ProofTrace(())
    if p.schema not in ssas.axioms:
        return INSUFFICIENT_AXIOMS, ProofTrace(())
    states = _progression_states(domain, init, acts)  # also checks Poss
    ssa = ssas.axioms[p.schema]
    steps: list[TraceStep] = []
    i = len(acts)
    while i > 0:
        a = acts[i - 1]
        pre = states[i - 1]
        fired_plus = any(_entry_fires(domain, pre, e, a, p) for e in ssa.gamma_plus)
        if fired_plus:
            steps.append(TraceStep(EFFECT_APPLICATION,
                                   f"a positive entry makes {p} true after {a}"))
            return True, ProofTrace(tuple(steps))
        fired_minus = False
        for e in ssa.gamma_minus:
            steps.append(TraceStep(EQUALITY_CHECK, f"test {a} against [{e}]"))
            if _entry_fires(domain, pre, e, a, p):
                fired_minus = True
                break
        if fired_minus:
            steps.append(TraceStep(EFFECT_APPLICATION,
                                   f"a negative entry makes {p} false after {a}"))
            return False, ProofTrace(tuple(steps))
        i -= 1  # persistence: no entry fired
    value = eval_fluent(init, p)
    steps.append(TraceStep(INIT_LOOKUP, f"{p} = {value} in the initial state"))
    return value, ProofTrace(tuple(steps))


# ---------------------------------------------------------------------------
# Cross-mode comparison
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class QueryRecord:
    acts: tuple[GroundAction, ...]
    fluent: GroundFluent
    aspect_value: object
    ssa_value: object
    oracle_value: object
    aspect_trace_len: int
    ssa_trace_len: int
    agreement: bool


@dataclass(frozen=True)
class ComparisonReport:
    classical_axiom_count: int
    aspect_source_count: int
    ssa_count: int
    queries: tuple[QueryRecord, ...]
    all_agree: bool
    comparable: int
    notes: tuple[str, ...] = ()


def compare_modes(domain: Domain,
                  universe: Optional[dict[str, tuple[str, ...]]] = None,
                  workload: Sequence[tuple[WorldState, Sequence[GroundAction], GroundFluent]] = ()) -> ComparisonReport:
    """Run each workload query in aspect, SSA, and oracle mode and compare.

    Raises CrossModeSoundnessError on the first disagreement among defined
    results, carrying the offending query as a witness.
    """
    derivation = derive_frame_axioms(domain, universe)
    classical = sum(r.derived_frame_axioms for r in derivation.economy)
    source = sum(r.source_axioms for r in derivation.economy)
    ssas = compile_ssa(domain)
    records = []
    comparable = 0
    for init, acts, p in workload:
        acts = tuple(acts)
        aspect_value, aspect_trace = regress_query(domain, init, acts, p)
        ssa_value, ssa_trace = ssa_query(ssas, init, acts, p)
        oracle_value = _oracle(domain, init, acts, p)
        defined = [v for v in (aspect_value, ssa_value, oracle_value)
                   if isinstance(v, bool)]
        agree = len(set(defined)) <= 1
        if len(defined) >= 2:
            comparable += 1
        records.append(QueryRecord(
            acts=acts, fluent=p, aspect_value=aspect_value, ssa_value=ssa_value,
            oracle_value=oracle_value, aspect_trace_len=len(aspect_trace),
            ssa_trace_len=len(ssa_trace), agreement=agree))
        if not agree:
            raise CrossModeSoundnessError(
                f"modes disagree on {p} after {[str(a) for a in acts]}: "
                f"aspect={aspect_value} ssa={ssa_value} oracle={oracle_value}",
                witness=(acts, p, aspect_value, ssa_value, oracle_value))
    notes = ("state constraints: none declared (the DSL cannot express them), "
             "so SSA mode participates in equivalence checking",)
    return ComparisonReport(
        classical_axiom_count=classical, aspect_source_count=source,
        ssa_count=len(ssas), queries=tuple(records),
        all_agree=all(r.agreement for r in records), comparable=comparable,
        notes=notes)


def _oracle(domain: Domain, init: WorldState, acts, p: GroundFluent):
    states = _progression_states(domain, init, acts)
    return eval_fluent(states[-1], p)


def random_workload(domain: Domain, init: WorldState, count: int, seed: int,
                    max_len: int = 4):
    """Seeded random applicable walks paired with random query fluents."""
    rng = random.Random(seed)
    fluents = ground_fluents(domain)
    out = []
    for _ in range(count):
        length = rng.randint(0, max_len)
        state = init
        acts: list[GroundAction] = []
        for _ in range(length):
            options = applicable_actions(domain, state)
            if not options:
                break
            a = rng.choice(options)
            acts.append(a)
            state = progress(domain, state, a)
        out.append((init, tuple(acts), rng.choice(fluents)))
    return out
