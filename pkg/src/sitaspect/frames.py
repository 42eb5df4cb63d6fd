"""Frame reasoning from aspect annotations.

Given a domain whose fluents and actions carry aspect rules, this module
computes aspects of ground atoms, derives frame axioms (both schematic and
ground) together with axiom-economy figures, simulates progression, and
answers queries by aspect-based regression with recorded proof traces.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .disjoint import SeqExistsDiff, SimpleInequality, d_eval
from .domain import (
    AspectRule,
    Domain,
    GuardAtom,
    GuardLiteral,
    MemberGuard,
    Pat,
    SetTemplate,
    Var,
    check_ground_action,
    check_ground_fluent,
    ground_actions,
    ground_fluents,
    instantiate_pat,
    instantiate_template,
    match_args,
    solve_guard,
    static_guard_groundings,
)
from .errors import (
    AmbiguousAspectError,
    InapplicableActionError,
    MissingAspectError,
    NoProofError,
    UndefinedActionError,
)
from .state import WorldState, build_state, eval_fluent, home_of, with_fluent
from .terms import AspectAtom, AspectPath, GroundAction, GroundFluent, term_str

# Proof trace step kinds.
D_EVALUATION = "d-evaluation"
EFFECT_APPLICATION = "effect-application"
EQUALITY_CHECK = "equality-check"
AXIOM_INSTANTIATION = "axiom-instantiation"
ASPECT_LOOKUP = "aspect-lookup"
INIT_LOOKUP = "init-lookup"
NO_AXIOM = "no-axiom"


@dataclass(frozen=True)
class TraceStep:
    kind: str
    detail: str

    def __str__(self) -> str:
        return f"[{self.kind}] {self.detail}"


@dataclass(frozen=True)
class ProofTrace:
    steps: tuple[TraceStep, ...] = ()

    def __len__(self) -> int:
        return len(self.steps)

    def count(self, kind: str) -> int:
        return sum(1 for s in self.steps if s.kind == kind)

    def render(self) -> str:
        return "\n".join(str(s) for s in self.steps)


@dataclass(frozen=True)
class FrameAxiom:
    """A ground frame assertion: under `guard`, `action` leaves `fluent` unchanged."""

    action: GroundAction
    fluent: GroundFluent
    guard: tuple[str, ...] = ()

    def render(self) -> str:
        parts = list(self.guard) + [f"holds({self.fluent}, s)"]
        return " & ".join(parts) + f" -> holds({self.fluent}, do({self.action}, s))"


@dataclass(frozen=True)
class SchematicFrameAxiom:
    """A frame axiom schema over variables, one per (fluent rule, action rule)."""

    fluent_head: str
    action_head: str
    conditions: tuple[str, ...]  # disjointness conditions, then rule guards

    def render(self) -> str:
        parts = list(self.conditions) + [f"holds({self.fluent_head}, s)"]
        return (" & ".join(parts)
                + f" -> holds({self.fluent_head}, do({self.action_head}, s))")


@dataclass(frozen=True)
class EconomyReport:
    fluent_aspect: AspectPath
    action_aspect: AspectPath
    m: int
    n: int
    derived_frame_axioms: int
    source_axioms: int


@dataclass(frozen=True)
class FrameDerivation:
    schematic: tuple[SchematicFrameAxiom, ...]
    ground: tuple[FrameAxiom, ...]
    economy: tuple[EconomyReport, ...]
    errors: tuple[str, ...]
    notes: tuple[str, ...] = ()


def aspect_of_fluent(domain: Domain, state: WorldState, p: GroundFluent) -> AspectPath:
    check_ground_fluent(domain, p)
    return _aspect_of(domain, state, "fluent", p.schema, p.args, str(p))


def aspect_of_action(domain: Domain, state: WorldState, a: GroundAction) -> AspectPath:
    check_ground_action(domain, a)
    return _aspect_of(domain, state, "action", a.schema, a.args, str(a))


def _aspect_of(domain: Domain, state: WorldState, kind: str, schema: str,
               args, label: str) -> AspectPath:
    rules = domain.rules_for(kind, schema)
    if not rules:
        raise MissingAspectError(f"no aspect rule declared for {kind} '{schema}'")
    matched: list[tuple[AspectRule, list[AspectPath]]] = []
    for rule in rules:
        env0 = match_args(rule.target.args, args)
        if env0 is None:
            continue
        sols = solve_guard(domain, state, rule.guard, env0)
        if not sols:
            continue
        aspects = []
        for sol in sols:
            asp = instantiate_template(rule.template, sol)
            if asp not in aspects:
                aspects.append(asp)
        matched.append((rule, aspects))
    if not matched:
        raise MissingAspectError(f"no aspect rule applies to {label} in this state")
    if len(matched) > 1:
        raise AmbiguousAspectError(
            f"multiple aspect rules apply to {label}: "
            + "; ".join(str(r) for r, _ in matched))
    aspects = matched[0][1]
    if len(aspects) > 1:
        raise AmbiguousAspectError(
            f"aspect rule for {label} yields several aspects: "
            + ", ".join(str(a) for a in aspects))
    return aspects[0]


def intersects(domain: Domain, state: WorldState, a: GroundAction, p: GroundFluent) -> bool:
    """Whether a and p intersect (are not declared non-interfering) in `state`."""
    alpha = aspect_of_fluent(domain, state, p)
    beta = aspect_of_action(domain, state, a)
    return not d_eval(domain.disjointness, alpha, beta)


# ---------------------------------------------------------------------------
# Progression
# ---------------------------------------------------------------------------

def progress(domain: Domain, state: WorldState, a: GroundAction) -> WorldState:
    """Apply a's firing effects; every untouched fluent keeps its value."""
    check_ground_action(domain, a)
    _check_applicable(domain, state, a)
    changes = _net_effects(domain, state, a)
    new_state = state
    for f, v in changes:
        if home_of(state, f) is None:
            raise UndefinedActionError(
                f"{a} affects {f}, which is outside the modeled portion")
        if eval_fluent(new_state, f) != v:
            new_state = with_fluent(new_state, f, v)
    return new_state


def _check_applicable(domain: Domain, state: WorldState, a: GroundAction) -> None:
    for pre in domain.preconditions_for(a.schema):
        env0 = match_args(pre.action.args, a.args)
        if env0 is None:
            continue
        if solve_guard(domain, state, pre.guard, env0):
            continue
        if _touches_unmodeled(domain, state, pre.guard, env0):
            raise UndefinedActionError(
                f"{a}: precondition refers outside the modeled portion")
        raise InapplicableActionError(f"{a}: precondition does not hold")


def _touches_unmodeled(domain: Domain, state: WorldState, guard, env0) -> bool:
    for g in static_guard_groundings(domain, guard, env0):
        for atom in guard:
            if isinstance(atom, GuardLiteral):
                if eval_fluent(state, instantiate_pat(atom.fluent, g)) is None:
                    return True
    return False


def _net_effects(domain: Domain, state: WorldState,
                 a: GroundAction) -> list[tuple[GroundFluent, bool]]:
    """Firing effects of a in `state`, delete-then-add (adds win)."""
    adds: list[GroundFluent] = []
    dels: list[GroundFluent] = []
    for rule in domain.effects_for(a.schema):
        env0 = match_args(rule.action.args, a.args)
        if env0 is None:
            continue
        for sol in solve_guard(domain, state, rule.guard, env0):
            target = instantiate_pat(rule.fluent, sol)
            (adds if rule.add else dels).append(target)
    changes: dict[GroundFluent, bool] = {}
    for f in dels:
        changes[f] = False
    for f in adds:
        changes[f] = True
    return sorted(changes.items(), key=lambda fv: fv[0].sort_key())


def applicable_actions(domain: Domain, state: WorldState) -> list[GroundAction]:
    out = []
    for a in ground_actions(domain):
        try:
            _check_applicable(domain, state, a)
        except (InapplicableActionError, UndefinedActionError):
            continue
        out.append(a)
    return out


def reachable_states(domain: Domain, init: WorldState,
                     max_depth: int) -> list[WorldState]:
    """All states reachable from init by applicable sequences of length <= max_depth."""
    seen = {init.key()}
    frontier = [init]
    out = [init]
    for _ in range(max_depth):
        nxt = []
        for s in frontier:
            for a in applicable_actions(domain, s):
                try:
                    s2 = progress(domain, s, a)
                except UndefinedActionError:
                    continue
                if s2.key() not in seen:
                    seen.add(s2.key())
                    nxt.append(s2)
                    out.append(s2)
        frontier = nxt
        if not frontier:
            break
    return out


# ---------------------------------------------------------------------------
# Frame axiom derivation
# ---------------------------------------------------------------------------

_FLUENT_VAR_NAMES = ("w", "v", "u")


def derive_frame_axioms(domain: Domain,
                        universe: Optional[dict[str, tuple[str, ...]]] = None) -> FrameDerivation:
    """Schematic axioms per rule pair, ground axioms per pair, economy per aspect pair.

    A ground pair (a, p) yields an axiom only when every satisfiable
    combination of aspect-rule groundings leaves the two aspects disjoint;
    the recorded guard is the conjunction of the aspect-rule guards used.
    """
    if universe is not None:
        domain = _with_universe(domain, universe)
    schematic, notes = _schematic_axioms(domain)
    ground, economy, errors = _ground_axioms(domain)
    return FrameDerivation(schematic=tuple(schematic), ground=tuple(ground),
                           economy=tuple(economy), errors=tuple(errors),
                           notes=tuple(notes))


def _with_universe(domain: Domain, universe: dict[str, tuple[str, ...]]) -> Domain:
    sorts = dict(domain.sorts)
    sorts.update({k: tuple(v) for k, v in universe.items()})
    return Domain(name=domain.name, sorts=sorts, fluents=domain.fluents,
                  actions=domain.actions, aspect_rules=domain.aspect_rules,
                  effects=domain.effects, preconditions=domain.preconditions,
                  frame_decls=domain.frame_decls, disjointness=domain.disjointness,
                  homes=domain.homes)


def _schematic_axioms(domain: Domain) -> tuple[list[SchematicFrameAxiom], list[str]]:
    notes: list[str] = []
    spec = domain.disjointness
    if not isinstance(spec, (SeqExistsDiff, SimpleInequality)):
        notes.append("schematic axioms are derived for element-difference "
                     "specifications only; ground listing still applies")
        return [], notes
    axioms = []
    fluent_rules = [r for r in domain.aspect_rules if r.kind == "fluent"]
    action_rules = [r for r in domain.aspect_rules if r.kind == "action"]
    for fr in fluent_rules:
        for ar in action_rules:
            renamed, mapping = _rename_apart(fr, ar)
            fset = _set_valued_vars(domain.fluents[fr.target.schema].params,
                                    fr.target.args)
            aset = _set_valued_vars(domain.actions[ar.target.schema].params,
                                    ar.target.args)
            set_vars = {mapping.get(v, v) for v in fset} | aset
            condition = _symbolic_disjoint(renamed.template, ar.template, spec,
                                           set_vars)
            if condition is None:
                continue  # the two aspects can never be disjoint
            conds = list(condition)
            conds += [str(g) for g in renamed.guard]
            conds += [str(g) for g in ar.guard]
            axioms.append(SchematicFrameAxiom(
                fluent_head=str(renamed.target),
                action_head=str(ar.target),
                conditions=tuple(conds)))
    return axioms, notes


def _set_valued_vars(params, args) -> set[str]:
    return {a.name for a, ref in zip(args, params)
            if isinstance(a, Var) and ref.is_set}


def _rename_apart(fr: AspectRule, ar: AspectRule) -> tuple[AspectRule, dict[str, str]]:
    """Rename the fluent rule's variables away from the action rule's."""
    taken = {v.name for v in ar.target.variables()}
    for g in ar.guard:
        if isinstance(g, GuardLiteral):
            taken |= {v.name for v in g.fluent.variables()}
    fvars: list[str] = []
    for v in fr.target.variables():
        if v.name not in fvars:
            fvars.append(v.name)
    for g in fr.guard:
        if isinstance(g, GuardLiteral):
            for v in g.fluent.variables():
                if v.name not in fvars:
                    fvars.append(v.name)
    mapping: dict[str, str] = {}
    candidates = itertools.chain(_FLUENT_VAR_NAMES,
                                 (f"w{i}" for i in itertools.count(1)))
    for name in fvars:
        for cand in candidates:
            if cand not in taken:
                mapping[name] = cand
                taken.add(cand)
                break
    return _substitute_rule_vars(fr, mapping), mapping


def _substitute_rule_vars(rule: AspectRule, mapping: dict[str, str]) -> AspectRule:
    def sub_arg(a):
        return Var(mapping[a.name]) if isinstance(a, Var) and a.name in mapping else a

    def sub_pat(p: Pat) -> Pat:
        return Pat(p.schema, tuple(sub_arg(a) for a in p.args))

    def sub_elem(t):
        if isinstance(t, Var):
            return sub_arg(t)
        if isinstance(t, SetTemplate):
            return SetTemplate(frozenset(sub_arg(m) if isinstance(m, Var) else m
                                         for m in t.members))
        return t

    guard = tuple(
        GuardLiteral(sub_pat(g.fluent), g.positive) if isinstance(g, GuardLiteral)
        else MemberGuard(sub_arg(g.member), sub_arg(g.collection))
        for g in rule.guard)
    return AspectRule(kind=rule.kind, target=sub_pat(rule.target),
                      template=tuple(sub_elem(t) for t in rule.template),
                      guard=guard)


def _symbolic_disjoint(t_fluent, t_action, spec,
                       set_vars: set[str]) -> Optional[tuple[str, ...]]:
    """Conditions under which two aspect templates are disjoint.

    Returns None when no position can ever be disjoint; returns () when
    disjointness is unconditional. Each position contributes a conjunction of
    pairwise difference conditions; positions combine as a disjunction.
    """
    if isinstance(spec, SimpleInequality) and (len(t_fluent) != 1 or len(t_action) != 1):
        return None
    disjuncts: list[list[str]] = []
    for ef, ea in zip(t_fluent, t_action):
        conjuncts: list[str] = []
        possible = True
        for mf in _template_members(ef):
            for ma in _template_members(ea):
                if isinstance(mf, AspectAtom) and isinstance(ma, AspectAtom):
                    if mf.name == ma.name:
                        possible = False
                elif isinstance(mf, Var) and isinstance(ma, Var) and mf.name == ma.name:
                    possible = False
                else:
                    conjuncts.append(_member_condition(mf, ma, set_vars))
            if not possible:
                break
        if possible:
            if not conjuncts:
                return ()  # statically disjoint at this position
            disjuncts.append(conjuncts)
    if not disjuncts:
        return None
    if len(disjuncts) == 1:
        return tuple(disjuncts[0])
    return ("(" + ") | (".join(" & ".join(c) for c in disjuncts) + ")",)


def _member_condition(mf, ma, set_vars: set[str]) -> str:
    """Render one member-pair difference; set-valued variables read as sets."""
    f_is_set = isinstance(mf, Var) and mf.name in set_vars
    a_is_set = isinstance(ma, Var) and ma.name in set_vars
    if f_is_set and a_is_set:
        return f"disjoint({mf},{ma})"
    if a_is_set:
        return f"{mf} not in {ma}"
    if f_is_set:
        return f"{ma} not in {mf}"
    return f"{mf} != {ma}"


def _template_members(t):
    if isinstance(t, SetTemplate):
        return sorted(t.members, key=str)
    return [t]


def _aspect_combos(domain: Domain, kind: str, schema: str, args, label: str,
                   errors: list[str]):
    """Static (aspect, guard-rendering) combinations for a ground atom."""
    combos: list[tuple[AspectPath, tuple[str, ...]]] = []
    any_rule = False
    for rule in domain.rules_for(kind, schema):
        env0 = match_args(rule.target.args, args)
        if env0 is None:
            continue
        any_rule = True
        for g in static_guard_groundings(domain, rule.guard, env0):
            asp = instantiate_template(rule.template, g)
            guard_txt = tuple(_render_guard_atom(atom, env0) for atom in rule.guard)
            if (asp, guard_txt) not in combos:
                combos.append((asp, guard_txt))
    if not any_rule:
        errors.append(f"no aspect rule matches {kind} {label}")
    elif not combos:
        errors.append(f"aspect rules for {kind} {label} have unsatisfiable guards")
    return combos


def _render_guard_atom(atom: GuardAtom, env: dict) -> str:
    def sub(a):
        if isinstance(a, Var) and a.name in env:
            return term_str(env[a.name])
        return str(a)

    if isinstance(atom, MemberGuard):
        return f"{sub(atom.member)} in {sub(atom.collection)}"
    args = ",".join(sub(a) for a in atom.fluent.args)
    return ("" if atom.positive else "!") + f"{atom.fluent.schema}({args})"


def _ground_axioms(domain: Domain):
    errors: list[str] = []
    spec = domain.disjointness
    fluent_info = []
    for p in ground_fluents(domain):
        combos = _aspect_combos(domain, "fluent", p.schema, p.args, str(p), errors)
        if combos:
            fluent_info.append((p, combos))
    action_info = []
    for a in ground_actions(domain):
        combos = _aspect_combos(domain, "action", a.schema, a.args, str(a), errors)
        if combos:
            action_info.append((a, combos))

    axioms: list[FrameAxiom] = []
    for a, acombos in action_info:
        for p, fcombos in fluent_info:
            if all(d_eval(spec, alpha, beta)
                   for alpha, _ in fcombos for beta, _ in acombos):
                guard: list[str] = []
                for _, g in fcombos + acombos:
                    for item in g:
                        if item not in guard:
                            guard.append(item)
                axioms.append(FrameAxiom(action=a, fluent=p, guard=tuple(guard)))

    # Economy is reported for unconditional aspect assignments only: a ground
    # atom enters a group when a single guard-free rule fixes its aspect.
    fluent_groups: dict[AspectPath, int] = {}
    for p, combos in fluent_info:
        if len(combos) == 1 and not combos[0][1]:
            fluent_groups[combos[0][0]] = fluent_groups.get(combos[0][0], 0) + 1
    action_groups: dict[AspectPath, int] = {}
    for a, combos in action_info:
        if len(combos) == 1 and not combos[0][1]:
            action_groups[combos[0][0]] = action_groups.get(combos[0][0], 0) + 1
    economy = []
    for alpha in sorted(fluent_groups, key=str):
        for beta in sorted(action_groups, key=str):
            if d_eval(spec, alpha, beta):
                m, n = fluent_groups[alpha], action_groups[beta]
                economy.append(EconomyReport(
                    fluent_aspect=alpha, action_aspect=beta, m=m, n=n,
                    derived_frame_axioms=m * n, source_axioms=m + n + 2))
    return axioms, economy, errors


# ---------------------------------------------------------------------------
# Annotation soundness
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SoundnessViolation:
    action: GroundAction
    fluent: GroundFluent
    fluent_aspect: AspectPath
    action_aspect: AspectPath

    def __str__(self) -> str:
        return (f"{self.action} changes {self.fluent} although "
                f"d({self.fluent_aspect},{self.action_aspect}) declares them disjoint")


@dataclass(frozen=True)
class SoundnessReport:
    violations: tuple[SoundnessViolation, ...]
    unresolved: tuple[str, ...]
    actions_checked: int
    valuations_checked: int

    @property
    def clean(self) -> bool:
        return not self.violations


def check_aspect_soundness(domain: Domain,
                           universe: Optional[dict[str, tuple[str, ...]]] = None,
                           max_guard_fluents: int = 14) -> SoundnessReport:
    """Verify that every fluent an action can change intersects the action.

    For each ground action the guard-relevant ground fluents are enumerated
    and every truth valuation of them is tried (actions whose preconditions
    fail are skipped, as are valuations where aspects do not resolve).
    Effect targets absent from the guard set are given the change-revealing
    prior value.
    """
    if universe is not None:
        domain = _with_universe(domain, universe)
    violations: list[SoundnessViolation] = []
    skipped: dict[str, int] = {}
    actions_checked = 0
    valuations_checked = 0
    for a in ground_actions(domain):
        relevant = _relevant_fluents(domain, a)
        if len(relevant) > max_guard_fluents:
            skipped[f"{a}: guard fluent count {len(relevant)} exceeds the "
                    f"enumeration bound {max_guard_fluents}"] = 1
            continue
        actions_checked += 1
        for bits in itertools.product((False, True), repeat=len(relevant)):
            valuations_checked += 1
            base = dict(zip(relevant, bits))
            state = build_state({(): base}, schemas=frozenset(domain.fluents))
            try:
                _check_applicable(domain, state, a)
            except (InapplicableActionError, UndefinedActionError):
                continue
            try:
                beta = aspect_of_action(domain, state, a)
            except MissingAspectError:
                _bump(skipped, f"{a}: valuations where no aspect rule applies")
                continue
            except AmbiguousAspectError:
                _bump(skipped, f"{a}: valuations with ambiguous aspects")
                continue
            changes = _net_effects(domain, state, a)
            full = dict(base)
            for f, v in changes:
                if f not in full:
                    full[f] = not v  # make the change observable
            full_state = build_state({(): full}, schemas=frozenset(domain.fluents))
            for f, v in changes:
                if full[f] == v:
                    continue
                try:
                    alpha = aspect_of_fluent(domain, full_state, f)
                except (MissingAspectError, AmbiguousAspectError):
                    _bump(skipped, f"{f}: valuations where the fluent aspect "
                                   f"does not resolve")
                    continue
                if d_eval(domain.disjointness, alpha, beta):
                    v = SoundnessViolation(action=a, fluent=f,
                                           fluent_aspect=alpha, action_aspect=beta)
                    if v not in violations:
                        violations.append(v)
    unresolved = tuple(f"{key} ({count} skipped)" for key, count
                       in sorted(skipped.items()))
    return SoundnessReport(violations=tuple(violations), unresolved=unresolved,
                           actions_checked=actions_checked,
                           valuations_checked=valuations_checked)


def _bump(counter: dict[str, int], key: str) -> None:
    counter[key] = counter.get(key, 0) + 1


def _relevant_fluents(domain: Domain, a: GroundAction) -> list[GroundFluent]:
    """Ground guard/precondition fluents that bear on a's firing and aspects."""
    out: set[GroundFluent] = set()

    def add_guard(guard, env0):
        from .domain import _literal_candidates

        for g in static_guard_groundings(domain, guard, env0):
            for atom in guard:
                if isinstance(atom, GuardLiteral):
                    # Negated literals leave their variables unbound (negation
                    # as failure); every grounding of them is relevant.
                    for g2 in _literal_candidates(domain, atom.fluent, g):
                        out.add(instantiate_pat(atom.fluent, g2))

    target_schemas: set[str] = set()
    for rule in domain.rules_for("action", a.schema):
        env0 = match_args(rule.target.args, a.args)
        if env0 is not None:
            add_guard(rule.guard, env0)
    for pre in domain.preconditions_for(a.schema):
        env0 = match_args(pre.action.args, a.args)
        if env0 is not None:
            add_guard(pre.guard, env0)
    for eff in domain.effects_for(a.schema):
        env0 = match_args(eff.action.args, a.args)
        if env0 is not None:
            add_guard(eff.guard, env0)
            target_schemas.add(eff.fluent.schema)
            for g in static_guard_groundings(domain, eff.guard, env0):
                target = instantiate_pat(eff.fluent, g)
                for frule in domain.rules_for("fluent", target.schema):
                    fenv = match_args(frule.target.args, target.args)
                    if fenv is not None:
                        add_guard(frule.guard, fenv)
    return sorted(out, key=lambda f: f.sort_key())


# ---------------------------------------------------------------------------
# Regression and persistence proofs
# ---------------------------------------------------------------------------

def regress_query(domain: Domain, init: WorldState,
                  acts: Sequence[GroundAction], p: GroundFluent):
    """Evaluate p after `acts` by regressing through the non-interference axiom.

    Returns (True|False|None, ProofTrace). A step either persists by one
    d-evaluation, resolves through an effect rule, persists by an explicitly
    declared frame axiom, or leaves the query undefined.
    """
    check_ground_fluent(domain, p)
    states = _progression_states(domain, init, acts)
    steps: list[TraceStep] = []
    i = len(acts)
    while i > 0:
        a = acts[i - 1]
        pre = states[i - 1]
        alpha = aspect_of_fluent(domain, pre, p)
        beta = aspect_of_action(domain, pre, a)
        disjoint = d_eval(domain.disjointness, alpha, beta)
        steps.append(TraceStep(
            D_EVALUATION, f"d({alpha},{beta}) = {disjoint} for {p} vs {a}"))
        if disjoint:
            i -= 1
            continue
        resolved = _effects_on(domain, pre, a, p)
        if resolved is not None:
            steps.append(TraceStep(
                EFFECT_APPLICATION, f"{a} sets {p} to {resolved}"))
            return resolved, ProofTrace(tuple(steps))
        if _frame_declared(domain, a, p):
            steps.append(TraceStep(
                AXIOM_INSTANTIATION, f"declared frame axiom for ({a}, {p})"))
            i -= 1
            continue
        steps.append(TraceStep(
            NO_AXIOM, f"{p} intersects {a} and no axiom resolves it"))
        return None, ProofTrace(tuple(steps))
    value = eval_fluent(init, p)
    steps.append(TraceStep(INIT_LOOKUP, f"{p} = {value} in the initial state"))
    return value, ProofTrace(tuple(steps))


def _progression_states(domain: Domain, init: WorldState,
                        acts: Sequence[GroundAction]) -> list[WorldState]:
    states = [init]
    for idx, a in enumerate(acts):
        try:
            states.append(progress(domain, states[-1], a))
        except (InapplicableActionError, UndefinedActionError) as exc:
            raise type(exc)(f"step {idx + 1} ({a}): {exc}") from exc
    return states


def _effects_on(domain: Domain, state: WorldState, a: GroundAction,
                p: GroundFluent) -> Optional[bool]:
    for f, v in _net_effects(domain, state, a):
        if f == p:
            return v
    return None


def _frame_declared(domain: Domain, a: GroundAction, p: GroundFluent) -> bool:
    for decl in domain.frame_decls:
        env = match_args(decl.action.args, a.args)
        if decl.action.schema != a.schema or env is None:
            continue
        if decl.fluent.schema != p.schema:
            continue
        if match_args(decl.fluent.args, p.args, env) is not None:
            return True
    return False


def persistence_proof(domain: Domain, state: WorldState, a: GroundAction,
                      p: GroundFluent, mode: str = "aspect",
                      classical_axioms: Optional[Iterable[tuple[GroundAction, GroundFluent]]] = None) -> ProofTrace:
    """A persistence proof for p across a.

    Aspect mode always takes four steps: two aspect lookups, one
    d-evaluation, one axiom instantiation. Classical mode is a single lookup
    in the explicit frame-axiom list (by default: the pairs disjoint in
    `state`).
    """
    if mode == "aspect":
        alpha = aspect_of_fluent(domain, state, p)
        beta = aspect_of_action(domain, state, a)
        if not d_eval(domain.disjointness, alpha, beta):
            raise NoProofError(f"{p} and {a} intersect; no aspect persistence proof")
        steps = (
            TraceStep(ASPECT_LOOKUP, f"{p} : {alpha}"),
            TraceStep(ASPECT_LOOKUP, f"{a} : {beta}"),
            TraceStep(D_EVALUATION, f"d({alpha},{beta}) = True"),
            TraceStep(AXIOM_INSTANTIATION,
                      f"non-interference yields holds({p},s) = holds({p},do({a},s))"),
        )
        return ProofTrace(steps)
    if mode == "classical":
        if classical_axioms is not None:
            present = (a, p) in set(classical_axioms)
        else:
            present = not intersects(domain, state, a, p)
        if not present:
            raise NoProofError(f"no frame axiom listed for ({a}, {p})")
        return ProofTrace((TraceStep(AXIOM_INSTANTIATION,
                                     f"frame axiom F[{a},{p}] found in the list"),))
    raise ValueError(f"unknown mode {mode!r}")


# ---------------------------------------------------------------------------
# Completeness lint
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CompletenessReport:
    uncovered: tuple[tuple[GroundAction, GroundFluent], ...]

    @property
    def clean(self) -> bool:
        return not self.uncovered


def completeness_lint(domain: Domain,
                      universe: Optional[dict[str, tuple[str, ...]]] = None) -> CompletenessReport:
    """Pairs that may intersect yet have no effect rule or declared frame axiom.

    Regression returns `undefined` on such pairs; progression persists them.
    """
    if universe is not None:
        domain = _with_universe(domain, universe)
    errors: list[str] = []
    uncovered = []
    fluent_info = [(p, _aspect_combos(domain, "fluent", p.schema, p.args, str(p), errors))
                   for p in ground_fluents(domain)]
    for a in ground_actions(domain):
        acombos = _aspect_combos(domain, "action", a.schema, a.args, str(a), errors)
        for p, fcombos in fluent_info:
            if not fcombos or not acombos:
                continue
            if all(d_eval(domain.disjointness, alpha, beta)
                   for alpha, _ in fcombos for beta, _ in acombos):
                continue  # always disjoint: covered by non-interference
            if _frame_declared(domain, a, p):
                continue
            if _effect_could_target(domain, a, p):
                continue
            uncovered.append((a, p))
    return CompletenessReport(uncovered=tuple(uncovered))


def _effect_could_target(domain: Domain, a: GroundAction, p: GroundFluent) -> bool:
    for eff in domain.effects_for(a.schema):
        env0 = match_args(eff.action.args, a.args)
        if env0 is None or eff.fluent.schema != p.schema:
            continue
        if match_args(eff.fluent.args, p.args, env0) is not None:
            return True
    return False


def static_aspect_samples(domain: Domain,
                          cap: int = 400) -> list[tuple[AspectPath, AspectPath]]:
    """Distinct (fluent aspect, action aspect) pairs the domain can produce.

    Aspects are instantiated over all static guard groundings, so conditional
    rules contribute every aspect they might assign. Used as the sample set
    for monotonicity lints.
    """
    errors: list[str] = []
    fluent_paths: list[AspectPath] = []
    for p in ground_fluents(domain):
        for asp, _ in _aspect_combos(domain, "fluent", p.schema, p.args, str(p), errors):
            if asp not in fluent_paths:
                fluent_paths.append(asp)
    action_paths: list[AspectPath] = []
    for a in ground_actions(domain):
        for asp, _ in _aspect_combos(domain, "action", a.schema, a.args, str(a), errors):
            if asp not in action_paths:
                action_paths.append(asp)
    pairs = [(f, a) for f in fluent_paths for a in action_paths]
    return pairs[:cap]
