"""Domain descriptions: schemas, aspect rules, effects, and preconditions.

A Domain declares fluent/action schemas over sorted object universes,
assigns aspects to ground fluents and actions through (possibly guarded)
rules, and lists conditional add/delete effects per action. Guards are
conjunctions of fluent literals evaluated against the current state; a
variable that first appears in a guard is existentially bound by it.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Optional, Sequence, Union

from .disjoint import DisjointnessSpec, SeqExistsDiff
from .errors import SchemaError, SitAspectError
from .state import WorldState, build_state, eval_fluent
from .terms import (
    AspectAtom,
    AspectElem,
    AspectPath,
    AspectSet,
    GroundFluent,
    GroundTerm,
    term_sort_key,
)


@dataclass(frozen=True)
class Var:
    name: str

    def __str__(self) -> str:
        return self.name


PatArg = Union[Var, str]


@dataclass(frozen=True)
class SortRef:
    """A parameter type: objects of a sort, or finite sets of them."""

    name: str
    is_set: bool = False

    def __str__(self) -> str:
        return f"set of {self.name}" if self.is_set else self.name


@dataclass(frozen=True)
class FluentSchema:
    name: str
    params: tuple[SortRef, ...] = ()


@dataclass(frozen=True)
class ActionSchema:
    name: str
    params: tuple[SortRef, ...] = ()


@dataclass(frozen=True)
class Pat:
    """A fluent or action schema applied to variables and object constants."""

    schema: str
    args: tuple[PatArg, ...] = ()

    def variables(self) -> tuple[Var, ...]:
        return tuple(a for a in self.args if isinstance(a, Var))

    def __str__(self) -> str:
        return f"{self.schema}({','.join(str(a) for a in self.args)})"


@dataclass(frozen=True)
class GuardLiteral:
    fluent: Pat
    positive: bool = True

    def __str__(self) -> str:
        return ("" if self.positive else "!") + str(self.fluent)


@dataclass(frozen=True)
class MemberGuard:
    """`x in S`: binds or tests x over the members of a set-valued term."""

    member: PatArg
    collection: PatArg

    def __str__(self) -> str:
        return f"{self.member} in {self.collection}"


GuardAtom = Union[GuardLiteral, MemberGuard]
Guard = tuple[GuardAtom, ...]


# Aspect templates: path elements over variables and constant atoms.
@dataclass(frozen=True)
class SetTemplate:
    members: frozenset[Union[Var, AspectAtom]]

    def __str__(self) -> str:
        return "{" + ",".join(sorted(str(m) for m in self.members)) + "}"


ElemTemplate = Union[Var, AspectAtom, SetTemplate]


@dataclass(frozen=True)
class AspectRule:
    kind: str  # "fluent" or "action"
    target: Pat
    template: tuple[ElemTemplate, ...]
    guard: Guard = ()

    def __str__(self) -> str:
        head = f"aspect {self.target} ({','.join(str(t) for t in self.template)})"
        if self.guard:
            head += " if " + " & ".join(str(g) for g in self.guard)
        return head


@dataclass(frozen=True)
class EffectRule:
    action: Pat
    add: bool
    fluent: Pat
    guard: Guard = ()

    def __str__(self) -> str:
        op = "add" if self.add else "del"
        s = f"effect {self.action} {op} {self.fluent}"
        if self.guard:
            s += " if " + " & ".join(str(g) for g in self.guard)
        return s


@dataclass(frozen=True)
class Precondition:
    action: Pat
    guard: Guard


@dataclass(frozen=True)
class FrameDecl:
    """An explicitly declared frame axiom for an intersecting pair."""

    action: Pat
    fluent: Pat


@dataclass(frozen=True)
class Domain:
    name: str
    sorts: dict[str, tuple[str, ...]]
    fluents: dict[str, FluentSchema]
    actions: dict[str, ActionSchema]
    aspect_rules: tuple[AspectRule, ...]
    effects: tuple[EffectRule, ...]
    preconditions: tuple[Precondition, ...] = ()
    frame_decls: tuple[FrameDecl, ...] = ()
    disjointness: DisjointnessSpec = field(default_factory=SeqExistsDiff)
    homes: dict[str, tuple[str, ...]] = field(default_factory=dict)

    def schema_names(self) -> frozenset[str]:
        return frozenset(self.fluents)

    def rules_for(self, kind: str, schema: str) -> tuple[AspectRule, ...]:
        return tuple(r for r in self.aspect_rules
                     if r.kind == kind and r.target.schema == schema)

    def effects_for(self, action_schema: str) -> tuple[EffectRule, ...]:
        return tuple(e for e in self.effects if e.action.schema == action_schema)

    def preconditions_for(self, action_schema: str) -> tuple[Precondition, ...]:
        return tuple(p for p in self.preconditions if p.action.schema == action_schema)

    def objects(self, sort: str) -> tuple[str, ...]:
        if sort not in self.sorts:
            raise SchemaError(f"unknown sort '{sort}' in domain '{self.name}'")
        return self.sorts[sort]


def arg_candidates(domain: Domain, ref: SortRef) -> list[GroundTerm]:
    """All ground terms a parameter can take: objects, or nonempty object subsets."""
    objs = domain.objects(ref.name)
    if not ref.is_set:
        return list(objs)
    subsets: list[GroundTerm] = []
    for size in range(1, len(objs) + 1):
        for combo in itertools.combinations(objs, size):
            subsets.append(frozenset(combo))
    return subsets


def ground_fluents(domain: Domain) -> list[GroundFluent]:
    out = []
    for schema in sorted(domain.fluents):
        sc = domain.fluents[schema]
        pools = [arg_candidates(domain, p) for p in sc.params]
        for args in itertools.product(*pools):
            out.append(GroundFluent(schema, tuple(args)))
    return out


def ground_actions(domain: Domain):
    from .terms import GroundAction

    out = []
    for schema in sorted(domain.actions):
        sc = domain.actions[schema]
        pools = [arg_candidates(domain, p) for p in sc.params]
        for args in itertools.product(*pools):
            out.append(GroundAction(schema, tuple(args)))
    return out


def match_args(pat_args: Sequence[PatArg], terms: Sequence[GroundTerm],
               binding: Optional[dict] = None) -> Optional[dict]:
    """Match pattern args against ground terms, extending `binding`."""
    if len(pat_args) != len(terms):
        return None
    env = dict(binding) if binding else {}
    for pa, t in zip(pat_args, terms):
        if isinstance(pa, Var):
            if pa.name in env:
                if env[pa.name] != t:
                    return None
            else:
                env[pa.name] = t
        else:
            if pa != t:
                return None
    return env


def instantiate_pat(pat: Pat, env: dict) -> GroundFluent:
    args = []
    for a in pat.args:
        if isinstance(a, Var):
            if a.name not in env:
                raise SitAspectError(f"unbound variable {a.name} in {pat}")
            args.append(env[a.name])
        else:
            args.append(a)
    return GroundFluent(pat.schema, tuple(args))


def instantiate_template(template: tuple[ElemTemplate, ...], env: dict) -> AspectPath:
    elems: list[AspectElem] = []
    for t in template:
        if isinstance(t, AspectAtom):
            elems.append(t)
        elif isinstance(t, Var):
            val = env.get(t.name)
            if val is None:
                raise SitAspectError(f"unbound variable {t.name} in aspect template")
            if isinstance(val, frozenset):
                elems.append(AspectSet(frozenset(AspectAtom(v) for v in val)))
            else:
                elems.append(AspectAtom(val))
        else:
            atoms: set[AspectAtom] = set()
            for m in t.members:
                if isinstance(m, AspectAtom):
                    atoms.add(m)
                else:
                    val = env.get(m.name)
                    if val is None:
                        raise SitAspectError(f"unbound variable {m.name} in aspect template")
                    if isinstance(val, frozenset):
                        atoms |= {AspectAtom(v) for v in val}
                    else:
                        atoms.add(AspectAtom(val))
            elems.append(AspectSet(frozenset(atoms)))
    return AspectPath(tuple(elems))


def _literal_candidates(domain: Domain, lit_pat: Pat, env: dict) -> Iterator[dict]:
    """Groundings of a literal's unbound variables over its schema's sorts."""
    schema = domain.fluents.get(lit_pat.schema)
    if schema is None:
        raise SchemaError(f"guard refers to unknown fluent '{lit_pat.schema}'")
    if len(schema.params) != len(lit_pat.args):
        raise SchemaError(f"arity mismatch in guard literal {lit_pat}")
    pools = []
    free: list[str] = []
    for pa, ref in zip(lit_pat.args, schema.params):
        if isinstance(pa, Var) and pa.name not in env:
            if pa.name in free:
                continue
            free.append(pa.name)
            pools.append(arg_candidates(domain, ref))
    if not free:
        yield dict(env)
        return
    for combo in itertools.product(*pools):
        out = dict(env)
        out.update(zip(free, combo))
        yield out


def solve_guard(domain: Domain, state: WorldState, guard: Guard,
                env: dict) -> list[dict]:
    """All extensions of `env` satisfying the guard conjunction in `state`.

    Positive literals must evaluate to True; negative literals with unbound
    variables read as negated existentials (no grounding may be True).
    Results are deterministic and duplicate-free.
    """
    envs = [dict(env)]
    for atom in guard:
        nxt: list[dict] = []
        if isinstance(atom, MemberGuard):
            for e in envs:
                coll = _resolve_arg(atom.collection, e)
                if not isinstance(coll, frozenset):
                    raise SitAspectError(
                        f"membership guard needs a set-valued collection, got {coll!r}")
                if isinstance(atom.member, Var) and atom.member.name not in e:
                    for member in sorted(coll):
                        e2 = dict(e)
                        e2[atom.member.name] = member
                        nxt.append(e2)
                else:
                    member = _resolve_arg(atom.member, e)
                    if member in coll:
                        nxt.append(e)
        elif atom.positive:
            for e in envs:
                for e2 in _literal_candidates(domain, atom.fluent, e):
                    if eval_fluent(state, instantiate_pat(atom.fluent, e2)) is True:
                        nxt.append(e2)
        else:
            for e in envs:
                if not any(eval_fluent(state, instantiate_pat(atom.fluent, e2)) is True
                           for e2 in _literal_candidates(domain, atom.fluent, e)):
                    nxt.append(e)
        envs = nxt
    return _dedupe(envs)


def static_guard_groundings(domain: Domain, guard: Guard, env: dict) -> list[dict]:
    """State-independent groundings of a guard's free variables.

    Used for whole-universe analyses: every grounding that is not internally
    contradictory counts as satisfiable in some state.
    """
    envs = [dict(env)]
    for atom in guard:
        nxt: list[dict] = []
        if isinstance(atom, MemberGuard):
            for e in envs:
                coll = _resolve_arg(atom.collection, e)
                if not isinstance(coll, frozenset):
                    raise SitAspectError(
                        f"membership guard needs a set-valued collection, got {coll!r}")
                if isinstance(atom.member, Var) and atom.member.name not in e:
                    for member in sorted(coll):
                        e2 = dict(e)
                        e2[atom.member.name] = member
                        nxt.append(e2)
                else:
                    if _resolve_arg(atom.member, e) in coll:
                        nxt.append(e)
        elif atom.positive:
            for e in envs:
                nxt.extend(_literal_candidates(domain, atom.fluent, e))
        else:
            nxt.extend(envs)
        envs = nxt
    # Drop groundings where some literal occurs both positively and negatively.
    ok = []
    for e in envs:
        pos = {instantiate_pat(g.fluent, e)
               for g in guard if isinstance(g, GuardLiteral) and g.positive}
        neg = {instantiate_pat(g.fluent, e)
               for g in guard
               if isinstance(g, GuardLiteral) and not g.positive and _fully_bound(g.fluent, e)}
        if not (pos & neg):
            ok.append(e)
    return _dedupe(ok)


def _fully_bound(pat: Pat, env: dict) -> bool:
    return all(not isinstance(a, Var) or a.name in env for a in pat.args)


def _resolve_arg(arg: PatArg, env: dict):
    if isinstance(arg, Var):
        if arg.name not in env:
            raise SitAspectError(f"unbound variable {arg.name}")
        return env[arg.name]
    return arg


def _dedupe(envs: list[dict]) -> list[dict]:
    seen = set()
    out = []
    for e in envs:
        key = tuple(sorted((k, term_sort_key(v)) for k, v in e.items()))
        if key not in seen:
            seen.add(key)
            out.append(e)
    return out


def initial_state(domain: Domain, true_fluents: Iterable[GroundFluent],
                  only: Optional[Iterable[tuple[str, ...]]] = None) -> WorldState:
    """Build a total state: every ground fluent placed at its home component.

    `only` restricts the state to the given component subtrees, leaving
    everything else (including root-homed fluents) unmodeled.
    """
    truths = set(true_fluents)
    for f in truths:
        check_ground_fluent(domain, f)
    prefixes = [tuple(p) for p in only] if only is not None else None
    placements: dict[tuple, dict[GroundFluent, bool]] = {(): {}}
    for f in ground_fluents(domain):
        home = domain.homes.get(f.schema, ())
        if prefixes is not None and not any(home[:len(p)] == p for p in prefixes):
            continue
        placements.setdefault(home, {})[f] = f in truths
    return build_state(placements, schemas=frozenset(domain.fluents))


def check_ground_fluent(domain: Domain, f: GroundFluent) -> None:
    schema = domain.fluents.get(f.schema)
    if schema is None:
        raise SchemaError(f"unknown fluent schema '{f.schema}'")
    _check_args(domain, schema.params, f.args, str(f))


def check_ground_action(domain: Domain, a) -> None:
    schema = domain.actions.get(a.schema)
    if schema is None:
        raise SchemaError(f"unknown action schema '{a.schema}'")
    _check_args(domain, schema.params, a.args, str(a))


def _check_args(domain: Domain, params: tuple[SortRef, ...],
                args: tuple[GroundTerm, ...], what: str) -> None:
    if len(params) != len(args):
        raise SchemaError(f"{what}: expected {len(params)} args, got {len(args)}")
    for ref, arg in zip(params, args):
        objs = domain.objects(ref.name)
        if ref.is_set:
            if not isinstance(arg, frozenset) or not arg:
                raise SchemaError(f"{what}: parameter of sort 'set of {ref.name}' "
                                  f"needs a nonempty set, got {arg!r}")
            bad = [m for m in arg if m not in objs]
        else:
            if isinstance(arg, frozenset):
                raise SchemaError(f"{what}: parameter of sort '{ref.name}' "
                                  f"got a set argument")
            bad = [] if arg in objs else [arg]
        if bad:
            raise SchemaError(f"{what}: {bad[0]!r} is not an object of sort '{ref.name}'")


def check_rule_exclusivity(domain: Domain) -> list[str]:
    """Static mutual-exclusivity check over aspect rules of the same schema.

    Two rules are accepted as exclusive when their pattern constants already
    clash, or when one guard contains a literal whose complement appears in
    the other (after positional renaming of pattern variables and canonical
    renaming of guard-bound variables). Anything weaker is reported.
    """
    problems = []
    by_target: dict[tuple[str, str], list[AspectRule]] = {}
    for r in domain.aspect_rules:
        by_target.setdefault((r.kind, r.target.schema), []).append(r)
    for (kind, schema), rules in sorted(by_target.items()):
        for i in range(len(rules)):
            for j in range(i + 1, len(rules)):
                if not _statically_exclusive(rules[i], rules[j]):
                    problems.append(
                        f"aspect rules for {kind} '{schema}' may overlap: "
                        f"[{rules[i]}] vs [{rules[j]}]")
    return problems


def _statically_exclusive(r1: AspectRule, r2: AspectRule) -> bool:
    for a1, a2 in zip(r1.target.args, r2.target.args):
        if isinstance(a1, str) and isinstance(a2, str) and a1 != a2:
            return True
    lits1 = {_canonical_literal(r1, g) for g in r1.guard if isinstance(g, GuardLiteral)}
    for g in r2.guard:
        if not isinstance(g, GuardLiteral):
            continue
        schema, args, sign = _canonical_literal(r2, g)
        if (schema, args, not sign) in lits1:
            return True
    return False


def _canonical_literal(rule: AspectRule, lit: GuardLiteral):
    pattern_pos = {a.name: f"p{i}" for i, a in enumerate(rule.target.args)
                   if isinstance(a, Var)}
    fresh: dict[str, str] = {}
    args = []
    for a in lit.fluent.args:
        if isinstance(a, Var):
            if a.name in pattern_pos:
                args.append(pattern_pos[a.name])
            else:
                fresh.setdefault(a.name, f"g{len(fresh)}")
                args.append(fresh[a.name])
        else:
            args.append(f"c:{a}")
    return (lit.fluent.schema, tuple(args), lit.positive)
