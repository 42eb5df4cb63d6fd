"""Premise and conclusion checking for the thirteen formalism variants.

Each variant pairs a component-stability axiom (actions declared
non-interfering with an aspect leave that aspect's relation or function
unchanged) with a fluent-factorization axiom (the fluent's valuation factors
through a witness predicate over the aspect). The non-interference
conclusion is then checked model-wide: declared-disjoint action/fluent pairs
must never change the fluent's value.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Optional

from .errors import ModelError
from .finite import FiniteModel, compose_rows
from .terms import AspectAtom, AspectPath, AspectSet

FORMALISMS = (
    "rel-exists", "rel-forall",
    "seq-rel-exists", "seq-rel-forall",
    "fun", "seq-fun",
    "coll-rel-exists", "coll-rel-forall", "coll-fun",
    "modal-box", "modal-diamond",
    "seq-modal-box", "seq-modal-diamond",
)

STABILITY = "component-stability"
FACTORIZATION = "fluent-factorization"
PRESERVATION = "aspect-preservation"

_WITNESS_SEARCH_LIMIT = 10


def is_collective(formalism: str) -> bool:
    return formalism.startswith("coll-")


def is_functional(formalism: str) -> bool:
    return formalism in ("fun", "seq-fun", "coll-fun")


def is_universal(formalism: str) -> bool:
    return formalism in ("rel-forall", "seq-rel-forall", "coll-rel-forall",
                         "modal-box", "seq-modal-box")


def is_modal(formalism: str) -> bool:
    return formalism.startswith("modal-") or formalism.startswith("seq-modal-")


def is_sequential(formalism: str) -> bool:
    return formalism.startswith("seq-")


@dataclass(frozen=True)
class PremiseCheck:
    axiom: str
    subject: str
    holds: bool
    note: str = ""


@dataclass(frozen=True)
class PremiseReport:
    formalism: str
    checks: tuple[PremiseCheck, ...]
    notes: tuple[str, ...] = ()

    @property
    def all_hold(self) -> bool:
        return all(c.holds for c in self.checks)

    def violated(self) -> tuple[PremiseCheck, ...]:
        return tuple(c for c in self.checks if not c.holds)


@dataclass(frozen=True)
class NonInterferenceReport:
    pairs_checked: int
    counterexamples: tuple[tuple[str, str, str], ...]  # (fluent, action, situation)

    @property
    def holds(self) -> bool:
        return not self.counterexamples


@dataclass(frozen=True)
class TheoremVerdict:
    formalism: str
    verdict: str  # "pass" | "vacuous" | "counterexample"
    premises: PremiseReport
    conclusion: Optional[NonInterferenceReport]


def _shape_check(model: FiniteModel, formalism: str) -> None:
    for kind, aspects in (("fluent", model.fluent_aspects),
                          ("action", model.action_aspects)):
        for name, path in aspects.items():
            if is_collective(formalism):
                if len(path) != 1 or not isinstance(path[0], AspectSet):
                    raise ModelError(
                        f"collective formalisms need set aspects; {kind} "
                        f"'{name}' has {path}")
            elif is_sequential(formalism):
                if not path.is_atomic():
                    raise ModelError(
                        f"sequential formalisms need atom paths; {kind} "
                        f"'{name}' has {path}")
            else:
                if len(path) != 1 or not isinstance(path[0], AspectAtom):
                    raise ModelError(
                        f"simple formalisms need single-atom aspects; {kind} "
                        f"'{name}' has {path}")


def check_premises(model: FiniteModel, formalism: str,
                   witness_search_limit: int = _WITNESS_SEARCH_LIMIT) -> PremiseReport:
    """Universally check the formalism's premise axioms over the model.

    Existential witness axioms use the stored witness when one is declared;
    otherwise every predicate over the situations is searched (models up to
    `witness_search_limit` situations).
    """
    if formalism not in FORMALISMS:
        raise ModelError(f"unknown formalism '{formalism}'")
    model.validate()
    _shape_check(model, formalism)
    checks: list[PremiseCheck] = []
    notes: list[str] = []
    if is_collective(formalism):
        checks += _collective_stability(model, formalism)
        checks += _collective_factorization(model, formalism, witness_search_limit)
        notes.append(
            "collective d(alpha,beta) is validated under the empty-intersection "
            "reading; a nonempty-intersection reading would contradict "
            "element stability and is not used")
    else:
        checks += _stability(model, formalism)
        checks += _factorization(model, formalism, witness_search_limit)
    if is_sequential(formalism):
        notes.append("relations over aspect sequences are expanded by "
                     "composition, first element first")
    if is_modal(formalism):
        notes.append("modal schema variables range over all subset "
                     "valuations of the situation set")
    checks.append(PremiseCheck(
        axiom=PRESERVATION, subject="all fluents and actions", holds=True,
        note="aspect assignments are fixed maps, independent of the situation"))
    return PremiseReport(formalism=formalism, checks=tuple(checks),
                         notes=tuple(notes))


def _stability(model: FiniteModel, formalism: str) -> list[PremiseCheck]:
    checks = []
    for act in sorted(model.action_maps):
        beta = model.action_aspects.get(act)
        if beta is None:
            raise ModelError(f"action '{act}' has no aspect assignment")
        avec = model.act_vec(act)
        for alpha, beta2 in sorted(model.d_table, key=str):
            if beta2 != beta:
                continue
            subject = f"R{alpha} under {act}"
            if is_functional(formalism):
                vec = _path_func_vec(model, alpha)
                bad = [s for s in range(len(vec)) if vec[s] != vec[avec[s]]]
            elif is_modal(formalism):
                bad = _modal_stability_fails(model, alpha, avec,
                                             universal=is_universal(formalism))
            else:
                rows = model.path_rows(alpha)
                bad = [s for s in range(len(rows)) if rows[s] != rows[avec[s]]]
            if bad:
                w = model.situations[bad[0]]
                checks.append(PremiseCheck(STABILITY, subject, False,
                                           f"changes at situation {w}"))
            else:
                checks.append(PremiseCheck(STABILITY, subject, True))
    return checks


def _modal_stability_fails(model: FiniteModel, alpha: AspectPath,
                           avec: list[int], universal: bool) -> list[int]:
    """Situations where some subset valuation distinguishes w from a(w)."""
    n = len(model.situations)
    if n > 12:
        raise ModelError("subset quantification over modal schemas is "
                         "limited to 12 situations")
    rows = model.path_rows(alpha)
    full = (1 << n) - 1
    bad = []
    for w in range(n):
        for x in range(1 << n):
            if universal:
                here = (rows[w] & ~x & full) == 0
                there = (rows[avec[w]] & ~x & full) == 0
            else:
                here = (rows[w] & x) != 0
                there = (rows[avec[w]] & x) != 0
            if here != there:
                bad.append(w)
                break
    return bad


def _collective_stability(model: FiniteModel, formalism: str) -> list[PremiseCheck]:
    checks = []
    elements = sorted(model.collective_rels)
    if not elements:
        raise ModelError("collective formalisms need per-element relations")
    for act in sorted(model.action_maps):
        beta = model.action_aspects.get(act)
        if beta is None:
            raise ModelError(f"action '{act}' has no aspect assignment")
        beta_elems = {a.name for a in beta[0].atoms}
        avec = model.act_vec(act)
        for x in elements:
            if x in beta_elems:
                continue
            subject = f"R_{x} under {act}"
            if is_functional(formalism):
                vec = _element_func_vec(model, x)
                bad = [s for s in range(len(vec)) if vec[s] != vec[avec[s]]]
            else:
                rows = model.element_rows(x)
                bad = [s for s in range(len(rows)) if rows[s] != rows[avec[s]]]
            if bad:
                w = model.situations[bad[0]]
                checks.append(PremiseCheck(STABILITY, subject, False,
                                           f"changes at situation {w}"))
            else:
                checks.append(PremiseCheck(STABILITY, subject, True))
    return checks


def _path_func_vec(model: FiniteModel, path: AspectPath) -> list[int]:
    n = len(model.situations)
    vec = list(range(n))
    for elem in path:
        if not isinstance(elem, AspectAtom):
            raise ModelError(f"functional composition needs atom paths, got {path}")
        step = model.func_vec(elem.name)
        vec = [step[v] for v in vec]
    return vec


def _element_func_vec(model: FiniteModel, elem: str) -> list[int]:
    rows = model.element_rows(elem)
    vec = []
    for i, row in enumerate(rows):
        if row == 0 or row & (row - 1):
            raise ModelError(f"element relation '{elem}' is not a total function "
                             f"at {model.situations[i]}")
        vec.append(row.bit_length() - 1)
    return vec


def _factorization(model: FiniteModel, formalism: str,
                   witness_search_limit: int) -> list[PremiseCheck]:
    checks = []
    n = len(model.situations)
    for p in sorted(model.valuations):
        alpha = model.fluent_aspects.get(p)
        if alpha is None:
            raise ModelError(f"fluent '{p}' has no aspect assignment")
        val = model.val_mask(p)
        if is_functional(formalism):
            vec = _path_func_vec(model, alpha)
            define = lambda q: _mask(n, lambda s: bool(q >> vec[s] & 1))
        else:
            rows = model.path_rows(alpha)
            if is_universal(formalism):
                define = lambda q: _mask(n, lambda s: (rows[s] & ~q) & ((1 << n) - 1) == 0)
            else:
                define = lambda q: _mask(n, lambda s: (rows[s] & q) != 0)
        stored = model.witnesses.get((p, formalism))
        subject = f"{p} over {alpha}"
        if stored is not None:
            q = _to_mask(model, stored)
            holds = define(q) == val
            note = "" if holds else "stored witness does not reproduce the valuation"
            checks.append(PremiseCheck(FACTORIZATION, subject, holds, note))
        else:
            if n > witness_search_limit:
                raise ModelError(
                    f"fluent '{p}' has no stored witness and the model is too "
                    f"large for exhaustive search")
            found = next((q for q in range(1 << n) if define(q) == val), None)
            if found is None:
                checks.append(PremiseCheck(FACTORIZATION, subject, False,
                                           "no witness predicate exists"))
            else:
                names = [model.situations[s] for s in range(n) if found >> s & 1]
                checks.append(PremiseCheck(
                    FACTORIZATION, subject, True,
                    "witness found by search: {" + ",".join(names) + "}"))
    return checks


def _collective_factorization(model: FiniteModel, formalism: str,
                              witness_search_limit: int) -> list[PremiseCheck]:
    checks = []
    n = len(model.situations)
    for p in sorted(model.valuations):
        alpha = model.fluent_aspects.get(p)
        if alpha is None:
            raise ModelError(f"fluent '{p}' has no aspect assignment")
        elems = sorted(a.name for a in alpha[0].atoms)
        val = model.val_mask(p)
        if is_functional(formalism):
            vecs = {x: _element_func_vec(model, x) for x in elems}
            per_elem = lambda x, q, s: bool(q >> vecs[x][s] & 1)
        else:
            rows = {x: model.element_rows(x) for x in elems}
            if is_universal(formalism):
                per_elem = lambda x, q, s: (rows[x][s] & ~q) & ((1 << n) - 1) == 0
            else:
                per_elem = lambda x, q, s: (rows[x][s] & q) != 0
        subject = f"{p} over {alpha}"
        stored = {x: model.collective_witnesses.get((p, formalism, x)) for x in elems}
        if all(v is not None for v in stored.values()):
            qs = {x: _to_mask(model, stored[x]) for x in elems}
            got = _mask(n, lambda s: all(per_elem(x, qs[x], s) for x in elems))
            holds = got == val
            note = "" if holds else "stored witnesses do not reproduce the valuation"
            checks.append(PremiseCheck(FACTORIZATION, subject, holds, note))
        else:
            if (1 << n) ** len(elems) > 4096:
                raise ModelError(
                    f"fluent '{p}' lacks stored witnesses and the joint search "
                    f"space is too large")
            holds = False
            for combo in itertools.product(range(1 << n), repeat=len(elems)):
                qs = dict(zip(elems, combo))
                if _mask(n, lambda s: all(per_elem(x, qs[x], s) for x in elems)) == val:
                    holds = True
                    break
            note = "witness family found by exhaustive search" if holds else \
                "no witness family exists"
            checks.append(PremiseCheck(FACTORIZATION, subject, holds, note))
    return checks


def _mask(n: int, bit) -> int:
    out = 0
    for s in range(n):
        if bit(s):
            out |= 1 << s
    return out


def _to_mask(model: FiniteModel, subset: frozenset[str]) -> int:
    idx = model.index()
    out = 0
    for s in subset:
        if s not in idx:
            raise ModelError(f"witness situation '{s}' is not in the model")
        out |= 1 << idx[s]
    return out


def check_noninterference(model: FiniteModel) -> NonInterferenceReport:
    """For every pair the d table declares disjoint: p(s) must equal p(a(s))."""
    model.validate()
    counterexamples = []
    pairs = 0
    for p in sorted(model.valuations):
        alpha = model.fluent_aspects.get(p)
        if alpha is None:
            continue
        val = model.val_mask(p)
        for act in sorted(model.action_maps):
            beta = model.action_aspects.get(act)
            if beta is None or (alpha, beta) not in model.d_table:
                continue
            pairs += 1
            avec = model.act_vec(act)
            for s in range(len(model.situations)):
                if (val >> s & 1) != (val >> avec[s] & 1):
                    counterexamples.append((p, act, model.situations[s]))
    return NonInterferenceReport(pairs_checked=pairs,
                                 counterexamples=tuple(counterexamples))


def verify_theorem(formalism: str, model: FiniteModel,
                   witness_search_limit: int = _WITNESS_SEARCH_LIMIT) -> TheoremVerdict:
    """pass = premises and conclusion hold; vacuous = premises fail;
    counterexample = premises hold but the conclusion fails."""
    if is_collective(formalism) and not model.d_table:
        model = model.with_derived_dtable()
    premises = check_premises(model, formalism, witness_search_limit)
    conclusion = check_noninterference(model)
    if not premises.all_hold:
        return TheoremVerdict(formalism, "vacuous", premises, conclusion)
    if conclusion.holds:
        return TheoremVerdict(formalism, "pass", premises, conclusion)
    return TheoremVerdict(formalism, "counterexample", premises, conclusion)


@dataclass(frozen=True)
class CommutativityReport:
    pairs_checked: int
    violations: tuple[tuple[str, str, str], ...]  # (atom1, atom2, situation)

    @property
    def holds(self) -> bool:
        return not self.violations


def check_commutativity(model: FiniteModel) -> CommutativityReport:
    """R_{a,b} must equal R_{b,a} for every pair of aspect atoms.

    The relational, functional, and modal readings of the constraint all
    reduce to equality of the composed rows, so one check covers them.
    """
    model.validate()
    atoms = sorted(model.aspect_rels)
    violations = []
    pairs = 0
    for i in range(len(atoms)):
        for j in range(i + 1, len(atoms)):
            pairs += 1
            r1 = model.rel_rows(atoms[i])
            r2 = model.rel_rows(atoms[j])
            ab = compose_rows(r1, r2)
            ba = compose_rows(r2, r1)
            for s in range(len(ab)):
                if ab[s] != ba[s]:
                    violations.append((atoms[i], atoms[j], model.situations[s]))
                    break
    return CommutativityReport(pairs_checked=pairs, violations=tuple(violations))
