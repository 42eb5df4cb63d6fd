"""Bounded model search: counterexample hunting and the commutativity trap.

The exhaustive layer enumerates every semantically distinct small structure
a formalism's axioms and conclusion can observe: the relation (or function)
behind the checked aspect, the action map, and the fluent valuation, with
witnesses searched over all predicates. Relations behind unrelated aspect
labels never enter any axiom, and composed relations range over the full
relation space (the identity is an admissible factor), so this enumeration
covers all factored models of the same size.

The random layer samples larger structures, biased so that a useful share
of them satisfies the premises instead of being vacuous.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Optional

from .disjoint import CommutativeCanonical, d_eval
from .errors import ModelError
from .finite import FiniteModel, compose_rows
from .terms import AspectPath, path
from .validator import (
    FORMALISMS,
    check_commutativity,
    is_collective,
    is_functional,
    is_universal,
    verify_theorem,
)


@dataclass(frozen=True)
class SearchResult:
    formalism: str
    counterexample: Optional[FiniteModel]
    exhaustive_models: int
    exhaustive_premise_models: int
    random_models: int
    random_premise_models: int
    seed: int
    scope: tuple[str, ...]

    @property
    def clean(self) -> bool:
        return self.counterexample is None


def search_counterexample(formalism: str, max_situations: int = 3, seed: int = 0,
                          random_samples: int = 0,
                          random_max_situations: int = 6) -> SearchResult:
    """Exhaust small structures, then sample seeded random larger ones.

    Returns the first structure where the premises hold and the
    non-interference conclusion fails; the expected result is none.
    """
    if formalism not in FORMALISMS:
        raise ModelError(f"unknown formalism '{formalism}'")
    scope = [
        f"exhaustive over 1..{max_situations} situations, one checked aspect, "
        f"one action, all valuations, witnesses searched over all predicates",
    ]
    if is_collective(formalism):
        scope.append("collective layout: two elements, fluent aspect {x1}, "
                     "action aspect {x2}; wider aspects are sampled randomly")
    exhaustive_models = 0
    exhaustive_premise = 0
    for n in range(1, max_situations + 1):
        found, checked, premise = _exhaustive_level(formalism, n)
        exhaustive_models += checked
        exhaustive_premise += premise
        if found is not None:
            return SearchResult(formalism, found, exhaustive_models,
                                exhaustive_premise, 0, 0, seed, tuple(scope))
    random_models = 0
    random_premise = 0
    if random_samples:
        scope.append(f"random sampling: {random_samples} models with up to "
                     f"{random_max_situations} situations, premise-biased")
        found, random_models, random_premise = _random_sweep(
            formalism, random_samples, seed, random_max_situations)
        if found is not None:
            return SearchResult(formalism, found, exhaustive_models,
                                exhaustive_premise, random_models,
                                random_premise, seed, tuple(scope))
    return SearchResult(formalism, None, exhaustive_models, exhaustive_premise,
                        random_models, random_premise, seed, tuple(scope))


def _definable_valuations(n: int, rows: Optional[list[int]], vec: Optional[list[int]],
                          universal: bool) -> set[int]:
    """All valuations expressible as a witness predicate over the aspect."""
    full = (1 << n) - 1
    out = set()
    for q in range(1 << n):
        mask = 0
        for s in range(n):
            if vec is not None:
                bit = bool(q >> vec[s] & 1)
            elif universal:
                bit = (rows[s] & ~q & full) == 0
            else:
                bit = (rows[s] & q) != 0
            if bit:
                mask |= 1 << s
        out.add(mask)
    return out


def _all_relation_rows(n: int):
    if n == 0:
        return
    masks = range(1 << n)
    stack = [[]]
    for _ in range(n):
        stack = [rows + [m] for rows in stack for m in masks]
    for rows in stack:
        yield rows


def _all_vecs(n: int):
    stack = [[]]
    for _ in range(n):
        stack = [v + [t] for v in stack for t in range(n)]
    for v in stack:
        yield v


def _exhaustive_level(formalism: str, n: int):
    functional = is_functional(formalism)
    universal = is_universal(formalism)
    checked = 0
    premise_models = 0
    if functional:
        structures = ((None, vec) for vec in _all_vecs(n))
    else:
        structures = ((rows, None) for rows in _all_relation_rows(n))
    for rows, vec in structures:
        definable = _definable_valuations(n, rows, vec, universal)
        for act in _all_vecs(n):
            if vec is not None:
                stable = all(vec[s] == vec[act[s]] for s in range(n))
            else:
                stable = all(rows[s] == rows[act[s]] for s in range(n))
            if not stable:
                checked += 1 << n  # every valuation of this structure is vacuous
                continue
            for val in range(1 << n):
                checked += 1
                if val not in definable:
                    continue  # fluent-factorization premise fails
                premise_models += 1
                if any((val >> s & 1) != (val >> act[s] & 1) for s in range(n)):
                    model = _materialize(formalism, n, rows, vec, act, val)
                    return model, checked, premise_models
    return None, checked, premise_models


def _materialize(formalism: str, n: int, rows, vec, act, val) -> FiniteModel:
    sits = tuple(f"s{i}" for i in range(n))
    if vec is not None:
        rows = [1 << t for t in vec]
    rel = frozenset((sits[s], sits[t]) for s in range(n)
                    for t in range(n) if rows[s] >> t & 1)
    action_map = {sits[s]: sits[act[s]] for s in range(n)}
    valuation = frozenset(sits[s] for s in range(n) if val >> s & 1)
    if is_collective(formalism):
        alpha = AspectPath.of({"x1"})
        beta = AspectPath.of({"x2"})
        return FiniteModel(
            name=f"{formalism}-counterexample", situations=sits,
            collective_rels={"x1": rel, "x2": rel},
            action_maps={"act": action_map}, valuations={"p": valuation},
            fluent_aspects={"p": alpha}, action_aspects={"act": beta},
            d_table=frozenset({(alpha, beta)}))
    alpha = path("a1")
    beta = path("a2")
    return FiniteModel(
        name=f"{formalism}-counterexample", situations=sits,
        aspect_rels={"a1": rel, "a2": frozenset()},
        functional=frozenset(("a1",)) if vec is not None else frozenset(),
        action_maps={"act": action_map}, valuations={"p": valuation},
        fluent_aspects={"p": alpha}, action_aspects={"act": beta},
        d_table=frozenset({(alpha, beta)}))


def _random_sweep(formalism: str, samples: int, seed: int, max_n: int):
    rng = random.Random(f"{formalism}/{seed}")
    functional = is_functional(formalism)
    universal = is_universal(formalism)
    checked = 0
    premise_models = 0
    for _ in range(samples):
        checked += 1
        n = rng.randint(2, max_n)
        full = (1 << n) - 1
        if functional:
            f1 = [rng.randrange(n) for _ in range(n)]
            f2 = [rng.randrange(n) for _ in range(n)]
            vec = [f2[f1[s]] for s in range(n)]
            rows = None
        else:
            r1 = [rng.randrange(1 << n) for _ in range(n)]
            r2 = [rng.randrange(1 << n) for _ in range(n)]
            rows = compose_rows(r1, r2)
            vec = None
        if rng.random() < 0.5:
            act = [rng.randrange(n) for _ in range(n)]
        else:
            sig = vec if vec is not None else rows
            classes: dict[int, list[int]] = {}
            for s in range(n):
                classes.setdefault(sig[s], []).append(s)
            act = [rng.choice(classes[sig[s]]) for s in range(n)]
        q = rng.randrange(1 << n)
        if rng.random() < 0.5:
            val = 0
            for s in range(n):
                if vec is not None:
                    bit = bool(q >> vec[s] & 1)
                elif universal:
                    bit = (rows[s] & ~q & full) == 0
                else:
                    bit = (rows[s] & q) != 0
                if bit:
                    val |= 1 << s
        else:
            val = rng.randrange(1 << n)
        if vec is not None:
            stable = all(vec[s] == vec[act[s]] for s in range(n))
        else:
            stable = all(rows[s] == rows[act[s]] for s in range(n))
        if not stable:
            continue
        if val not in _definable_valuations(n, rows, vec, universal):
            continue
        premise_models += 1
        if any((val >> s & 1) != (val >> act[s] & 1) for s in range(n)):
            return _materialize(formalism, n, rows, vec, act, val), checked, premise_models
    return None, checked, premise_models


# ---------------------------------------------------------------------------
# The commutativity trap
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PitfallFirstHalf:
    """Under the naive exists-a-difference d plus commutativity, every
    premise-satisfying action of aspect (0,1) is effect-free on all four
    two-step aspects."""

    pairs_checked: int
    commuting_pairs: int
    violations: int
    scope: tuple[str, ...]

    @property
    def effect_free_everywhere(self) -> bool:
        return self.violations == 0


@dataclass(frozen=True)
class PitfallSecondHalf:
    """Under the canonical commutative d, a commuting model exists whose
    premises all hold while the action changes a (0,1)-aspect fluent."""

    model: FiniteModel
    commutativity_holds: bool
    premises_hold: bool
    changed_fluent: str
    changed_at: str
    naive_premises_hold: bool


@dataclass(frozen=True)
class PitfallReport:
    first: PitfallFirstHalf
    second: PitfallSecondHalf
    corrected_d_rejects_swap: bool  # d((0,1),(1,0)) is False under the corrected spec
    seed: int

    @property
    def reproduced(self) -> bool:
        return (self.first.effect_free_everywhere
                and self.second.premises_hold
                and self.second.commutativity_holds
                and not self.second.naive_premises_hold
                and self.corrected_d_rejects_swap)


def reproduce_commutative_pitfall(seed: int = 0, exhaustive_max: int = 3,
                                  functional_situations: int = 4,
                                  random_samples: int = 20000) -> PitfallReport:
    """Reproduce both halves of the commutativity trap.

    First half: sweep commuting relation pairs (exhaustively up to
    `exhaustive_max` situations, exhaustively over function pairs at
    `functional_situations`, plus seeded random commuting pairs) and confirm
    that whenever the naive premises hold for an action of aspect (0,1), the
    rows of all four composed aspects are preserved, i.e. the action cannot
    change any witness-definable fluent. Second half: exhibit a commuting
    model that satisfies every premise of the corrected regime while the
    action does change a (0,1)-aspect fluent.
    """
    pairs_checked = 0
    commuting = 0
    violations = 0
    scope = [f"all relation pairs on 1..{exhaustive_max} situations",
             f"all function pairs on {functional_situations} situations",
             f"{random_samples} seeded random commuting pairs on "
             f"{functional_situations} situations"]

    for n in range(1, exhaustive_max + 1):
        all_rows = list(_all_relation_rows(n))
        for r0 in all_rows:
            for r1 in all_rows:
                pairs_checked += 1
                violations += _naive_trap_violations(n, r0, r1)
                if _commutes(r0, r1):
                    commuting += 1

    nf = functional_situations
    for f0 in _all_vecs(nf):
        r0 = [1 << t for t in f0]
        for f1 in _all_vecs(nf):
            pairs_checked += 1
            r1 = [1 << t for t in f1]
            violations += _naive_trap_violations(nf, r0, r1)
            if _commutes(r0, r1):
                commuting += 1

    rng = random.Random(seed)
    for _ in range(random_samples):
        pairs_checked += 1
        r0 = [rng.randrange(1 << nf) for _ in range(nf)]
        r1 = _random_commuting_partner(rng, r0, nf)
        violations += _naive_trap_violations(nf, r0, r1)
        commuting += 1  # partners are commuting by construction

    first = PitfallFirstHalf(pairs_checked=pairs_checked, commuting_pairs=commuting,
                             violations=violations, scope=tuple(scope))

    model = build_pitfall_witness()
    verdict = verify_theorem("seq-rel-exists", model)
    comm = check_commutativity(model)
    avec = model.act_vec("flip")
    p01 = model.val_mask("p01")
    changed_at = ""
    for s in range(len(model.situations)):
        if (p01 >> s & 1) != (p01 >> avec[s] & 1):
            changed_at = model.situations[s]
            break
    naive = verify_theorem("seq-rel-exists", _with_naive_dtable(model))
    second = PitfallSecondHalf(
        model=model, commutativity_holds=comm.holds,
        premises_hold=verdict.premises.all_hold, changed_fluent="p01",
        changed_at=changed_at, naive_premises_hold=naive.premises.all_hold)

    rejects = not d_eval(CommutativeCanonical(), path("0", "1"), path("1", "0"))
    return PitfallReport(first=first, second=second,
                         corrected_d_rejects_swap=rejects, seed=seed)


def _commutes(r0: list[int], r1: list[int]) -> bool:
    return compose_rows(r0, r1) == compose_rows(r1, r0)


def _naive_trap_violations(n: int, r0: list[int], r1: list[int]) -> int:
    """For a commuting pair: count ways an action could satisfy the naive
    premises yet change a definable fluent of some two-step aspect.

    The naive d relates aspects (0,0), (1,0), (1,1) to the action aspect
    (0,1), so premise-satisfying actions preserve those three composed rows;
    the action is free on a (0,1)-aspect fluent iff the (0,1) rows are not
    constant on the preservation classes. Quantifying over actions reduces
    to that class check, because a premise-satisfying action may map a
    situation anywhere inside its class.
    """
    if not _commutes(r0, r1):
        return 0
    r00 = compose_rows(r0, r0)
    r10 = compose_rows(r1, r0)
    r11 = compose_rows(r1, r1)
    r01 = compose_rows(r0, r1)
    sig = [(r00[s], r10[s], r11[s]) for s in range(n)]
    classes: dict[tuple, set[int]] = {}
    for s in range(n):
        classes.setdefault(sig[s], set()).add(s)
    bad = 0
    for members in classes.values():
        rows01 = {r01[s] for s in members}
        if len(rows01) > 1:
            bad += 1
    return bad


def _random_commuting_partner(rng: random.Random, r0: list[int], n: int) -> list[int]:
    """A random polynomial in r0 (union of powers, optionally the identity);
    such relations always commute with r0."""
    powers = [[1 << s for s in range(n)]]  # identity
    cur = powers[0]
    for _ in range(3):
        cur = compose_rows(cur, r0)
        powers.append(cur)
    keep = [p for p in powers if rng.random() < 0.5]
    if not keep:
        keep = [powers[1]]
    out = [0] * n
    for p in keep:
        for s in range(n):
            out[s] |= p[s]
    return out


def build_pitfall_witness() -> FiniteModel:
    """A commuting model whose flip action changes a (0,1)-aspect fluent.

    Two world situations w0/w1 with distinct (0,1) components d0/d1; the
    two-step aspects (0,0) and (1,1) are empty, so the corrected-d premises
    hold, while flip swaps the worlds.
    """
    sits = ("w0", "w1", "m0", "m1", "n0", "n1", "d0", "d1")
    rel0 = frozenset({("w0", "m0"), ("w1", "m1"), ("n0", "d0"), ("n1", "d1")})
    rel1 = frozenset({("w0", "n0"), ("w1", "n1"), ("m0", "d0"), ("m1", "d1")})
    flip = {s: s for s in sits}
    flip["w0"] = "w1"
    flip["w1"] = "w0"
    paths = {name: path(*name[1:]) for name in ("p00", "p01", "p10", "p11")}
    witnesses = {
        ("p00", "seq-rel-exists"): frozenset(),
        ("p01", "seq-rel-exists"): frozenset({"d0"}),
        ("p10", "seq-rel-exists"): frozenset({"d0"}),
        ("p11", "seq-rel-exists"): frozenset(),
    }
    return FiniteModel(
        name="mesh-witness",
        situations=sits,
        aspect_rels={"0": rel0, "1": rel1},
        action_maps={"flip": flip},
        valuations={"p00": frozenset(), "p01": frozenset({"w0"}),
                    "p10": frozenset({"w0"}), "p11": frozenset()},
        fluent_aspects=paths,
        action_aspects={"flip": path("0", "1")},
        witnesses=witnesses,
        d_table=frozenset({(path("0", "0"), path("0", "1")),
                           (path("1", "1"), path("0", "1"))}),
    )


def _with_naive_dtable(model: FiniteModel) -> FiniteModel:
    """The same model under the naive exists-a-difference d: the (1,0) vs
    (0,1) pair is additionally declared disjoint."""
    naive = set(model.d_table)
    naive.add((path("1", "0"), path("0", "1")))
    return FiniteModel(
        name=model.name + "-naive", situations=model.situations,
        aspect_rels=model.aspect_rels, functional=model.functional,
        action_maps=model.action_maps, valuations=model.valuations,
        fluent_aspects=model.fluent_aspects, action_aspects=model.action_aspects,
        witnesses={(p, f): w for (p, f), w in model.witnesses.items()},
        collective_rels=model.collective_rels,
        collective_witnesses=model.collective_witnesses,
        d_table=frozenset(naive))
