"""Builders for premise-satisfying finite models and planted violations.

For every formalism variant there is a passing base model plus one
corruption per premise axiom: `stability` rewires the checked aspect so the
action no longer preserves it; `factorization` swaps in a valuation that no
witness predicate can produce (the two swapped situations share their rows,
so no predicate separates them).

The base valuations are computed here with plain set arithmetic from the
witness, independently of the library's bitmask machinery.
"""

from __future__ import annotations

from sitaspect.finite import FiniteModel
from sitaspect.terms import AspectPath, path
from sitaspect.validator import (
    FORMALISMS,
    is_collective,
    is_functional,
    is_sequential,
    is_universal,
)

STABILITY = "stability"
FACTORIZATION = "factorization"

SITS = ("s0", "s1", "mid", "mid2", "t0", "t1")
WITNESS = frozenset({"t0"})


def _successors(rel: frozenset, s: str) -> set[str]:
    return {t for (u, t) in rel if u == s}


def _compose(rels: list[frozenset]) -> dict[str, set[str]]:
    reach = {s: {s} for s in SITS}
    for rel in rels:
        reach = {s: {t for u in reach[s] for t in _successors(rel, u)}
                 for s in SITS}
    return reach


def _defined_valuation(formalism: str, rels: list[frozenset]) -> frozenset[str]:
    reach = _compose(rels)
    if is_universal(formalism):
        return frozenset(s for s in SITS if reach[s] <= WITNESS)
    return frozenset(s for s in SITS if reach[s] & WITNESS)


def make_model(formalism: str, corrupt: str | None = None) -> FiniteModel:
    assert formalism in FORMALISMS
    functional = is_functional(formalism)
    fixed = frozenset((s, s) for s in SITS)
    swap = {s: s for s in SITS}
    swap["s0"], swap["s1"] = "s1", "s0"

    s1_first = "mid2" if corrupt == STABILITY else "mid"
    s1_single = "t1" if corrupt == STABILITY else "t0"

    if is_sequential(formalism):
        hop1 = {("s0", "mid"), ("s1", s1_first)}
        hop2 = {("mid", "t0"), ("mid2", "t1")}
        if functional:
            hop1 |= {(s, s) for s in SITS if s not in ("s0", "s1")}
            hop2 |= {(s, s) for s in SITS if s not in ("mid", "mid2")}
        rels = {"a1": frozenset(hop1), "a2": frozenset(hop2)}
        alpha = path("a1", "a2")
        chain = [rels["a1"], rels["a2"]]
    else:
        hop = {("s0", "t0"), ("s1", s1_single)}
        if functional:
            hop |= {(s, s) for s in SITS if s not in ("s0", "s1")}
        rels = {"a1": frozenset(hop)}
        alpha = path("a1")
        chain = [rels["a1"]]

    if corrupt == FACTORIZATION:
        val = frozenset({"s0"})
    else:
        val = _defined_valuation(formalism, chain)

    if is_collective(formalism):
        alpha_c = AspectPath.of({"x1"})
        beta_c = AspectPath.of({"x2"})
        # Element x1 carries the single-hop relation; x2 is untouched.
        hop = {("s0", "t0"), ("s1", s1_single)}
        if functional:
            hop |= {(s, s) for s in SITS if s not in ("s0", "s1")}
        if corrupt == FACTORIZATION:
            cval = frozenset({"s0"})
        else:
            cval = _defined_valuation(formalism, [frozenset(hop)])
        return FiniteModel(
            name=f"{formalism}-{corrupt or 'base'}",
            situations=SITS,
            collective_rels={"x1": frozenset(hop), "x2": fixed},
            action_maps={"act": swap},
            valuations={"p": cval},
            fluent_aspects={"p": alpha_c},
            action_aspects={"act": beta_c},
            collective_witnesses={("p", formalism, "x1"): WITNESS},
            d_table=frozenset({(alpha_c, beta_c)}),
        )

    return FiniteModel(
        name=f"{formalism}-{corrupt or 'base'}",
        situations=SITS,
        aspect_rels=dict(rels) | {"b1": frozenset()},
        functional=frozenset(rels) if functional else frozenset(),
        action_maps={"act": swap},
        valuations={"p": val},
        fluent_aspects={"p": alpha},
        action_aspects={"act": path("b1")},
        witnesses={("p", formalism): WITNESS},
        d_table=frozenset({(alpha, path("b1"))}),
    )
