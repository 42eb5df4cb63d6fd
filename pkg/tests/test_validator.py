"""Finite-model checking: modal evaluation, premises, theorems, commutativity."""

from __future__ import annotations

import itertools
import random

import pytest

from sitaspect.errors import ModelError
from sitaspect.finite import (
    BoxAction,
    BoxAspect,
    Const,
    DiamondAspect,
    FiniteModel,
    FluentAtom,
    Implies,
    compose_rows,
    diamond_seq,
    modal_eval,
)
from sitaspect.terms import path
from sitaspect.validator import (
    FORMALISMS,
    check_commutativity,
    check_noninterference,
    check_premises,
    verify_theorem,
)
from tests.planted import FACTORIZATION, STABILITY, make_model


def _tiny_model() -> FiniteModel:
    return FiniteModel(
        name="tiny",
        situations=("w", "t", "u"),
        aspect_rels={"a": frozenset({("w", "t"), ("w", "u")}),
                     "b": frozenset()},
        action_maps={"go": {"w": "t", "t": "t", "u": "u"}},
        valuations={"p": frozenset({"t"})},
        fluent_aspects={"p": path("a")},
        action_aspects={"go": path("b")},
        d_table=frozenset(),
    )


def test_box_true_is_vacuously_true():
    m = _tiny_model()
    assert modal_eval(m, "u", BoxAspect("a", Const(True))) is True


def test_diamond_finds_a_successor():
    m = _tiny_model()
    assert modal_eval(m, "w", DiamondAspect("a", FluentAtom("p"))) is True
    assert modal_eval(m, "t", DiamondAspect("a", FluentAtom("p"))) is False


def test_box_action_steps_along_the_map():
    m = _tiny_model()
    assert modal_eval(m, "w", BoxAction("go", FluentAtom("p"))) is True


def test_undeclared_names_are_model_errors():
    m = _tiny_model()
    with pytest.raises(ModelError):
        modal_eval(m, "w", FluentAtom("q"))
    with pytest.raises(ModelError):
        modal_eval(m, "w", BoxAspect("zz", Const(True)))
    with pytest.raises(ModelError):
        modal_eval(m, "nowhere", Const(True))


def test_k_rule_holds_by_exhaustive_evaluation():
    # Whenever X -> Y holds at every world, [go]X -> [go]Y does too.
    m = _tiny_model()
    worlds = m.situations
    for xmask in range(8):
        for ymask in range(8):
            x = FluentAtom("x")
            y = FluentAtom("y")
            m2 = FiniteModel(
                name="k", situations=m.situations, aspect_rels=m.aspect_rels,
                action_maps=m.action_maps,
                valuations={"x": frozenset(w for i, w in enumerate(worlds)
                                           if xmask >> i & 1),
                            "y": frozenset(w for i, w in enumerate(worlds)
                                           if ymask >> i & 1)},
                fluent_aspects={}, action_aspects={}, d_table=frozenset())
            if all(modal_eval(m2, w, Implies(x, y)) for w in worlds):
                assert all(modal_eval(m2, w, Implies(BoxAction("go", x),
                                                     BoxAction("go", y)))
                           for w in worlds)


# -- worked models -----------------------------------------------------------

def test_heater_model_passes_rel_exists(heater_model):
    verdict = verify_theorem("rel-exists", heater_model)
    assert verdict.verdict == "pass"


def test_heater_all_model_passes_rel_forall(heater_all_model):
    verdict = verify_theorem("rel-forall", heater_all_model)
    assert verdict.verdict == "pass"


def test_university_passes_collective_variants(university_model):
    for formalism in ("coll-rel-exists", "coll-fun"):
        verdict = verify_theorem(formalism, university_model)
        assert verdict.verdict == "pass", (formalism, verdict.premises.violated())


def test_heater_planted_violation_is_located(heater_model):
    # Redirect the painted building's heater aspect: stability must break
    # with a witness situation in the note.
    broken_rel = dict(heater_model.aspect_rels)
    broken_rel["r4"] = frozenset(
        {("b0", "h_off"), ("b0p", "h_on"), ("b1", "h_on"), ("b1p", "h_on")})
    broken = FiniteModel(
        name="heater-broken", situations=heater_model.situations,
        aspect_rels=broken_rel, action_maps=heater_model.action_maps,
        valuations=heater_model.valuations,
        fluent_aspects=heater_model.fluent_aspects,
        action_aspects=heater_model.action_aspects,
        witnesses=heater_model.witnesses, d_table=heater_model.d_table)
    report = check_premises(broken, "rel-exists")
    bad = [c for c in report.checks if not c.holds]
    assert bad and bad[0].axiom == "component-stability"
    assert "b0" in bad[0].note


# -- planted violations across every formalism --------------------------------

@pytest.mark.parametrize("formalism", FORMALISMS)
def test_base_models_pass(formalism):
    verdict = verify_theorem(formalism, make_model(formalism))
    assert verdict.verdict == "pass", verdict.premises.violated()


@pytest.mark.parametrize("formalism", FORMALISMS)
@pytest.mark.parametrize("corruption", [STABILITY, FACTORIZATION])
def test_planted_violations_are_detected(formalism, corruption):
    model = make_model(formalism, corrupt=corruption)
    report = check_premises(model, formalism)
    bad = {c.axiom for c in report.checks if not c.holds}
    expected = ("component-stability" if corruption == STABILITY
                else "fluent-factorization")
    assert expected in bad
    # The other premise axiom stays intact: exactly one axiom is planted.
    other = ("fluent-factorization" if corruption == STABILITY
             else "component-stability")
    assert other not in bad


@pytest.mark.parametrize("formalism", FORMALISMS)
def test_planted_stability_never_passes_theorem(formalism):
    verdict = verify_theorem(formalism, make_model(formalism, corrupt=STABILITY))
    assert verdict.verdict == "vacuous"


# -- noninterference conclusion -----------------------------------------------

def test_noninterference_counterexample_is_located():
    m = make_model("rel-exists")
    # Flip the valuation at one swapped situation: the declared-disjoint
    # pair now changes the fluent.
    broken = FiniteModel(
        name="ni-broken", situations=m.situations, aspect_rels=m.aspect_rels,
        action_maps=m.action_maps, valuations={"p": frozenset({"s0"})},
        fluent_aspects=m.fluent_aspects, action_aspects=m.action_aspects,
        witnesses=m.witnesses, d_table=m.d_table)
    report = check_noninterference(broken)
    assert not report.holds
    assert ("p", "act", "s0") in report.counterexamples


def test_noninterference_vacuous_with_empty_table():
    m = _tiny_model()
    report = check_noninterference(m)
    assert report.holds
    assert report.pairs_checked == 0


# -- modal/relational agreement -----------------------------------------------

def _enumerated_model(n, rows, act, val) -> FiniteModel:
    sits = tuple(f"w{i}" for i in range(n))
    rel = frozenset((sits[s], sits[t]) for s in range(n) for t in range(n)
                    if rows[s] >> t & 1)
    return FiniteModel(
        name="enum", situations=sits,
        aspect_rels={"a1": rel, "b1": frozenset()},
        action_maps={"act": {sits[s]: sits[act[s]] for s in range(n)}},
        valuations={"p": frozenset(sits[s] for s in range(n) if val >> s & 1)},
        fluent_aspects={"p": path("a1")},
        action_aspects={"act": path("b1")},
        d_table=frozenset({(path("a1"), path("b1"))}))


def test_modal_premises_agree_with_relational_exhaustively():
    n = 2
    for rows in itertools.product(range(4), repeat=n):
        for act in itertools.product(range(n), repeat=n):
            for val in range(4):
                m = _enumerated_model(n, rows, act, val)
                box = check_premises(m, "modal-box").all_hold
                forall = check_premises(m, "rel-forall").all_hold
                diamond = check_premises(m, "modal-diamond").all_hold
                exists = check_premises(m, "rel-exists").all_hold
                assert box == forall
                assert diamond == exists


def test_modal_premises_agree_with_relational_sampled():
    rng = random.Random(11)
    for _ in range(300):
        n = rng.choice((3, 4))
        rows = [rng.randrange(1 << n) for _ in range(n)]
        act = [rng.randrange(n) for _ in range(n)]
        val = rng.randrange(1 << n)
        m = _enumerated_model(n, rows, act, val)
        assert (check_premises(m, "modal-box").all_hold
                == check_premises(m, "rel-forall").all_hold)
        assert (check_premises(m, "modal-diamond").all_hold
                == check_premises(m, "rel-exists").all_hold)


def test_sequential_expansion_matches_iterated_modal():
    # The composed relation's successor sets equal the worlds reachable by
    # nested diamond operators over indicator fluents.
    rng = random.Random(5)
    for _ in range(50):
        n = 4
        sits = tuple(f"w{i}" for i in range(n))
        r1 = [rng.randrange(1 << n) for _ in range(n)]
        r2 = [rng.randrange(1 << n) for _ in range(n)]
        rel1 = frozenset((sits[s], sits[t]) for s in range(n)
                         for t in range(n) if r1[s] >> t & 1)
        rel2 = frozenset((sits[s], sits[t]) for s in range(n)
                         for t in range(n) if r2[s] >> t & 1)
        m = FiniteModel(
            name="seq", situations=sits,
            aspect_rels={"a1": rel1, "a2": rel2},
            action_maps={}, valuations={f"at_{w}": frozenset({w}) for w in sits},
            fluent_aspects={}, action_aspects={}, d_table=frozenset())
        composed = m.path_rows(path("a1", "a2"))
        for s in range(n):
            for t in range(n):
                via_rows = bool(composed[s] >> t & 1)
                via_modal = modal_eval(
                    m, sits[s], diamond_seq(path("a1", "a2"),
                                            FluentAtom(f"at_{sits[t]}")))
                assert via_rows == via_modal


# -- commutativity --------------------------------------------------------------

def _mesh_model() -> FiniteModel:
    sits = ("c00", "c01", "c10", "c11")
    return FiniteModel(
        name="mesh", situations=sits,
        aspect_rels={"0": frozenset({("c00", "c10"), ("c01", "c11")}),
                     "1": frozenset({("c00", "c01"), ("c10", "c11")})},
        action_maps={}, valuations={}, fluent_aspects={}, action_aspects={},
        d_table=frozenset())


def _tree_model() -> FiniteModel:
    sits = ("root", "L", "R", "LL", "LR", "RL", "RR")
    return FiniteModel(
        name="tree", situations=sits,
        aspect_rels={"0": frozenset({("root", "L"), ("L", "LL"), ("R", "RL")}),
                     "1": frozenset({("root", "R"), ("L", "LR"), ("R", "RR")})},
        action_maps={}, valuations={}, fluent_aspects={}, action_aspects={},
        d_table=frozenset())


def test_mesh_commutes():
    assert check_commutativity(_mesh_model()).holds


def test_tree_does_not_commute():
    report = check_commutativity(_tree_model())
    assert not report.holds
    assert ("0", "1", "root") in report.violations


def test_single_aspect_commutes_vacuously():
    m = _tiny_model()
    only_a = FiniteModel(
        name="single", situations=m.situations,
        aspect_rels={"a": m.aspect_rels["a"]}, action_maps={}, valuations={},
        fluent_aspects={}, action_aspects={}, d_table=frozenset())
    report = check_commutativity(only_a)
    assert report.holds
    assert report.pairs_checked == 0


def test_compose_rows_is_relation_composition():
    r1 = [0b010, 0b100, 0b000]
    r2 = [0b001, 0b110, 0b011]
    assert compose_rows(r1, r2) == [0b110, 0b011, 0b000]
