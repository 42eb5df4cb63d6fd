"""Explicit finite structures for validating the aspect formalisms.

A FiniteModel carries a finite situation set, one relation per aspect atom
(optionally flagged as a function), per-element relations for collective
aspects, total action maps, fluent valuations, aspect assignments, witness
predicates, and an explicit non-interference table. Relations are checked
through integer bitmask rows, one row per situation.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

from .errors import ModelError
from .terms import AspectAtom, AspectPath, AspectSet


@dataclass(frozen=True)
class FiniteModel:
    name: str
    situations: tuple[str, ...]
    aspect_rels: dict[str, frozenset[tuple[str, str]]] = field(default_factory=dict)
    functional: frozenset[str] = frozenset()
    action_maps: dict[str, dict[str, str]] = field(default_factory=dict)
    valuations: dict[str, frozenset[str]] = field(default_factory=dict)
    fluent_aspects: dict[str, AspectPath] = field(default_factory=dict)
    action_aspects: dict[str, AspectPath] = field(default_factory=dict)
    witnesses: dict[tuple[str, str], frozenset[str]] = field(default_factory=dict)
    collective_rels: dict[str, frozenset[tuple[str, str]]] = field(default_factory=dict)
    collective_witnesses: dict[tuple[str, str, str], frozenset[str]] = field(default_factory=dict)
    d_table: frozenset[tuple[AspectPath, AspectPath]] = frozenset()

    def validate(self) -> None:
        if not self.situations:
            raise ModelError(f"model '{self.name}' has no situations")
        if len(set(self.situations)) != len(self.situations):
            raise ModelError(f"model '{self.name}' repeats a situation")
        sits = set(self.situations)
        for atom, rel in {**self.aspect_rels, **self.collective_rels}.items():
            for s, t in rel:
                if s not in sits or t not in sits:
                    raise ModelError(f"relation '{atom}' touches unknown situation")
        for atom in self.functional:
            rel = self.aspect_rels.get(atom, frozenset())
            for s in self.situations:
                succ = [t for (u, t) in rel if u == s]
                if len(succ) > 1:
                    raise ModelError(
                        f"relation '{atom}' is flagged functional but {s} has "
                        f"{len(succ)} successors")
                if not succ:
                    raise ModelError(
                        f"relation '{atom}' is flagged functional but {s} has "
                        f"no successor")
        for act, mapping in self.action_maps.items():
            for s in self.situations:
                if s not in mapping:
                    raise ModelError(f"action '{act}' is not total: {s} unmapped")
            for s, t in mapping.items():
                if s not in sits or t not in sits:
                    raise ModelError(f"action '{act}' maps unknown situations")
        for f, val in self.valuations.items():
            if not val <= sits:
                raise ModelError(f"valuation of '{f}' lists unknown situations")

    # -- bitmask views -------------------------------------------------

    def index(self) -> dict[str, int]:
        return {s: i for i, s in enumerate(self.situations)}

    def rel_rows(self, atom: str) -> list[int]:
        if atom not in self.aspect_rels:
            raise ModelError(f"no relation declared for aspect atom '{atom}'")
        return _rows(self.situations, self.aspect_rels[atom])

    def element_rows(self, elem: str) -> list[int]:
        if elem not in self.collective_rels:
            raise ModelError(f"no relation declared for collective element '{elem}'")
        return _rows(self.situations, self.collective_rels[elem])

    def path_rows(self, path: AspectPath) -> list[int]:
        """Rows of the composed relation along an atom path (first atom first)."""
        n = len(self.situations)
        rows = [1 << i for i in range(n)]  # identity for the empty path
        for elem in path:
            if not isinstance(elem, AspectAtom):
                raise ModelError(f"path {path} has a set element; "
                                 "relational composition needs atoms")
            rows = compose_rows(rows, self.rel_rows(elem.name))
        return rows

    def act_vec(self, action: str) -> list[int]:
        if action not in self.action_maps:
            raise ModelError(f"no action map declared for '{action}'")
        idx = self.index()
        return [idx[self.action_maps[action][s]] for s in self.situations]

    def val_mask(self, fluent: str) -> int:
        if fluent not in self.valuations:
            raise ModelError(f"no valuation declared for fluent '{fluent}'")
        idx = self.index()
        mask = 0
        for s in self.valuations[fluent]:
            mask |= 1 << idx[s]
        return mask

    def func_vec(self, atom: str) -> list[int]:
        """Successor index per situation for a relation that is a total function."""
        rows = self.rel_rows(atom)
        vec = []
        for i, row in enumerate(rows):
            if row == 0 or row & (row - 1):
                raise ModelError(
                    f"relation '{atom}' is not a total function at "
                    f"{self.situations[i]}")
            vec.append(row.bit_length() - 1)
        return vec

    def with_derived_dtable(self) -> "FiniteModel":
        """Fill d_table from set-aspect disjointness when none was given.

        Collective aspects are sets over an element universe; two aspects are
        non-interfering exactly when the sets share no element.
        """
        if self.d_table:
            return self
        pairs = set()
        for alpha in self.fluent_aspects.values():
            for beta in self.action_aspects.values():
                if _set_paths_disjoint(alpha, beta):
                    pairs.add((alpha, beta))
        return FiniteModel(
            name=self.name, situations=self.situations,
            aspect_rels=self.aspect_rels, functional=self.functional,
            action_maps=self.action_maps, valuations=self.valuations,
            fluent_aspects=self.fluent_aspects, action_aspects=self.action_aspects,
            witnesses=self.witnesses, collective_rels=self.collective_rels,
            collective_witnesses=self.collective_witnesses,
            d_table=frozenset(pairs))


def _set_paths_disjoint(alpha: AspectPath, beta: AspectPath) -> bool:
    if len(alpha) != 1 or len(beta) != 1:
        return False
    ea, eb = alpha[0], beta[0]
    if not isinstance(ea, AspectSet) or not isinstance(eb, AspectSet):
        return False
    return not (ea.atoms & eb.atoms)


def _rows(situations: tuple[str, ...], rel: frozenset[tuple[str, str]]) -> list[int]:
    idx = {s: i for i, s in enumerate(situations)}
    rows = [0] * len(situations)
    for s, t in rel:
        rows[idx[s]] |= 1 << idx[t]
    return rows


def compose_rows(first: list[int], second: list[int]) -> list[int]:
    """Rows of (first ; second): step along `first`, then along `second`."""
    out = []
    for row in first:
        acc = 0
        rest = row
        while rest:
            low = rest & -rest
            acc |= second[low.bit_length() - 1]
            rest ^= low
        out.append(acc)
    return out


# ---------------------------------------------------------------------------
# Modal formulas
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FluentAtom:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Const:
    value: bool

    def __str__(self) -> str:
        return "true" if self.value else "false"


@dataclass(frozen=True)
class Not:
    sub: "ModalFormula"

    def __str__(self) -> str:
        return f"~{self.sub}"


@dataclass(frozen=True)
class And:
    left: "ModalFormula"
    right: "ModalFormula"

    def __str__(self) -> str:
        return f"({self.left} & {self.right})"


@dataclass(frozen=True)
class Or:
    left: "ModalFormula"
    right: "ModalFormula"

    def __str__(self) -> str:
        return f"({self.left} | {self.right})"


@dataclass(frozen=True)
class Implies:
    left: "ModalFormula"
    right: "ModalFormula"

    def __str__(self) -> str:
        return f"({self.left} -> {self.right})"


@dataclass(frozen=True)
class Iff:
    left: "ModalFormula"
    right: "ModalFormula"

    def __str__(self) -> str:
        return f"({self.left} <-> {self.right})"


@dataclass(frozen=True)
class BoxAction:
    action: str
    sub: "ModalFormula"

    def __str__(self) -> str:
        return f"[{self.action}]{self.sub}"


@dataclass(frozen=True)
class BoxAspect:
    aspect: str
    sub: "ModalFormula"

    def __str__(self) -> str:
        return f"[{self.aspect}]{self.sub}"


@dataclass(frozen=True)
class DiamondAspect:
    aspect: str
    sub: "ModalFormula"

    def __str__(self) -> str:
        return f"<{self.aspect}>{self.sub}"


ModalFormula = Union[FluentAtom, Const, Not, And, Or, Implies, Iff,
                     BoxAction, BoxAspect, DiamondAspect]


def box_seq(path: AspectPath, sub: ModalFormula) -> ModalFormula:
    """[a1 a2 ... an]X expanded to [a1][a2]...[an]X."""
    out = sub
    for elem in reversed(path.elems):
        if not isinstance(elem, AspectAtom):
            raise ModelError(f"modal operators take atom aspects, got {elem}")
        out = BoxAspect(elem.name, out)
    return out


def diamond_seq(path: AspectPath, sub: ModalFormula) -> ModalFormula:
    out = sub
    for elem in reversed(path.elems):
        if not isinstance(elem, AspectAtom):
            raise ModelError(f"modal operators take atom aspects, got {elem}")
        out = DiamondAspect(elem.name, out)
    return out


def modal_eval(model: FiniteModel, world: str, formula: ModalFormula) -> bool:
    """Standard Kripke evaluation; [a] steps along the action map."""
    idx = model.index()
    if world not in idx:
        raise ModelError(f"unknown situation '{world}'")
    return _eval(model, idx[world], formula, idx)


def _eval(model: FiniteModel, w: int, formula: ModalFormula, idx: dict[str, int]) -> bool:
    if isinstance(formula, FluentAtom):
        return bool(model.val_mask(formula.name) >> w & 1)
    if isinstance(formula, Const):
        return formula.value
    if isinstance(formula, Not):
        return not _eval(model, w, formula.sub, idx)
    if isinstance(formula, And):
        return _eval(model, w, formula.left, idx) and _eval(model, w, formula.right, idx)
    if isinstance(formula, Or):
        return _eval(model, w, formula.left, idx) or _eval(model, w, formula.right, idx)
    if isinstance(formula, Implies):
        return (not _eval(model, w, formula.left, idx)) or _eval(model, w, formula.right, idx)
    if isinstance(formula, Iff):
        return _eval(model, w, formula.left, idx) == _eval(model, w, formula.right, idx)
    if isinstance(formula, BoxAction):
        return _eval(model, model.act_vec(formula.action)[w], formula.sub, idx)
    if isinstance(formula, BoxAspect):
        row = model.rel_rows(formula.aspect)[w]
        return all(_eval(model, t, formula.sub, idx)
                   for t in _bits(row))
    if isinstance(formula, DiamondAspect):
        row = model.rel_rows(formula.aspect)[w]
        return any(_eval(model, t, formula.sub, idx)
                   for t in _bits(row))
    raise ModelError(f"unknown formula node {formula!r}")


def _bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low
