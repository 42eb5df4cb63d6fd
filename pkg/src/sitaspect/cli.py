"""Command-line front end.

Exit codes: 0 success/pass, 1 domain or model error, 2 soundness or
counterexample finding, 3 usage error. JSON reports are schema-stable,
sorted, newline-terminated, and embed the tool version and seed, so a
repeated invocation with the same seed is byte-identical.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .disjoint import CommutativeCanonical, SeqExistsDiff, check_monotonicity
from .dsl import parse_actions, parse_domain, parse_ground_fluent, parse_model, parse_state
from .errors import CrossModeSoundnessError, DslError, SitAspectError
from .frames import (
    check_aspect_soundness,
    completeness_lint,
    derive_frame_axioms,
    progress,
    regress_query,
    static_aspect_samples,
)
from .reiter import compile_ssa, compare_modes, random_workload, ssa_query, INSUFFICIENT_AXIOMS
from .search import reproduce_commutative_pitfall, search_counterexample
from .state import eval_fluent
from .validator import FORMALISMS, verify_theorem


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(3)


def _build_parser() -> _Parser:
    parser = _Parser(prog="sitaspect", description=__doc__)
    parser.add_argument("--version", action="version",
                        version=f"sitaspect {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, help_text):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--report", choices=("text", "json"), default="text")
        return p

    p = add("check", "load a domain and run the annotation lints")
    p.add_argument("domain")

    p = add("frames", "derive frame axioms and the economy report")
    p.add_argument("domain")
    p.add_argument("--universe", default=None,
                   help="override object universes: 'sort: a, b; sort2: c'")

    p = add("simulate", "progress an action sequence and dump the final state")
    p.add_argument("domain")
    p.add_argument("--init", required=True, help="state items, or @file")
    p.add_argument("--acts", default="", help="semicolon-separated actions")

    p = add("query", "answer a fluent query about an action sequence")
    p.add_argument("domain")
    p.add_argument("--init", required=True)
    p.add_argument("--acts", default="")
    p.add_argument("--fluent", required=True)
    p.add_argument("--mode", choices=("aspect", "ssa", "oracle"), default="aspect")

    p = add("compare", "compare aspect regression, SSA evaluation, and the oracle")
    p.add_argument("domain")
    p.add_argument("--workload", default=None,
                   help="file with lines: INIT | ACTS | FLUENT")
    p.add_argument("--random", type=int, default=0,
                   help="generate this many random queries instead")
    p.add_argument("--init", default=None, help="base state for --random")
    p.add_argument("--seed", type=int, default=0)

    p = add("validate", "verify a formalism's premises and conclusion on a model")
    p.add_argument("model")
    p.add_argument("--formalism", required=True, choices=FORMALISMS)

    p = add("search", "bounded counterexample search for a formalism")
    p.add_argument("formalism", choices=FORMALISMS)
    p.add_argument("--max-situations", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--random-samples", type=int, default=0)
    p.add_argument("--random-max-situations", type=int, default=6)

    p = add("pitfall", "reproduce the commutativity specification trap")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-situations", type=int, default=3)
    p.add_argument("--functional-situations", type=int, default=4)
    p.add_argument("--random-samples", type=int, default=20000)

    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        handler = _HANDLERS[args.command]
        return handler(args)
    except DslError as exc:
        for diag in exc.diagnostics:
            print(diag.render(), file=sys.stderr)
        return 1
    except (SitAspectError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def _read(path_or_text: str) -> str:
    if path_or_text.startswith("@"):
        return Path(path_or_text[1:]).read_text(encoding="utf-8")
    return path_or_text


def _load_domain(path: str):
    return parse_domain(Path(path).read_text(encoding="utf-8"), file=path)


def _emit(args, command: str, report: dict, text_lines: list[str],
          seed=None) -> None:
    if args.report == "json":
        envelope = {
            "tool": {"name": "sitaspect", "version": __version__},
            "command": command,
            "seed": seed,
            "report": report,
        }
        sys.stdout.write(json.dumps(envelope, sort_keys=True, indent=2) + "\n")
    else:
        sys.stdout.write("\n".join(text_lines) + "\n")


def _parse_universe(text: str) -> dict[str, tuple[str, ...]]:
    out: dict[str, tuple[str, ...]] = {}
    for chunk in text.split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        sort, _, names = chunk.partition(":")
        out[sort.strip()] = tuple(n.strip() for n in names.split(",") if n.strip())
    return out


def _cmd_check(args) -> int:
    domain = _load_domain(args.domain)
    soundness = check_aspect_soundness(domain)
    completeness = completeness_lint(domain)
    spec = domain.disjointness
    if isinstance(spec, (SeqExistsDiff, CommutativeCanonical)):
        samples = static_aspect_samples(domain)
        mono = check_monotonicity(spec, samples)
        mono_report = {
            "checked": mono.checked,
            "violations": [str(v) for v in mono.violations],
        }
        mono_lines = [f"monotonicity: {mono.checked} extensions checked, "
                      f"{len(mono.violations)} violations"]
        mono_lines += [f"  {v}" for v in mono.violations]
        mono_bad = bool(mono.violations)
    else:
        mono_report = {"checked": 0, "violations": [],
                       "note": "not applicable to this disjointness kind"}
        mono_lines = ["monotonicity: not applicable to this disjointness kind"]
        mono_bad = False
    report = {
        "domain": domain.name,
        "soundness": {
            "violations": [str(v) for v in soundness.violations],
            "unresolved": list(soundness.unresolved),
            "actions_checked": soundness.actions_checked,
            "valuations_checked": soundness.valuations_checked,
        },
        "monotonicity": mono_report,
        "completeness": {
            "uncovered_pairs": [f"({a}, {p})" for a, p in completeness.uncovered],
        },
    }
    lines = [f"domain {domain.name}: loaded",
             f"aspect soundness: {soundness.actions_checked} actions, "
             f"{soundness.valuations_checked} guard valuations, "
             f"{len(soundness.violations)} violations"]
    lines += [f"  {v}" for v in soundness.violations]
    lines += [f"  note: {u}" for u in soundness.unresolved]
    lines += mono_lines
    lines.append(f"completeness: {len(completeness.uncovered)} intersecting "
                 f"pairs without an effect rule or declared frame axiom")
    shown = completeness.uncovered[:12]
    lines += [f"  ({a}, {p})" for a, p in shown]
    if len(completeness.uncovered) > len(shown):
        lines.append(f"  ... and {len(completeness.uncovered) - len(shown)} more")
    _emit(args, "check", report, lines)
    return 2 if (soundness.violations or mono_bad) else 0


def _cmd_frames(args) -> int:
    domain = _load_domain(args.domain)
    universe = _parse_universe(args.universe) if args.universe else None
    result = derive_frame_axioms(domain, universe)
    report = {
        "domain": domain.name,
        "schematic": [ax.render() for ax in result.schematic],
        "ground_count": len(result.ground),
        "ground": [ax.render() for ax in result.ground],
        "economy": [
            {"fluent_aspect": str(r.fluent_aspect),
             "action_aspect": str(r.action_aspect),
             "m": r.m, "n": r.n,
             "derived_frame_axioms": r.derived_frame_axioms,
             "source_axioms": r.source_axioms}
            for r in result.economy
        ],
        "errors": list(result.errors),
        "notes": list(result.notes),
    }
    lines = [f"frame axioms for domain {domain.name}", "schematic:"]
    lines += [f"  {ax.render()}" for ax in result.schematic] or ["  (none)"]
    lines.append(f"ground: {len(result.ground)} axioms")
    lines += [f"  {ax.render()}" for ax in result.ground]
    lines.append("economy:")
    if result.economy:
        for r in result.economy:
            lines.append(f"  fluents at {r.fluent_aspect}: {r.m}, actions at "
                         f"{r.action_aspect}: {r.n} -> "
                         f"{r.derived_frame_axioms} frame axioms from "
                         f"{r.source_axioms} source axioms")
    else:
        lines.append("  (no unconditional disjoint aspect pairs)")
    for e in result.errors:
        lines.append(f"error: {e}")
    for n in result.notes:
        lines.append(f"note: {n}")
    _emit(args, "frames", report, lines)
    return 0


def _cmd_simulate(args) -> int:
    domain = _load_domain(args.domain)
    state = parse_state(_read(args.init), domain)
    acts = parse_actions(_read(args.acts), domain)
    for a in acts:
        state = progress(domain, state, a)
    items = []
    for f, value, prefix in state.fluents():
        where = "/".join(a.name for a in prefix) or "."
        items.append({"component": where, "fluent": str(f), "value": value})
    report = {"domain": domain.name, "acts": [str(a) for a in acts],
              "final": items}
    lines = [f"final state after {len(acts)} actions:"]
    for item in items:
        lines.append(f"  [{item['component']}] {item['fluent']} = "
                     f"{'true' if item['value'] else 'false'}")
    _emit(args, "simulate", report, lines)
    return 0


def _cmd_query(args) -> int:
    domain = _load_domain(args.domain)
    init = parse_state(_read(args.init), domain)
    acts = parse_actions(_read(args.acts), domain)
    p = parse_ground_fluent(args.fluent, domain)
    if args.mode == "aspect":
        value, trace = regress_query(domain, init, acts, p)
        trace_lines = [str(s) for s in trace.steps]
    elif args.mode == "ssa":
        value, trace = ssa_query(compile_ssa(domain), init, acts, p)
        trace_lines = [str(s) for s in trace.steps]
    else:
        state = init
        for a in acts:
            state = progress(domain, state, a)
        value = eval_fluent(state, p)
        trace_lines = []
    rendered = ("undefined" if value is None
                else "insufficient-axioms" if value is INSUFFICIENT_AXIOMS
                else "true" if value else "false")
    report = {"fluent": str(p), "acts": [str(a) for a in acts],
              "mode": args.mode, "answer": rendered, "trace": trace_lines}
    lines = [f"{p} after [{'; '.join(str(a) for a in acts)}] = {rendered} "
             f"({args.mode} mode)"]
    lines += [f"  {t}" for t in trace_lines]
    _emit(args, "query", report, lines)
    return 0


def _cmd_compare(args) -> int:
    domain = _load_domain(args.domain)
    if args.workload:
        workload = []
        for lineno, raw in enumerate(Path(args.workload).read_text(
                encoding="utf-8").splitlines(), start=1):
            raw = raw.split("#", 1)[0].strip()
            if not raw:
                continue
            parts = raw.split("|")
            if len(parts) != 3:
                print(f"{args.workload}:{lineno}: expected INIT | ACTS | FLUENT",
                      file=sys.stderr)
                return 1
            init = parse_state(parts[0], domain)
            acts = parse_actions(parts[1], domain)
            fluent = parse_ground_fluent(parts[2].strip(), domain)
            workload.append((init, acts, fluent))
    elif args.random:
        if not args.init:
            print("error: --random needs --init", file=sys.stderr)
            return 3
        init = parse_state(_read(args.init), domain)
        workload = random_workload(domain, init, args.random, args.seed)
    else:
        print("error: provide --workload or --random", file=sys.stderr)
        return 3
    try:
        result = compare_modes(domain, workload=workload)
    except CrossModeSoundnessError as exc:
        report = {"disagreement": str(exc)}
        _emit(args, "compare", report, [f"DISAGREEMENT: {exc}"], seed=args.seed)
        return 2
    report = {
        "axiom_counts": {
            "classical": result.classical_axiom_count,
            "aspect_source": result.aspect_source_count,
            "ssa": result.ssa_count,
        },
        "queries": len(result.queries),
        "comparable": result.comparable,
        "all_agree": result.all_agree,
        "trace_lengths": [
            {"fluent": str(r.fluent), "acts": [str(a) for a in r.acts],
             "aspect": r.aspect_trace_len, "ssa": r.ssa_trace_len}
            for r in result.queries
        ],
        "notes": list(result.notes),
    }
    lines = [
        f"axiom counts: classical={result.classical_axiom_count} "
        f"aspect-source={result.aspect_source_count} ssa={result.ssa_count}",
        f"queries: {len(result.queries)} ({result.comparable} comparable), "
        f"all agree: {result.all_agree}",
    ]
    _emit(args, "compare", report, lines, seed=args.seed)
    return 0


def _cmd_validate(args) -> int:
    model = parse_model(Path(args.model).read_text(encoding="utf-8"),
                        file=args.model)
    verdict = verify_theorem(args.formalism, model)
    report = {
        "model": model.name,
        "formalism": args.formalism,
        "verdict": verdict.verdict,
        "premises": [
            {"axiom": c.axiom, "subject": c.subject, "holds": c.holds,
             "note": c.note}
            for c in verdict.premises.checks
        ],
        "premise_notes": list(verdict.premises.notes),
        "conclusion_counterexamples": [
            {"fluent": p, "action": a, "situation": s}
            for p, a, s in (verdict.conclusion.counterexamples
                            if verdict.conclusion else ())
        ],
    }
    lines = [f"model {model.name}, formalism {args.formalism}: {verdict.verdict}"]
    for c in verdict.premises.checks:
        status = "holds" if c.holds else "VIOLATED"
        note = f" ({c.note})" if c.note else ""
        lines.append(f"  {c.axiom} [{c.subject}]: {status}{note}")
    for n in verdict.premises.notes:
        lines.append(f"  note: {n}")
    _emit(args, "validate", report, lines)
    return 0 if verdict.verdict == "pass" else 2


def _cmd_search(args) -> int:
    result = search_counterexample(
        args.formalism, max_situations=args.max_situations, seed=args.seed,
        random_samples=args.random_samples,
        random_max_situations=args.random_max_situations)
    report = {
        "formalism": result.formalism,
        "counterexample_found": result.counterexample is not None,
        "exhaustive_models": result.exhaustive_models,
        "exhaustive_premise_models": result.exhaustive_premise_models,
        "random_models": result.random_models,
        "random_premise_models": result.random_premise_models,
        "scope": list(result.scope),
    }
    lines = [
        f"{result.formalism}: "
        + ("COUNTEREXAMPLE FOUND" if result.counterexample else "no counterexample"),
        f"exhaustive: {result.exhaustive_models} models "
        f"({result.exhaustive_premise_models} satisfied the premises)",
        f"random: {result.random_models} models "
        f"({result.random_premise_models} satisfied the premises)",
    ]
    lines += [f"scope: {s}" for s in result.scope]
    _emit(args, "search", report, lines, seed=args.seed)
    return 2 if result.counterexample is not None else 0


def _cmd_pitfall(args) -> int:
    result = reproduce_commutative_pitfall(
        seed=args.seed, exhaustive_max=args.max_situations,
        functional_situations=args.functional_situations,
        random_samples=args.random_samples)
    report = {
        "reproduced": result.reproduced,
        "first_half": {
            "pairs_checked": result.first.pairs_checked,
            "commuting_pairs": result.first.commuting_pairs,
            "violations": result.first.violations,
            "effect_free_everywhere": result.first.effect_free_everywhere,
            "scope": list(result.first.scope),
        },
        "second_half": {
            "model": result.second.model.name,
            "commutativity_holds": result.second.commutativity_holds,
            "premises_hold": result.second.premises_hold,
            "changed_fluent": result.second.changed_fluent,
            "changed_at": result.second.changed_at,
            "naive_premises_hold": result.second.naive_premises_hold,
        },
        "corrected_d_rejects_swap": result.corrected_d_rejects_swap,
    }
    first = result.first
    second = result.second
    lines = [
        "commutativity trap: " + ("reproduced" if result.reproduced else "FAILED"),
        f"half 1 (naive d + commutativity): {first.pairs_checked} relation "
        f"pairs, {first.commuting_pairs} commuting, {first.violations} "
        f"violations of effect-freeness",
        f"half 2 (corrected d): model '{second.model.name}' commutes; premises "
        f"hold: {second.premises_hold}; action changes {second.changed_fluent} "
        f"at {second.changed_at}",
        f"  the same model violates the naive premises: "
        f"{not second.naive_premises_hold}",
        f"corrected d rejects the swapped pair: {result.corrected_d_rejects_swap}",
    ]
    _emit(args, "pitfall", report, lines, seed=args.seed)
    return 0 if result.reproduced else 2


_HANDLERS = {
    "check": _cmd_check,
    "frames": _cmd_frames,
    "simulate": _cmd_simulate,
    "query": _cmd_query,
    "compare": _cmd_compare,
    "validate": _cmd_validate,
    "search": _cmd_search,
    "pitfall": _cmd_pitfall,
}


if __name__ == "__main__":
    raise SystemExit(main())
