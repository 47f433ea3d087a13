"""Command-line interface.

Every subcommand reads a `.des` model document.  Exit codes: 0 when the
requested check holds (or the run is safe), 1 when it fails (or a
violation was found), 2 for usage and input errors.
"""

from __future__ import annotations

import argparse
import json
import sys

from .attacks import convert_observation_based
from .automata import Automaton, sub_automaton
from .dot import export_dot
from .errors import DescatError
from .estimation import build_ca_observer, build_g_diamond, lift_estimate, state_estimate
from .modelfile import ModelDocument, load_model, serialize_model
from .simulation import AttackerStrategy, run_campaign
from .synthesis import Supervisor, synthesize_ca_supervisor, synthesize_obs_based
from .verification import (
    Verdict,
    check_ca_controllability,
    check_ca_observability_bounded,
    verify_large_language_equals,
)

EXIT_HOLDS = 0
EXIT_FAILS = 1
EXIT_USAGE = 2


def _fmt_set(items) -> str:
    return "{" + ",".join(sorted(items)) + "}"


def _parse_events(text: str) -> frozenset[str]:
    return frozenset(e for e in text.replace(",", " ").split() if e)


def _parse_observation(text: str) -> tuple[str, ...]:
    return tuple(e for e in text.replace(",", " ").split() if e)


def _target(doc: ModelDocument, which: str) -> Automaton:
    return doc.plant if which == "plant" else doc.spec_automaton()


def _observer_for(doc: ModelDocument, which: str):
    """Observer plus estimate lift for the chosen target automaton."""
    target = _target(doc, which)
    if doc.has_observation_strategy:
        conversion = convert_observation_based(target, doc.strategy())
        observer = build_ca_observer(conversion.product, conversion.policy)
        pairs = conversion.pairs
        return observer, (lambda est: lift_estimate(est, pairs))
    policy, _ = doc.policy().restricted_to(target)
    return build_ca_observer(target, policy), (lambda est: est)


def _synthesize(doc: ModelDocument) -> Supervisor:
    g, h = doc.plant, doc.spec_automaton()
    if doc.has_observation_strategy:
        return synthesize_obs_based(g, h, doc.strategy())
    return synthesize_ca_supervisor(g, h, doc.policy())


def _verification_setup(doc: ModelDocument):
    """(plant, spec, transition policy) with observation attacks rewritten."""
    g, h = doc.plant, doc.spec_automaton()
    if doc.has_observation_strategy:
        conversion = convert_observation_based(g, doc.strategy())
        safe = frozenset(
            name for name, (q, _) in conversion.pairs.items() if q in h.states
        )
        return conversion.product, sub_automaton(conversion.product, safe), conversion.policy
    return g, h, doc.policy()


def _supervisor_rows(sup: Supervisor) -> list[dict]:
    rows = []
    for state in sorted(sup.controls):
        rows.append(
            {
                "state": state,
                "estimate": sorted(sup.estimates[state]),
                "control": sorted(sup.controls[state]),
            }
        )
    return rows


def _print_verdict(name: str, verdict: Verdict, as_json: bool) -> int:
    if as_json:
        print(json.dumps({"check": name, **verdict.as_dict()}, indent=2))
    else:
        line = f"{name}: {verdict.status}"
        if verdict.depth is not None:
            line += f" (depth {verdict.depth})"
        print(line)
        if verdict.counterexample is not None:
            ce = verdict.counterexample
            prefix = " ".join(ce.string) if ce.string else "ε"
            print(f"  counterexample: after '{prefix}', event '{ce.event}'")
            if ce.witness:
                print(f"  note: {ce.witness}")
    return EXIT_HOLDS if verdict.holds else EXIT_FAILS


def _cmd_observer(args) -> int:
    doc = load_model(args.model)
    observer, lift = _observer_for(doc, args.target)
    if args.dot:
        with open(args.dot, "w", encoding="utf-8") as handle:
            handle.write(export_dot(observer, name="observer"))
    rows = [
        {
            "state": state,
            "estimate": sorted(lift(observer.plant_projection(state))),
            "marked": state in observer.observer.marked,
        }
        for state in sorted(observer.observer.states)
    ]
    if args.json:
        print(
            json.dumps(
                {
                    "target": args.target,
                    "initial": observer.observer.initial,
                    "states": rows,
                    "transitions": sorted(observer.observer.transitions),
                },
                indent=2,
            )
        )
    else:
        print(f"observer over the {args.target} ({len(rows)} states, initial {observer.observer.initial})")
        for row in rows:
            mark = "*" if row["marked"] else " "
            print(f"  {mark} {row['state']}  estimate {_fmt_set(row['estimate'])}")
        for src, event, dst in sorted(observer.observer.transitions):
            print(f"    {src} --{event}--> {dst}")
    return EXIT_HOLDS


def _cmd_estimate(args) -> int:
    doc = load_model(args.model)
    observer, lift = _observer_for(doc, args.target)
    observation = _parse_observation(args.obs)
    estimate = sorted(lift(state_estimate(observer, observation)))
    if args.json:
        print(
            json.dumps(
                {"observation": list(observation), "estimate": estimate, "target": args.target},
                indent=2,
            )
        )
    else:
        print(_fmt_set(estimate))
    return EXIT_HOLDS


def _cmd_check_controllability(args) -> int:
    doc = load_model(args.model)
    g, h = doc.plant, doc.spec_automaton()
    attackable = _parse_events(args.actuator_attack) if args.actuator_attack else None
    verdict = check_ca_controllability(g, h, actuator_attackable=attackable)
    return _print_verdict("CA-controllability", verdict, args.json)


def _cmd_check_observability(args) -> int:
    doc = load_model(args.model)
    g, h, policy = _verification_setup(doc)
    depth = args.depth
    if depth is None:
        observer = build_ca_observer(h, policy.restricted_to(h)[0])
        depth = 2 * (len(observer.observer.states) + len(g.states))
    verdict = check_ca_observability_bounded(g, h, policy, depth=depth)
    return _print_verdict("CA-observability", verdict, args.json)


def _cmd_synthesize(args) -> int:
    doc = load_model(args.model)
    sup = _synthesize(doc)
    rows = _supervisor_rows(sup)
    if args.json:
        print(json.dumps({"default_control": sorted(sup.default_control), "states": rows}, indent=2))
    else:
        print("# observer-state, estimate, control")
        for row in rows:
            print(f"{row['state']}, {_fmt_set(row['estimate'])}, {_fmt_set(row['control'])}")
        print(f"default, -, {_fmt_set(sup.default_control)}")
    return EXIT_HOLDS


def _cmd_verify(args) -> int:
    doc = load_model(args.model)
    sup = _synthesize(doc)
    g, h, policy = _verification_setup(doc)
    attackable = _parse_events(args.actuator_attack) if args.actuator_attack else None
    verdict = verify_large_language_equals(g, h, sup, policy, actuator_attackable=attackable)
    return _print_verdict("large-language equality", verdict, args.json)


def _cmd_simulate(args) -> int:
    doc = load_model(args.model)
    sup = _synthesize(doc)
    g, h, policy = _verification_setup(doc)
    attackable = _parse_events(args.actuator_attack) if args.actuator_attack else None
    attacker = AttackerStrategy(kind=args.attacker)
    report = run_campaign(
        g,
        h,
        sup,
        policy,
        actuator_attackable=attackable,
        trials=args.trials,
        max_steps=args.max_steps,
        base_seed=args.seed,
        attacker=attacker,
    )
    if args.json:
        payload = report.as_dict()
        payload["violating_traces"] = [t.as_dict() for t in report.violating]
        print(json.dumps(payload, indent=2))
    else:
        print(
            f"campaign: {report.trials} trial(s), attacker={report.attacker}, "
            f"max-steps={report.max_steps}, base-seed={report.base_seed}"
        )
        print(
            f"violations: {report.violation_count}; observer coverage: "
            f"{report.observer_states_visited}/{report.observer_states_total}"
        )
        for trace in report.violating:
            print("violating trace:")
            print(trace.to_text(), end="")
    return EXIT_FAILS if report.violation_count else EXIT_HOLDS


def _cmd_convert_obs(args) -> int:
    doc = load_model(args.model)
    if not doc.has_observation_strategy:
        raise DescatError("the model has no observation-based attack sections to convert")
    conversion = convert_observation_based(doc.plant, doc.strategy())
    safe = None
    if doc.safe_states is not None:
        safe = frozenset(
            name for name, (q, _) in conversion.pairs.items() if q in doc.safe_states
        )
    converted = ModelDocument(
        alphabet=conversion.product.alphabet,
        plant=conversion.product,
        safe_states=safe,
        policy_transitions=dict(conversion.policy.entries),
    )
    text = serialize_model(converted)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as handle:
            handle.write(text)
    else:
        print(text, end="")
    return EXIT_HOLDS


def _cmd_export_dot(args) -> int:
    doc = load_model(args.model)
    what = args.what
    if what == "plant":
        obj = doc.plant
    elif what == "spec":
        obj = doc.spec_automaton()
    elif what == "sa":
        if not doc.has_observation_strategy:
            raise DescatError("the model has no attack-context automaton")
        obj = doc.sa
    elif what == "diamond":
        g, _, policy = _verification_setup(doc)
        obj = build_g_diamond(g, policy)
    else:  # observer
        obj, _ = _observer_for(doc, "plant")
    text = export_dot(obj, name=what)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as handle:
            handle.write(text)
    else:
        print(text, end="")
    return EXIT_HOLDS


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="descat",
        description="Supervisory control of discrete event systems under sensor-actuator attacks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, **kwargs):
        p = sub.add_parser(name, **kwargs)
        p.add_argument("model", help="path to a .des model document")
        p.set_defaults(func=func)
        return p

    p = add("observer", _cmd_observer, help="build the attack-aware observer")
    p.add_argument("--target", choices=("plant", "spec"), default="plant")
    p.add_argument("--dot", metavar="PATH", help="also write the observer as DOT")
    p.add_argument("--json", action="store_true")

    p = add("estimate", _cmd_estimate, help="state estimate for an attacked observation")
    p.add_argument("--obs", required=True, metavar="EVENTS", help="observation, e.g. 'alpha lambda mu'")
    p.add_argument("--target", choices=("plant", "spec"), default="plant")
    p.add_argument("--json", action="store_true")

    p = add("check-controllability", _cmd_check_controllability, help="decide CA-controllability")
    p.add_argument("--actuator-attack", metavar="EVENTS", help="override the attackable actuators")
    p.add_argument("--json", action="store_true")

    p = add("check-observability", _cmd_check_observability, help="bounded CA-observability check")
    p.add_argument("--depth", type=int, default=None, help="string-length bound (default: 2(|X|+|Q|))")
    p.add_argument("--json", action="store_true")

    p = add("synthesize", _cmd_synthesize, help="emit the estimate-based supervisor table")
    p.add_argument("--json", action="store_true")

    p = add("verify", _cmd_verify, help="check that the closed loop generates exactly the spec")
    p.add_argument("--actuator-attack", metavar="EVENTS")
    p.add_argument("--json", action="store_true")

    p = add("simulate", _cmd_simulate, help="run attacked closed-loop campaigns")
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--max-steps", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--attacker", choices=("none", "random", "exhaustive"), default="random")
    p.add_argument("--actuator-attack", metavar="EVENTS")
    p.add_argument("--json", action="store_true")

    p = add("convert-obs", _cmd_convert_obs, help="rewrite an observation-based attack as transition-based")
    p.add_argument("-o", "--output", metavar="PATH")

    p = add("export-dot", _cmd_export_dot, help="render a model component as DOT")
    p.add_argument("--what", choices=("plant", "spec", "observer", "diamond", "sa"), default="plant")
    p.add_argument("-o", "--output", metavar="PATH")

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DescatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
