#!/usr/bin/env python3
"""Attack-aware state estimation step by step.

Substitutes the attacked transitions of the cycle plant by their corruption
automata, determinizes, and queries estimates.  Writes the intermediate
structures as DOT files next to this script.
"""

from pathlib import Path

from descat import (
    build_ca_observer,
    build_g_diamond,
    erase_unobservable,
    export_dot,
    load_model,
    state_estimate,
)

HERE = Path(__file__).resolve().parent
MODELS = HERE.parent / "models"


def main():
    doc = load_model(MODELS / "cycle.des")
    g, policy = doc.plant, doc.policy()

    diamond = build_g_diamond(g, policy)
    print(f"substituted automaton: {len(diamond.automaton.states)} states "
          f"({len(diamond.injected_states)} injected)")
    for injected in sorted(diamond.injected_states):
        tr, origin = diamond.provenance[injected]
        print(f"   {injected} copies state {origin} of the corruption automaton for {tr}")

    erased = erase_unobservable(diamond)
    observer = build_ca_observer(g, policy)
    print(f"\nobserver: {len(observer.observer.states)} states, initial {observer.observer.initial}")
    for state in sorted(observer.observer.states):
        estimate = ",".join(sorted(observer.plant_projection(state))) or "-"
        print(f"   {state}  ->  estimate {{{estimate}}}")

    for text in ("", "alpha", "alpha lambda", "alpha lambda mu", "alpha mu"):
        word = tuple(text.split())
        estimate = state_estimate(observer, word)
        print(f"estimate after '{text or 'ε'}': {{{','.join(sorted(estimate))}}}")
    assert state_estimate(observer, ("alpha", "lambda", "mu")) == {"1", "3"}

    for name, obj in (("diamond", erased), ("observer", observer)):
        path = HERE / f"cycle_{name}.dot"
        path.write_text(export_dot(obj, name=name))
        print(f"wrote {path.name}")


if __name__ == "__main__":
    main()
