#!/usr/bin/env python3
"""What an attacker can do to observations and control commands.

Loads the cycle model, walks through the corruption of two plant strings,
and expands the controls an attacked actuator channel can deliver.
"""

from pathlib import Path

from descat import attacked_commands, delta_control, load_model, phi_enumerate, synthesize_ca_supervisor

MODELS = Path(__file__).resolve().parent.parent / "models"


def fmt_words(words):
    return "{" + ", ".join(" ".join(w) or "ε" for w in sorted(words)) + "}"


def fmt_controls(controls):
    return "{" + ", ".join("{" + ",".join(sorted(c)) + "}" for c in sorted(controls, key=sorted)) + "}"


def main():
    doc = load_model(MODELS / "cycle.des")
    g, policy = doc.plant, doc.policy()

    print("Plant:", ", ".join(f"{s}-{e}->{d}" for s, e, d in sorted(g.transitions)))
    print("Sensor-attackable events:", ",".join(sorted(g.alphabet.sensor_attackable)))
    print("Actuator-attackable events:", ",".join(sorted(g.alphabet.actuator_attackable)))
    print()

    for text in ("alpha lambda", "alpha lambda mu"):
        word = tuple(text.split())
        sample = phi_enumerate(word, g, policy)
        print(f"observations the supervisor may see after '{text}':")
        print("   ", fmt_words(sample.strings))
    print()

    issued = {"alpha", "lambda", "mu"}
    delivered = delta_control(issued, g.alphabet.actuator_attackable)
    print("issued control {alpha,lambda,mu} can be delivered as any of:")
    print("   ", fmt_controls(delivered))
    assert len(delivered) == 4

    sup = synthesize_ca_supervisor(g, doc.spec_automaton(), policy)
    word = ("alpha", "lambda", "mu")
    print()
    print("after observing 'alpha lambda mu' the synthesized supervisor issues",
          "{" + ",".join(sorted(sup.control_for(word))) + "}")
    print("which the attacker may turn into:")
    print("   ", fmt_controls(attacked_commands(sup, word)))


if __name__ == "__main__":
    main()
