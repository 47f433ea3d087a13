"""Attack-aware state estimation.

The construction: substitute every attacked plant transition by its
corruption automaton (linked in with silent moves), erase the remaining
unobservable labels, and determinize.  The resulting observer maps each
feasible attacked observation to the exact set of plant states the system
may currently be in.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

from .attacks import SensorAttackPolicy, ensure_valid_policy
from .automata import (
    EPSILON,
    Automaton,
    Transition,
    subset_construction,
)
from .errors import InputError


@dataclass(frozen=True)
class DiamondAutomaton:
    """Plant with attacked transitions replaced by their corruption automata.

    The marked states are exactly the original plant states, so the marked
    language is the full set of corrupted strings the attacker can produce.
    ``provenance`` maps every injected state back to the replaced
    transition and the corruption-automaton state it copies.
    """

    automaton: Automaton
    original_states: frozenset[str]
    injected_states: frozenset[str]
    provenance: Mapping[str, tuple[Transition, str]]

    def __post_init__(self):
        object.__setattr__(self, "provenance", dict(self.provenance))


def replace_transition(a: Automaton, tr: Transition, f: Automaton, prefix: str | None = None) -> Automaton:
    """Replace one transition by an automaton accepting its corruption language.

    The transition is removed; a fresh copy of ``f`` (states renamed
    ``prefix/state``) is added with a silent move from the transition's
    source into the copy's initial state and silent moves from its marked
    states to the transition's target.  The marked set of ``a`` is kept
    as is; ``f``'s markings only shape the silent exits.
    """
    tr = tuple(tr)
    if tr not in a.transitions:
        raise InputError(f"transition {tr!r} does not exist")
    src, _, dst = tr
    if prefix is None:
        prefix = f"{src}.{tr[1]}.{dst}"
    rename = {s: f"{prefix}/{s}" for s in f.states}
    clash = set(rename.values()) & a.states
    if clash:
        raise InputError(f"injected state names {sorted(clash)} collide with existing states")
    transitions = set(a.transitions)
    transitions.remove(tr)
    for fsrc, label, fdst in f.transitions:
        transitions.add((rename[fsrc], label, rename[fdst]))
    transitions.add((src, EPSILON, rename[f.initial]))
    for m in f.marked:
        transitions.add((rename[m], EPSILON, dst))
    return Automaton(
        states=a.states | frozenset(rename.values()),
        alphabet=a.alphabet,
        transitions=frozenset(transitions),
        initial=a.initial,
        marked=a.marked,
    )


def build_g_diamond(g: Automaton, policy: SensorAttackPolicy) -> DiamondAutomaton:
    """Substitute every attacked transition of ``g`` by its corruption automaton.

    Injected states are named ``tr<i>/<state>`` where ``i`` indexes the
    policy entries in sorted transition order, which keeps derived
    constructions byte-stable across runs.  The marked set of the result
    is the full original state set.
    """
    ensure_valid_policy(g, policy)
    current = g
    provenance: dict[str, tuple[Transition, str]] = {}
    for i, (tr, f) in enumerate(policy.sorted_entries()):
        prefix = f"tr{i}"
        current = replace_transition(current, tr, f, prefix=prefix)
        for s in f.states:
            provenance[f"{prefix}/{s}"] = (tr, s)
    diamond = Automaton(
        states=current.states,
        alphabet=current.alphabet,
        transitions=current.transitions,
        initial=current.initial,
        marked=g.states,
    )
    return DiamondAutomaton(
        automaton=diamond,
        original_states=g.states,
        injected_states=diamond.states - g.states,
        provenance=provenance,
    )


def erase_unobservable(d: DiamondAutomaton) -> DiamondAutomaton:
    """Turn every unobservable label into a silent move, keeping the structure."""
    observable = d.automaton.alphabet.observable
    relabelled = frozenset(
        (src, label if label == EPSILON or label in observable else EPSILON, dst)
        for src, label, dst in d.automaton.transitions
    )
    return DiamondAutomaton(
        automaton=Automaton(
            states=d.automaton.states,
            alphabet=d.automaton.alphabet,
            transitions=relabelled,
            initial=d.automaton.initial,
            marked=d.automaton.marked,
        ),
        original_states=d.original_states,
        injected_states=d.injected_states,
        provenance=d.provenance,
    )


@dataclass(frozen=True)
class CAObserver:
    """Deterministic observer for state estimation under sensor attacks.

    Observer states are canonical encodings of subsets of the substituted
    automaton's states; ``members`` recovers the subsets and
    ``plant_states`` singles out the original states, whose intersection
    with an observer state is the estimate it stands for.  A state is
    marked iff that intersection is nonempty.
    """

    observer: Automaton
    members: Mapping[str, frozenset[str]]
    plant_states: frozenset[str]

    def __post_init__(self):
        object.__setattr__(self, "members", dict(self.members))

    def plant_projection(self, state: str) -> frozenset[str]:
        """Plant states inside an observer state."""
        if state not in self.members:
            raise InputError(f"unknown observer state {state!r}")
        return self.members[state] & self.plant_states

    def state_for(self, observation: Iterable[str]) -> str | None:
        """Observer state reached by an observation, or None when infeasible."""
        current = self.observer.initial
        for event in observation:
            if event not in self.observer.alphabet.events:
                raise InputError(f"unknown event {event!r}")
            nxt = self.observer.delta(current, event)
            if nxt is None:
                return None
            current = nxt
        return current


def build_ca_observer(g: Automaton, policy: SensorAttackPolicy) -> CAObserver:
    """Observer of the substituted-and-erased plant.

    Its marked language is exactly the set of observations the supervisor
    can receive, and the plant projection of the state reached by an
    observation is the state estimate for it.
    """
    erased = erase_unobservable(build_g_diamond(g, policy))
    observer, members = subset_construction(erased.automaton)
    return CAObserver(observer=observer, members=members, plant_states=g.states)


def state_estimate(obs: CAObserver, observation: Iterable[str]) -> frozenset[str]:
    """Plant states consistent with an attacked observation.

    Observations the observer cannot follow, and observations that can
    only be strict prefixes of a feasible one, yield the empty estimate:
    the supervisor then withholds new decisions.
    """
    state = obs.state_for(tuple(observation))
    if state is None:
        return frozenset()
    return obs.plant_projection(state)


def lift_estimate(estimate: Iterable[str], pairs: Mapping[str, tuple[str, str]]) -> frozenset[str]:
    """Project an estimate over product states onto its first components.

    Used with observers built on a plant composed with an attack-context
    automaton: the pair decomposition comes from the composition step.
    """
    out = set()
    for name in estimate:
        if name not in pairs:
            raise InputError(f"state {name!r} is not a product state")
        out.add(pairs[name][0])
    return frozenset(out)
