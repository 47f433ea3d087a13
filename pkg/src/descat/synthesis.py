"""State-estimate-based supervisor synthesis and supervisor combinators."""

from __future__ import annotations

import dataclasses
import warnings
from dataclasses import dataclass
from typing import Iterable, Mapping

from .attacks import (
    ObservationAttackStrategy,
    SensorAttackPolicy,
    convert_observation_based,
    ensure_valid_policy,
)
from .automata import Automaton, EventAlphabet, ensure_deterministic, is_subautomaton
from .errors import InputError
from .estimation import CAObserver, build_ca_observer, lift_estimate


@dataclass(frozen=True)
class Supervisor:
    """A control map realized as an observer plus per-observer-state controls.

    ``controls`` assigns the enabled-event set for every observer state;
    observations the observer cannot follow receive ``default_control``,
    which is always the uncontrollable event set.  ``estimates`` carries
    the plant estimate each observer state stands for (already projected
    onto plant states for observation-based synthesis).
    """

    observer: CAObserver
    controls: Mapping[str, frozenset[str]]
    estimates: Mapping[str, frozenset[str]]
    default_control: frozenset[str]
    alphabet: EventAlphabet

    def __post_init__(self):
        object.__setattr__(self, "controls", dict(self.controls))
        object.__setattr__(self, "estimates", dict(self.estimates))
        for state, control in self.controls.items():
            if not self.alphabet.uncontrollable <= control:
                raise InputError(
                    f"control for observer state {state!r} drops uncontrollable events"
                )
        if not self.alphabet.uncontrollable <= self.default_control:
            raise InputError("the default control must contain every uncontrollable event")

    def observer_state_for(self, observation: Iterable[str]) -> str | None:
        return self.observer.state_for(tuple(observation))

    def control_for(self, observation: Iterable[str]) -> frozenset[str]:
        """Enabled events after an observation; the default outside the observer."""
        state = self.observer_state_for(observation)
        if state is None:
            return self.default_control
        return self.controls[state]

    def estimate_for(self, observation: Iterable[str]) -> frozenset[str]:
        state = self.observer_state_for(observation)
        if state is None:
            return frozenset()
        return self.estimates[state]

    def with_control(self, state: str, control: Iterable[str]) -> "Supervisor":
        """Copy of this supervisor with one observer state's control replaced."""
        if state not in self.controls:
            raise InputError(f"unknown observer state {state!r}")
        controls = dict(self.controls)
        controls[state] = frozenset(control)
        return dataclasses.replace(self, controls=controls)


def disabled_set(estimate: Iterable[str], g: Automaton, safe_states: Iterable[str]) -> frozenset[str]:
    """Events that can take some estimated state out of the safe set."""
    safe = frozenset(safe_states)
    out = set()
    for q in estimate:
        for event, dst in g.outgoing(q):
            if dst not in safe:
                out.add(event)
    return frozenset(out)


def _controls_from_observer(
    obs: CAObserver,
    estimates: Mapping[str, frozenset[str]],
    g: Automaton,
    safe_states: frozenset[str],
) -> dict[str, frozenset[str]]:
    sigma = g.alphabet.events
    uncontrollable = g.alphabet.uncontrollable
    controls = {}
    for state in obs.observer.states:
        estimate = estimates[state]
        if estimate:
            controls[state] = (sigma - disabled_set(estimate, g, safe_states)) | uncontrollable
        else:
            controls[state] = uncontrollable
    return controls


def synthesize_ca_supervisor(g: Automaton, h: Automaton, policy: SensorAttackPolicy) -> Supervisor:
    """Maximally-permissive estimate-based supervisor for a safety sub-automaton.

    Builds the observer on the spec automaton ``h`` (closed-loop states
    stay inside it), then enables everything except the events that could
    leave the safe states from the current estimate.  Observations outside
    the feasible set get the uncontrollable events only.

    Policy entries on transitions outside ``h`` cannot occur in the closed
    loop; they are dropped with a warning.
    """
    ensure_deterministic(g)
    if not is_subautomaton(h, g):
        raise InputError("the specification must be a sub-automaton of the plant")
    restricted, dropped = policy.restricted_to(h)
    if dropped:
        warnings.warn(
            f"attack policy entries for transitions outside the specification were ignored: {list(dropped)}",
            stacklevel=2,
        )
    ensure_valid_policy(h, restricted)
    obs = build_ca_observer(h, restricted)
    estimates = {state: obs.plant_projection(state) for state in obs.observer.states}
    controls = _controls_from_observer(obs, estimates, g, h.states)
    return Supervisor(
        observer=obs,
        controls=controls,
        estimates=estimates,
        default_control=g.alphabet.uncontrollable,
        alphabet=g.alphabet,
    )


def synthesize_obs_based(g: Automaton, h: Automaton, strategy: ObservationAttackStrategy) -> Supervisor:
    """Estimate-based supervisor against an observation-based sensor attack.

    Composes the spec with the attack context, rewrites the attack as a
    transition-based policy on the composition, builds the observer there,
    and lifts every estimate back to plant states before deriving controls.
    """
    ensure_deterministic(g)
    if not is_subautomaton(h, g):
        raise InputError("the specification must be a sub-automaton of the plant")
    conversion = convert_observation_based(h, strategy)
    obs = build_ca_observer(conversion.product, conversion.policy)
    estimates = {
        state: lift_estimate(obs.plant_projection(state), conversion.pairs)
        for state in obs.observer.states
    }
    controls = _controls_from_observer(obs, estimates, g, h.states)
    return Supervisor(
        observer=obs,
        controls=controls,
        estimates=estimates,
        default_control=g.alphabet.uncontrollable,
        alphabet=g.alphabet,
    )


def _require_same_observer(s1: Supervisor, s2: Supervisor) -> None:
    if s1.observer.observer != s2.observer.observer or s1.alphabet != s2.alphabet:
        raise InputError("supervisors must be realized on the same observer")


def supervisor_union(s1: Supervisor, s2: Supervisor) -> Supervisor:
    """Pointwise union of two supervisors over the same observer."""
    _require_same_observer(s1, s2)
    controls = {state: s1.controls[state] | s2.controls[state] for state in s1.controls}
    return dataclasses.replace(s1, controls=controls)


def compare_permissiveness(s1: Supervisor, s2: Supervisor) -> str:
    """Pointwise permissiveness ordering over the reachable observer states.

    Returns one of ``equal``, ``strictly-less``, ``strictly-greater`` or
    ``incomparable``.  (A non-strict relation that is not equality is
    strict at some state, so no other outcome exists.)
    """
    _require_same_observer(s1, s2)
    all_le = all(s1.controls[x] <= s2.controls[x] for x in s1.controls)
    all_ge = all(s1.controls[x] >= s2.controls[x] for x in s1.controls)
    if all_le and all_ge:
        return "equal"
    if all_le:
        return "strictly-less"
    if all_ge:
        return "strictly-greater"
    return "incomparable"
