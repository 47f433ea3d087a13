"""Sensor and actuator attack semantics.

A transition-based sensor attack maps each attackable plant transition to a
regular language of corrupted observations, given as a marked automaton.
An observation-based attack drives a finite attack-context automaton with
the observation stream and picks the corruption language per context state.
Actuator attacks add or remove attackable controllable events from an
issued control.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Mapping

from .automata import (
    EPSILON,
    Automaton,
    EventAlphabet,
    Transition,
    Word,
    bounded_marked_language,
    marked_word_length_bound,
    parallel_compose_pairs,
)
from .automata import validate as validate_automaton
from .errors import InputError, PreconditionError


@dataclass(frozen=True, eq=True)
class LanguageSample:
    """A depth-bounded enumeration of a possibly infinite language.

    ``truncated`` is True when words beyond ``depth`` exist, i.e. the sample
    is a strict under-approximation.
    """

    strings: frozenset[Word]
    depth: int
    truncated: bool

    def __iter__(self):
        return iter(self.strings)

    def __contains__(self, word) -> bool:
        return tuple(word) in self.strings

    def __len__(self) -> int:
        return len(self.strings)


@dataclass(frozen=True)
class SensorAttackPolicy:
    """Map from attacked transitions to their corruption-language automata.

    Every transition of the plant labelled with a sensor-attackable event
    must be covered; :func:`validate_policy` checks this together with the
    well-formedness of the attack automata.
    """

    entries: Mapping[Transition, Automaton]

    def __post_init__(self):
        object.__setattr__(self, "entries", dict(self.entries))

    @classmethod
    def from_transitions(cls, entries: Mapping[Transition, Automaton]) -> "SensorAttackPolicy":
        return cls(entries=dict(entries))

    @classmethod
    def uniform(
        cls,
        g: Automaton,
        event_map: Mapping[str, Automaton],
        overrides: Mapping[Transition, Automaton] | None = None,
    ) -> "SensorAttackPolicy":
        """Expand per-event corruption languages to every matching transition.

        Explicit per-transition ``overrides`` win over the per-event entry.
        """
        entries: dict[Transition, Automaton] = {}
        for tr in sorted(g.transitions):
            if tr[1] in event_map:
                entries[tr] = event_map[tr[1]]
        if overrides:
            entries.update(overrides)
        return cls(entries=entries)

    @classmethod
    def empty(cls) -> "SensorAttackPolicy":
        return cls(entries={})

    def attacked(self, tr: Transition) -> bool:
        return tr in self.entries

    def language_automaton(self, tr: Transition) -> Automaton | None:
        return self.entries.get(tr)

    def sorted_entries(self) -> list[tuple[Transition, Automaton]]:
        return sorted(self.entries.items(), key=lambda item: item[0])

    def restricted_to(self, a: Automaton) -> tuple["SensorAttackPolicy", tuple[Transition, ...]]:
        """Restriction to the transitions of ``a`` plus the dropped keys."""
        kept = {tr: f for tr, f in self.entries.items() if tr in a.transitions}
        dropped = tuple(sorted(tr for tr in self.entries if tr not in a.transitions))
        return SensorAttackPolicy(entries=kept), dropped


def validate_policy(g: Automaton, policy: SensorAttackPolicy) -> list[str]:
    """Report every way ``policy`` fails to be a valid attack map for ``g``."""
    problems = []
    observable = g.alphabet.observable
    attackable = g.alphabet.sensor_attackable
    for tr in sorted(policy.entries):
        if tr not in g.transitions:
            problems.append(f"attacked transition {tr!r} does not exist in the plant")
        elif tr[1] not in attackable:
            problems.append(f"attacked transition {tr!r} is not labelled with a sensor-attackable event")
    for tr in sorted(g.transitions):
        if tr[1] in attackable and tr not in policy.entries:
            problems.append(f"transition {tr!r} carries attackable event {tr[1]!r} but has no attack language")
    for tr, f in policy.sorted_entries():
        for problem in validate_automaton(f):
            problems.append(f"attack automaton for {tr!r}: {problem}")
        for src, label, dst in sorted(f.transitions):
            if label == EPSILON or label not in observable:
                problems.append(
                    f"attack automaton for {tr!r}: transition label {label!r} is not an observable event"
                )
        if not bounded_marked_language(f, len(f.states)):
            # A nonempty regular language has a witness no longer than the state count.
            problems.append(f"attack automaton for {tr!r} has an empty corruption language")
    return problems


def ensure_valid_policy(g: Automaton, policy: SensorAttackPolicy) -> None:
    problems = validate_policy(g, policy)
    if problems:
        raise InputError("invalid sensor attack policy: " + "; ".join(problems))


def delta_control(control: Iterable[str], actuator_attackable: Iterable[str]) -> frozenset[frozenset[str]]:
    """All controls an actuator attacker can deliver for an issued control.

    The attacker may remove and add arbitrary subsets of the attackable
    events, which collapses to ``(control - attackable) | A`` over all
    subsets ``A`` of the attackable set; the result always has exactly
    ``2**|attackable|`` elements.
    """
    base = frozenset(control) - frozenset(actuator_attackable)
    attackable = sorted(frozenset(actuator_attackable))
    if len(attackable) > 16:
        raise InputError(f"refusing to expand 2**{len(attackable)} attacked controls")
    out = set()
    for r in range(len(attackable) + 1):
        for combo in itertools.combinations(attackable, r):
            out.add(base | frozenset(combo))
    return frozenset(out)


def attacked_commands(supervisor, observation: Iterable[str], actuator_attackable: Iterable[str] | None = None) -> frozenset[frozenset[str]]:
    """Controls the plant may receive after the supervisor reacts to ``observation``.

    ``supervisor`` is anything with a ``control_for`` method and an
    ``alphabet`` attribute (see :class:`descat.synthesis.Supervisor`).
    """
    issued = supervisor.control_for(tuple(observation))
    if actuator_attackable is None:
        actuator_attackable = supervisor.alphabet.actuator_attackable
    return delta_control(issued, actuator_attackable)


def _path_states(g: Automaton, word: Word) -> list[str]:
    """States visited by a word in a deterministic automaton, initial included."""
    if not g.is_deterministic:
        raise InputError("the plant must be deterministic")
    path = [g.initial]
    for event in word:
        nxt = g.delta(path[-1], event)
        if nxt is None:
            raise InputError(f"string {' '.join(word) or 'ε'!s} is not in the plant language")
        path.append(nxt)
    return path


def _step_fragments(g: Automaton, policy: SensorAttackPolicy, word: Word) -> list[Automaton | str | None]:
    """Per-step corruption source along the path of ``word``.

    Each entry is the attack automaton for an attacked step, the event name
    for an unattacked observable step, or None for an unobservable step.
    """
    path = _path_states(g, word)
    steps: list[Automaton | str | None] = []
    for k, event in enumerate(word):
        tr = (path[k], event, path[k + 1])
        f = policy.language_automaton(tr)
        if f is not None:
            steps.append(f)
        elif event in g.alphabet.observable:
            steps.append(event)
        else:
            steps.append(None)
    return steps


def theta_automaton(word: Iterable[str], g: Automaton, policy: SensorAttackPolicy) -> Automaton:
    """Automaton whose marked language is the set of corrupted strings for ``word``.

    The corruption of a string is the concatenation of its per-step
    languages: the singleton of the event itself for unattacked steps and
    the attack language for attacked steps.
    """
    word = tuple(word)
    ensure_valid_policy(g, policy)
    path = _path_states(g, word)

    states: set[str] = {"0"}
    transitions: set[Transition] = set()
    current_accepting = {"0"}
    for k, event in enumerate(word, start=1):
        tr = (path[k - 1], event, path[k])
        f = policy.language_automaton(tr)
        if f is None:
            entry, exits = _chain_singleton(k, event, states, transitions)
        else:
            entry, exits = _chain_copy(k, f, states, transitions)
        for acc in current_accepting:
            transitions.add((acc, EPSILON, entry))
        current_accepting = exits
    return Automaton(
        states=frozenset(states),
        alphabet=g.alphabet,
        transitions=frozenset(transitions),
        initial="0",
        marked=frozenset(current_accepting),
    )


def _chain_singleton(k: int, event: str, states: set[str], transitions: set[Transition]) -> tuple[str, set[str]]:
    entry, end = f"{k}/in", f"{k}/out"
    states.update((entry, end))
    transitions.add((entry, event, end))
    return entry, {end}


def _chain_copy(k: int, f: Automaton, states: set[str], transitions: set[Transition]) -> tuple[str, set[str]]:
    rename = {s: f"{k}/{s}" for s in f.states}
    states.update(rename.values())
    for src, label, dst in f.transitions:
        transitions.add((rename[src], label, rename[dst]))
    return rename[f.initial], {rename[s] for s in f.marked}


def _fragment_words(step: Automaton | str | None, budget: int, cache: dict) -> frozenset[Word]:
    """Observable words a single step can emit, up to ``budget`` symbols."""
    if step is None:
        return frozenset({()})
    if isinstance(step, str):
        return frozenset({(step,)}) if budget >= 1 else frozenset()
    key = (id(step), budget)
    if key not in cache:
        cache[key] = bounded_marked_language(step, budget)
    return cache[key]


def _concatenate_bounded(
    steps: list[Automaton | str | None],
    depth: int | None,
) -> LanguageSample:
    """Bounded concatenation of per-step fragment languages."""
    total = 0
    infinite = False
    for step in steps:
        if step is None:
            continue
        if isinstance(step, str):
            total += 1
            continue
        bound = marked_word_length_bound(step)
        if bound is None:
            infinite = True
        else:
            total += bound
    if depth is None:
        if infinite:
            raise InputError(
                "some attack language is infinite; pass an explicit depth to truncate the enumeration"
            )
        depth = total
    truncated = infinite or total > depth

    cache: dict = {}
    frontier: set[Word] = {()}
    for step in steps:
        nxt: set[Word] = set()
        for prefix in frontier:
            for fragment in _fragment_words(step, depth - len(prefix), cache):
                nxt.add(prefix + fragment)
        frontier = nxt
        if not frontier:
            break
    return LanguageSample(strings=frozenset(frontier), depth=depth, truncated=truncated)


def phi_enumerate(
    word: Iterable[str], g: Automaton, policy: SensorAttackPolicy, depth: int | None = None
) -> LanguageSample:
    """Observations the supervisor may see for an occurred string.

    This is the natural projection of the corrupted-string set.  With
    ``depth=None`` the result is exact and an :class:`InputError` is raised
    when some attack language is infinite; otherwise observations longer
    than ``depth`` are dropped and the sample is flagged truncated.
    """
    word = tuple(word)
    ensure_valid_policy(g, policy)
    steps = _step_fragments(g, policy, word)
    return _concatenate_bounded(steps, depth)


@dataclass(frozen=True)
class ObservationAttackStrategy:
    """Observation-based sensor attack: a context automaton plus a corruption map.

    ``sa`` is a deterministic automaton over the observable events whose
    language must contain every projected plant string.  ``omega`` maps a
    pair (context state, sensor-attackable event) to the corruption
    language emitted when that event is observed in that context; events
    outside the attackable set always pass through unchanged.
    """

    sa: Automaton
    omega: Mapping[tuple[str, str], Automaton]

    def __post_init__(self):
        object.__setattr__(self, "omega", dict(self.omega))

    def corruption(self, z: str, event: str) -> Automaton | None:
        return self.omega.get((z, event))


def check_projection_containment(g: Automaton, sa: Automaton) -> Word | None:
    """Exact check that every projected plant string is accepted by ``sa``.

    Returns None when the containment holds, otherwise a shortest witness
    observation that ``sa`` cannot follow.
    """
    observable = g.alphabet.observable
    start = (g.initial, sa.initial)
    parents: dict[tuple[str, str], tuple[tuple[str, str], str] | None] = {start: None}
    queue = [start]
    while queue:
        pair = queue.pop(0)
        q, z = pair
        for event, q2 in g.outgoing(q):
            if event == EPSILON or event not in observable:
                nxt = (q2, z)
                emitted = None
            else:
                z2 = sa.delta(z, event)
                if z2 is None:
                    witness = _trace_back(parents, pair) + (event,)
                    return witness
                nxt = (q2, z2)
                emitted = event
            if nxt not in parents:
                parents[nxt] = (pair, emitted)
                queue.append(nxt)
    return None


def _trace_back(parents, pair) -> Word:
    out: list[str] = []
    while parents[pair] is not None:
        pair, emitted = parents[pair]
        if emitted is not None:
            out.append(emitted)
    return tuple(reversed(out))


def validate_strategy(g: Automaton, strategy: ObservationAttackStrategy) -> list[str]:
    """Report every defect of an observation-based attack strategy for ``g``."""
    problems = []
    sa = strategy.sa
    observable = g.alphabet.observable
    if not sa.is_deterministic:
        problems.append("the attack-context automaton must be deterministic")
    for src, label, dst in sorted(sa.transitions):
        if label == EPSILON or label not in observable:
            problems.append(f"attack-context transition label {label!r} is not an observable event")
    witness = None
    if sa.is_deterministic:
        witness = check_projection_containment(g, sa)
        if witness is not None:
            problems.append(
                "the attack-context automaton does not cover the projected plant language; "
                f"witness observation: {' '.join(witness) or 'ε'}"
            )
    attackable = g.alphabet.sensor_attackable
    for (z, event), f in sorted(strategy.omega.items(), key=lambda kv: kv[0]):
        if z not in sa.states:
            problems.append(f"corruption entry for unknown context state {z!r}")
        if event not in attackable:
            problems.append(f"corruption entry for non-attackable event {event!r}")
        for problem in validate_automaton(f):
            problems.append(f"corruption automaton for ({z!r}, {event!r}): {problem}")
        for src, label, dst in sorted(f.transitions):
            if label == EPSILON or label not in observable:
                problems.append(
                    f"corruption automaton for ({z!r}, {event!r}): label {label!r} is not observable"
                )
        if not bounded_marked_language(f, len(f.states)):
            problems.append(f"corruption automaton for ({z!r}, {event!r}) has an empty language")
    # Every reachable attacked (context, event) pair needs a corruption language.
    if sa.is_deterministic and witness is None:
        product, pairs = parallel_compose_pairs(g, sa)
        for name, label, _ in sorted(product.transitions):
            if label in attackable:
                z = pairs[name][1]
                if (z, label) not in strategy.omega:
                    problems.append(
                        f"no corruption language for reachable context pair ({z!r}, {label!r})"
                    )
    return problems


def ensure_valid_strategy(g: Automaton, strategy: ObservationAttackStrategy) -> None:
    problems = validate_strategy(g, strategy)
    if problems:
        raise PreconditionError("invalid observation attack strategy: " + "; ".join(problems))


def phi_omega(
    observation: Iterable[str],
    strategy: ObservationAttackStrategy,
    alphabet: EventAlphabet,
    depth: int | None = None,
) -> LanguageSample:
    """Corrupted observations for a true observation under an observation-based attack.

    Follows the recursion: the empty observation maps to itself, and each
    observed event contributes the corruption language chosen at the
    current context state (the event itself when it is not attackable).
    """
    observation = tuple(observation)
    sa = strategy.sa
    attackable = alphabet.sensor_attackable
    steps: list[Automaton | str | None] = []
    z = sa.initial
    for event in observation:
        if event not in alphabet.observable:
            raise InputError(f"observation contains non-observable event {event!r}")
        if event in attackable:
            f = strategy.corruption(z, event)
            if f is None:
                raise InputError(f"no corruption language for context pair ({z!r}, {event!r})")
            steps.append(f)
        else:
            steps.append(event)
        z2 = sa.delta(z, event)
        if z2 is None:
            raise InputError(
                f"observation {' '.join(observation)} leaves the attack-context automaton at {z!r}"
            )
        z = z2
    return _concatenate_bounded(steps, depth)


@dataclass(frozen=True)
class ObservationConversion:
    """Result of rewriting an observation-based attack as a transition-based one.

    ``product`` is the plant composed with the attack-context automaton
    (same language as the plant), ``policy`` the induced transition-based
    policy on it, and ``pairs`` the decomposition of product state names
    into (plant state, context state).
    """

    product: Automaton
    policy: SensorAttackPolicy
    pairs: dict[str, tuple[str, str]]


def convert_observation_based(g: Automaton, strategy: ObservationAttackStrategy) -> ObservationConversion:
    """Rewrite an observation-based sensor attack as a transition-based policy.

    Composes the plant with the attack context, then keys each attackable
    transition of the product on the corruption language chosen at its
    source context state.  Raises :class:`PreconditionError` (with a
    witness) when the context automaton does not cover the projected plant
    language.
    """
    ensure_valid_strategy(g, strategy)
    product, pairs = parallel_compose_pairs(g, strategy.sa)
    attackable = g.alphabet.sensor_attackable
    entries: dict[Transition, Automaton] = {}
    for tr in sorted(product.transitions):
        if tr[1] in attackable:
            z = pairs[tr[0]][1]
            entries[tr] = strategy.omega[(z, tr[1])]
    return ObservationConversion(product=product, policy=SensorAttackPolicy(entries=entries), pairs=pairs)
