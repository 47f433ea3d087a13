"""Verification of attacked closed loops.

CA-controllability is decided exactly by reachability.  CA-observability
has no known exact decision procedure, so only a depth-bounded check is
offered and its positive answer is labelled ``holds-to-depth``.  The large
language (the upper bound of everything the attacked closed loop can
generate) is realized both as a product automaton and as a literal,
exponential recursion used to cross-check it.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

from .attacks import SensorAttackPolicy, ensure_valid_policy, phi_enumerate
from .automata import (
    Automaton,
    Transition,
    Word,
    accessible,
    bounded_marked_language,
    ensure_deterministic,
    is_subautomaton,
    marked_word_length_bound,
)
from .errors import InputError, UnsupportedSupervisorError
from .estimation import CAObserver, build_ca_observer
from .synthesis import disabled_set


@dataclass(frozen=True)
class Counterexample:
    """A string, the event extending it, and optional supporting evidence."""

    string: Word
    event: str
    witness: str | None = None

    def as_dict(self) -> dict:
        return {"string": list(self.string), "event": self.event, "witness": self.witness}


@dataclass(frozen=True)
class Verdict:
    """Outcome of a check: holds, fails, or holds up to an explored depth."""

    status: str
    counterexample: Counterexample | None = None
    depth: int | None = None

    def __post_init__(self):
        if self.status not in ("holds", "fails", "holds-to-depth"):
            raise InputError(f"unknown verdict status {self.status!r}")
        if self.status == "fails" and self.counterexample is None:
            raise InputError("a failing verdict needs a counterexample")
        if self.status == "holds-to-depth" and self.depth is None:
            raise InputError("a depth-bounded verdict needs its depth")

    @property
    def holds(self) -> bool:
        return self.status != "fails"

    def as_dict(self) -> dict:
        return {
            "status": self.status,
            "depth": self.depth,
            "counterexample": self.counterexample.as_dict() if self.counterexample else None,
        }


def _shortest_strings(h: Automaton) -> dict[str, Word]:
    """Shortest string of L(h) reaching each reachable state (deterministic h)."""
    best: dict[str, Word] = {h.initial: ()}
    queue = [h.initial]
    while queue:
        q = queue.pop(0)
        for event, dst in h.outgoing(q):
            if dst not in best:
                best[dst] = best[q] + (event,)
                queue.append(dst)
    return best


def check_ca_controllability(
    g: Automaton,
    h: Automaton,
    uncontrollable: Iterable[str] | None = None,
    actuator_attackable: Iterable[str] | None = None,
) -> Verdict:
    """Exact check that no uncontrollable-or-attackable event escapes the spec.

    The safety language fails the check iff some reachable spec state has a
    plant transition labeled in the union of the uncontrollable and
    actuator-attackable sets whose target is unsafe; the counterexample
    carries a shortest string reaching that state.
    """
    ensure_deterministic(g)
    if not is_subautomaton(h, g):
        raise InputError("the specification must be a sub-automaton of the plant")
    uc = frozenset(uncontrollable) if uncontrollable is not None else g.alphabet.uncontrollable
    att = (
        frozenset(actuator_attackable)
        if actuator_attackable is not None
        else g.alphabet.actuator_attackable
    )
    unstoppable = uc | att
    shortest = _shortest_strings(h)
    for q in sorted(shortest, key=lambda s: (len(shortest[s]), shortest[s])):
        for event, dst in g.outgoing(q):
            if event in unstoppable and dst not in h.states:
                return Verdict(
                    status="fails",
                    counterexample=Counterexample(
                        string=shortest[q],
                        event=event,
                        witness=f"reaches unsafe state {dst!r}",
                    ),
                )
    return Verdict(status="holds")


def _observation_cap(steps_bound: int, policy: SensorAttackPolicy) -> int:
    """Length cap for enumerating observations of strings with ``steps_bound`` events.

    Exact for finite attack languages; infinite ones are sampled up to
    twice their automaton's state count per step.
    """
    per_step = 1
    for _, f in policy.sorted_entries():
        bound = marked_word_length_bound(f)
        per_step = max(per_step, 2 * len(f.states) if bound is None else bound)
    return steps_bound * per_step


def check_ca_observability_bounded(
    g: Automaton, h: Automaton, policy: SensorAttackPolicy, depth: int
) -> Verdict:
    """Depth-bounded check of estimate-consistent observability.

    For every string of the safety language extended by one event inside
    it (up to ``depth`` events total), some feasible attacked observation
    must have a state estimate from which that event cannot leave the safe
    states.  If every observation's estimate would force the event to be
    disabled, the pair is a counterexample.  A positive answer only covers
    the explored depth.
    """
    if depth < 1:
        raise InputError("depth must be at least 1")
    ensure_deterministic(g)
    if not is_subautomaton(h, g):
        raise InputError("the specification must be a sub-automaton of the plant")
    restricted, _ = policy.restricted_to(h)
    ensure_valid_policy(h, restricted)
    observer = build_ca_observer(h, restricted)
    obs_cap = _observation_cap(depth, restricted)

    disabled_cache: dict[str, frozenset[str]] = {}

    def disabled_for(observer_state: str) -> frozenset[str]:
        if observer_state not in disabled_cache:
            estimate = observer.plant_projection(observer_state)
            disabled_cache[observer_state] = disabled_set(estimate, g, h.states)
        return disabled_cache[observer_state]

    frontier: list[tuple[str, Word]] = [(h.initial, ())]
    for _ in range(depth):
        nxt: list[tuple[str, Word]] = []
        for q, s in frontier:
            phi = None
            for event, dst in h.outgoing(q):
                if phi is None:
                    phi = phi_enumerate(s, h, restricted, depth=obs_cap)
                ok = False
                for t in phi.strings:
                    x = observer.state_for(t)
                    if x is not None and event not in disabled_for(x):
                        ok = True
                        break
                if not ok:
                    return Verdict(
                        status="fails",
                        counterexample=Counterexample(
                            string=s,
                            event=event,
                            witness="every feasible observation yields an estimate that must disable the event",
                        ),
                        depth=depth,
                    )
                nxt.append((dst, s + (event,)))
        frontier = nxt
        if not frontier:
            break
    return Verdict(status="holds-to-depth", depth=depth)


def _require_estimate_based(supervisor) -> None:
    for attr in ("observer", "controls", "control_for", "default_control"):
        if not hasattr(supervisor, attr):
            raise UnsupportedSupervisorError(
                "this operation needs an estimate-based supervisor (observer plus per-state controls)"
            )


@dataclass(frozen=True)
class LargeLanguageAutomaton:
    """Automaton generating the upper bound of the attacked closed-loop behavior.

    Its states pair a plant state with the set of supervisor-observer
    states reachable under some feasible attacked observation of the
    string so far; ``components`` recovers those pairs.
    """

    automaton: Automaton
    components: Mapping[str, tuple[str, frozenset[str]]]

    def __post_init__(self):
        object.__setattr__(self, "components", dict(self.components))


def _encode_product_state(q: str, tracked: frozenset[str]) -> str:
    return q + "|{" + ",".join(sorted(tracked)) + "}"


class _ObserverStepRelation:
    """Per-plant-transition successor relation on supervisor-observer states.

    For an attacked transition, an observer state steps to everything some
    corruption word can drive it to (computed by product reachability with
    the corruption automaton, so infinite attack languages are exact).
    Unattacked transitions step by the event's projection.
    """

    def __init__(self, observer: CAObserver, policy: SensorAttackPolicy, observable: frozenset[str]):
        self.observer = observer.observer
        self.policy = policy
        self.observable = observable
        self._memo: dict[tuple[Transition, str], frozenset[str]] = {}

    def successors(self, tr: Transition, w: str) -> frozenset[str]:
        key = (tr, w)
        if key not in self._memo:
            self._memo[key] = self._compute(tr, w)
        return self._memo[key]

    def _compute(self, tr: Transition, w: str) -> frozenset[str]:
        f = self.policy.language_automaton(tr)
        if f is None:
            event = tr[1]
            if event not in self.observable:
                return frozenset({w})
            nxt = self.observer.delta(w, event)
            return frozenset({nxt}) if nxt is not None else frozenset()
        found = set()
        start = (f.initial, w)
        seen = {start}
        stack = [start]
        while stack:
            fstate, x = stack.pop()
            if fstate in f.marked:
                found.add(x)
            for label, f2 in f.outgoing(fstate):
                x2 = self.observer.delta(x, label)
                if x2 is None:
                    continue
                nxt = (f2, x2)
                if nxt not in seen:
                    seen.add(nxt)
                    stack.append(nxt)
        return frozenset(found)


def large_language_automaton(
    g: Automaton,
    supervisor,
    policy: SensorAttackPolicy,
    actuator_attackable: Iterable[str] | None = None,
) -> LargeLanguageAutomaton:
    """Product construction generating exactly the attacked closed loop's large language.

    From a pair (plant state, tracked observer states), an event fires iff
    the plant allows it and it is uncontrollable, actuator-attackable, or
    enabled by the control of some tracked observer state.  The tracked
    set advances through the per-transition observer relation.
    """
    _require_estimate_based(supervisor)
    ensure_deterministic(g)
    ensure_valid_policy(g, policy)
    att = (
        frozenset(actuator_attackable)
        if actuator_attackable is not None
        else g.alphabet.actuator_attackable
    )
    free = g.alphabet.uncontrollable | att
    relation = _ObserverStepRelation(supervisor.observer, policy, g.alphabet.observable)
    x0 = supervisor.observer.observer.initial

    initial = (g.initial, frozenset({x0}))
    initial_name = _encode_product_state(*initial)
    components: dict[str, tuple[str, frozenset[str]]] = {initial_name: initial}
    transitions: set[Transition] = set()
    queue = [initial_name]
    while queue:
        name = queue.pop(0)
        q, tracked = components[name]
        for event, dst in g.outgoing(q):
            if event not in free and not any(
                event in supervisor.controls[w] for w in tracked
            ):
                continue
            tr = (q, event, dst)
            advanced = frozenset()
            for w in tracked:
                advanced |= relation.successors(tr, w)
            target = (dst, advanced)
            target_name = _encode_product_state(*target)
            if target_name not in components:
                components[target_name] = target
                queue.append(target_name)
            transitions.add((name, event, target_name))
    automaton = Automaton(
        states=frozenset(components),
        alphabet=g.alphabet,
        transitions=frozenset(transitions),
        initial=initial_name,
        marked=frozenset(components),
    )
    return LargeLanguageAutomaton(automaton=automaton, components=components)


def brute_force_large_language(
    g: Automaton,
    supervisor,
    policy: SensorAttackPolicy,
    depth: int,
    actuator_attackable: Iterable[str] | None = None,
) -> frozenset[Word]:
    """Literal evaluation of the large-language recursion, up to ``depth`` events.

    Exponential; intended as an independent cross-check of
    :func:`large_language_automaton` on small models.  Observations are
    enumerated exactly for finite attack languages and sampled up to a
    documented cap otherwise, so prefer acyclic corruption automata when
    exactness matters.
    """
    if depth < 0:
        raise InputError("depth must be nonnegative")
    _require_estimate_based(supervisor)
    ensure_deterministic(g)
    ensure_valid_policy(g, policy)
    att = (
        frozenset(actuator_attackable)
        if actuator_attackable is not None
        else g.alphabet.actuator_attackable
    )
    free = g.alphabet.uncontrollable | att
    observable = g.alphabet.observable
    obs_cap = _observation_cap(depth, policy)

    control_cache: dict[Word, frozenset[str]] = {}

    def control(t: Word) -> frozenset[str]:
        if t not in control_cache:
            control_cache[t] = supervisor.control_for(t)
        return control_cache[t]

    fragment_cache: dict[tuple[Transition, int], frozenset[Word]] = {}

    def fragments(tr: Transition, budget: int) -> frozenset[Word]:
        f = policy.language_automaton(tr)
        if f is None:
            if tr[1] not in observable:
                return frozenset({()})
            return frozenset({(tr[1],)}) if budget >= 1 else frozenset()
        key = (tr, budget)
        if key not in fragment_cache:
            fragment_cache[key] = bounded_marked_language(f, budget)
        return fragment_cache[key]

    # Per string, carry the plant state and the observation set built by the
    # per-step concatenation that defines the corrupted-observation map.
    accepted: set[Word] = {()}
    frontier: dict[Word, tuple[str, frozenset[Word]]] = {(): (g.initial, frozenset({()}))}
    for _ in range(depth):
        nxt: dict[Word, tuple[str, frozenset[Word]]] = {}
        for s, (q, phi) in frontier.items():
            for event, dst in g.outgoing(q):
                if event not in free and not any(event in control(t) for t in phi):
                    continue
                tr = (q, event, dst)
                extended = frozenset(
                    t + u for t in phi for u in fragments(tr, obs_cap - len(t))
                )
                nxt[s + (event,)] = (dst, extended)
        frontier = nxt
        if not frontier:
            break
        accepted.update(frontier)
    return frozenset(accepted)


def verify_large_language_equals(
    g: Automaton,
    h: Automaton,
    supervisor,
    policy: SensorAttackPolicy,
    actuator_attackable: Iterable[str] | None = None,
) -> Verdict:
    """Exact language equality between the attacked closed loop's upper bound and the spec.

    Both sides are finite deterministic generators, so equality reduces to
    a product reachability check; a shortest distinguishing string is
    reported on failure.
    """
    lla = large_language_automaton(g, supervisor, policy, actuator_attackable=actuator_attackable)
    left = lla.automaton
    right = accessible(h)
    start = (left.initial, right.initial)
    parents: dict[tuple[str, str], tuple[tuple[str, str], str] | None] = {start: None}
    queue = [start]
    while queue:
        pair = queue.pop(0)
        xl, xr = pair
        events = {e for e, _ in left.outgoing(xl)} | {e for e, _ in right.outgoing(xr)}
        for event in sorted(events):
            nl = left.delta(xl, event)
            nr = right.delta(xr, event)
            if (nl is None) != (nr is None):
                string = _product_trace(parents, pair)
                side = (
                    "generated by the closed loop but outside the specification"
                    if nr is None
                    else "in the specification but not generated by the closed loop"
                )
                return Verdict(
                    status="fails",
                    counterexample=Counterexample(string=string, event=event, witness=side),
                )
            if nl is None:
                continue
            nxt = (nl, nr)
            if nxt not in parents:
                parents[nxt] = (pair, event)
                queue.append(nxt)
    return Verdict(status="holds")


def _product_trace(parents, pair) -> Word:
    out: list[str] = []
    while parents[pair] is not None:
        pair, event = parents[pair]
        out.append(event)
    return tuple(reversed(out))
