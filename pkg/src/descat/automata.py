"""Finite automata over event alphabets and the language algorithms built on them.

Automata here are plain immutable values: a state set, an event alphabet,
a transition relation (possibly nondeterministic, possibly containing
epsilon moves), one initial state and a set of marked states.  All
operations are pure functions; nothing in this module mutates its inputs.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Iterable

from .errors import InputError

#: Reserved label for silent moves.  Never a user event name.
EPSILON = "ε"

#: Spellings users might try for the silent label; all are rejected as events.
_RESERVED_EVENT_NAMES = {EPSILON, "eps", "epsilon"}

Transition = tuple[str, str, str]
Word = tuple[str, ...]


@dataclass(frozen=True)
class EventAlphabet:
    """Event set with controllability, observability and attackability attributes.

    The uncontrollable and unobservable sets are derived, never stored:
    ``uncontrollable = events - controllable`` and likewise for observation.
    """

    events: frozenset[str]
    controllable: frozenset[str] = frozenset()
    observable: frozenset[str] = frozenset()
    sensor_attackable: frozenset[str] = frozenset()
    actuator_attackable: frozenset[str] = frozenset()

    def __post_init__(self):
        for name in ("events", "controllable", "observable", "sensor_attackable", "actuator_attackable"):
            object.__setattr__(self, name, frozenset(getattr(self, name)))
        bad = self.events & _RESERVED_EVENT_NAMES
        if bad:
            raise InputError(f"event names {sorted(bad)} are reserved for the silent label")
        if not self.controllable <= self.events:
            raise InputError(f"controllable events {sorted(self.controllable - self.events)} not in the alphabet")
        if not self.observable <= self.events:
            raise InputError(f"observable events {sorted(self.observable - self.events)} not in the alphabet")
        if not self.sensor_attackable <= self.observable:
            raise InputError(
                f"sensor-attackable events {sorted(self.sensor_attackable - self.observable)} must be observable"
            )
        if not self.actuator_attackable <= self.controllable:
            raise InputError(
                f"actuator-attackable events {sorted(self.actuator_attackable - self.controllable)} must be controllable"
            )

    @property
    def uncontrollable(self) -> frozenset[str]:
        return self.events - self.controllable

    @property
    def unobservable(self) -> frozenset[str]:
        return self.events - self.observable

    def with_actuator_attackable(self, events: Iterable[str]) -> "EventAlphabet":
        """Copy of this alphabet with a different actuator-attackable set."""
        return replace(self, actuator_attackable=frozenset(events))

    def observable_restriction(self) -> "EventAlphabet":
        """Alphabet restricted to the observable events (used for attack-context automata)."""
        obs = self.observable
        return EventAlphabet(
            events=obs,
            controllable=self.controllable & obs,
            observable=obs,
            sensor_attackable=self.sensor_attackable,
            actuator_attackable=self.actuator_attackable & obs,
        )


def merge_alphabets(a: EventAlphabet, b: EventAlphabet) -> EventAlphabet:
    """Union of two alphabets, attribute-wise."""
    return EventAlphabet(
        events=a.events | b.events,
        controllable=a.controllable | b.controllable,
        observable=a.observable | b.observable,
        sensor_attackable=a.sensor_attackable | b.sensor_attackable,
        actuator_attackable=a.actuator_attackable | b.actuator_attackable,
    )


@dataclass(frozen=True)
class Automaton:
    """A finite automaton, deterministic or not, with optional epsilon moves.

    ``transitions`` is a set of ``(src, label, dst)`` triples where the label
    is an event of the alphabet or :data:`EPSILON`.  Construction never
    validates structural invariants so that :func:`validate` can report on
    malformed values; the language operations assume a valid automaton.
    """

    states: frozenset[str]
    alphabet: EventAlphabet
    transitions: frozenset[Transition]
    initial: str
    marked: frozenset[str] = frozenset()
    _succ: dict = field(init=False, repr=False, compare=False, default_factory=dict)
    _out: dict = field(init=False, repr=False, compare=False, default_factory=dict)
    _labels: tuple = field(init=False, repr=False, compare=False, default=())

    def __post_init__(self):
        object.__setattr__(self, "states", frozenset(self.states))
        object.__setattr__(self, "transitions", frozenset(tuple(t) for t in self.transitions))
        object.__setattr__(self, "marked", frozenset(self.marked))
        succ: dict[tuple[str, str], set[str]] = {}
        out: dict[str, list[tuple[str, str]]] = {}
        labels: set[str] = set()
        for src, label, dst in sorted(self.transitions):
            succ.setdefault((src, label), set()).add(dst)
            out.setdefault(src, []).append((label, dst))
            if label != EPSILON:
                labels.add(label)
        object.__setattr__(self, "_succ", {k: frozenset(v) for k, v in succ.items()})
        object.__setattr__(self, "_out", {k: tuple(v) for k, v in out.items()})
        object.__setattr__(self, "_labels", tuple(sorted(labels)))

    def successors(self, state: str, label: str) -> frozenset[str]:
        """States reachable from ``state`` by one ``label`` transition."""
        return self._succ.get((state, label), frozenset())

    def outgoing(self, state: str) -> tuple[tuple[str, str], ...]:
        """All ``(label, dst)`` pairs leaving ``state``, in sorted order."""
        return self._out.get(state, ())

    def enabled_events(self, state: str) -> frozenset[str]:
        """Non-epsilon labels with a transition defined at ``state``."""
        return frozenset(l for l, _ in self.outgoing(state) if l != EPSILON)

    def delta(self, state: str, event: str) -> str | None:
        """Deterministic step: the unique successor, or None when undefined.

        Raises :class:`InputError` if the automaton has several successors
        for ``(state, event)``.
        """
        nxt = self.successors(state, event)
        if len(nxt) > 1:
            raise InputError(f"delta({state!r}, {event!r}) is not deterministic: {sorted(nxt)}")
        return next(iter(nxt)) if nxt else None

    @property
    def is_deterministic(self) -> bool:
        """True iff there are no epsilon moves and at most one successor per (state, event)."""
        return all(label != EPSILON and len(dsts) <= 1 for (_, label), dsts in self._succ.items())

    @property
    def used_labels(self) -> tuple[str, ...]:
        """Sorted non-epsilon labels that actually occur on transitions."""
        return self._labels


def validate(a: Automaton) -> list[str]:
    """Report every violated structural invariant of ``a``.

    Returns an empty list iff the automaton is well formed.  Each entry
    names the offending state or transition.
    """
    problems = []
    if a.initial not in a.states:
        problems.append(f"initial state {a.initial!r} is not a state")
    for s in sorted(a.marked - a.states):
        problems.append(f"marked state {s!r} is not a state")
    for src, label, dst in sorted(a.transitions):
        if src not in a.states:
            problems.append(f"transition ({src!r}, {label!r}, {dst!r}) leaves unknown state {src!r}")
        if dst not in a.states:
            problems.append(f"transition ({src!r}, {label!r}, {dst!r}) enters unknown state {dst!r}")
        if label != EPSILON and label not in a.alphabet.events:
            problems.append(f"transition ({src!r}, {label!r}, {dst!r}) uses undeclared event {label!r}")
    return problems


def ensure_valid(a: Automaton, what: str = "automaton") -> None:
    """Raise :class:`InputError` when ``a`` fails :func:`validate`."""
    problems = validate(a)
    if problems:
        raise InputError(f"invalid {what}: " + "; ".join(problems))


def ensure_deterministic(a: Automaton, what: str = "plant") -> None:
    """Raise :class:`InputError` when ``a`` is not deterministic."""
    if not a.is_deterministic:
        raise InputError(f"the {what} must be deterministic")


def unobservable_reach(a: Automaton, states: Iterable[str]) -> frozenset[str]:
    """Smallest superset of ``states`` closed under epsilon transitions."""
    reach = set(states)
    stack = list(reach)
    while stack:
        q = stack.pop()
        for nxt in a.successors(q, EPSILON):
            if nxt not in reach:
                reach.add(nxt)
                stack.append(nxt)
    return frozenset(reach)


def _step(a: Automaton, states: frozenset[str], label: str) -> frozenset[str]:
    """One labelled move from a closed state set, followed by epsilon closure."""
    hit = set()
    for q in states:
        hit |= a.successors(q, label)
    if not hit:
        return frozenset()
    return unobservable_reach(a, hit)


def accessible(a: Automaton) -> Automaton:
    """Restriction of ``a`` to the states reachable from its initial state."""
    seen = {a.initial}
    stack = [a.initial]
    while stack:
        q = stack.pop()
        for _, dst in a.outgoing(q):
            if dst not in seen:
                seen.add(dst)
                stack.append(dst)
    reachable = frozenset(seen)
    return Automaton(
        states=reachable,
        alphabet=a.alphabet,
        transitions=frozenset(t for t in a.transitions if t[0] in reachable and t[2] in reachable),
        initial=a.initial,
        marked=a.marked & reachable,
    )


def run(a: Automaton, word: Iterable[str]) -> frozenset[str]:
    """States reachable from the initial state under ``word``.

    Epsilon closure is applied throughout, so the result for the empty word
    is the closure of the initial state.  The empty set means the word is
    not in the generated language.
    """
    current = unobservable_reach(a, {a.initial})
    for event in word:
        if event not in a.alphabet.events:
            raise InputError(f"unknown event {event!r}")
        current = _step(a, current, event)
        if not current:
            return frozenset()
    return current


def encode_state_set(states: Iterable[str]) -> str:
    """Canonical, byte-stable name for a set of states: `{a,b,c}` sorted."""
    return "{" + ",".join(sorted(states)) + "}"


def subset_construction(a: Automaton) -> tuple[Automaton, dict[str, frozenset[str]]]:
    """Determinize ``a``, returning the observer and its state contents.

    Observer states are canonical encodings (see :func:`encode_state_set`)
    of the underlying state sets; the returned mapping recovers those sets.
    The initial observer state is the epsilon closure of the initial state,
    a move by a label is the closure of the label successors, and an
    observer state is marked iff it contains a marked state of ``a``.
    """
    initial_set = unobservable_reach(a, {a.initial})
    initial_name = encode_state_set(initial_set)
    members: dict[str, frozenset[str]] = {initial_name: initial_set}
    transitions: set[Transition] = set()
    queue = [initial_name]
    while queue:
        name = queue.pop(0)
        current = members[name]
        for label in a.used_labels:
            target = _step(a, current, label)
            if not target:
                continue
            target_name = encode_state_set(target)
            if target_name not in members:
                members[target_name] = target
                queue.append(target_name)
            transitions.add((name, label, target_name))
    marked = frozenset(name for name, content in members.items() if content & a.marked)
    observer = Automaton(
        states=frozenset(members),
        alphabet=a.alphabet,
        transitions=frozenset(transitions),
        initial=initial_name,
        marked=marked,
    )
    return observer, members


def determinize(a: Automaton) -> Automaton:
    """Deterministic automaton with the same language and marked language
    (up to erasure of epsilon moves) as ``a``."""
    return subset_construction(a)[0]


def encode_pair(left: str, right: str) -> str:
    """Canonical name for a product state: `(q,z)`."""
    return f"({left},{right})"


def parallel_compose_pairs(a: Automaton, b: Automaton) -> tuple[Automaton, dict[str, tuple[str, str]]]:
    """Accessible synchronous product of ``a`` and ``b`` plus the pair contents.

    Events in both alphabets synchronize; events private to one component
    (and epsilon moves) interleave freely.  A product state is marked iff
    both components are marked.
    """
    shared = a.alphabet.events & b.alphabet.events
    initial_pair = (a.initial, b.initial)
    initial_name = encode_pair(*initial_pair)
    pairs: dict[str, tuple[str, str]] = {initial_name: initial_pair}
    transitions: set[Transition] = set()
    queue = [initial_name]

    def visit(pair: tuple[str, str]) -> str:
        name = encode_pair(*pair)
        if name not in pairs:
            pairs[name] = pair
            queue.append(name)
        return name

    while queue:
        name = queue.pop(0)
        qa, qb = pairs[name]
        for label, qa2 in a.outgoing(qa):
            if label != EPSILON and label in shared:
                for qb2 in b.successors(qb, label):
                    transitions.add((name, label, visit((qa2, qb2))))
            else:
                transitions.add((name, label, visit((qa2, qb))))
        for label, qb2 in b.outgoing(qb):
            if label == EPSILON or label not in shared:
                transitions.add((name, label, visit((qa, qb2))))
    marked = frozenset(
        name for name, (qa, qb) in pairs.items() if qa in a.marked and qb in b.marked
    )
    product = Automaton(
        states=frozenset(pairs),
        alphabet=merge_alphabets(a.alphabet, b.alphabet),
        transitions=frozenset(transitions),
        initial=initial_name,
        marked=marked,
    )
    return product, pairs


def parallel_compose(a: Automaton, b: Automaton) -> Automaton:
    """Synchronous product; see :func:`parallel_compose_pairs`."""
    return parallel_compose_pairs(a, b)[0]


def natural_projection(word: Iterable[str], alphabet: EventAlphabet) -> Word:
    """Erase the unobservable events of ``word``, preserving order."""
    out = []
    for event in word:
        if event not in alphabet.events:
            raise InputError(f"unknown event {event!r}")
        if event in alphabet.observable:
            out.append(event)
    return tuple(out)


def enumerate_language(a: Automaton, depth: int, marked_only: bool = False) -> frozenset[Word]:
    """All words of length at most ``depth`` in L(a) (or Lm(a) with ``marked_only``).

    Breadth-first over the transition relation with epsilon closure at every
    step; epsilon moves do not count toward the depth.
    """
    if depth < 0:
        raise InputError("depth must be nonnegative")

    def accepts(states: frozenset[str]) -> bool:
        return bool(states & a.marked) if marked_only else bool(states)

    words: set[Word] = set()
    frontier: dict[Word, frozenset[str]] = {(): unobservable_reach(a, {a.initial})}
    if accepts(frontier[()]):
        words.add(())
    for _ in range(depth):
        nxt: dict[Word, frozenset[str]] = {}
        for word, states in frontier.items():
            for label in a.used_labels:
                target = _step(a, states, label)
                if target:
                    nxt[word + (label,)] = target
        frontier = nxt
        if not frontier:
            break
        words.update(w for w, states in frontier.items() if accepts(states))
    return frozenset(words)


def bounded_marked_language(a: Automaton, bound: int) -> frozenset[Word]:
    """Marked words of length at most ``bound``."""
    return enumerate_language(a, bound, marked_only=True)


def marked_word_length_bound(a: Automaton) -> int | None:
    """Length of the longest marked word, or None when Lm(a) is infinite.

    An empty marked language yields 0 (every marked word vacuously fits).
    Word length counts non-epsilon labels only, so epsilon cycles do not
    make the language infinite.
    """
    reach = accessible(a).states
    coreach = _coreachable(a)
    relevant = sorted(reach & coreach)
    if not relevant or not (frozenset(relevant) & a.marked):
        return 0
    index = {s: i for i, s in enumerate(relevant)}
    n = len(relevant)
    neg = float("-inf")
    dist = [[neg] * n for _ in range(n)]
    for src, label, dst in a.transitions:
        if src in index and dst in index:
            w = 0 if label == EPSILON else 1
            i, j = index[src], index[dst]
            dist[i][j] = max(dist[i][j], w)
    for k in range(n):
        for i in range(n):
            if dist[i][k] == neg:
                continue
            for j in range(n):
                if dist[k][j] != neg and dist[i][k] + dist[k][j] > dist[i][j]:
                    dist[i][j] = dist[i][k] + dist[k][j]
    if any(dist[i][i] >= 1 for i in range(n)):
        return None
    if a.initial not in index:
        return 0
    i0 = index[a.initial]
    best = 0
    for m in a.marked:
        if m == a.initial:
            best = max(best, 0)
        elif m in index and dist[i0][index[m]] != neg:
            best = max(best, int(dist[i0][index[m]]))
    return best


def _coreachable(a: Automaton) -> frozenset[str]:
    """States from which some marked state is reachable."""
    pred: dict[str, set[str]] = {}
    for src, _, dst in a.transitions:
        pred.setdefault(dst, set()).add(src)
    seen = set(a.marked & a.states)
    stack = list(seen)
    while stack:
        q = stack.pop()
        for p in pred.get(q, ()):
            if p not in seen:
                seen.add(p)
                stack.append(p)
    return frozenset(seen)


def sub_automaton(g: Automaton, safe_states: Iterable[str]) -> Automaton:
    """Sub-automaton of ``g`` induced by a subset of its states.

    Keeps exactly the transitions of ``g`` with both endpoints in the
    subset; the initial state must belong to it.
    """
    safe = frozenset(safe_states)
    if not safe <= g.states:
        raise InputError(f"safe states {sorted(safe - g.states)} are not states of the automaton")
    if g.initial not in safe:
        raise InputError(f"initial state {g.initial!r} is not among the safe states")
    return Automaton(
        states=safe,
        alphabet=g.alphabet,
        transitions=frozenset(t for t in g.transitions if t[0] in safe and t[2] in safe),
        initial=g.initial,
        marked=g.marked & safe,
    )


def is_subautomaton(h: Automaton, g: Automaton) -> bool:
    """True iff ``h`` is ``g`` induced on a subset of states.

    Requires the same alphabet and the same initial state; the transition
    relation of ``h`` must equal that of ``g`` restricted to pairs of
    ``h``-states.
    """
    if h.alphabet != g.alphabet:
        raise InputError("sub-automaton check requires identical alphabets")
    if h.initial != g.initial or not h.states <= g.states:
        return False
    induced = frozenset(t for t in g.transitions if t[0] in h.states and t[2] in h.states)
    return h.transitions == induced and h.marked == g.marked & h.states
