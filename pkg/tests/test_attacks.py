"""Attack semantics: corruption images, actuator-attacked controls and the
conversion of observation-based attacks to transition-based ones."""

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from descat import (
    Automaton,
    InputError,
    PreconditionError,
    SensorAttackPolicy,
    bounded_marked_language,
    convert_observation_based,
    delta_control,
    enumerate_language,
    natural_projection,
    phi_enumerate,
    phi_omega,
    theta_automaton,
    validate_policy,
)
from conftest import make_cycle, random_model

W = lambda text: tuple(text.split())


class TestDeltaControl:
    def test_corpus_expansion_has_four_controls(self):
        out = delta_control({"alpha", "lambda", "mu"}, {"alpha", "beta"})
        assert out == {
            frozenset({"alpha", "lambda", "mu"}),
            frozenset({"alpha", "beta", "lambda", "mu"}),
            frozenset({"lambda", "mu"}),
            frozenset({"beta", "lambda", "mu"}),
        }

    def test_no_attackable_actuators_is_identity(self):
        assert delta_control({"a", "b"}, set()) == {frozenset({"a", "b"})}

    def test_empty_control_expands_over_attackable(self):
        assert delta_control(set(), {"b"}) == {frozenset(), frozenset({"b"})}

    @given(
        control=st.sets(st.sampled_from("abcdef"), max_size=6),
        attackable=st.sets(st.sampled_from("abcd"), max_size=4),
    )
    @settings(max_examples=200, deadline=None)
    def test_algebraic_laws(self, control, attackable):
        out = delta_control(control, attackable)
        control, attackable = frozenset(control), frozenset(attackable)
        assert len(out) == 2 ** len(attackable)
        assert control in out
        for delivered in out:
            assert control - attackable <= delivered <= control | attackable


class TestPolicyValidation:
    def test_corpus_policy_valid(self):
        model = make_cycle()
        assert validate_policy(model.plant, model.policy) == []

    def test_uncovered_attackable_transition(self):
        model = make_cycle()
        partial = SensorAttackPolicy.from_transitions(
            {("2", "lambda", "3"): model.f1}
        )
        problems = validate_policy(model.plant, partial)
        assert any("('3', 'mu', '1')" in p for p in problems)

    def test_unknown_transition_key(self):
        model = make_cycle()
        bogus = SensorAttackPolicy.from_transitions(
            {**model.policy.entries, ("9", "lambda", "9"): model.f1}
        )
        assert any("does not exist" in p for p in validate_policy(model.plant, bogus))

    def test_empty_corruption_language_rejected(self):
        model = make_cycle()
        dead = Automaton(
            states={"X"}, alphabet=model.alphabet, transitions=set(), initial="X"
        )
        policy = SensorAttackPolicy.from_transitions(
            {**model.policy.entries, ("2", "lambda", "3"): dead}
        )
        assert any("empty corruption language" in p for p in validate_policy(model.plant, policy))

    def test_uniform_expansion_covers_every_matching_transition(self):
        model = make_cycle()
        f = model.f2
        policy = SensorAttackPolicy.uniform(model.plant, {"lambda": f, "mu": f})
        assert set(policy.entries) == {("2", "lambda", "3"), ("3", "mu", "1")}
        override = SensorAttackPolicy.uniform(
            model.plant, {"lambda": f, "mu": f}, overrides={("2", "lambda", "3"): model.f1}
        )
        assert override.entries[("2", "lambda", "3")] == model.f1


class TestTheta:
    def test_corpus_string_alpha_lambda(self, cycle):
        theta = theta_automaton(W("alpha lambda"), cycle.plant, cycle.policy)
        words = bounded_marked_language(theta, 6)
        assert words == {W("alpha"), W("alpha lambda"), W("alpha lambda mu")}

    def test_unattacked_string_is_singleton(self, cycle):
        theta = theta_automaton(W("alpha"), cycle.plant, cycle.policy)
        assert bounded_marked_language(theta, 4) == {W("alpha")}

    def test_string_outside_plant_rejected(self, cycle):
        with pytest.raises(InputError):
            theta_automaton(W("mu"), cycle.plant, cycle.policy)


class TestPhi:
    def test_corpus_string_alpha_lambda_mu(self, cycle):
        phi = phi_enumerate(W("alpha lambda mu"), cycle.plant, cycle.policy)
        assert phi.strings == {
            W("alpha mu"),
            W("alpha beta"),
            W("alpha lambda mu"),
            W("alpha lambda beta"),
            W("alpha lambda mu mu"),
            W("alpha lambda mu beta"),
        }
        assert not phi.truncated

    def test_empty_string(self, cycle):
        phi = phi_enumerate((), cycle.plant, cycle.policy)
        assert phi.strings == {()}

    def test_no_attacks_degenerates_to_projection(self):
        from descat import Automaton, EventAlphabet

        rng = random.Random(3)
        for _ in range(10):
            g, _ = random_model(rng)
            unattacked_alphabet = EventAlphabet(
                events=g.alphabet.events,
                controllable=g.alphabet.controllable,
                observable=g.alphabet.observable,
            )
            g = Automaton(
                states=g.states,
                alphabet=unattacked_alphabet,
                transitions=g.transitions,
                initial=g.initial,
            )
            empty = SensorAttackPolicy.empty()
            for word in sorted(enumerate_language(g, 4)):
                phi = phi_enumerate(word, g, empty)
                assert phi.strings == {natural_projection(word, g.alphabet)}

    def test_matches_projected_theta_language(self, cycle):
        for word in sorted(enumerate_language(cycle.plant, 6)):
            phi = phi_enumerate(word, cycle.plant, cycle.policy)
            theta = theta_automaton(word, cycle.plant, cycle.policy)
            projected = {
                natural_projection(w, cycle.alphabet)
                for w in bounded_marked_language(theta, phi.depth)
            }
            assert phi.strings == projected

    def test_infinite_attack_language_needs_depth(self, cycle):
        loop = Automaton(
            states={"L"},
            alphabet=cycle.alphabet,
            transitions={("L", "mu", "L")},
            initial="L",
            marked={"L"},
        )
        policy = SensorAttackPolicy.from_transitions(
            {**cycle.policy.entries, ("3", "mu", "1"): loop}
        )
        with pytest.raises(InputError):
            phi_enumerate(W("alpha lambda mu"), cycle.plant, policy)
        bounded = phi_enumerate(W("alpha lambda mu"), cycle.plant, policy, depth=4)
        assert bounded.truncated
        assert W("alpha lambda mu mu") in bounded.strings
        assert all(len(t) <= 4 for t in bounded.strings)


class TestPhiOmega:
    def test_empty_observation(self, cycle_beta, cycle_strategy):
        sample = phi_omega((), cycle_strategy, cycle_beta.alphabet)
        assert sample.strings == {()}

    def test_recursion_expands_contextual_languages(self, cycle_beta, cycle_strategy):
        sample = phi_omega(W("alpha lambda mu"), cycle_strategy, cycle_beta.alphabet)
        expected = set()
        for mid in ((), W("lambda"), W("lambda mu")):
            for tail in (W("mu"), W("beta")):
                expected.add(W("alpha") + mid + tail)
        assert sample.strings == expected

    def test_identity_strategy_reproduces_observation(self, cycle_beta):
        alphabet = cycle_beta.alphabet
        sa = Automaton(
            states={"z"},
            alphabet=alphabet.observable_restriction(),
            transitions={("z", e, "z") for e in alphabet.observable},
            initial="z",
        )
        omega = {}
        for e in alphabet.sensor_attackable:
            omega[("z", e)] = Automaton(
                states={"i", "f"},
                alphabet=alphabet,
                transitions={("i", e, "f")},
                initial="i",
                marked={"f"},
            )
        from descat import ObservationAttackStrategy

        strategy = ObservationAttackStrategy(sa=sa, omega=omega)
        for word in (W("alpha"), W("alpha lambda"), W("alpha lambda mu alpha")):
            assert phi_omega(word, strategy, alphabet).strings == {word}


class TestConversion:
    def test_corpus_policy_keys_and_languages(self, cycle_beta, cycle_strategy):
        conv = convert_observation_based(cycle_beta.plant, cycle_strategy)
        assert set(conv.policy.entries) == {
            ("(2,z2)", "lambda", "(3,z3)"),
            ("(3,z3)", "mu", "(1,z5)"),
        }
        assert conv.policy.entries[("(2,z2)", "lambda", "(3,z3)")] == cycle_beta.f1
        assert conv.policy.entries[("(3,z3)", "mu", "(1,z5)")] == cycle_beta.f2

    def test_product_preserves_plant_language(self, cycle_beta, cycle_strategy):
        conv = convert_observation_based(cycle_beta.plant, cycle_strategy)
        for d in range(8):
            assert enumerate_language(conv.product, d) == enumerate_language(cycle_beta.plant, d)

    def test_pairing_matches_joint_walk(self, cycle_beta, cycle_strategy):
        conv = convert_observation_based(cycle_beta.plant, cycle_strategy)
        g, sa = cycle_beta.plant, cycle_strategy.sa
        for word in sorted(enumerate_language(g, 8)):
            q = g.initial
            for event in word:
                q = g.delta(q, event)
            z = sa.initial
            for event in natural_projection(word, g.alphabet):
                z = sa.delta(z, event)
            name = f"({q},{z})"
            assert conv.pairs[name] == (q, z)

    def test_single_state_context_reduces_to_uniform_policy(self, cycle_beta):
        alphabet = cycle_beta.alphabet
        sa = Automaton(
            states={"z"},
            alphabet=alphabet.observable_restriction(),
            transitions={("z", e, "z") for e in alphabet.observable},
            initial="z",
        )
        from descat import ObservationAttackStrategy

        strategy = ObservationAttackStrategy(
            sa=sa,
            omega={("z", "lambda"): cycle_beta.f1, ("z", "mu"): cycle_beta.f2},
        )
        conv = convert_observation_based(cycle_beta.plant, strategy)
        languages = {tr[1]: f for tr, f in conv.policy.entries.items()}
        assert languages == {"lambda": cycle_beta.f1, "mu": cycle_beta.f2}

    def test_unreachable_corruption_entries_are_ignored(self, cycle_beta, cycle_strategy):
        # (z4, mu) never occurs in the composition; declaring it is harmless
        extra = dict(cycle_strategy.omega)
        extra[("z4", "mu")] = cycle_beta.f2
        from descat import ObservationAttackStrategy, validate_strategy

        strategy = ObservationAttackStrategy(sa=cycle_strategy.sa, omega=extra)
        assert validate_strategy(cycle_beta.plant, strategy) == []
        conv = convert_observation_based(cycle_beta.plant, strategy)
        assert set(conv.policy.entries) == {
            ("(2,z2)", "lambda", "(3,z3)"),
            ("(3,z3)", "mu", "(1,z5)"),
        }

    def test_containment_failure_names_witness(self, cycle_beta, cycle_strategy):
        broken_sa = Automaton(
            states={"z1", "z2"},
            alphabet=cycle_beta.alphabet.observable_restriction(),
            transitions={("z1", "alpha", "z2")},
            initial="z1",
        )
        from descat import ObservationAttackStrategy

        strategy = ObservationAttackStrategy(sa=broken_sa, omega=dict(cycle_strategy.omega))
        with pytest.raises(PreconditionError) as err:
            convert_observation_based(cycle_beta.plant, strategy)
        assert "witness observation" in str(err.value)

    def test_nondeterministic_context_reported_not_raised(self, cycle_beta, cycle_strategy):
        from descat import ObservationAttackStrategy, validate_strategy

        nondet = Automaton(
            states={"z1", "z2"},
            alphabet=cycle_beta.alphabet.observable_restriction(),
            transitions={("z1", "alpha", "z1"), ("z1", "alpha", "z2")},
            initial="z1",
        )
        strategy = ObservationAttackStrategy(sa=nondet, omega=dict(cycle_strategy.omega))
        problems = validate_strategy(cycle_beta.plant, strategy)
        assert any("deterministic" in p for p in problems)

    def test_converted_images_match_omega_images(self, cycle_beta, cycle_strategy):
        conv = convert_observation_based(cycle_beta.plant, cycle_strategy)
        for word in sorted(enumerate_language(cycle_beta.plant, 8)):
            via_policy = phi_enumerate(word, conv.product, conv.policy, depth=16)
            observation = natural_projection(word, cycle_beta.alphabet)
            via_omega = phi_omega(observation, cycle_strategy, cycle_beta.alphabet, depth=16)
            assert via_policy.strings == via_omega.strings

    def test_converted_images_match_omega_images_on_random_models(self):
        from conftest import random_strategy

        rng = random.Random(515)
        checked = 0
        while checked < 8:
            g, _ = random_model(rng, acyclic_attacks=True)
            strategy = random_strategy(rng, g)
            if strategy is None:
                continue
            checked += 1
            conv = convert_observation_based(g, strategy)
            for word in sorted(enumerate_language(g, 5)):
                via_policy = phi_enumerate(word, conv.product, conv.policy, depth=12)
                observation = natural_projection(word, g.alphabet)
                via_omega = phi_omega(observation, strategy, g.alphabet, depth=12)
                assert via_policy.strings == via_omega.strings
