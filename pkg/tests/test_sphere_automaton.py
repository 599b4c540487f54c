"""States, transitions, coloring, and canonical runs of the sphere automaton."""

import pytest

from nwtk.core import iter_token_tuples, nested
from nwtk.errors import InvalidState, LengthMismatch
from nwtk.sphere_automaton import (
    EMPTY_STATE,
    PLACEHOLDER_SPHERE,
    ExtendedSphere,
    SphereState,
    br_run_verify,
    canonical_run,
    chi_coloring,
    delta_allows,
    eta,
    state_predicates,
)
from nwtk.spheres import max_size_bound, sphere, sphere_iso

from fixtures import S2, word10, word16


def singleton_state(symbol, color=1):
    w = nested(S2, (symbol,))
    return SphereState([ExtendedSphere(sphere(w, 1, 0), 1, color)])


# ---------------------------------------------------------------------------
# state predicates

class TestStatePredicates:
    def test_empty_state(self):
        p = state_predicates(EMPTY_STATE)
        assert p.valid and p.final and not p.calling

    def test_singleton(self):
        p = state_predicates(singleton_state("a"))
        assert p.valid and p.final and not p.calling

    def test_color_collision_is_invalid(self):
        w = nested(S2, ("a~",) * 4)
        e1 = ExtendedSphere(sphere(w, 2, 1), 2, 1)
        e2 = ExtendedSphere(sphere(w, 3, 1), 2, 1)
        assert e1.core.key == e2.core.key
        state = SphereState([e1, e2])
        assert not state.valid

    def test_uncentered_member_is_invalid(self):
        w = nested(S2, ("a", "a~"))
        state = SphereState([ExtendedSphere(sphere(w, 2, 1), 1, 1)])
        assert not state.valid

    def test_mixed_labels_are_invalid(self):
        w = nested(S2, ("a", "a~"))
        state = SphereState(
            [
                ExtendedSphere(sphere(w, 1, 1), 1, 1),
                ExtendedSphere(sphere(w, 2, 1), 2, 2),
            ]
        )
        assert not state.valid

    def test_matched_call_state_is_calling(self):
        run = canonical_run(nested(S2, ("a", "a~")), 1)
        assert run[0].calling
        assert not run[1].calling


# ---------------------------------------------------------------------------
# transitions

class TestDeltaAllows:
    def test_initial_singleton_step(self):
        assert delta_allows(EMPTY_STATE, None, "a", singleton_state("a"))

    def test_empty_target_is_never_allowed(self):
        assert not delta_allows(EMPTY_STATE, None, "a", EMPTY_STATE)

    def test_label_must_match(self):
        assert not delta_allows(EMPTY_STATE, None, "b", singleton_state("a"))

    def test_depicted_matched_return_step(self):
        # reading position 5 (a~, matched to the call at 3) at radius 1
        w = word10()
        run = canonical_run(w, 1)
        assert len(run[3]) == 4 and len(run[4]) == 4
        assert delta_allows(run[3], run[2], "a~", run[4], S2)

    def test_matched_step_requires_return_symbol(self):
        w = word10()
        run = canonical_run(w, 1)
        assert not delta_allows(run[3], run[2], "a", run[4], S2)

    def test_invalid_state_raises(self):
        w = nested(S2, ("a", "a~"))
        bad = SphereState([ExtendedSphere(sphere(w, 2, 1), 1, 1)])
        with pytest.raises(InvalidState):
            delta_allows(EMPTY_STATE, None, "a", bad)


# ---------------------------------------------------------------------------
# overlap coloring

class TestChiColoring:
    def test_distinct_spheres_need_one_color(self):
        coloring = chi_coloring(nested(S2, ("a", "a~", "a", "a~")), 1)
        assert coloring.max_degree == 0
        assert coloring.num_colors == 1

    def test_overlapping_isomorphic_spheres_split(self):
        coloring = chi_coloring(nested(S2, ("a~",) * 4), 1)
        assert coloring.colors[2] != coloring.colors[3]

    def test_single_position(self):
        coloring = chi_coloring(nested(S2, ("a",)), 1)
        assert coloring.colors == {1: 1}

    def test_degree_and_color_bounds(self):
        for w in (word10(), word16()):
            for r in (0, 1, 2):
                coloring = chi_coloring(w, r)
                bound = 4 * max_size_bound(r) ** 2
                assert coloring.max_degree <= bound
                assert coloring.num_colors <= bound + 1


# ---------------------------------------------------------------------------
# canonical runs

class TestCanonicalRun:
    def test_two_member_state(self):
        run = canonical_run(nested(S2, ("a", "a~")), 1)
        state = run[0]
        assert len(state) == 2
        centered = [m for m in state.members if m.key[1] == 0]
        assert len(centered) == 1
        assert centered[0].core.center == 1
        assert all(m.active == 1 for m in state.members)

    def test_radius_zero_singleton(self):
        run = canonical_run(nested(S2, ("a",)), 0)
        assert len(run) == 1
        assert run[0].key == singleton_state("a").key

    def test_running_example_run_is_accepted(self):
        w = word10()
        run = canonical_run(w, 1)
        assert len(run) == 10
        for state in run:
            assert state.valid
            assert sum(1 for m in state.members if m.key[1] == 0) == 1
        assert br_run_verify(w, 1, run)

    def test_all_radii_on_both_fixture_words(self):
        for w in (word10(), word16()):
            for r in (0, 1, 2):
                assert br_run_verify(w, r, canonical_run(w, r))

    def test_eta_recovers_each_sphere(self):
        w = word16()
        run = canonical_run(w, 2)
        for i in w.positions():
            assert sphere_iso(eta(run[i - 1]), sphere(w, i, 2))

    def test_edge_walk_stays_inside_the_run(self):
        # every member's active-node edge leads to a position whose state
        # holds the same sphere re-pointed there
        for w in (word10(), nested(S2, ("b", "a", "a~", "b~"))):
            run = canonical_run(w, 1)
            for i in w.positions():
                for m in run[i - 1].members:
                    for j in (m.so, m.si, m.mo, m.mi):
                        if j is not None:
                            assert m.key_at(j) in run[j - 1].key


# ---------------------------------------------------------------------------
# run verification

class TestBrRunVerify:
    def test_final_condition(self):
        w = nested(S2, ("a",))
        good = canonical_run(w, 1)
        assert br_run_verify(w, 1, good)
        # a valid but non-final state: same label, active node has a successor
        w2 = nested(S2, ("a", "a"))
        nonfinal = SphereState([ExtendedSphere(sphere(w2, 1, 1), 1, 1)])
        assert nonfinal.valid and not nonfinal.final
        assert not br_run_verify(w, 1, [nonfinal])

    def test_color_collision_rejected(self):
        w = nested(S2, ("a~",) * 4)
        run = canonical_run(w, 1)
        e1 = ExtendedSphere(sphere(w, 2, 1), 2, 1)
        e2 = ExtendedSphere(sphere(w, 3, 1), 2, 1)
        mutated = run[:1] + [SphereState([e1, e2])] + run[2:]
        assert not br_run_verify(w, 1, mutated)

    def test_wrong_radius_rejected(self):
        w = nested(S2, ("a", "a~"))
        assert not br_run_verify(w, 2, canonical_run(w, 1))

    def test_empty_state_inside_run_rejected(self):
        w = nested(S2, ("a", "a~"))
        run = canonical_run(w, 1)
        assert not br_run_verify(w, 1, [run[0], EMPTY_STATE])

    def test_length_mismatch(self):
        w = nested(S2, ("a", "a~"))
        with pytest.raises(LengthMismatch):
            br_run_verify(w, 1, canonical_run(w, 1)[:1])

    def test_swapped_states_rejected(self):
        w = word10()
        run = canonical_run(w, 1)
        mutated = list(run)
        mutated[4], mutated[7] = mutated[7], mutated[4]
        assert not br_run_verify(w, 1, mutated)


# ---------------------------------------------------------------------------
# eta

class TestEta:
    def test_singleton(self):
        state = singleton_state("b~")
        assert eta(state) is state.members[0].core

    def test_empty_state_placeholder(self):
        assert eta(EMPTY_STATE) is PLACEHOLDER_SPHERE

    def test_invalid_state_raises(self):
        w = nested(S2, ("a", "a~"))
        bad = SphereState([ExtendedSphere(sphere(w, 2, 1), 1, 1)])
        with pytest.raises(InvalidState):
            eta(bad)


# ---------------------------------------------------------------------------
# small-corpus sweep (the full one is in the acceptance suite)

def test_small_corpus_runs_verify_and_project():
    for tokens in iter_token_tuples(S2, 3):
        w = nested(S2, tokens)
        for r in (0, 1, 2):
            run = canonical_run(w, r)
            assert br_run_verify(w, r, run), (tokens, r)
            for i in w.positions():
                assert eta(run[i - 1]).key == sphere(w, i, r).key
