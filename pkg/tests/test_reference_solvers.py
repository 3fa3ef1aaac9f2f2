import random

import numpy as np
import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from conftest import FOUR_STATE_BUGGY_SIM, FOUR_STATE_PREORDER, is_preorder, kripke_structures, preorder_pairs, sim_matrix
from model.kripke import KripkeStructure, LabelledTS, lts_to_kripke
from settings import GUARD_OVERRIDE_ENV, ORACLE_MAX_STATES, Algorithm, GuardError
from solvers import (
    HHKSolver,
    NaiveOracleSolver,
    RefinedSimilaritySolver,
    expand_preorder,
    hhk,
    labelled_simulation_oracle,
    naive_oracle,
    refined_similarity,
    schematic_similarity,
    shell_oracle,
    solve,
)
from solvers.reference_solver import initial_sim

PROPERTY_SETTINGS = settings(max_examples=150, deadline=None, suppress_health_check=[HealthCheck.too_slow])


@st.composite
def labelled_systems(draw: st.DrawFn, max_states: int = 5) -> LabelledTS:
    n = draw(st.integers(min_value=1, max_value=max_states))
    transitions = draw(
        st.lists(
            st.tuples(st.integers(0, n - 1), st.integers(0, 1), st.integers(0, n - 1)),
            max_size=3 * n,
            unique=True,
        )
    )
    return LabelledTS(n, tuple(transitions), ("a", "b"))


class TestFourState:
    def test_schematic(self, four_state):
        assert preorder_pairs(sim_matrix(schematic_similarity(four_state))) == FOUR_STATE_PREORDER

    @pytest.mark.parametrize("solver", [refined_similarity, hhk])
    def test_corrected_placement(self, four_state, solver):
        assert preorder_pairs(sim_matrix(solver(four_state))) == FOUR_STATE_PREORDER

    @pytest.mark.parametrize("solver", [refined_similarity, hhk])
    def test_buggy_placement_keeps_spurious_pair(self, four_state, solver):
        sim = solver(four_state, buggy=True)
        assert [set(s) for s in sim] == FOUR_STATE_BUGGY_SIM
        # state 1 wrongly appears to simulate state 0
        assert 1 in sim[0]

    def test_initial_sim_respects_deadlocks(self):
        ks = KripkeStructure.build(3, [(0, 1)], [("a",), ("a",), ("a",)])
        sim = initial_sim(ks)
        assert sim[0].tolist() == [True, False, False]
        assert sim[1].tolist() == [True, True, True]

    def test_oracles(self, four_state):
        assert preorder_pairs(naive_oracle(four_state)) == FOUR_STATE_PREORDER
        assert preorder_pairs(shell_oracle(four_state)) == FOUR_STATE_PREORDER


class TestAgreement:
    @PROPERTY_SETTINGS
    @given(ks=kripke_structures())
    def test_reference_solvers_match_oracle(self, ks):
        expected = naive_oracle(ks)
        assert np.array_equal(sim_matrix(schematic_similarity(ks)), expected)
        assert np.array_equal(sim_matrix(refined_similarity(ks, debug=True)), expected)
        assert np.array_equal(sim_matrix(hhk(ks, debug=True)), expected)

    @PROPERTY_SETTINGS
    @given(ks=kripke_structures(), seed=st.integers(min_value=0, max_value=2**16))
    def test_random_scheduling(self, ks, seed):
        expected = naive_oracle(ks)
        assert np.array_equal(sim_matrix(schematic_similarity(ks, rng=random.Random(seed))), expected)
        assert np.array_equal(sim_matrix(refined_similarity(ks, rng=random.Random(seed), debug=True)), expected)
        assert np.array_equal(sim_matrix(hhk(ks, rng=random.Random(seed), debug=True)), expected)

    @settings(max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow])
    @given(ks=kripke_structures(max_states=6))
    def test_shell_matches_naive(self, ks):
        assert np.array_equal(shell_oracle(ks), naive_oracle(ks))

    @PROPERTY_SETTINGS
    @given(ks=kripke_structures())
    def test_result_is_a_preorder(self, ks):
        assert is_preorder(naive_oracle(ks))


class TestNaiveOracle:
    @PROPERTY_SETTINGS
    @given(ks=kripke_structures())
    def test_round_bound(self, ks):
        solver = NaiveOracleSolver(ks)
        solver.run()
        assert 1 <= solver.iterations <= ks.num_states**2 + 1
        assert solver.stats.outer_iterations == solver.iterations

    def test_guard(self, monkeypatch):
        monkeypatch.delenv(GUARD_OVERRIDE_ENV, raising=False)
        ks = KripkeStructure.build(ORACLE_MAX_STATES + 1, [], [()] * (ORACLE_MAX_STATES + 1))
        with pytest.raises(GuardError):
            naive_oracle(ks)

    @PROPERTY_SETTINGS
    @given(lts=labelled_systems())
    def test_transform_preserves_labelled_simulation(self, lts):
        n = lts.num_states
        kripke = naive_oracle(lts_to_kripke(lts))
        assert np.array_equal(kripke[:n, :n], labelled_simulation_oracle(lts))

    def test_labelled_example(self):
        # 0 -a-> 1 against 2 -a-> 3 -b-> 4
        lts = LabelledTS(5, ((0, 0, 1), (2, 0, 3), (3, 1, 4)), ("a", "b"))
        sim = labelled_simulation_oracle(lts)
        assert sim[0, 2] and not sim[2, 0]


class TestStatistics:
    def test_hhk_counts(self, four_state):
        solver = HHKSolver(four_state)
        solver.run()
        assert solver.stats.algorithm == "hhk"
        assert solver.stats.outer_iterations >= 4
        assert solver.stats.rel_entries_cleared == initial_sim(four_state).sum() - solver.sim.sum() == 5

    def test_refined_counts(self, four_state):
        solver = RefinedSimilaritySolver(four_state)
        solver.run()
        assert solver.stats.rel_entries_cleared == 5
        assert solver.stats.remove_volume > 0

    def test_debug_is_off_in_buggy_mode(self, four_state):
        assert not HHKSolver(four_state, buggy=True, debug=True).debug
        assert RefinedSimilaritySolver(four_state, debug=True).debug


class TestDispatch:
    @pytest.mark.parametrize("algorithm", list(Algorithm))
    def test_every_algorithm_on_four_state(self, four_state, algorithm):
        res = solve(four_state, algorithm)
        assert preorder_pairs(expand_preorder(res)) == FOUR_STATE_PREORDER
        assert res.stats.final_blocks == len(res.blocks) == 4

    @pytest.mark.parametrize("algorithm", ["hhk", "refined-hhk"])
    def test_buggy_result(self, four_state, algorithm):
        res = solve(four_state, algorithm, buggy=True)
        # states 0 and 1 collapse into one block
        assert res.blocks == [(0, 1), (2,), (3,)]

    @pytest.mark.parametrize("algorithm", ["sa", "basic", "refined", "schematic", "oracle", "shell"])
    def test_buggy_rejected(self, four_state, algorithm):
        with pytest.raises(ValueError):
            solve(four_state, algorithm, buggy=True)
