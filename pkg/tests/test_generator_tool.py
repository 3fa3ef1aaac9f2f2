import numpy as np
import pytest
from pydantic import ValidationError

from conftest import sweep_spec
from solvers import sa
from tools.generator_tool import GenSpec, Totality, gadget, generate, replicate, scaling_family, write_generated
from tools.kripke_io_tool import parse_kripke


class TestGenerate:
    def test_same_seed_same_structure(self):
        spec = GenSpec(num_states=7, num_labels=3, edge_density=0.4, seed=11)
        a, b = generate(spec), generate(spec)
        assert np.array_equal(a.adjacency_matrix(), b.adjacency_matrix())
        assert [a.atoms_of(s) for s in range(7)] == [b.atoms_of(s) for s in range(7)]

    def test_density_extremes(self):
        assert generate(GenSpec(num_states=5, edge_density=0.0)).num_transitions == 0
        assert generate(GenSpec(num_states=5, edge_density=1.0)).num_transitions == 25

    def test_force_total(self):
        ks = generate(GenSpec(num_states=6, edge_density=0.0, totality=Totality.FORCE_TOTAL, seed=2))
        assert ks.num_transitions == 6
        assert (ks.successors_count == 1).all()

    def test_label_alphabet(self):
        ks = generate(GenSpec(num_states=40, num_labels=3, seed=5))
        atoms = set().union(*(ks.atoms_of(s) for s in range(40)))
        assert atoms <= {"p0", "p1", "p2"}

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"num_states": 0},
            {"num_states": 3, "num_labels": 0},
            {"num_states": 3, "edge_density": 1.5},
            {"num_states": 3, "edge_density": -0.1},
            {"num_states": 3, "totality": "sometimes"},
        ],
    )
    def test_invalid_spec(self, kwargs):
        with pytest.raises(ValidationError):
            GenSpec(**kwargs)

    def test_written_file_is_byte_identical(self, tmp_path):
        spec = GenSpec(num_states=9, num_labels=2, edge_density=0.25, seed=4)
        first, second = tmp_path / "a.kripke", tmp_path / "b.kripke"
        write_generated(spec, first)
        write_generated(spec, second)
        assert first.read_bytes() == second.read_bytes()
        assert parse_kripke(first.read_text(encoding="utf-8")).num_states == 9


class TestSweepParameters:
    def test_sweep_covers_the_grid(self):
        specs = [sweep_spec(seed) for seed in range(1000)]
        assert {s.num_states for s in specs} == set(range(1, 9))
        assert {s.num_labels for s in specs} == {1, 2, 3}
        assert {s.totality for s in specs} == set(Totality)
        assert min(s.edge_density for s in specs) == 0.05
        assert max(s.edge_density for s in specs) == 0.9


class TestScalingFamily:
    def test_gadget_shape(self):
        ks = gadget()
        assert (ks.num_states, ks.num_transitions) == (8, 12)
        assert (ks.successors_count > 0).all()

    def test_replicate_sizes(self):
        ks = replicate(gadget(), 3)
        assert (ks.num_states, ks.num_transitions) == (24, 36)
        assert sorted(ks.successors(8).tolist()) == [8, 11]
        assert ks.atoms_of(13) == gadget().atoms_of(5)

    def test_copies_must_be_positive(self):
        with pytest.raises(ValueError):
            replicate(gadget(), 0)

    def test_copies_are_simulation_equivalent(self):
        base = sa(gadget())
        res = sa(scaling_family(3))
        assert len(res.blocks) == len(base.blocks)
        owner = res.block_of
        assert all(owner[s] == owner[s + 8] == owner[s + 16] for s in range(8))
