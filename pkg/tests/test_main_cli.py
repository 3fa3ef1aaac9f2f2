import io
import logging

import pytest

import main
from conftest import FOUR_STATE_KRIPKE, FOUR_STATE_PREORDER
from settings import GUARD_OVERRIDE_ENV, PAIR_EMIT_MAX_STATES, SHELL_MAX_STATES, InvariantViolation
from tools.kripke_io_tool import parse_kripke, parse_result


def run_cli(*argv: str) -> tuple[int, str]:
    out = io.StringIO()
    code = main.main(list(argv), out=out)
    return code, out.getvalue()


@pytest.fixture
def four_state_file(write_file):
    return write_file("four_state.kripke", FOUR_STATE_KRIPKE)


class TestRun:
    def test_machine_output(self, four_state_file):
        code, text = run_cli("run", "--input", str(four_state_file), "--emit", "all")
        assert code == main.EXIT_OK
        parsed = parse_result(text)
        assert parsed.blocks == [(0,), (1,), (2,), (3,)]
        assert parsed.pairs == FOUR_STATE_PREORDER
        assert parsed.run_stats().algorithm == "sa"

    @pytest.mark.parametrize("algo", ["sa", "basic", "refined", "hhk", "schematic", "refined-hhk", "oracle", "shell"])
    def test_verify_every_algorithm(self, four_state_file, algo):
        code, text = run_cli("run", "--input", str(four_state_file), "--algo", algo, "--verify", "--emit", "partition")
        assert code == main.EXIT_OK
        assert "verify naive MATCH" in text.splitlines()
        assert "verify shell MATCH" in text.splitlines()

    def test_buggy_hhk_fails_verification(self, four_state_file):
        code, text = run_cli("run", "--input", str(four_state_file), "--algo", "hhk", "--buggy", "--verify")
        assert code == main.EXIT_MISMATCH
        assert "verify naive MISMATCH" in text

    def test_seeded_scheduler(self, four_state_file):
        plain = run_cli("run", "--input", str(four_state_file), "--algo", "hhk", "--emit", "partition,relation")
        seeded = run_cli("run", "--input", str(four_state_file), "--algo", "hhk", "--seed", "7", "--emit", "partition,relation")
        assert plain == seeded

    def test_debug_and_remove_init(self, four_state_file):
        code, _ = run_cli(
            "run", "--input", str(four_state_file), "--debug-invariants", "--remove-init", "algorithm", "--verify"
        )
        assert code == main.EXIT_OK

    def test_debug_dump_is_logged(self, four_state_file, caplog):
        caplog.set_level(logging.DEBUG, logger="solvers.sa_solver")
        code, _ = run_cli("run", "--input", str(four_state_file), "--debug-invariants")
        assert code == main.EXIT_OK
        messages = [r.getMessage() for r in caplog.records if r.name == "solvers.sa_solver"]
        assert len([m for m in messages if m.startswith("sa final block ")]) == 4
        # four reflexive entries plus state 1 below state 0
        assert len([m for m in messages if m.startswith("sa final rel ")]) == 5

    def test_text_output(self, four_state_file):
        code, text = run_cli("run", "--input", str(four_state_file), "--output", "text", "--emit", "partition,relation,preorder")
        lines = text.splitlines()
        assert code == main.EXIT_OK
        assert lines[0] == "[SYSTEM]: Loaded 4 states, 5 transitions"
        assert "Block 0: {0}" in lines
        assert "Block 1 is simulated by block 0" in lines
        assert "State 0 simulates state 1" in lines
        assert "State 1 simulates state 0" not in lines

    @pytest.mark.parametrize("output", ["machine", "text"])
    def test_preorder_section_is_gated_by_size(self, write_file, caplog, output):
        path = write_file("flat.kripke", f"states {PAIR_EMIT_MAX_STATES + 100}\n")
        code, text = run_cli("run", "--input", str(path), "--output", output, "--emit", "partition,preorder")
        assert code == main.EXIT_OK
        assert not [line for line in text.splitlines() if line.startswith(("pair ", "State "))]
        assert "preorder section skipped" in caplog.text

    def test_aut_input(self, write_file):
        path = write_file("m.aut", 'des (0,2,2)\n(0,"a",1)\n(1,"a",0)\n')
        code, text = run_cli("run", "--input", str(path), "--format", "aut", "--emit", "partition")
        assert code == main.EXIT_OK
        # two states and two transition states; the states of the cycle are equivalent
        assert parse_result(text).blocks == [(0, 1), (2, 3)]


class TestErrors:
    def test_transform_on_kripke_input(self, four_state_file, capsys):
        code, _ = run_cli("run", "--input", str(four_state_file), "--transform")
        assert code == main.EXIT_INPUT
        assert capsys.readouterr().err.startswith("error:")

    def test_parse_error(self, write_file, capsys):
        path = write_file("bad.aut", "des (0,1,2)\n(0,\"a\",5)\n")
        code, _ = run_cli("run", "--input", str(path), "--format", "aut")
        assert code == main.EXIT_INPUT
        assert "line 2" in capsys.readouterr().err

    def test_missing_file(self, tmp_path):
        code, _ = run_cli("run", "--input", str(tmp_path / "absent.kripke"))
        assert code == main.EXIT_INPUT

    def test_unknown_emit_section(self, four_state_file):
        code, _ = run_cli("run", "--input", str(four_state_file), "--emit", "partition,colours")
        assert code == main.EXIT_INPUT

    def test_buggy_needs_reference_solver(self, four_state_file):
        code, _ = run_cli("run", "--input", str(four_state_file), "--algo", "sa", "--buggy")
        assert code == main.EXIT_INPUT

    def test_shell_guard(self, write_file, monkeypatch):
        monkeypatch.delenv(GUARD_OVERRIDE_ENV, raising=False)
        n = SHELL_MAX_STATES + 1
        path = write_file("big.kripke", f"states {n}\n")
        code, _ = run_cli("run", "--input", str(path), "--algo", "shell")
        assert code == main.EXIT_GUARD

    def test_invariant_violation(self, four_state_file, monkeypatch):
        def broken(*args, **kwargs):
            raise InvariantViolation("stale counter")

        monkeypatch.setattr(main, "solve", broken)
        code, _ = run_cli("run", "--input", str(four_state_file))
        assert code == main.EXIT_INVARIANT


class TestGen:
    def test_stdout_is_deterministic(self):
        first = run_cli("gen", "--states", "6", "--labels", "2", "--density", "0.4", "--seed", "3")
        second = run_cli("gen", "--states", "6", "--labels", "2", "--density", "0.4", "--seed", "3")
        assert first == second
        ks = parse_kripke(first[1])
        assert ks.num_states == 6

    def test_out_file_matches_stdout(self, tmp_path):
        target = tmp_path / "g.kripke"
        _, text = run_cli("gen", "--states", "5", "--total", "--seed", "9")
        code, _ = run_cli("gen", "--states", "5", "--total", "--seed", "9", "--out", str(target))
        assert code == main.EXIT_OK
        assert target.read_text(encoding="utf-8") == text
        assert (parse_kripke(text).successors_count > 0).all()

    def test_invalid_density(self):
        code, _ = run_cli("gen", "--states", "5", "--density", "1.5")
        assert code == main.EXIT_INPUT
